"""Level-set rearrangement of radial Liouville profiles.

On the unit disk with weight ``e^psi = C r^(-2 alpha)`` the Dirichlet problem
``-Lap eta = 2 K0 e^psi e^eta``, ``eta = 0`` on the unit circle, becomes
regular after the substitution ``x = r^(1 - alpha)``:

    y'' + y'/x = -lam e^y,   lam = 2 K0 C / (1 - alpha)^2,

with ``y(x) = eta(r)``.  Radial solutions exist iff ``lam <= 2``; the
solver shoots on ``y(0)`` and returns the minimal branch.

From a profile we build the distribution ``mu(t)`` of the level sets in
the weighted area ``dtau = e^psi dx``, its inverse ``eta*(s)``,
``F(s) = 2 K0 int_0^s e^eta*`` and ``P+(s) = 2 gamma s F' - 2 gamma F + F^2/2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .errors import ShootingError
from .quad import NODES, W_GAUSS, W_KRONROD

SHOOT_BRACKET = (0.0, 20.0)
X_START = 1e-3


@dataclass
class RadialProfile:
    """Radial solution ``eta(r) = y(r^beta)`` on the unit disk.

    ``y`` and ``dy`` are the profile and its derivative in ``x = r^beta``;
    ``t_plus`` is the maximum ``eta(0)``.
    """

    alpha: float
    C: float
    K0: float
    y: Callable
    dy: Callable
    t_plus: float
    shoot_value: float = 0.0
    fold: bool = False
    diagnostics: dict = field(default_factory=dict)

    @property
    def beta(self) -> float:
        return 1.0 - self.alpha

    @property
    def lam(self) -> float:
        return 2.0 * self.K0 * self.C / self.beta**2

    @property
    def mu0(self) -> float:
        return np.pi * self.C / self.beta

    def eta(self, r):
        return self.y(np.asarray(r, dtype=float) ** self.beta)

    def deta(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.dy(r**self.beta) * self.beta * r ** (self.beta - 1.0)

    def scaled(self, factor: float) -> "RadialProfile":
        """Profile ``factor * eta``, no longer a solution unless ``factor = 1``."""
        y, dy = self.y, self.dy
        return RadialProfile(
            self.alpha, self.C, self.K0,
            lambda x: factor * y(x), lambda x: factor * dy(x),
            factor * self.t_plus, self.shoot_value, False, {"scaled_by": factor},
        )


def _rhs(x, Y, lam):
    y, p, z, q = Y
    e = lam * np.exp(y)
    return [p, -p / x - e, q, -q / x - e * z]


def _start(es: float) -> float:
    # keep the series start well inside the scale 1/sqrt(lam e^s)
    return X_START * min(1.0, 1.0 / np.sqrt(es))


def _shoot(s: float, lam: float, dense: bool = False):
    es = lam * np.exp(s)
    x0 = _start(es)
    a2 = -es / 4.0
    y0 = s + a2 * x0**2 + es**2 * x0**4 / 64.0
    p0 = 2 * a2 * x0 + es**2 * x0**3 / 16.0
    z0 = 1.0 + a2 * x0**2 + es**2 * x0**4 / 32.0
    q0 = 2 * a2 * x0 + es**2 * x0**3 / 8.0
    sol = solve_ivp(_rhs, (x0, 1.0), [y0, p0, z0, q0], method="DOP853", rtol=1e-13, atol=1e-15,
                    args=(lam,), dense_output=dense)
    if not sol.success:
        raise ShootingError(f"integration failed at s={s}: {sol.message}")
    return sol


def solve_radial_liouville(K0: float, alpha: float, C: float, fold_tol: float = 1e-10) -> RadialProfile:
    """Minimal radial solution of the weighted Liouville Dirichlet problem.

    Raises :class:`ShootingError` with bracket diagnostics when no solution
    exists on the shooting bracket.
    """
    if K0 < 0:
        raise ValueError("K0 must be nonnegative")
    if not alpha < 1:
        raise ValueError("alpha must be below 1")
    if not C > 0:
        raise ValueError("C must be positive")
    beta = 1.0 - alpha
    lam = 2.0 * K0 * C / beta**2
    if lam == 0.0:
        zero = lambda x: np.zeros(np.shape(x))  # noqa: E731
        return RadialProfile(alpha, C, K0, zero, zero, 0.0, 0.0, False, {"lam": 0.0})

    lo, hi = SHOOT_BRACKET

    def G(s):
        return _shoot(s, lam).y[0, -1]

    def Gp(s):
        return _shoot(s, lam).y[2, -1]

    gp_lo, gp_hi = Gp(lo), Gp(hi)
    if gp_lo <= 0:
        s_max = lo
    elif gp_hi > 0:
        s_max = hi
    else:
        s_max = brentq(Gp, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    g_max = G(s_max)
    diag = {"lam": lam, "bracket": [lo, hi], "s_max": s_max, "boundary_value_max": g_max}
    if g_max < -fold_tol:
        raise ShootingError(
            f"no radial solution: boundary value y(1; s) peaks at {g_max:.6g} < 0 "
            f"(s = {s_max:.6g}, bracket [{lo}, {hi}], lam = {lam:.6g}; solutions need lam <= 2)"
        )
    fold = g_max <= fold_tol
    s = s_max if fold else brentq(G, lo, s_max, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    sol = _shoot(s, lam, dense=True)
    es = lam * np.exp(s)
    x0 = _start(es)

    def y(x):
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape)
        small = x < x0
        xs = x[small]
        out[small] = s - es * xs**2 / 4.0 + es**2 * xs**4 / 64.0
        if np.any(~small):
            out[~small] = sol.sol(np.minimum(x[~small], 1.0))[0]
        return out

    def dy(x):
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape)
        small = x < x0
        xs = x[small]
        out[small] = -es * xs / 2.0 + es**2 * xs**3 / 16.0
        if np.any(~small):
            out[~small] = sol.sol(np.minimum(x[~small], 1.0))[1]
        return out

    diag.update({"shoot_value": s, "fold": fold, "boundary_residual": float(sol.y[0, -1])})
    return RadialProfile(alpha, C, K0, y, dy, s, s, fold, diag)


def closed_form_profile(K0: float, alpha: float, C: float):
    """Closed-form minimal radial solution as a function of ``r`` (None if none exists)."""
    beta = 1.0 - alpha
    b = K0 * C / (4.0 * beta**2)
    if b == 0:
        return lambda r: np.zeros(np.shape(r))
    if b > 0.25:
        return None
    tau = (1.0 - np.sqrt(max(0.0, 1.0 - 4.0 * b))) / (2.0 * b)
    return lambda r: np.log(tau**2) - 2.0 * np.log1p(b * tau**2 * np.asarray(r, dtype=float) ** (2 * beta))


def _invert(p: RadialProfile, t: np.ndarray) -> np.ndarray:
    """``x`` in ``[0, 1]`` with ``y(x) = t`` by vectorized bisection (``y`` decreasing)."""
    lo = np.zeros(t.shape)
    hi = np.ones(t.shape)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        above = p.y(mid) > t
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return 0.5 * (lo + hi)


def distribution(p: RadialProfile, t_grid: Sequence[float]) -> np.ndarray:
    """``mu(t)``: weighted area of ``{eta > t}``, equal to ``pi C r(t)^(2 beta) / beta``."""
    t = np.asarray(t_grid, dtype=float)
    slack = 1e-12 * max(1.0, p.t_plus)
    if np.any(t < -slack) or np.any(t > p.t_plus + slack):
        raise ValueError("levels must lie in [0, t_plus]")
    if p.t_plus == 0.0:
        return np.where(t <= 0, p.mu0, 0.0)
    x = _invert(p, np.clip(t, 0.0, p.t_plus))
    x = np.where(t >= p.t_plus, 0.0, np.where(t <= 0, 1.0, x))
    return p.mu0 * x**2


@dataclass
class RearrangementData:
    s_grid: np.ndarray
    eta_star: np.ndarray
    mu0: float
    F: np.ndarray
    F_prime: np.ndarray
    P_plus: np.ndarray
    gamma: float
    K0: float
    alpha: float
    C: float
    M: float
    L2: float
    deta_star: np.ndarray
    F_error: float = 0.0

    def table(self) -> np.ndarray:
        return np.column_stack([self.s_grid, self.eta_star, self.F, self.P_plus])


def default_s_grid(mu0: float, n: int = 2001) -> np.ndarray:
    """Grid on ``[0, mu0]``: uniform core with geometric refinement at both ends."""
    m = max((n - 2) // 4, 1)
    core = n - 2 - 2 * m
    left = mu0 * np.logspace(-10, -2, m, endpoint=False)
    mid = np.linspace(1e-2 * mu0, (1 - 1e-2) * mu0, core)
    return np.concatenate([[0.0], left, mid, mu0 - left[::-1], [mu0]])


def _kronrod(p: RadialProfile, a: float, b: float, panels: int = 64) -> float:
    """``int_a^b e^y x dx`` by composite K15."""
    edges = np.linspace(a, b, panels + 1)
    mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * np.diff(edges)
    xs = mid[:, None] + half[:, None] * NODES[None, :]
    fx = np.exp(p.y(xs.ravel()).reshape(xs.shape)) * xs
    return float(np.sum(half * (fx @ W_KRONROD)))


def _x_of_s(p: RadialProfile, s: np.ndarray) -> np.ndarray:
    return np.sqrt(np.clip(s / p.mu0, 0.0, 1.0))


def rearrangement(
    p: RadialProfile, s_grid: Optional[Sequence[float]] = None, n: int = 2001, gamma: Optional[float] = None
) -> RearrangementData:
    """``eta*``, ``F`` and ``P+`` on a grid of weighted areas ``s in [0, mu0]``.

    ``gamma`` defaults to ``2 pi - 2 pi alpha``, the value for the cone
    weight whose curvature atom is ``2 pi alpha``.  For ``alpha < 0`` the
    positive variation vanishes and ``gamma = 2 pi`` may be passed instead,
    which makes the chain strict.
    """
    mu0 = p.mu0
    s = default_s_grid(mu0, n) if s_grid is None else np.asarray(s_grid, dtype=float)
    if np.any(s < 0) or np.any(s > mu0 * (1 + 1e-14)) or np.any(np.diff(s) <= 0):
        raise ValueError("s grid must be increasing within [0, mu0]")
    x = _x_of_s(p, s)
    eta_star = p.y(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        deta_star = np.where(x > 0, p.dy(x) * p.beta / (2.0 * np.pi * p.C * x), -np.inf if p.K0 > 0 else 0.0)
    # F(s) = (4 pi K0 C / beta) int_0^x(s) e^y x dx, cumulative G7/K15 per grid cell
    a, b = x[:-1], x[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    xx = mid[:, None] + half[:, None] * NODES[None, :]
    fx = np.exp(p.y(xx.ravel()).reshape(xx.shape)) * xx
    k = half * (fx @ W_KRONROD)
    g = half * (fx @ W_GAUSS)
    pref = 4.0 * np.pi * p.K0 * p.C / p.beta
    head = _kronrod(p, 0.0, x[0]) if x[0] > 0 else 0.0
    F = pref * (head + np.concatenate([[0.0], np.cumsum(k)]))
    F_err = pref * float(np.sum(np.abs(k - g)))
    # total weighted area of the unit disk under e^eta
    full = head + float(np.sum(k)) if x[-1] >= 1.0 else _kronrod(p, 0.0, 1.0)
    M = (2.0 * np.pi * p.C / p.beta) * full
    F_prime = 2.0 * p.K0 * np.exp(eta_star)
    if gamma is None:
        gamma = 2.0 * np.pi - 2.0 * np.pi * p.alpha
    P = 2.0 * gamma * s * F_prime - 2.0 * gamma * F + 0.5 * F**2
    return RearrangementData(
        s_grid=s, eta_star=eta_star, mu0=mu0, F=F, F_prime=F_prime, P_plus=P, gamma=gamma,
        K0=p.K0, alpha=p.alpha, C=p.C, M=M, L2=4.0 * np.pi**2 * p.C, deta_star=deta_star, F_error=F_err,
    )


@dataclass
class ChainVerdict:
    checks: dict
    passed: bool
    lipschitz_constant: float
    alexandrov_margin: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def verify_chain(d: RearrangementData, tol: float = 1e-6) -> ChainVerdict:
    """Check the rearrangement inequalities on the grid of ``d``.

    (i) the squared weighted length of each level circle is at least
    ``2 gamma s`` and at most ``F / (-eta*')``; (ii) ``P+`` is
    non-decreasing; (iii) ``L^2 >= 2 gamma mu0 >= (2 gamma - K0 M) M``;
    (iv) ``eta*`` has finite difference quotients on the middle of the range.
    """
    s, g = d.s_grid, d.gamma
    beta = 1.0 - d.alpha
    ell2 = 4.0 * np.pi * beta * s
    checks = {}

    def record(name, margins, scale):
        worst = float(np.min(margins)) if np.size(margins) else 0.0
        checks[name] = {"passed": bool(worst >= -tol * max(1.0, scale)), "worst_margin": worst}

    interior = (s > 0) & (s < d.mu0)
    record("huber_levels", (ell2 - 2 * g * s)[interior], float(np.max(ell2)))
    if d.K0 > 0:
        with np.errstate(divide="ignore", invalid="ignore"):
            cs = d.F / (-d.deta_star) - ell2
        m = interior & np.isfinite(cs)
        record("cauchy_schwarz", cs[m], float(np.max(ell2)))
    P = d.P_plus
    record("P_plus_monotone", np.diff(P), float(np.max(np.abs(P))) if P.size else 1.0)
    record("final_length", [d.L2 - 2 * g * d.mu0], d.L2)
    record("final_area", [2 * g * d.mu0 - (2 * g - d.K0 * d.M) * d.M], 2 * g * d.mu0)
    a, b = 0.1 * d.mu0, 0.9 * d.mu0
    m = (s >= a) & (s <= b)
    q = np.abs(np.diff(d.eta_star[m]) / np.diff(s[m])) if np.count_nonzero(m) > 1 else np.array([0.0])
    cbar = float(np.max(q))
    checks["lipschitz_interior"] = {"passed": bool(np.isfinite(cbar)), "worst_margin": cbar}
    alex = d.L2 - (4 * np.pi - 4 * np.pi * d.alpha - d.K0 * d.M) * d.M
    return ChainVerdict(checks, all(c["passed"] for c in checks.values()), cbar, float(alex))
