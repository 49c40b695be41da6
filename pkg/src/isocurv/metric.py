"""Conformal factors ``e^rho |dz|^2`` and their curvature decompositions.

Four representations are supported:

* :class:`PiecewiseRadial` -- ``rho`` given piecewise as a function of ``|z|``;
  the worked example metrics live here.
* :class:`SphericalCone` -- the constant curvature metric with one conical
  point at the origin.
* :class:`Potential` -- harmonic polynomial plus logarithmic potential of a
  finite atomic measure plus a regular part ``u``.
* :class:`Flat`.

Every metric can be split as ``rho = f + u`` where ``f`` carries the harmonic
part and the atoms, and ``u`` solves ``-Lap u = 2 K e^rho`` with a density
``K``.  Radial metrics put the log term ``c log|z|`` into ``f``, which
corresponds to an atom of weight ``-2 pi c`` at the origin.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import NotRadialError, SingularPointError
from .measure import Atom, SignedAtomicMeasure, require_no_cusps

TWO_PI = 2.0 * np.pi

Field = Callable[[np.ndarray], np.ndarray]


def _asz(z) -> np.ndarray:
    return np.asarray(z, dtype=complex)


def _scalar_out(z, out):
    return float(out) if np.ndim(z) == 0 else out


# ---------------------------------------------------------------- polynomials


@dataclass(frozen=True)
class HarmonicPolynomial:
    """Real polynomial ``sum c[i, j] x^i y^j`` with vanishing Laplacian.

    The Laplacian is checked on the coefficients at construction.
    """

    coeffs: np.ndarray = field(default_factory=lambda: np.zeros((1, 1)))

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        if c.ndim != 2:
            raise ValueError("coefficients must form a 2-D array")
        object.__setattr__(self, "coeffs", c)
        lap = self.laplacian_coeffs()
        scale = max(1.0, float(np.abs(c).max(initial=0.0)))
        if np.abs(lap).max(initial=0.0) > 1e-12 * scale:
            raise ValueError("polynomial is not harmonic (nonzero Laplacian coefficients)")

    @classmethod
    def zero(cls) -> "HarmonicPolynomial":
        return cls(np.zeros((1, 1)))

    @classmethod
    def constant(cls, c: float) -> "HarmonicPolynomial":
        return cls(np.array([[float(c)]]))

    @classmethod
    def from_complex(cls, a: Sequence[complex]) -> "HarmonicPolynomial":
        """``Re sum_k a_k z^k`` expanded in monomials ``x^i y^j``."""
        n = len(a)
        c = np.zeros((max(n, 1), max(n, 1)))
        for k, ak in enumerate(a):
            ak = complex(ak)
            # z^k = sum_j C(k,j) x^(k-j) (i y)^j
            for j in range(k + 1):
                term = comb(k, j) * ak * (1j ** j)
                c[k - j, j] += term.real
        return cls(c)

    def laplacian_coeffs(self) -> np.ndarray:
        c = self.coeffs
        lap = np.zeros_like(c)
        n, m = c.shape
        for i in range(n):
            for j in range(m):
                if i >= 2:
                    lap[i - 2, j] += i * (i - 1) * c[i, j]
                if j >= 2:
                    lap[i, j - 2] += j * (j - 1) * c[i, j]
        return lap

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def __add__(self, other: "HarmonicPolynomial") -> "HarmonicPolynomial":
        a, b = self.coeffs, other.coeffs
        n = max(a.shape[0], b.shape[0])
        m = max(a.shape[1], b.shape[1])
        out = np.zeros((n, m))
        out[: a.shape[0], : a.shape[1]] += a
        out[: b.shape[0], : b.shape[1]] += b
        return HarmonicPolynomial(out)

    def __neg__(self) -> "HarmonicPolynomial":
        return HarmonicPolynomial(-self.coeffs)

    def __call__(self, z):
        zz = _asz(z)
        x, y = zz.real, zz.imag
        # Horner in x with Horner in y for each row
        out = np.zeros(np.shape(zz))
        for i in range(self.coeffs.shape[0] - 1, -1, -1):
            row = np.zeros(np.shape(zz))
            for j in range(self.coeffs.shape[1] - 1, -1, -1):
                row = row * y + self.coeffs[i, j]
            out = out * x + row
        return _scalar_out(z, out)


# ---------------------------------------------------------------- hints


@dataclass(frozen=True)
class QuadHints:
    """Singular structure exposed to the integrators.

    ``center`` is the symmetry center of a radial metric (None otherwise),
    ``center_weight`` the atom weight carried there, ``breaks`` the radii of
    circles about ``center`` where the expression changes, and ``atoms`` the
    off-center atoms.
    """

    center: Optional[complex] = None
    center_weight: float = 0.0
    singular_center: bool = False
    breaks: tuple = ()
    atoms: SignedAtomicMeasure = field(default_factory=SignedAtomicMeasure)


# ---------------------------------------------------------------- decomposition


@dataclass(frozen=True)
class Decomposition:
    """Split ``rho = f + u`` with ``f = h + sum (w/2pi) log(1/|z-p|)``."""

    f_atoms: SignedAtomicMeasure
    f_harmonic: HarmonicPolynomial
    u: Field
    K: Field

    def f(self, z):
        zz = _asz(z)
        out = np.asarray(self.f_harmonic(zz), dtype=float).copy()
        for a in self.f_atoms:
            d = np.abs(zz - a.point)
            if np.any(d == 0):
                raise SingularPointError(f"f evaluated at atom {a.point}")
            out = out - (a.weight / TWO_PI) * np.log(d)
        return _scalar_out(z, out)

    def rho(self, z):
        return self.f(z) + self.u(z)

    def k_s(self) -> SignedAtomicMeasure:
        """Singular part of the curvature measure (half the atom weights)."""
        return self.f_atoms.scaled(0.5)

    def gauge_shift(self, h: HarmonicPolynomial) -> "Decomposition":
        """Move a harmonic function from ``u`` into ``f``: ``{u - h, f + h}``."""
        u0 = self.u

        def u(z):
            return u0(z) - h(z)

        return Decomposition(self.f_atoms, self.f_harmonic + h, u, self.K)


# ---------------------------------------------------------------- base


class Metric:
    """Abstract conformal factor."""

    kind = "metric"

    def log_factor(self, z):
        raise NotImplementedError

    def factor(self, z):
        return np.exp(self.log_factor(z))

    def curvature(self, z):
        raise NotImplementedError

    @property
    def atoms(self) -> SignedAtomicMeasure:
        raise NotImplementedError

    def decomposition(self) -> Decomposition:
        raise NotImplementedError

    def quad_hints(self) -> QuadHints:
        raise NotImplementedError

    @property
    def breakpoints(self) -> tuple:
        return self.quad_hints().breaks

    def describe(self) -> dict:
        return {"kind": self.kind}


def eval_conformal_factor(g: Metric, z):
    """``e^rho(z)``; raises :class:`SingularPointError` at atoms."""
    return g.factor(z)


# ---------------------------------------------------------------- radial


class RadialMetric(Metric):
    """Metric depending on ``|z|`` only, symmetric about the origin.

    Subclasses provide ``rho_r`` and ``K_r`` as functions of the radius and
    the logarithmic orders ``log_order`` (``rho ~ c log r`` at 0) and
    ``log_order_inf`` (``rho ~ c log r`` at infinity).
    """

    log_order: float = 0.0
    log_order_inf: Optional[float] = None
    breaks: tuple = ()
    r_max: float = np.inf

    def rho_r(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def K_r(self, r: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def u_r(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return self.rho_r(r) - self.log_order * np.log(r)

    def _check_radius(self, r: np.ndarray):
        if np.any(r > self.r_max * (1 + 1e-14)):
            raise ValueError(f"radius beyond chart limit {self.r_max}")

    def log_factor(self, z):
        r = np.abs(_asz(z))
        self._check_radius(r)
        zero = r == 0
        if np.any(zero) and self.log_order != 0.0:
            raise SingularPointError("evaluation at the conical point z=0")
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.asarray(self.rho_r(r), dtype=float)
        if np.any(zero) and not np.all(np.isfinite(out[zero] if out.ndim else out)):
            raise SingularPointError("conformal factor undefined at z=0")
        return _scalar_out(z, out)

    def curvature(self, z):
        r = np.abs(_asz(z))
        self._check_radius(r)
        with np.errstate(divide="ignore"):
            out = np.asarray(self.K_r(r), dtype=float)
        return _scalar_out(z, out)

    @property
    def center_weight(self) -> float:
        return -TWO_PI * self.log_order

    @property
    def atoms(self) -> SignedAtomicMeasure:
        w = self.center_weight
        return SignedAtomicMeasure((Atom(0j, w),)) if w != 0.0 else SignedAtomicMeasure()

    def decomposition(self) -> Decomposition:
        def u(z):
            r = np.abs(_asz(z))
            if np.any(r == 0) and self.log_order != 0.0:
                raise SingularPointError("u evaluated at the conical point")
            return _scalar_out(z, np.asarray(self.u_r(r), dtype=float))

        return Decomposition(self.atoms, HarmonicPolynomial.zero(), u, self.curvature)

    def quad_hints(self) -> QuadHints:
        return QuadHints(center=0j, center_weight=self.center_weight, singular_center=True, breaks=tuple(self.breaks))

    def to_piecewise(self) -> "PiecewiseRadial":
        return PiecewiseRadial(
            breaks=tuple(self.breaks),
            rho=[self.rho_r] * (len(self.breaks) + 1),
            K=[self.K_r] * (len(self.breaks) + 1),
            log_order=self.log_order,
            log_order_inf=self.log_order_inf,
            r_max=self.r_max,
            name=self.kind,
            params=self.describe(),
            u=[self.u_r] * (len(self.breaks) + 1),
        )


class PiecewiseRadial(RadialMetric):
    """Radial metric given by closed-form pieces between breakpoints.

    Parameters
    ----------
    breaks : increasing interior radii; piece ``i`` covers
        ``[breaks[i-1], breaks[i])`` with the convention that a radius equal
        to a breakpoint uses the outer piece.
    rho, K : one callable of the radius per piece.
    log_order : ``c`` with ``rho = c log r + bounded`` near 0.
    log_order_inf : ``c`` with ``rho = c log r + bounded`` near infinity.
    u : optional per-piece regular parts; defaults to ``rho - c log r``.
    """

    kind = "piecewise_radial"

    def __init__(
        self,
        breaks: Sequence[float],
        rho: Sequence[Callable],
        K: Sequence[Callable],
        log_order: float = 0.0,
        log_order_inf: Optional[float] = None,
        r_max: float = np.inf,
        name: str = "piecewise_radial",
        params: Optional[dict] = None,
        u: Optional[Sequence[Callable]] = None,
        continuity_rtol: float = 1e-10,
    ):
        self.breaks = tuple(float(b) for b in breaks)
        if any(b <= 0 for b in self.breaks) or any(np.diff(self.breaks) <= 0):
            raise ValueError("breakpoints must be positive and increasing")
        n = len(self.breaks) + 1
        if len(rho) != n or len(K) != n:
            raise ValueError(f"need {n} pieces for {n - 1} breakpoints")
        if u is not None and len(u) != n:
            raise ValueError("u needs one piece per interval")
        self._rho = tuple(rho)
        self._K = tuple(K)
        self._u = tuple(u) if u is not None else None
        self.log_order = float(log_order)
        self.log_order_inf = None if log_order_inf is None else float(log_order_inf)
        self.r_max = float(r_max)
        self.name = name
        self.params = dict(params or {})
        for i, b in enumerate(self.breaks):
            left = float(np.exp(self._rho[i](np.float64(b))))
            right = float(np.exp(self._rho[i + 1](np.float64(b))))
            if abs(left - right) > continuity_rtol * max(abs(left), abs(right)):
                raise ValueError(f"conformal factor discontinuous at r={b}: {left} vs {right}")

    def _piecewise(self, funcs, r):
        r = np.asarray(r, dtype=float)
        idx = np.searchsorted(np.asarray(self.breaks), r, side="right")
        out = np.empty(r.shape)
        for i, fn in enumerate(funcs):
            m = idx == i
            if np.any(m):
                out[m] = fn(r[m])
        return out

    def rho_r(self, r):
        return self._piecewise(self._rho, r)

    def K_r(self, r):
        return self._piecewise(self._K, r)

    def u_r(self, r):
        if self._u is None:
            return super().u_r(r)
        return self._piecewise(self._u, r)

    def describe(self) -> dict:
        return {"kind": "preset", "name": self.name, **self.params}

    def to_piecewise(self) -> "PiecewiseRadial":
        return self

    def map_rho(self, fn: Callable, K: Optional[Sequence[Callable]] = None, name: Optional[str] = None) -> "PiecewiseRadial":
        """New radial metric with ``rho -> fn(r, rho)`` piecewise."""
        rho = [(lambda r, p=p: fn(r, p(r))) for p in self._rho]
        return PiecewiseRadial(
            self.breaks,
            rho,
            K if K is not None else self._K,
            log_order=self.log_order,
            log_order_inf=self.log_order_inf,
            r_max=self.r_max,
            name=name or self.name,
            params=self.params,
        )


class SphericalCone(RadialMetric):
    """Constant curvature ``K0`` metric with a conical point of order ``alpha``.

    ``rho(w) = -2 alpha log|w| + v(w)`` with
    ``e^v = tau0^2 / (1 + K0 tau0^2 |w|^(2(1-alpha)) / (4 (1-alpha)^2))^2``.
    """

    kind = "cone"

    def __init__(self, K0: float, alpha: float, tau0: float):
        if not alpha < 1:
            raise ValueError("cone order must satisfy alpha < 1")
        if tau0 == 0:
            raise ValueError("tau0 must be nonzero")
        if K0 < 0:
            raise ValueError("K0 must be nonnegative")
        self.K0 = float(K0)
        self.alpha = float(alpha)
        self.tau0 = float(tau0)
        self.beta = 1.0 - self.alpha
        self.log_order = -2.0 * self.alpha
        self.log_order_inf = -2.0 * self.alpha - (4.0 * self.beta if self.K0 > 0 else 0.0)
        self.breaks = ()
        self.r_max = np.inf

    def v_r(self, r):
        r = np.asarray(r, dtype=float)
        t2 = self.tau0**2
        b = self.K0 * t2 / (4.0 * self.beta**2)
        return np.log(t2) - 2.0 * np.log1p(b * r ** (2.0 * self.beta))

    def rho_r(self, r):
        r = np.asarray(r, dtype=float)
        if self.alpha == 0:
            return self.v_r(r)
        with np.errstate(divide="ignore"):
            return self.log_order * np.log(r) + self.v_r(r)

    def u_r(self, r):
        return self.v_r(r)

    def K_r(self, r):
        return np.full(np.shape(r), self.K0)

    def describe(self) -> dict:
        return {"kind": "cone", "K0": self.K0, "alpha": self.alpha, "tau0": self.tau0}


class Flat(RadialMetric):
    kind = "flat"

    def __init__(self):
        self.log_order = 0.0
        self.log_order_inf = 0.0
        self.breaks = ()
        self.r_max = np.inf

    def rho_r(self, r):
        return np.zeros(np.shape(r))

    def K_r(self, r):
        return np.zeros(np.shape(r))

    def u_r(self, r):
        return np.zeros(np.shape(r))

    def quad_hints(self) -> QuadHints:
        return QuadHints()


def spherical_cone(K0: float, alpha: float, tau0: float) -> SphericalCone:
    return SphericalCone(K0, alpha, tau0)


# ---------------------------------------------------------------- potential


class Potential(Metric):
    """``rho = h + sum (w_i / 2pi) log(1/|z - p_i|) + u``.

    Parameters
    ----------
    harmonic : harmonic polynomial ``h``.
    atoms : signed atomic measure of the potential part.
    u : regular part (callable on complex arrays); ``None`` means ``u = 0``.
    K : curvature density with ``-Lap u = 2 K e^rho``; required when ``u``
        is given, zero otherwise.
    """

    kind = "potential"

    def __init__(
        self,
        harmonic: Optional[HarmonicPolynomial] = None,
        atoms: Optional[SignedAtomicMeasure] = None,
        u: Optional[Field] = None,
        K: Optional[Field] = None,
        label: str = "potential",
    ):
        self.harmonic = harmonic if harmonic is not None else HarmonicPolynomial.zero()
        self._atoms = atoms if atoms is not None else SignedAtomicMeasure()
        if u is not None and K is None:
            raise ValueError("a regular part u needs its curvature density K")
        self.u = u
        self.K = K
        self.label = label

    @property
    def atoms(self) -> SignedAtomicMeasure:
        return self._atoms

    def f(self, z):
        zz = _asz(z)
        out = np.asarray(self.harmonic(zz), dtype=float).copy()
        for a in self._atoms:
            d = np.abs(zz - a.point)
            if np.any(d == 0):
                raise SingularPointError(f"evaluation at atom {a.point}")
            out = out - (a.weight / TWO_PI) * np.log(d)
        return out

    def log_factor(self, z):
        out = self.f(z)
        if self.u is not None:
            out = out + np.asarray(self.u(_asz(z)), dtype=float)
        return _scalar_out(z, out)

    def curvature(self, z):
        if self.K is None:
            return _scalar_out(z, np.zeros(np.shape(z)))
        return _scalar_out(z, np.asarray(self.K(_asz(z)), dtype=float))

    def decomposition(self) -> Decomposition:
        zero = lambda z: _scalar_out(z, np.zeros(np.shape(z)))  # noqa: E731
        return Decomposition(self._atoms, self.harmonic, self.u or zero, self.curvature)

    def quad_hints(self) -> QuadHints:
        return QuadHints(atoms=self._atoms)

    def describe(self) -> dict:
        return {
            "kind": "potential",
            "label": self.label,
            "atoms": [[a.point.real, a.point.imag, a.weight] for a in self._atoms],
            "harmonic": self.harmonic.coeffs.tolist(),
            "regular_part": self.u is not None,
        }


# ---------------------------------------------------------------- transforms


def decompose(g: Metric, gauge: Optional[HarmonicPolynomial] = None) -> Decomposition:
    """Curvature decomposition ``rho = f + u``; rejects cusps."""
    require_no_cusps(g.atoms)
    d = g.decomposition()
    return d.gauge_shift(gauge) if gauge is not None else d


def pullback_inversion(g: Metric) -> PiecewiseRadial:
    """Metric in the chart ``w = 1/z``: ``rho1(w) = rho(1/w) - 4 log|w|``."""
    if not isinstance(g, RadialMetric):
        raise NotRadialError("chart inversion needs a radially symmetric metric")
    if np.isfinite(g.r_max):
        raise ValueError("chart inversion needs a metric defined on the whole plane")
    c_inf = g.log_order_inf
    if c_inf is None:
        r0 = 1e6
        c_inf = float((g.rho_r(np.array([2 * r0])) - g.rho_r(np.array([r0])))[0] / np.log(2.0))
    src = g.to_piecewise()
    breaks = tuple(1.0 / b for b in reversed(src.breaks))
    rho = [(lambda s, p=p: p(1.0 / s) - 4.0 * np.log(s)) for p in reversed(src._rho)]
    K = [(lambda s, k=k: k(1.0 / s)) for k in reversed(src._K)]
    return PiecewiseRadial(
        breaks,
        rho,
        K,
        log_order=-c_inf - 4.0,
        log_order_inf=-g.log_order - 4.0,
        name=f"{getattr(g, 'name', g.kind)}_inverted",
        params={"inverted": True},
    )


def scaled(g: Metric, lam: float) -> Metric:
    """Metric ``lam^2 e^rho |dz|^2``; curvature density scales by ``lam^-2``."""
    shift = 2.0 * np.log(abs(lam))
    s2 = lam**2
    if isinstance(g, Potential):
        return Potential(
            g.harmonic + HarmonicPolynomial.constant(shift),
            g.atoms,
            g.u,
            (lambda z: g.curvature(z) / s2) if g.K is not None else None,
            label=f"{g.label}_scaled",
        )
    if isinstance(g, RadialMetric):
        p = g.to_piecewise()
        K = [(lambda r, k=k: k(r) / s2) for k in p._K]
        out = p.map_rho(lambda r, rho: rho + shift, K=K, name=f"{p.name}_scaled")
        return out
    raise TypeError(f"cannot scale {type(g).__name__}")


# ---------------------------------------------------------------- presets


def example1(a: float) -> PiecewiseRadial:
    """``e^rho = (log(e/|z|))^(-a)`` on the punctured unit disk.

    Curvature ``K = -(a/2) |z|^-2 (log(e/|z|))^-(2-a)``, no atoms.
    """
    a = float(a)
    if not a < 1 or a == 0:
        raise ValueError("example1 needs a < 1 and a != 0")

    def L(r):
        return 1.0 - np.log(r)

    return PiecewiseRadial(
        (),
        [lambda r: -a * np.log(L(r))],
        [lambda r: -(a / 2.0) * r**-2.0 * L(r) ** (-(2.0 - a))],
        log_order=0.0,
        r_max=1.0,
        name="example1",
        params={"a": a},
    )


def _check_orders(*alphas):
    for al in alphas:
        if not al > -1:
            raise ValueError("cone orders must exceed -1")


def example2(alpha1: float, alpha2: float) -> PiecewiseRadial:
    """Two glued football caps with cone orders ``alpha2`` at 0 and ``alpha1`` at infinity.

    Curvature 1 inside the unit circle and
    ``((1 + alpha1) / (1 + alpha2))^2`` outside.
    """
    a1, a2 = float(alpha1), float(alpha2)
    _check_orders(a1, a2)
    c = 4.0 * (1.0 + a2) ** 2
    sigma = (1.0 + a1) ** 2 / (1.0 + a2) ** 2

    def rho_in(r):
        return np.log(c) + 2 * a2 * np.log(r) - 2 * np.log1p(r ** (2 * (1 + a2)))

    def rho_out(r):
        return np.log(c) + 2 * a1 * np.log(r) - 2 * np.log1p(r ** (2 * (1 + a1)))

    def u_in(r):
        return np.log(c) - 2 * np.log1p(r ** (2 * (1 + a2)))

    def u_out(r):
        return np.log(c) + 2 * (a1 - a2) * np.log(r) - 2 * np.log1p(r ** (2 * (1 + a1)))

    return PiecewiseRadial(
        (1.0,),
        [rho_in, rho_out],
        [lambda r: np.ones(np.shape(r)), lambda r: np.full(np.shape(r), sigma)],
        log_order=2 * a2,
        log_order_inf=-2 * a1 - 4.0,
        name="example2",
        params={"alpha1": a1, "alpha2": a2},
        u=[u_in, u_out],
    )


def example2_chart1(alpha1: float, alpha2: float) -> PiecewiseRadial:
    """Example 2 written in the chart ``w = 1/z`` with its own split ``f1 + u1``."""
    a1, a2 = float(alpha1), float(alpha2)
    _check_orders(a1, a2)
    c = 4.0 * (1.0 + a2) ** 2
    sigma = (1.0 + a1) ** 2 / (1.0 + a2) ** 2

    def u_in(s):
        return np.log(c) - 2 * np.log1p(s ** (2 * (1 + a1)))

    def u_out(s):
        return np.log(c) + 2 * (a2 - a1) * np.log(s) - 2 * np.log1p(s ** (2 * (1 + a2)))

    return PiecewiseRadial(
        (1.0,),
        [lambda s: 2 * a1 * np.log(s) + u_in(s), lambda s: 2 * a1 * np.log(s) + u_out(s)],
        [lambda s: np.full(np.shape(s), sigma), lambda s: np.ones(np.shape(s))],
        log_order=2 * a1,
        log_order_inf=-2 * a2 - 4.0,
        name="example2_chart1",
        params={"alpha1": a1, "alpha2": a2},
        u=[u_in, u_out],
    )


def example3_chart2() -> PiecewiseRadial:
    """Metric with curvature ``-|z|^-3/2 / 4`` inside and ``|z|^-3 / 32`` outside the unit circle."""
    return PiecewiseRadial(
        (1.0,),
        [
            lambda r: np.log(2.0) - 2 * np.log(2.0 - np.sqrt(r)),
            lambda r: np.log(8.0) + 1.5 * np.log(r) - 2 * np.log1p(np.sqrt(r)),
        ],
        [lambda r: -0.25 * r**-1.5, lambda r: r**-3.0 / 32.0],
        log_order=0.0,
        log_order_inf=0.5,
        name="example3_chart2",
    )


def example3_chart1() -> PiecewiseRadial:
    """The same surface near its point at infinity; carries a cusp of weight ``9 pi``."""
    return PiecewiseRadial(
        (1.0,),
        [
            lambda s: np.log(8.0) - 4.5 * np.log(s) - 2 * np.log1p(np.sqrt(s)),
            lambda s: np.log(2.0) - 3.0 * np.log(s) - 2 * np.log(2 * np.sqrt(s) - 1.0),
        ],
        [lambda s: s**3.0 / 32.0, lambda s: -0.25 * s**1.5],
        log_order=-4.5,
        log_order_inf=-4.0,
        name="example3_chart1",
    )


# ---------------------------------------------------------------- glued metrics


def _liouville_piece(R0: float, rho0: float, slope: float, k: float):
    """Radial constant-curvature ``k`` solution matching ``rho`` and ``r rho'`` at ``R0``.

    Returns ``(rho, r_drho, order_inf)``.  For ``k > 0`` the piece is the
    pullback of the round metric under ``z -> sqrt(c) z^m``.
    """
    S = slope + 2.0
    if k == 0.0:
        return (
            lambda r: rho0 + slope * np.log(r / R0),
            lambda r: np.full(np.shape(r), slope),
            slope,
        )
    A = np.exp(rho0) * k * R0**2 / 4.0
    m = np.sqrt(4.0 * A + S**2 / 4.0)
    # T = (m - S/2) / (m + S/2) with (m - S/2)(m + S/2) = 4A, formed without cancellation
    if S >= 0:
        den = m + S / 2.0
        num = 4.0 * A / den
    else:
        num = m - S / 2.0
        den = 4.0 * A / num
    T = num / den
    const = np.log(4.0 * m**2 * np.exp(rho0)) - 2.0 * np.log(den)

    def rho(r):
        x = np.asarray(r, dtype=float) / R0
        return const + (2 * m - 2) * np.log(x) - 2.0 * np.log1p(T * x ** (2 * m))

    def r_drho(r):
        y = T * (np.asarray(r, dtype=float) / R0) ** (2 * m)
        return (2 * m - 2) - 4 * m * y / (1 + y)

    return rho, r_drho, -2.0 * m - 2.0


def glued_radial(alpha: float, tau0: float, radii: Sequence[float], curvatures: Sequence[float]) -> PiecewiseRadial:
    """Radial metric with piecewise-constant curvature and a cone at 0.

    The innermost piece is the cone of order ``alpha`` with curvature
    ``curvatures[0]``; across each radius in ``radii`` the next
    constant-curvature piece continues ``rho`` to first order, so the
    curvature measure has no mass on the gluing circles.
    """
    radii = tuple(float(r) for r in radii)
    ks = tuple(float(k) for k in curvatures)
    if len(ks) != len(radii) + 1:
        raise ValueError("need one curvature per piece")
    if any(k < 0 for k in ks):
        raise ValueError("curvatures must be nonnegative")
    cone = SphericalCone(ks[0], alpha, tau0)
    beta = cone.beta

    def cone_r_drho(r):
        y = ks[0] * tau0**2 / (4 * beta**2) * np.asarray(r, dtype=float) ** (2 * beta)
        return -2 * alpha - 4 * beta * y / (1 + y)

    rho, us = [cone.rho_r], [cone.u_r]
    K = [lambda r, k=ks[0]: np.full(np.shape(r), k)]
    cur, cur_d, order_inf = cone.rho_r, cone_r_drho, cone.log_order_inf
    for R0, k in zip(radii, ks[1:]):
        R = np.float64(R0)
        cur, cur_d, order_inf = _liouville_piece(R0, float(cur(R)), float(cur_d(R)), k)
        rho.append(cur)
        us.append(lambda r, f=cur: f(r) + 2.0 * alpha * np.log(r))
        K.append(lambda r, k=k: np.full(np.shape(r), k))
    return PiecewiseRadial(
        radii, rho, K, log_order=-2.0 * alpha, log_order_inf=order_inf, name="glued_radial",
        params={"alpha": alpha, "tau0": tau0, "radii": list(radii), "curvatures": list(ks)}, u=us,
    )


class Composite(Metric):
    """Off-center potential atoms on top of a radial metric.

    ``rho = f + rho_rad`` where ``f`` is a harmonic polynomial plus
    logarithmic potentials.  The curvature density is
    ``K_rad e^(-f)`` since ``f`` is harmonic away from its atoms.
    """

    kind = "composite"

    def __init__(self, radial: RadialMetric, potential: Potential):
        if potential.u is not None:
            raise ValueError("the potential part must have u = 0")
        if np.isfinite(radial.r_max):
            raise ValueError("the radial part must be defined on the whole plane")
        if any(a.point == 0 for a in potential.atoms):
            raise ValueError("off-center atoms may not sit at the radial center")
        self.radial = radial
        self.potential = potential

    @property
    def atoms(self) -> SignedAtomicMeasure:
        return self.potential.atoms + self.radial.atoms

    def log_factor(self, z):
        zz = _asz(z)
        out = np.asarray(self.potential.f(zz), dtype=float) + np.asarray(self.radial.log_factor(zz), dtype=float)
        return _scalar_out(z, out)

    def curvature(self, z):
        zz = _asz(z)
        out = np.asarray(self.radial.curvature(zz), dtype=float) * np.exp(-np.asarray(self.potential.f(zz), dtype=float))
        return _scalar_out(z, out)

    def decomposition(self) -> Decomposition:
        rd = self.radial.decomposition()
        return Decomposition(self.atoms, self.potential.harmonic, rd.u, self.curvature)

    def quad_hints(self) -> QuadHints:
        h = self.radial.quad_hints()
        return QuadHints(h.center, h.center_weight, h.singular_center, h.breaks, self.potential.atoms)

    def describe(self) -> dict:
        return {"kind": "composite", "radial": self.radial.describe(), "potential": self.potential.describe()}



PRESETS = {
    "example1": example1,
    "example2": example2,
    "example2_chart1": example2_chart1,
    "example3_chart2": example3_chart2,
    "example3_chart1": example3_chart1,
}
