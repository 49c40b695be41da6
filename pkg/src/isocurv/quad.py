"""Singularity-aware quadrature for lengths, areas and weighted areas.

One dimensional integrals use adaptive Gauss-Kronrod (G7/K15) with the
difference between the two rules as error estimate.  Two dimensional
integrals decompose the domain into polar patches about a pole: the angle
range is cut at every direction where the boundary structure changes
(polygon vertices, circle tangencies, crossings with breakpoint circles),
so inside each sector the region between consecutive boundary crossings is
an exact curvilinear quadrilateral.  Each patch is mapped from the unit
square and integrated with an adaptive tensor G7/K15 rule.

Near a pole carrying an atom of weight ``beta`` the radius is mapped as
``r = R v^(1 / (1 - beta / 4pi))``, which turns ``|z|^(-beta / 2pi) dA`` into
a bounded integrand.  Off-center atoms of potential metrics get a smooth
partition of unity bump and their own polar patch.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .domain import AMBIGUOUS, INSIDE, Circle, PlanarDomain, Polygon
from .errors import AtomOnBoundaryError, CuspError
from .measure import FOUR_PI, SignedAtomicMeasure
from .metric import Metric, QuadHints

EPS = np.finfo(float).eps

# Kronrod 15 / Gauss 7 nodes and weights on [-1, 1]
_XK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ]
)
_WK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)
NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
W_KRONROD = np.concatenate([_WK[:-1], _WK[::-1]])
W_GAUSS = np.zeros(15)
W_GAUSS[1:7:2] = _WG[:3]
W_GAUSS[7] = _WG[3]
W_GAUSS[9:14:2] = _WG[2::-1]


@dataclass
class QuadResult:
    value: float
    error_estimate: float
    cells_used: int = 0
    singular_patches: int = 0
    converged: bool = True

    def __add__(self, other: "QuadResult") -> "QuadResult":
        return QuadResult(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            self.cells_used + other.cells_used,
            self.singular_patches + other.singular_patches,
            self.converged and other.converged,
        )

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "cells_used": self.cells_used,
            "singular_patches": self.singular_patches,
            "converged": self.converged,
        }


def _mark(err: np.ndarray, floor: np.ndarray, cap: int) -> np.ndarray:
    """Indices of the cells carrying the largest half of the reducible error."""
    cand = np.flatnonzero(err > floor)
    if cand.size == 0:
        return cand
    order = cand[np.argsort(err[cand])[::-1]]
    cum = np.cumsum(err[order])
    k = int(np.searchsorted(cum, 0.5 * cum[-1])) + 1
    return order[: min(k, cap)]


# ---------------------------------------------------------------- 1-D


def gauss_kronrod(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rtol: float = 1e-10,
    atol: float = 1e-14,
    points: Sequence[float] = (),
    max_intervals: int = 20000,
) -> QuadResult:
    """Adaptive G7/K15 quadrature of a vectorized ``f`` over ``[a, b]``.

    ``points`` are interior breakpoints where ``f`` may have kinks.
    """
    cuts = np.unique(np.concatenate([[a, b], [p for p in points if a < p < b]]))
    lo, hi = cuts[:-1], cuts[1:]

    def evaluate(lo, hi):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        x = mid[:, None] + half[:, None] * NODES[None, :]
        fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
        k = half * (fx @ W_KRONROD)
        g = half * (fx @ W_GAUSS)
        return k, np.abs(k - g), half * (np.abs(fx) @ W_KRONROD)

    val, err, absval = evaluate(lo, hi)
    converged = True
    while True:
        total, etot = float(np.sum(val)), float(np.sum(err))
        if etot <= max(atol, rtol * abs(total)):
            break
        idx = _mark(err, 50 * EPS * absval, 4096)
        if idx.size == 0:
            break
        if lo.size + idx.size > max_intervals:
            converged = False
            break
        keep = np.ones(lo.size, dtype=bool)
        keep[idx] = False
        m = 0.5 * (lo[idx] + hi[idx])
        nlo = np.concatenate([lo[idx], m])
        nhi = np.concatenate([m, hi[idx]])
        nv, ne, na = evaluate(nlo, nhi)
        lo, hi = np.concatenate([lo[keep], nlo]), np.concatenate([hi[keep], nhi])
        val, err, absval = np.concatenate([val[keep], nv]), np.concatenate([err[keep], ne]), np.concatenate([absval[keep], na])
    return QuadResult(float(np.sum(val)), float(np.sum(err)), int(lo.size), 0, converged)


# ---------------------------------------------------------------- 2-D engine


class Patch:
    """Map from the unit square onto a region, with its own integrand."""

    singular = False

    def map(self, u: np.ndarray, v: np.ndarray):
        raise NotImplementedError

    fn: Callable = None
    initial = (1, 1)


def _smoothstep(u):
    return u * u * (3.0 - 2.0 * u), 6.0 * u * (1.0 - u)


class PolarPatch(Patch):
    """Region ``theta in [ta, tb]``, ``lo(theta) <= r <= hi(theta)`` about ``center``.

    ``rmap`` selects the radial substitution: ``"linear"``, ``"power"``
    (``r = hi v^(1/q)``, pole at ``lo = 0``), ``"exp"`` (``r = hi e^(1 - 1/v)``)
    or ``"geometric"`` (``r = lo (hi/lo)^v``).
    """

    def __init__(self, center, ta, tb, lo, hi, fn, rmap="linear", q=1.0, graded_angle=False):
        self.center = complex(center)
        self.ta, self.tb = float(ta), float(tb)
        self.lo, self.hi = lo, hi
        self.fn = fn
        self.rmap = rmap
        self.q = float(q)
        self.graded_angle = graded_angle
        self.singular = rmap in ("power", "exp")
        self.initial = (max(1, int(np.ceil((self.tb - self.ta) / (np.pi / 4)))), 1)

    def map(self, u, v):
        dt = self.tb - self.ta
        if self.graded_angle:
            s, ds = _smoothstep(u)
        else:
            s, ds = u, np.ones_like(u)
        th = self.ta + dt * s
        dth = dt * ds
        lo = self.lo(th)
        hi = self.hi(th)
        if self.rmap == "power":
            r = hi * v ** (1.0 / self.q)
            with np.errstate(divide="ignore", invalid="ignore"):
                dr = np.where(v > 0, r / (self.q * v), 0.0)
        elif self.rmap == "exp":
            with np.errstate(over="ignore", divide="ignore"):
                r = hi * np.exp(1.0 - 1.0 / v)
                dr = np.where(v > 0, r / v**2, 0.0)
        elif self.rmap == "geometric":
            ratio = np.log(hi / lo)
            r = lo * np.exp(ratio * v)
            dr = r * ratio
        else:
            r = lo + (hi - lo) * v
            dr = hi - lo
        z = self.center + r * np.exp(1j * th)
        return z, r * dr * dth


def cubature(
    patches: Sequence[Patch],
    rtol: float = 1e-8,
    atol: float = 1e-14,
    max_cells: int = 60000,
) -> QuadResult:
    """Adaptive tensor G7/K15 over a list of patches sharing one error budget."""
    if not patches:
        return QuadResult(0.0, 0.0, 0, 0, True)
    X = 0.5 * (NODES + 1.0)
    WKK = np.outer(W_KRONROD, W_KRONROD)
    WGG = np.outer(W_GAUSS, W_GAUSS)
    WGK = np.outer(W_GAUSS, W_KRONROD)
    WKG = np.outer(W_KRONROD, W_GAUSS)

    def evaluate(pid, u0, u1, v0, v1):
        n = pid.size
        out = np.zeros((5, n))
        for p in np.unique(pid):
            m = pid == p
            patch = patches[p]
            a0, a1, b0, b1 = u0[m], u1[m], v0[m], v1[m]
            U = a0[:, None] + (a1 - a0)[:, None] * X[None, :]
            V = b0[:, None] + (b1 - b0)[:, None] * X[None, :]
            UU = np.broadcast_to(U[:, :, None], (U.shape[0], 15, 15))
            VV = np.broadcast_to(V[:, None, :], (U.shape[0], 15, 15))
            z, jac = patch.map(UU, VV)
            jac = np.broadcast_to(jac, z.shape)
            good = jac != 0
            if patch.singular:
                # radii below the resolution of the pole location round onto the pole
                good &= z != patch.center
            F = np.zeros(z.shape)
            if np.any(good):
                F[good] = np.asarray(patch.fn(z[good]), dtype=float) * jac[good]
            if not np.all(np.isfinite(F)):
                raise FloatingPointError("non-finite integrand value inside a quadrature cell")
            scale = 0.25 * (a1 - a0) * (b1 - b0)
            kk = np.einsum("nij,ij->n", F, WKK) * scale
            gg = np.einsum("nij,ij->n", F, WGG) * scale
            gk = np.einsum("nij,ij->n", F, WGK) * scale
            kg = np.einsum("nij,ij->n", F, WKG) * scale
            ab = np.einsum("nij,ij->n", np.abs(F), WKK) * scale
            out[:, m] = np.stack([kk, np.abs(kk - gg), np.abs(kk - gk), np.abs(kk - kg), ab])
        return out

    pid, u0, u1, v0, v1 = [], [], [], [], []
    for i, p in enumerate(patches):
        nu, nv = p.initial
        gu = np.linspace(0.0, 1.0, nu + 1)
        gv = np.linspace(0.0, 1.0, nv + 1)
        for a, b in zip(gu[:-1], gu[1:]):
            for c, d in zip(gv[:-1], gv[1:]):
                pid.append(i)
                u0.append(a)
                u1.append(b)
                v0.append(c)
                v1.append(d)
    pid = np.array(pid)
    u0, u1, v0, v1 = map(np.array, (u0, u1, v0, v1))
    val, err, eu, ev, ab = evaluate(pid, u0, u1, v0, v1)
    converged = True
    while True:
        total, etot = float(np.sum(val)), float(np.sum(err))
        if etot <= max(atol, rtol * abs(total)):
            break
        idx = _mark(err, 200 * EPS * ab, 2048)
        if idx.size == 0:
            break
        if pid.size + idx.size > max_cells:
            converged = False
            break
        keep = np.ones(pid.size, dtype=bool)
        keep[idx] = False
        su = eu[idx] >= ev[idx]
        a0, a1, b0, b1, pp = u0[idx], u1[idx], v0[idx], v1[idx], pid[idx]
        um = 0.5 * (a0 + a1)
        vm = 0.5 * (b0 + b1)
        # first and second child of every split cell
        c1 = (np.where(su, a0, a0), np.where(su, um, a1), np.where(su, b0, b0), np.where(su, b1, vm))
        c2 = (np.where(su, um, a0), np.where(su, a1, a1), np.where(su, b0, vm), np.where(su, b1, b1))
        npid = np.concatenate([pp, pp])
        nu0, nu1, nv0, nv1 = (np.concatenate([x, y]) for x, y in zip(c1, c2))
        res = evaluate(npid, nu0, nu1, nv0, nv1)
        pid = np.concatenate([pid[keep], npid])
        u0, u1 = np.concatenate([u0[keep], nu0]), np.concatenate([u1[keep], nu1])
        v0, v1 = np.concatenate([v0[keep], nv0]), np.concatenate([v1[keep], nv1])
        val, err, eu, ev, ab = (np.concatenate([x[keep], y]) for x, y in zip((val, err, eu, ev, ab), res))
    n_sing = sum(1 for p in patches if p.singular)
    return QuadResult(float(np.sum(val)), float(np.sum(err)), int(pid.size), n_sing, converged)


# ---------------------------------------------------------------- geometry


def _wrap(t):
    return np.mod(t, 2 * np.pi)


def _circle_hits_circle(c0: complex, r0: float, q: complex, R: float):
    """Intersection points of circles ``|z - c0| = r0`` and ``|z - q| = R``."""
    d = abs(q - c0)
    if d == 0 or d > r0 + R or d < abs(r0 - R):
        return []
    a = (r0**2 - R**2 + d**2) / (2 * d)
    h2 = r0**2 - a**2
    h = np.sqrt(max(h2, 0.0))
    e = (q - c0) / d
    base = c0 + a * e
    return [base + 1j * e * h, base - 1j * e * h]


def _segment_hits_circle(a: complex, b: complex, c0: complex, r0: float):
    d = b - a
    f = a - c0
    A = abs(d) ** 2
    B = 2 * (f.real * d.real + f.imag * d.imag)
    C = abs(f) ** 2 - r0**2
    disc = B * B - 4 * A * C
    if disc < 0:
        return []
    s = np.sqrt(disc)
    return [a + t * d for t in ((-B - s) / (2 * A), (-B + s) / (2 * A)) if 0 <= t <= 1]


@dataclass
class _Crossing:
    fn: Callable
    kind: str


def _crossings(c: complex, curve, theta: float) -> list[_Crossing]:
    """Crossing radius functions of the ray from ``c`` at angle ``theta`` with ``curve``."""
    e = np.exp(1j * theta)
    out = []
    if isinstance(curve, Circle):
        rel = curve.center - c
        R = curve.radius
        k = abs(rel) ** 2 - R**2

        def p(t):
            return (rel * np.exp(-1j * np.asarray(t))).real

        pm = p(theta)
        disc = pm * pm - k
        if disc <= 0:
            return out
        s = np.sqrt(disc)
        for sign in (-1.0, 1.0):
            if pm + sign * s > 0:
                out.append(_Crossing(lambda t, sign=sign: p(t) + sign * np.sqrt(np.maximum(p(t) ** 2 - k, 0.0)), "circle"))
    else:
        a, b = curve.edges
        for ai, bi in zip(a, b):
            d = bi - ai
            den = e.real * d.imag - e.imag * d.real
            if den == 0:
                continue
            w = ai - c
            r = (w.real * d.imag - w.imag * d.real) / den
            t = (w.real * e.imag - w.imag * e.real) / den
            if r > 0 and 0 <= t <= 1:
                def fn(th, w=w, d=d):
                    ee = np.exp(1j * np.asarray(th))
                    return (w.real * d.imag - w.imag * d.real) / (ee.real * d.imag - ee.imag * d.real)

                out.append(_Crossing(fn, "edge"))
    return out


def _critical_angles(c: complex, d: PlanarDomain, breaks: Sequence[float]):
    angles, tangents = [], []
    for curve in d.curves:
        if isinstance(curve, Polygon):
            for v in curve.vertices:
                if abs(v - c) > 0:
                    angles.append(np.angle(v - c))
            for rb in breaks:
                for ai, bi in zip(*curve.edges):
                    angles += [np.angle(p - c) for p in _segment_hits_circle(ai, bi, c, rb)]
        else:
            rel = curve.center - c
            dist = abs(rel)
            if dist >= curve.radius * (1 - 1e-14) and dist > 0:
                half = np.arcsin(min(1.0, curve.radius / dist))
                for s in (-1, 1):
                    tangents.append(np.angle(rel) + s * half)
            for rb in breaks:
                angles += [np.angle(p - c) for p in _circle_hits_circle(c, rb, curve.center, curve.radius)]
    return angles, tangents


def _polar_patches(
    d: PlanarDomain,
    c: complex,
    fn: Callable,
    breaks: Sequence[float] = (),
    singular: bool = False,
    pole_weight: float = 0.0,
) -> list[PolarPatch]:
    angles, tangents = _critical_angles(c, d, breaks)
    allang = np.sort(_wrap(np.array(angles + tangents, dtype=float)))
    tang = _wrap(np.array(tangents, dtype=float))
    if allang.size:
        keep = np.concatenate([[True], np.diff(allang) > 1e-13])
        allang = allang[keep]
        if allang.size > 1 and allang[-1] - allang[0] > 2 * np.pi - 1e-13:
            allang = allang[:-1]
        sectors = list(zip(allang, np.concatenate([allang[1:], [allang[0] + 2 * np.pi]])))
    else:
        sectors = [(0.0, 2 * np.pi)]
    scale = max(d.diameter, abs(c - _domain_anchor(d)), 1e-300)
    q = 1.0 - pole_weight / FOUR_PI
    patches = []

    def is_tangent(t):
        return tang.size > 0 and np.min(np.abs(np.angle(np.exp(1j * (tang - t))))) < 1e-12

    for ta, tb in sectors:
        if tb - ta < 1e-13:
            continue
        tm = 0.5 * (ta + tb)
        cross = [_Crossing(lambda t: np.zeros(np.shape(t)), "pole")]
        for curve in d.curves:
            cross += _crossings(c, curve, tm)
        for rb in breaks:
            cross.append(_Crossing(lambda t, rb=rb: np.full(np.shape(t), rb), "break"))
        rm = np.array([float(x.fn(np.array(tm))) for x in cross])
        order = np.argsort(rm)
        graded = is_tangent(ta) or is_tangent(tb)
        for i0, i1 in zip(order[:-1], order[1:]):
            r0, r1 = rm[i0], rm[i1]
            if r1 - r0 <= 1e-13 * scale:
                continue
            mid = c + 0.5 * (r0 + r1) * np.exp(1j * tm)
            if d.locate(np.array([mid]))[0] != INSIDE:
                continue
            lo, hi = cross[i0], cross[i1]
            if lo.kind == "pole" and singular:
                rmap = "power" if pole_weight != 0.0 else "exp"
            elif singular and lo.kind != "pole":
                rmap = "geometric"
            else:
                rmap = "linear"
            patches.append(PolarPatch(c, ta, tb, lo.fn, hi.fn, fn, rmap=rmap, q=q, graded_angle=graded))
    return patches


def _domain_anchor(d: PlanarDomain) -> complex:
    o = d.outer
    return o.center if isinstance(o, Circle) else complex(np.mean(o.vertices))


def _reference_pole(d: PlanarDomain) -> complex:
    """A pole for the polar decomposition away from the boundary."""
    c = _domain_anchor(d)
    diam = d.diameter
    if float(d.boundary_distance(np.array([c]))[0]) > 1e-3 * diam:
        return c
    cands = c + 0.05 * diam * np.exp(1j * (0.37 + np.arange(16) * np.pi / 8))
    return complex(cands[np.argmax(d.boundary_distance(cands))])


# ---------------------------------------------------------------- bumps


def _bump_profile(s):
    """C-infinity profile: 1 for s <= 1/2, 0 for s >= 1."""
    x = np.clip(2.0 - 2.0 * np.asarray(s, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        ea = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        eb = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return ea / (ea + eb)


@dataclass
class IntegrationPlan:
    pole: complex
    singular: bool
    pole_weight: float
    breaks: tuple
    bumps: list = field(default_factory=list)  # (point, radius, weight)


def check_atoms(atoms: SignedAtomicMeasure, d: PlanarDomain) -> None:
    """Reject cusps in the closure of ``d`` and atoms on its boundary."""
    if not len(atoms):
        return
    pts = atoms.points
    dist = d.boundary_distance(pts)
    tol = max(d.band, 1e-10 * d.diameter)
    for a, dd in zip(atoms, dist):
        if dd <= tol:
            raise AtomOnBoundaryError(f"atom at {a.point} lies on the domain boundary")
    loc = d.locate(pts)
    for a, l in zip(atoms, loc):
        if l == INSIDE and a.weight >= FOUR_PI:
            raise CuspError(f"cusp of mass {a.weight:.6g} at {a.point} inside the domain")


def _bumps(hints: QuadHints, d: PlanarDomain) -> list:
    out = []
    inside = [a for a, l in zip(hints.atoms, d.locate(hints.atoms.points) if len(hints.atoms) else []) if l == INSIDE]
    for a in inside:
        dist_b = float(d.boundary_distance(np.array([a.point]))[0])
        near = [abs(b.point - a.point) for b in hints.atoms if b.point != a.point]
        if hints.center is not None:
            rc = abs(a.point - hints.center)
            near += [rc] + [abs(rc - b) for b in hints.breaks]
        rp = min([0.25 * dist_b, 0.1] + [0.25 * o for o in near])
        out.append((a.point, rp, a.weight))
    return out


def plan_for(hints: QuadHints, d: PlanarDomain) -> IntegrationPlan:
    check_atoms(hints.atoms, d)
    if hints.center is not None:
        c = hints.center
        if hints.center_weight != 0.0:
            check_atoms(SignedAtomicMeasure(((c, hints.center_weight),)), d)
        plan = IntegrationPlan(c, hints.singular_center, hints.center_weight, tuple(hints.breaks))
    else:
        plan = IntegrationPlan(_reference_pole(d), False, 0.0, ())
    plan.bumps = _bumps(hints, d)
    return plan


def integrate_plan(
    fn: Callable[[np.ndarray], np.ndarray],
    d: PlanarDomain,
    plan: IntegrationPlan,
    rtol: float = 1e-8,
    atol: float = 1e-14,
    max_cells: int = 60000,
) -> QuadResult:
    """Integrate ``fn`` (a function of complex points) over ``d`` following ``plan``."""
    if plan.bumps:
        bumps = plan.bumps

        def weight(z):
            w = np.ones(z.shape)
            for p, rp, _ in bumps:
                w = w - _bump_profile(np.abs(z - p) / rp)
            return w

        def main_fn(z):
            w = weight(z)
            out = np.zeros(z.shape)
            m = w > 0
            if np.any(m):
                out[m] = fn(z[m]) * w[m]
            return out

        patches = _polar_patches(d, plan.pole, main_fn, plan.breaks, plan.singular, plan.pole_weight)
        for p, rp, wt in bumps:
            def bfn(z, p=p, rp=rp):
                return fn(z) * _bump_profile(np.abs(z - p) / rp)

            bump = PolarPatch(
                p, 0.0, 2 * np.pi, lambda t: np.zeros(np.shape(t)), lambda t, rp=rp: np.full(np.shape(t), rp),
                bfn, rmap="power", q=1.0 - wt / FOUR_PI,
            )
            patches.append(bump)
    else:
        patches = _polar_patches(d, plan.pole, fn, plan.breaks, plan.singular, plan.pole_weight)
    return cubature(patches, rtol=rtol, atol=atol, max_cells=max_cells)


# ---------------------------------------------------------------- public


def _log_factor_fn(g: Metric):
    def fn(z):
        return np.asarray(g.log_factor(z), dtype=float)

    return fn


def area(g: Metric, d: PlanarDomain, rtol: float = 1e-8, atol: float = 1e-14, max_cells: int = 60000) -> QuadResult:
    """``M(d) = int_d e^rho``."""
    lf = _log_factor_fn(g)
    return integrate_plan(lambda z: np.exp(lf(z)), d, plan_for(g.quad_hints(), d), rtol, atol, max_cells)


def weighted_area(
    g: Metric,
    d: PlanarDomain,
    w: Callable[[np.ndarray], np.ndarray],
    rtol: float = 1e-8,
    atol: float = 1e-14,
    max_cells: int = 60000,
) -> QuadResult:
    """``int_d w e^rho`` for a weight ``w`` evaluated on complex points."""
    lf = _log_factor_fn(g)

    def fn(z):
        ww = np.asarray(w(z), dtype=float)
        out = np.zeros(z.shape)
        m = ww != 0
        if np.any(m):
            out[m] = ww[m] * np.exp(lf(z[m]))
        return out

    return integrate_plan(fn, d, plan_for(g.quad_hints(), d), rtol, atol, max_cells)


def _arc_breaks(arc, center: complex, breaks: Sequence[float], n: int = 2048) -> list[float]:
    if not breaks:
        return []
    t = np.linspace(arc.t0, arc.t1, n + 1)
    rad = np.abs(arc.position(t) - center)
    out = []
    for b in breaks:
        s = rad - b
        for i in np.flatnonzero(np.sign(s[:-1]) * np.sign(s[1:]) < 0):
            out.append(brentq(lambda x: abs(arc.position(x) - center) - b, t[i], t[i + 1], xtol=1e-15))
        out += [float(t[i]) for i in np.flatnonzero(s == 0)]
    return sorted(out)


def boundary_length(g: Metric, d: PlanarDomain, rtol: float = 1e-10, atol: float = 1e-14) -> QuadResult:
    """``L(boundary) = int e^(rho/2) dl`` summed over all boundary arcs."""
    hints = g.quad_hints()
    if hints.center is not None and hints.center_weight != 0.0:
        check_atoms(SignedAtomicMeasure(((hints.center, hints.center_weight),)), d)
    check_atoms(hints.atoms, d)
    total = QuadResult(0.0, 0.0)
    for arc in d.boundary_arcs():
        pts = _arc_breaks(arc, hints.center, hints.breaks) if hints.center is not None else []

        def f(t, arc=arc):
            return np.exp(0.5 * np.asarray(g.log_factor(arc.position(t)), dtype=float)) * arc.speed(t)

        total = total + gauss_kronrod(f, arc.t0, arc.t1, rtol=rtol, atol=atol, points=pts)
    return total


def lp_probe(
    density: Callable[[np.ndarray], np.ndarray],
    center: complex,
    p: float,
    radii: Sequence[float],
    rtol: float = 1e-9,
    atol: float = 1e-300,
    return_results: bool = False,
):
    """Integrals of ``|density|^p`` over the annuli ``radii[k] < |z - c| < radii[0]``.

    Growth of the returned sequence is evidence of non-integrability at the
    center, boundedness evidence of integrability.
    """
    if p < 1:
        raise ValueError("p must be at least 1")
    radii = np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) >= 0):
        raise ValueError("radii must be strictly decreasing")
    c = complex(center)

    def fn(z):
        return np.abs(np.asarray(density(z), dtype=float)) ** p

    vals, results = [0.0], []
    acc = 0.0
    for r_out, r_in in zip(radii[:-1], radii[1:]):
        dom = PlanarDomain(Circle(c, r_out), (Circle(c, r_in),))
        res = integrate_plan(fn, dom, IntegrationPlan(c, True, 0.0, ()), rtol=rtol, atol=atol)
        acc += res.value
        vals.append(acc)
        results.append(res)
    return (vals, results) if return_results else vals


def classify_growth(values: Sequence[float]) -> dict:
    """Heuristic verdict on an annulus sequence from :func:`lp_probe`.

    The increments of a geometric annulus sequence decay geometrically when
    the density is integrable and stop decaying (ratio at least one) when it
    is not.
    """
    v = np.asarray(values, dtype=float)
    inc = np.diff(v)
    ratios = inc[1:] / inc[:-1]
    last = float(ratios[-1]) if ratios.size else float("nan")
    return {
        "verdict": "divergent" if last >= 1.0 else "bounded",
        "last_ratio": last,
        "last_value": float(v[-1]),
        "ratios": ratios.tolist(),
    }


def dyadic_radii(r0: float = 1.0, kmax: int = 20) -> np.ndarray:
    """``r0 2^-k`` for ``k = 0..kmax``."""
    return r0 * 2.0 ** -np.arange(kmax + 1, dtype=float)


def probe_critical_exponent(
    density: Callable[[np.ndarray], np.ndarray],
    center: complex,
    p_grid: Sequence[float],
    kmax: int = 20,
    r0: float = 1.0,
    rtol: float = 1e-9,
) -> dict:
    """Bracket the integrability threshold of ``density`` at ``center``.

    Each ``p`` in the increasing ``p_grid`` is classified with
    :func:`classify_growth`; the bracket is the largest bounded ``p`` and the
    smallest divergent ``p``.
    """
    radii = dyadic_radii(r0, kmax)
    verdicts = []
    for p in p_grid:
        verdicts.append((float(p), classify_growth(lp_probe(density, center, p, radii, rtol=rtol))))
    bounded = [p for p, v in verdicts if v["verdict"] == "bounded"]
    divergent = [p for p, v in verdicts if v["verdict"] == "divergent"]
    return {
        "lower": max(bounded) if bounded else None,
        "upper": min(divergent) if divergent else None,
        "monotone": not bounded or not divergent or max(bounded) < min(divergent),
        "ratios": {p: v["last_ratio"] for p, v in verdicts},
    }
