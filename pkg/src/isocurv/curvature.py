"""Curvature measures of conformal metrics.

The curvature measure of ``e^rho |dz|^2`` is ``K e^rho dA + k_s`` where
``k_s`` is atomic.  Atom weights in :mod:`isocurv.measure` follow the
Laplacian convention ``omega``; here they are halved once, at construction
of :class:`CurvatureDecomposition`, so ``k_s = omega / 2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .domain import INSIDE, PlanarDomain, disk
from .errors import ProximityError
from .measure import SignedAtomicMeasure, require_no_cusps
from .metric import Metric, Potential, RadialMetric, decompose, pullback_inversion
from .quad import QuadResult, check_atoms, weighted_area

FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True)
class CurvatureDecomposition:
    """Density ``K`` (against ``e^rho dA``) and atomic part ``k_s``.

    ``k_s_atoms`` are in the curvature convention.  ``K_vanishes`` marks a
    density known to be identically zero, which lets integrals be skipped.
    """

    K: Callable
    k_s_atoms: SignedAtomicMeasure
    K_vanishes: bool = False

    @classmethod
    def from_metric(cls, g: Metric) -> "CurvatureDecomposition":
        dec = decompose(g)
        vanishes = isinstance(g, Potential) and g.K is None
        return cls(dec.K, dec.f_atoms.scaled(0.5), vanishes)

    @property
    def omega_atoms(self) -> SignedAtomicMeasure:
        return self.k_s_atoms.scaled(2.0)


@dataclass(frozen=True)
class IsoInputs:
    """Quantities entering the isoperimetric right hand sides, with error bars."""

    L2: float
    M: float
    Kplus: float
    K0: float
    L2_error: float = 0.0
    M_error: float = 0.0
    Kplus_error: float = 0.0

    def __post_init__(self):
        if self.L2 < 0:
            raise ValueError("squared length must be nonnegative")
        if not self.M > 0:
            raise ValueError("area must be positive")

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _atoms_in(atoms: SignedAtomicMeasure, d: PlanarDomain) -> SignedAtomicMeasure:
    if not len(atoms):
        return atoms
    loc = d.locate(atoms.points)
    return SignedAtomicMeasure(tuple(a for a, l in zip(atoms, loc) if l == INSIDE))


def total_curvature(
    c: CurvatureDecomposition, g: Metric, d: PlanarDomain, rtol: float = 1e-8, full: bool = False
):
    """``int_d K e^rho + k_s(d)``; with ``full`` a :class:`QuadResult` is returned."""
    require_no_cusps(c.omega_atoms.restrict(lambda z: d.locate(z) != 0))
    check_atoms(c.omega_atoms, d)
    if c.K_vanishes:
        res = QuadResult(0.0, 0.0)
    else:
        res = weighted_area(g, d, c.K, rtol=rtol)
    res.value += _atoms_in(c.k_s_atoms, d).total()
    return res if full else res.value


def positive_variation(
    c: CurvatureDecomposition, g: Metric, d: PlanarDomain, K0: float, rtol: float = 1e-8, full: bool = False
):
    """``k_{s,+}(d) + int_d [K - K0]^+ e^rho``.

    With purely atomic singular parts the supremum over Borel subsets is
    attained on the positive atoms together with the set where ``K > K0``.
    """
    check_atoms(c.omega_atoms, d)
    if c.K_vanishes and K0 >= 0:
        res = QuadResult(0.0, 0.0)
    else:
        res = weighted_area(g, d, lambda z: np.maximum(np.asarray(c.K(z), dtype=float) - K0, 0.0), rtol=rtol)
    res.value += _atoms_in(c.k_s_atoms.positive(), d).total()
    return res if full else res.value


@dataclass(frozen=True)
class GaussBonnetResult:
    total: float
    smooth: float
    atoms: float
    error_estimate: float
    chart2: float
    chart1: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def gauss_bonnet_two_chart(g2: Metric, r0: float = 4.0, rtol: float = 1e-9) -> GaussBonnetResult:
    """Total curvature of a radial sphere-like surface covered by two charts.

    The chart ``|z| < r0`` is integrated directly and the complement
    ``|z| >= r0`` through the chart ``w = 1/z`` as the disk ``|w| <= 1/r0``.
    Raises :class:`~isocurv.errors.CuspError` if either chart has a cusp.
    """
    if not isinstance(g2, RadialMetric):
        raise TypeError("two-chart Gauss-Bonnet needs a radial metric")
    g1 = pullback_inversion(g2)
    require_no_cusps(g2.atoms)
    require_no_cusps(g1.atoms)
    parts = []
    for g, d in ((g2, disk(0, r0)), (g1, disk(0, 1.0 / r0))):
        c = CurvatureDecomposition.from_metric(g)
        smooth = weighted_area(g, d, c.K, rtol=rtol)
        parts.append((smooth, _atoms_in(c.k_s_atoms, d).total()))
    smooth = parts[0][0].value + parts[1][0].value
    atoms = parts[0][1] + parts[1][1]
    return GaussBonnetResult(
        total=smooth + atoms,
        smooth=smooth,
        atoms=atoms,
        error_estimate=parts[0][0].error_estimate + parts[1][0].error_estimate,
        chart2=parts[0][0].value + parts[0][1],
        chart1=parts[1][0].value + parts[1][1],
    )


# ---------------------------------------------------------------- finite differences


def _singular_points(g: Metric):
    hints = g.quad_hints()
    pts = list(hints.atoms.points) if len(hints.atoms) else []
    if hints.center is not None:
        pts.append(hints.center)
    return pts, hints.center, hints.breaks


def _default_step(g: Metric, z: complex) -> float:
    pts, _, _ = _singular_points(g)
    if not pts:
        return 1e-4
    dist = min(abs(z - p) for p in pts)
    return 1e-4 * min(1.0, dist)


def _check_proximity(g: Metric, z: complex, h: float) -> None:
    pts, center, breaks = _singular_points(g)
    for p in pts:
        if abs(z - p) <= 10 * h:
            raise ProximityError(f"stencil at {z} within 10h of singular point {p}")
    if center is not None:
        r = abs(z - center)
        for b in breaks:
            if abs(r - b) <= 10 * h:
                raise ProximityError(f"stencil at {z} within 10h of breakpoint circle r={b}")


def _laplacian(fn: Callable, z: complex, h: float) -> float:
    pts = z + h * np.array([1, -1, 1j, -1j, 0], dtype=complex)
    v = np.asarray(fn(pts), dtype=float)
    return float(((v[0] - v[4]) + (v[1] - v[4]) + (v[2] - v[4]) + (v[3] - v[4])) / h**2)


def recover_density(g: Metric, z: complex, h: Optional[float] = None) -> float:
    """``K(z) ~ -Lap_h rho(z) / (2 e^rho(z))`` with the 5-point Laplacian."""
    z = complex(z)
    h = _default_step(g, z) if h is None else float(h)
    _check_proximity(g, z, h)
    lap = _laplacian(g.log_factor, z, h)
    return -lap / (2.0 * float(np.exp(g.log_factor(z))))


def subsolution_residual(g: Metric, c: CurvatureDecomposition, K0: float, z: complex, h: Optional[float] = None) -> float:
    """``phi = -Lap u - 2 [K - K0] e^rho - 2 K0 e^rho`` evaluated by finite differences.

    Nonpositive values certify the subsolution property at ``z``; exact
    solutions give zero up to discretization error.
    """
    z = complex(z)
    h = _default_step(g, z) if h is None else float(h)
    _check_proximity(g, z, h)
    dec = decompose(g)
    lap = _laplacian(dec.u, z, h)
    e = float(np.exp(g.log_factor(z)))
    K = float(c.K(np.array([z]))[0])
    return -lap - 2.0 * (K - K0) * e - 2.0 * K0 * e
