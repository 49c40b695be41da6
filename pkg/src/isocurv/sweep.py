"""Randomized soundness sweeps for the isoperimetric checkers.

Each case is rebuilt from ``(seed, index)`` alone, so sweeps are
reproducible and can be farmed out to worker processes.

Metric families, all with exactly known curvature:

``atoms``      positive atoms (total mass below ``4 pi``) plus a harmonic
               polynomial; ``K = 0``.
``glued``      radial metric with piecewise-constant ``K`` in ``[0, 2]`` and a
               cone at the origin.
``composite``  off-center positive atoms on top of a ``glued`` metric.
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .curvature import CurvatureDecomposition
from .domain import PlanarDomain, disk, polygon
from .errors import NumericalRejection
from .iso import alexandrov_check, huber_check
from .measure import FOUR_PI, SignedAtomicMeasure
from .metric import Composite, HarmonicPolynomial, Metric, Potential, glued_radial

FAMILIES = ("atoms", "glued", "composite")
K0_CHOICES = (0.0, 0.5, 1.0)
MASS_CAP = 0.95 * FOUR_PI


@dataclass
class SweepCase:
    index: int
    family: str
    domain: str
    K0: float
    lhs: float
    rhs: float
    deficit: float
    error_estimate: float
    passed: bool
    diagnostic: str = ""


def _atoms(rng: np.random.Generator, n: int, budget: float, box: float = 1.2) -> SignedAtomicMeasure:
    w = rng.uniform(0.05, 1.0, n)
    w *= rng.uniform(0.2, 1.0) * budget / w.sum()
    pts = rng.uniform(-box, box, n) + 1j * rng.uniform(-box, box, n)
    return SignedAtomicMeasure.from_pairs(zip(pts, w))


def random_metric(rng: np.random.Generator, family: str) -> Metric:
    if family == "atoms":
        h = HarmonicPolynomial.from_complex(rng.normal(0, 0.3, 3) + 1j * rng.normal(0, 0.3, 3))
        return Potential(h, _atoms(rng, int(rng.integers(1, 4)), MASS_CAP))
    n = int(rng.integers(0, 3))
    radii = np.sort(rng.uniform(0.3, 1.5, n))
    ks = rng.uniform(0.0, 2.0, n + 1)
    alpha = float(rng.uniform(-0.5, 0.6 if family == "composite" else 0.9))
    g = glued_radial(alpha, float(rng.uniform(0.5, 1.5)), radii, ks)
    if family == "glued":
        return g
    budget = MASS_CAP - FOUR_PI * max(alpha, 0.0)
    pot = Potential(HarmonicPolynomial.zero(), _atoms(rng, int(rng.integers(1, 3)), budget))
    return Composite(g, pot)


def random_domain(rng: np.random.Generator) -> tuple[str, PlanarDomain]:
    c = complex(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6))
    if rng.random() < 0.5:
        return "disk", disk(c, float(rng.uniform(0.3, 1.5)))
    n = int(rng.integers(3, 8))
    # jittered equispaced angles keep every gap below pi, so the polygon is star-shaped about c
    step = 2 * np.pi / n
    th = rng.uniform(0, 2 * np.pi) + step * (np.arange(n) + rng.uniform(-0.2, 0.2, n))
    r = rng.uniform(0.4, 1.3, n)
    v = c + r * np.exp(1j * th)
    return "polygon", polygon(np.column_stack([v.real, v.imag]))


def _well_separated(g: Metric, E: PlanarDomain) -> bool:
    """Keep atoms and breakpoint circles clear of the boundary and of each other."""
    h = g.quad_hints()
    scale = 0.03 * E.diameter
    pts = list(g.atoms.points) if len(g.atoms) else []
    if pts and np.min(E.boundary_distance(np.array(pts))) < scale:
        return False
    if h.center is not None and len(h.atoms):
        rc = np.abs(h.atoms.points - h.center)
        for b in h.breaks:
            if np.min(np.abs(rc - b)) < 0.05:
                return False
    return True


def build_case(seed: int, index: int):
    """Deterministic ``(family, metric, domain name, domain, K0)`` for one case."""
    rng = np.random.default_rng([seed, index])
    family = FAMILIES[index % len(FAMILIES)]
    for _ in range(1000):
        g = random_metric(rng, family)
        name, E = random_domain(rng)
        if E.euclidean_area > 0.05 and _well_separated(g, E):
            return family, g, name, E, float(K0_CHOICES[int(rng.integers(0, 3))])
    raise RuntimeError("could not draw a separated instance")


def run_case(seed: int, index: int, check: str = "alexandrov", tol: float = 1e-6, rtol: float = 1e-9) -> SweepCase:
    family, g, name, E, K0 = build_case(seed, index)
    try:
        if check == "huber":
            rep = huber_check(g, E, tol=tol, rtol=rtol)
            K0 = 0.0
        else:
            rep = alexandrov_check(g, CurvatureDecomposition.from_metric(g), E, K0, tol=tol, rtol=rtol)
    except NumericalRejection as exc:
        return SweepCase(index, family, name, K0, np.nan, np.nan, np.nan, np.nan, False, f"rejected: {exc}")
    ok = rep.deficit >= -(rep.error_estimate + tol)
    return SweepCase(index, family, name, K0, rep.lhs, rep.rhs, rep.deficit, rep.error_estimate, bool(ok))


def _run(args):
    return run_case(*args)


def run_sweep(
    check: str = "alexandrov", cases: int = 200, seed: int = 42, tol: float = 1e-6, rtol: float = 1e-9,
    parallel: Optional[int] = None,
) -> dict:
    """Run ``cases`` random instances; a case passes if ``deficit >= -(error + tol)``."""
    if check not in ("alexandrov", "huber"):
        raise ValueError(f"unknown sweep check {check!r}")
    t0 = time.perf_counter()
    jobs = [(seed, i, check, tol, rtol) for i in range(cases)]
    if parallel and parallel > 1:
        with ProcessPoolExecutor(parallel) as ex:
            results = list(ex.map(_run, jobs))
    else:
        results = [_run(j) for j in jobs]
    return {
        "check": check,
        "seed": seed,
        "cases": cases,
        "tol": tol,
        "failures": sum(not r.passed for r in results),
        "worst_deficit": float(np.nanmin([r.deficit for r in results])) if results else 0.0,
        "seconds": time.perf_counter() - t0,
        "results": [asdict(r) for r in results],
    }
