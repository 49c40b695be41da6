"""Planar domains bounded by circles and polygons.

A :class:`PlanarDomain` has one outer boundary curve and finitely many
holes.  It is simple when there are no holes.  Membership is three-valued:
points within a thin band of the boundary are ambiguous rather than being
forced into either side.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .errors import BoundaryAmbiguityError, DomainError

AMBIGUITY_BAND = 1e-12

INSIDE, OUTSIDE, AMBIGUOUS = 1, 0, -1


def _cross(a, b):
    return a.real * b.imag - a.imag * b.real


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0:
            raise DomainError("circle radius must be positive")

    def interior(self, z) -> np.ndarray:
        return np.abs(np.asarray(z, dtype=complex) - self.center) < self.radius

    def distance(self, z) -> np.ndarray:
        return np.abs(np.abs(np.asarray(z, dtype=complex) - self.center) - self.radius)

    @property
    def area(self) -> float:
        return np.pi * self.radius**2

    @property
    def perimeter(self) -> float:
        return 2 * np.pi * self.radius

    @property
    def bbox(self):
        c, r = self.center, self.radius
        return c.real - r, c.imag - r, c.real + r, c.imag + r

    def arcs(self, ccw: bool = True) -> list["Arc"]:
        c, R = self.center, self.radius
        s = 1.0 if ccw else -1.0
        return [
            Arc(
                0.0,
                2 * np.pi,
                lambda t: c + R * np.exp(1j * s * np.asarray(t)),
                lambda t: np.full(np.shape(t), R),
                curve=self,
            )
        ]

    def describe(self) -> dict:
        return {"kind": "disk", "center": [self.center.real, self.center.imag], "radius": self.radius}


@dataclass(frozen=True, eq=False)
class Polygon:
    """Simple polygon; vertices are stored counterclockwise."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices)
        if v.ndim == 2 and v.shape[1] == 2:
            v = v[:, 0] + 1j * v[:, 1]
        v = np.asarray(v, dtype=complex).ravel()
        if len(v) >= 2 and v[0] == v[-1]:
            v = v[:-1]
        if len(v) < 3:
            raise DomainError("polygon needs at least 3 vertices")
        if _signed_area(v) < 0:
            v = v[::-1].copy()
        if abs(_signed_area(v)) == 0:
            raise DomainError("degenerate polygon")
        _check_simple(v)
        object.__setattr__(self, "vertices", v)

    def __eq__(self, other):
        return isinstance(other, Polygon) and np.array_equal(self.vertices, other.vertices)

    def __hash__(self):
        return hash(self.vertices.tobytes())

    @property
    def edges(self):
        v = self.vertices
        return v, np.roll(v, -1)

    def interior(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        a, b = self.edges
        x, y = z.real[..., None], z.imag[..., None]
        ya, yb = a.imag, b.imag
        cond = (ya > y) != (yb > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = a.real + (y - ya) * (b.real - a.real) / (yb - ya)
        hits = cond & (x < xint)
        return (np.count_nonzero(hits, axis=-1) % 2) == 1

    def distance(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)[..., None]
        a, b = self.edges
        d = b - a
        t = np.clip(((z - a) * np.conj(d)).real / np.abs(d) ** 2, 0.0, 1.0)
        return np.min(np.abs(z - (a + t * d)), axis=-1)

    @property
    def area(self) -> float:
        return _signed_area(self.vertices)

    @property
    def perimeter(self) -> float:
        a, b = self.edges
        return float(np.abs(b - a).sum())

    @property
    def bbox(self):
        v = self.vertices
        return v.real.min(), v.imag.min(), v.real.max(), v.imag.max()

    def arcs(self, ccw: bool = True) -> list["Arc"]:
        v = self.vertices if ccw else self.vertices[::-1]
        out = []
        for a, b in zip(v, np.roll(v, -1)):
            ell = abs(b - a)
            e = (b - a) / ell
            out.append(
                Arc(
                    0.0,
                    ell,
                    lambda t, a=a, e=e: a + e * np.asarray(t),
                    lambda t: np.ones(np.shape(t)),
                    curve=self,
                )
            )
        return out

    def describe(self) -> dict:
        return {"kind": "polygon", "vertices": [[p.real, p.imag] for p in self.vertices]}


Curve = Union[Circle, Polygon]


@dataclass(frozen=True)
class Arc:
    """Parametrized boundary piece ``t in [t0, t1] -> position(t)`` with ``|position'| = speed``."""

    t0: float
    t1: float
    position: Callable
    speed: Callable
    curve: Curve = None

    @property
    def euclidean_length(self) -> float:
        t = np.linspace(self.t0, self.t1, 3)
        return float(self.speed(t)[1] * (self.t1 - self.t0))


def _signed_area(v: np.ndarray) -> float:
    w = np.roll(v, -1)
    return 0.5 * float(np.sum(v.real * w.imag - w.real * v.imag))


def _segments_intersect(p1, p2, q1, q2) -> bool:
    d1 = _cross(q2 - q1, p1 - q1)
    d2 = _cross(q2 - q1, p2 - q1)
    d3 = _cross(p2 - p1, q1 - p1)
    d4 = _cross(p2 - p1, q2 - p1)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True

    def on_seg(a, b, c):
        return min(a.real, b.real) <= c.real <= max(a.real, b.real) and min(a.imag, b.imag) <= c.imag <= max(a.imag, b.imag)

    if d1 == 0 and on_seg(q1, q2, p1):
        return True
    if d2 == 0 and on_seg(q1, q2, p2):
        return True
    if d3 == 0 and on_seg(p1, p2, q1):
        return True
    if d4 == 0 and on_seg(p1, p2, q2):
        return True
    return False


def _check_simple(v: np.ndarray) -> None:
    n = len(v)
    for i in range(n):
        a, b = v[i], v[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if _segments_intersect(a, b, v[j], v[(j + 1) % n]):
                raise DomainError(f"polygon edges {i} and {j} intersect")


def _curves_intersect(c1: Curve, c2: Curve) -> bool:
    if isinstance(c1, Circle) and isinstance(c2, Circle):
        d = abs(c1.center - c2.center)
        return abs(c1.radius - c2.radius) <= d <= c1.radius + c2.radius
    if isinstance(c1, Circle):
        c1, c2 = c2, c1
    if isinstance(c2, Circle):
        # polygon vs circle: some edge meets the circle iff the circle is not
        # strictly on one side of the whole edge set
        a, b = c1.edges
        dmin = float(np.min(c1.distance(np.array([c2.center]))))
        dmax = float(np.max(np.abs(np.concatenate([a, b]) - c2.center)))
        if dmin > c2.radius:
            return False
        # all vertices inside the circle means the polygon is inside (disk convex)
        return not dmax < c2.radius
    a1, b1 = c1.edges
    a2, b2 = c2.edges
    return any(_segments_intersect(p, q, r, s) for p, q in zip(a1, b1) for r, s in zip(a2, b2))


def _sample_point(c: Curve) -> complex:
    return c.center + c.radius if isinstance(c, Circle) else c.vertices[0]


def _curve_inside(inner: Curve, outer: Curve) -> bool:
    """Closure of ``inner`` contained in the open interior of ``outer``."""
    if _curves_intersect(inner, outer):
        return False
    return bool(outer.interior(np.array([_sample_point(inner)]))[0])


@dataclass(frozen=True)
class PlanarDomain:
    outer: Curve
    holes: tuple = field(default_factory=tuple)

    def __post_init__(self):
        holes = tuple(self.holes)
        object.__setattr__(self, "holes", holes)
        for h in holes:
            if not _curve_inside(h, self.outer):
                raise DomainError("hole closure must lie inside the outer boundary")
        for i, h1 in enumerate(holes):
            for h2 in holes[i + 1 :]:
                if _curves_intersect(h1, h2) or _curve_inside(h1, h2) or _curve_inside(h2, h1):
                    raise DomainError("hole closures must be pairwise disjoint")

    @property
    def is_simple(self) -> bool:
        return not self.holes

    @property
    def curves(self) -> tuple:
        return (self.outer,) + self.holes

    @property
    def diameter(self) -> float:
        x0, y0, x1, y1 = self.outer.bbox
        return float(np.hypot(x1 - x0, y1 - y0))

    @property
    def band(self) -> float:
        return AMBIGUITY_BAND * max(1.0, self.diameter)

    def boundary_distance(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return np.min(np.stack([np.asarray(c.distance(z)) for c in self.curves]), axis=0)

    def locate(self, z) -> np.ndarray:
        """1 inside, 0 outside, -1 within the ambiguity band of the boundary."""
        z = np.asarray(z, dtype=complex)
        inside = self.outer.interior(z)
        for h in self.holes:
            inside = inside & ~h.interior(z)
        out = np.where(inside, INSIDE, OUTSIDE)
        return np.where(self.boundary_distance(z) <= self.band, AMBIGUOUS, out)

    def contains(self, z):
        loc = self.locate(z)
        if np.any(loc == AMBIGUOUS):
            raise BoundaryAmbiguityError("point within the boundary ambiguity band")
        res = loc == INSIDE
        return bool(res) if np.ndim(z) == 0 else res

    def boundary_arcs(self) -> list[Arc]:
        arcs = self.outer.arcs(ccw=True)
        for h in self.holes:
            arcs += h.arcs(ccw=False)
        return arcs

    @property
    def euclidean_area(self) -> float:
        return self.outer.area - sum(h.area for h in self.holes)

    @property
    def perimeter(self) -> float:
        return sum(c.perimeter for c in self.curves)

    def describe(self) -> dict:
        out = dict(self.outer.describe())
        out["holes"] = [h.describe() for h in self.holes]
        return out


def fill_holes(d: PlanarDomain) -> PlanarDomain:
    """Domain with the same outer boundary and no holes."""
    return d if d.is_simple else PlanarDomain(d.outer)


def contains(d: PlanarDomain, z):
    return d.contains(z)


def boundary_arcs(d: PlanarDomain) -> list[Arc]:
    return d.boundary_arcs()


def disk(center: complex = 0j, radius: float = 1.0, holes: Sequence[Curve] = ()) -> PlanarDomain:
    return PlanarDomain(Circle(center, radius), tuple(holes))


def polygon(vertices, holes: Sequence[Curve] = ()) -> PlanarDomain:
    return PlanarDomain(Polygon(vertices), tuple(holes))


def annulus(r_inner: float, r_outer: float, center: complex = 0j) -> PlanarDomain:
    return PlanarDomain(Circle(center, r_outer), (Circle(center, r_inner),))


def square(half_side: float = 1.0, center: complex = 0j) -> PlanarDomain:
    h = half_side
    pts = [center + complex(x, y) for x, y in ((-h, -h), (h, -h), (h, h), (-h, h))]
    return polygon(pts)
