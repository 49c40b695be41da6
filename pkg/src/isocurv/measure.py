"""Finite signed atomic measures on the plane.

Weights are stored in the Laplacian convention: an atom of weight ``w`` at
``p`` contributes ``(w / 2pi) log(1/|z - p|)`` to a potential, so the
conformal factor behaves like ``|z - p|**(-w / 2pi)`` near ``p``.  A point
is a cusp when its positive mass reaches ``4 pi``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import CuspError

FOUR_PI = 4.0 * np.pi
TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class Atom:
    point: complex
    weight: float

    def __post_init__(self):
        object.__setattr__(self, "point", complex(self.point))
        object.__setattr__(self, "weight", float(self.weight))
        if not (np.isfinite(self.point.real) and np.isfinite(self.point.imag)):
            raise ValueError("atom location must be finite")
        if not np.isfinite(self.weight):
            raise ValueError("atom weight must be finite")


@dataclass(frozen=True)
class SignedAtomicMeasure:
    """Finite sum of point masses with real weights.

    Atoms at identical locations are merged and zero weights dropped, so the
    representation is canonical up to ordering.
    """

    atoms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        merged: dict[complex, float] = {}
        for a in self.atoms:
            if not isinstance(a, Atom):
                a = Atom(*a)
            merged[a.point] = merged.get(a.point, 0.0) + a.weight
        atoms = tuple(
            Atom(p, w) for p, w in sorted(merged.items(), key=lambda kv: (kv[0].real, kv[0].imag)) if w != 0.0
        )
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[complex, float]]) -> "SignedAtomicMeasure":
        return cls(tuple(Atom(p, w) for p, w in pairs))

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def __add__(self, other: "SignedAtomicMeasure") -> "SignedAtomicMeasure":
        return SignedAtomicMeasure(self.atoms + other.atoms)

    def scaled(self, c: float) -> "SignedAtomicMeasure":
        return SignedAtomicMeasure(tuple(Atom(a.point, c * a.weight) for a in self.atoms))

    @property
    def points(self) -> np.ndarray:
        return np.array([a.point for a in self.atoms], dtype=complex)

    @property
    def weights(self) -> np.ndarray:
        return np.array([a.weight for a in self.atoms], dtype=float)

    def positive(self) -> "SignedAtomicMeasure":
        return SignedAtomicMeasure(tuple(a for a in self.atoms if a.weight > 0))

    def negative(self) -> "SignedAtomicMeasure":
        """Negative part, returned with nonnegative weights."""
        return SignedAtomicMeasure(tuple(Atom(a.point, -a.weight) for a in self.atoms if a.weight < 0))

    def total(self) -> float:
        return float(self.weights.sum()) if self.atoms else 0.0

    def total_variation(self) -> float:
        return float(np.abs(self.weights).sum()) if self.atoms else 0.0

    def weight_at(self, z: complex) -> float:
        for a in self.atoms:
            if a.point == complex(z):
                return a.weight
        return 0.0

    def restrict(self, region) -> "SignedAtomicMeasure":
        """Atoms lying in ``region``.

        ``region`` is either an object with a ``contains`` method accepting
        an array of complex points, or a callable doing the same.
        """
        if not self.atoms:
            return self
        test: Callable = region.contains if hasattr(region, "contains") else region
        inside = np.asarray(test(self.points), dtype=bool)
        return SignedAtomicMeasure(tuple(a for a, k in zip(self.atoms, inside) if k))

    def mass(self, region=None) -> float:
        m = self if region is None else self.restrict(region)
        return m.total()


def jordan_decompose(m: SignedAtomicMeasure) -> tuple[SignedAtomicMeasure, SignedAtomicMeasure]:
    """Split ``m`` into mutually singular nonnegative parts ``(m_plus, m_minus)``."""
    return m.positive(), m.negative()


@dataclass(frozen=True)
class SingularSet:
    """Points carrying positive mass at least ``threshold``."""

    points: tuple
    threshold: float

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, z):
        return complex(z) in self.points


def singular_set(m: SignedAtomicMeasure, threshold: float = TWO_PI) -> SingularSet:
    """Points whose positive mass is at least ``threshold``."""
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    return SingularSet(tuple(a.point for a in m.atoms if a.weight >= threshold), float(threshold))


def critical_exponent(m: SignedAtomicMeasure, z: complex) -> float:
    """Local integrability threshold ``4 pi / m_plus({z})`` (inf for no mass)."""
    w = max(m.weight_at(z), 0.0)
    return np.inf if w == 0.0 else FOUR_PI / w


def assert_no_cusps(m: SignedAtomicMeasure) -> bool:
    """True iff every positive atom has mass below ``4 pi``."""
    return len(singular_set(m, FOUR_PI)) == 0


def require_no_cusps(m: SignedAtomicMeasure) -> None:
    """Raise :class:`CuspError` naming every cusp of ``m``."""
    cusps = singular_set(m, FOUR_PI)
    if len(cusps):
        detail = ", ".join(f"{p} (mass {m.weight_at(p):.6g})" for p in cusps)
        raise CuspError(f"cusp: positive mass >= 4*pi at {detail}")


def as_measure(atoms: SignedAtomicMeasure | Sequence | None) -> SignedAtomicMeasure:
    if atoms is None:
        return SignedAtomicMeasure()
    if isinstance(atoms, SignedAtomicMeasure):
        return atoms
    return SignedAtomicMeasure(tuple(a if isinstance(a, Atom) else Atom(*a) for a in atoms))
