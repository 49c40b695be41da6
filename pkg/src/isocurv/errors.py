"""Exception types raised by the library.

Errors deriving from :class:`NumericalRejection` mark inputs that are well
formed but cannot be evaluated (cusps, points on singular sets, failed
shooting).  The command line maps them to exit code 3.
"""


class NumericalRejection(Exception):
    """Base class for inputs rejected on numerical or geometric grounds."""


class SingularPointError(NumericalRejection):
    """Evaluation requested at an atom of the measure."""


class CuspError(NumericalRejection):
    """A point carries positive mass of at least 4*pi."""


class AtomOnBoundaryError(NumericalRejection):
    """An atom lies on the boundary of an integration domain."""


class BoundaryAmbiguityError(NumericalRejection):
    """A query point is too close to a domain boundary to classify."""


class ProximityError(NumericalRejection):
    """A finite difference stencil would touch an atom or a breakpoint."""


class ShootingError(NumericalRejection):
    """Radial shooting found no admissible solution."""


class NotRadialError(ValueError):
    """An operation requiring a radial metric received another kind."""


class DomainError(ValueError):
    """Malformed planar domain (self intersection, bad nesting)."""
