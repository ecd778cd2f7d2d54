"""Exception types shared across the package."""


class BadlineError(Exception):
    """Base class for all package-specific failures."""


class ZeroVector(BadlineError):
    """A nonzero vector was required."""


class NotPrimitivePair(BadlineError):
    """Two lattice vectors whose cross product must have content 1."""


class NotABasis(BadlineError):
    """Vectors that were expected to span the full integer lattice."""


class NegativeBound(BadlineError):
    """A bound parameter that must be nonnegative was negative."""


class OffPlane(BadlineError):
    """A point that should lie on a given rational plane does not."""


class OffLine(BadlineError):
    """A point that should lie on a given rational line does not."""


class NotPrimitive(BadlineError):
    """An integer vector with gcd of coordinates above 1."""


class Infeasible(BadlineError):
    """A lattice point search over an empty region."""


class ConeViolation(BadlineError):
    """A rectangle placement that escapes the admissible cone."""


class StepFailed(BadlineError):
    """A construction step that could not be completed."""


class PrecisionExhausted(BadlineError):
    """An interval computation that stayed ambiguous at the precision cap."""


class StrategyError(BadlineError):
    """A game strategy raised or returned garbage; treated as a forfeit."""
