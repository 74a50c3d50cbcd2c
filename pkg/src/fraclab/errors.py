"""Exception hierarchy shared across the package."""


class FraclabError(Exception):
    """Base class for all package-specific errors."""


class DegenerateInput(FraclabError):
    """Input vectors are rank deficient."""


class InvalidDimension(FraclabError):
    """Dimension constraints violated (e.g. k > N)."""


class DimensionMismatch(FraclabError):
    """Objects of different ambient dimensions were combined."""


class UndecidablePrimitive(FraclabError):
    """The exact rule set cannot certify the query either way."""


class OutOfRange(FraclabError):
    """Scalar parameter outside its admissible range."""


class NotClassicallyEvaluable(FraclabError):
    """Field lacks the smoothness required for pointwise evaluation."""


class DivergentTail(FraclabError):
    """No usable tail bound (missing sup bound / Lipschitz constant)."""


class PreconditionViolated(FraclabError):
    """A documented operation precondition failed at runtime."""


class DimensionTooLarge(FraclabError):
    """Brute-force enumeration only supports small ambient dimensions."""


class NotSmooth(FraclabError):
    """Field is not C2 near the requested point."""


class NotOnBoundary(FraclabError):
    """Query point does not lie on the implicit surface."""


class DegenerateGradient(FraclabError):
    """Level-set gradient too small to define a normal."""


class PointInsideU(FraclabError):
    """Predicate query point lies inside the positivity set."""


class PointOutsideOmega(FraclabError):
    """Predicate query point lies outside the ambient open set."""


class EmptySample(FraclabError):
    """No grid point of the sampling box lies in the set."""


class NotAMinimumPoint(FraclabError):
    """Punctured test requires a zero of the nonnegative field."""


class UnboundedSet(FraclabError):
    """Operation requires a bounded set."""


class UnboundedWithoutTruncation(FraclabError):
    """Distance construction over an unbounded set needs truncation or s > 1/2."""


class ParseError(FraclabError):
    """Scene file could not be parsed."""


class ValidationError(FraclabError):
    """Scene or configuration violates a declared invariant."""


class IoError(FraclabError):
    """Report could not be written."""
