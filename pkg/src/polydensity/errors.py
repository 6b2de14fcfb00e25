"""Exception hierarchy.

Input problems derive from ``InputError`` (CLI exit code 2), failed numerical
invariants from ``InvariantViolation`` (exit code 1).
"""


class PolyDensityError(Exception):
    pass


class InputError(PolyDensityError, ValueError):
    pass


class ParseError(InputError):
    pass


class ValidationError(InputError):
    pass


class EmptyMeasure(InputError):
    pass


class DegreeExceedsSupport(InputError):
    pass


class TailModelMissing(InputError):
    pass


class TailModelInvalid(InputError):
    pass


class MultipleZero(InputError):
    pass


class PoleAtZ(InputError):
    pass


class SharedZero(InputError):
    pass


class InsufficientZeros(InputError):
    pass


class IndexOutOfRange(InputError):
    pass


class ZeroAtOrigin(InputError):
    pass


class BudgetViolated(InputError):
    def __init__(self, message, indices=()):
        super().__init__(message)
        self.indices = list(indices)


class WeightVanishes(InputError):
    pass


class NoVanishingSequence(InputError):
    pass


class ZeroOutsideSupport(InputError):
    pass


class WeightVanishesAtZero(InputError):
    pass


class SupportMismatch(InputError):
    pass


class NonConvergence(PolyDensityError, RuntimeError):
    """Iterative solver stopped before reaching tolerance."""

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class InvariantViolation(PolyDensityError, AssertionError):
    """A checked mathematical invariant failed numerically."""

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail
