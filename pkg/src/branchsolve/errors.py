"""Exception hierarchy shared by all branchsolve modules."""


class BranchSolveError(Exception):
    """Base class for every error raised by the library."""


class DimensionError(BranchSolveError, ValueError):
    pass


class ResolutionError(BranchSolveError, ValueError):
    """Grid sizes are incompatible with the requested operation."""


class InvalidProblemError(BranchSolveError, ValueError):
    """Problem parameters violate a structural requirement (e.g. gcd(k, q) != 1)."""


class SymmetryError(BranchSolveError, ValueError):
    """Input data is not k-fold symmetric (or equivariant) within tolerance."""


class DegenerateFieldError(BranchSolveError, ValueError):
    pass


class SizeGuardError(BranchSolveError, ValueError):
    pass


class NumericError(BranchSolveError, ArithmeticError):
    pass


class InvariantViolation(BranchSolveError, RuntimeError):
    """An internal invariant (e.g. symmetry preservation) failed during a run."""


class DivergenceError(BranchSolveError, RuntimeError):
    """Fixed-point iteration diverged. The partial trace is attached."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
