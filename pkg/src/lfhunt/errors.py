"""Exception types shared across the package."""


class CoverageError(ValueError):
    """Raised when an L-function's stored coefficients do not cover a requested prime range."""


class ZeroCrossingError(RuntimeError):
    """Raised when branch tracking meets a suspected zero of L (|L| below threshold or
    unresolvable winding); callers may shift the window and retry."""


class InfeasibleTargetsError(RuntimeError):
    """Raised when the phase-system solver cannot reach the requested targets."""


class DegenerateSystemError(RuntimeError):
    """Raised when the rounding pivot hits a numerically rank-deficient constraint matrix."""
