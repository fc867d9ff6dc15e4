"""Exception types shared across the solver."""


class SolverError(RuntimeError):
    """Base class for solver failures."""


class NonConvergenceError(SolverError):
    """Descent hit its iteration cap before reaching the gradient tolerance.

    Carries the last iterate and its gradient sup-norm so callers can
    inspect or resume.
    """

    def __init__(self, message, last_iterate=None, grad_sup=None, iterations=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.grad_sup = grad_sup
        self.iterations = iterations


class PinningError(SolverError):
    """Translation pinning found no sign change of the axis projection."""


class PartitionError(SolverError):
    """The heteroclinic set does not split into two nonempty labeled parts."""

    def __init__(self, message, found_labels=()):
        super().__init__(message)
        self.found_labels = tuple(found_labels)


class InternalConsistencyError(SolverError):
    """A quantity that must be nonnegative came out below -tolerance.

    Signals that the reference minimum used for renormalization was not
    actually minimal on this grid.
    """


class FitDegenerateError(SolverError):
    """Tail values underflow; decay faster than measurable."""


class UnsupportedOperation(SolverError):
    """The descriptor lacks what this operation needs (e.g. no ball radius)."""
