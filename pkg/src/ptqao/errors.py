"""Exception hierarchy shared by the symbolic and numeric layers."""


class PtqaoError(Exception):
    pass


class InvalidParams(PtqaoError, ValueError):
    pass


class SolverError(PtqaoError):
    pass


class InconsistentSystem(SolverError):
    """Right-hand side is not in the image of the constrained commutator map."""


class AmbiguousSolution(SolverError):
    """The constrained commutator map has a kernel; the solution is not unique."""


class DegreeError(PtqaoError, ValueError):
    pass


class ResidualError(PtqaoError, ValueError):
    pass


class NegativeLambdaError(PtqaoError, ValueError):
    """A negative power of lam blocks the lam -> 0 limit."""


class NonConvergence(PtqaoError, RuntimeError):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class TruncationError(PtqaoError, ValueError):
    """Requested order exceeds the truncation order of an operand."""
