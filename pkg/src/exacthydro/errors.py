"""Exception types raised by the solvers and checks."""


class ExactHydroError(Exception):
    """Base class for all package errors."""


class CatalogError(ExactHydroError, KeyError):
    """Unknown model name."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class RelaxationSingularError(ExactHydroError):
    """The relaxation block C is not invertible."""


class SolverError(ExactHydroError):
    """A nonlinear solve failed to produce a solution."""


class IterationFailure(SolverError):
    """Newton system became singular."""

    def __init__(self, message, k2=None, iterate=None):
        super().__init__(message)
        self.k2 = k2
        self.iterate = iterate


class DivergenceError(SolverError):
    """No convergence within the iteration budget."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class EntanglementError(SolverError):
    """The real (Chapman-Enskog) branch was lost: singular Newton system."""


class BranchError(SolverError):
    """The selected real root branch does not exist."""


class CriticalPointError(SolverError):
    """A requested wave number lies beyond the detected critical point."""

    def __init__(self, message, critical_k=None):
        super().__init__(message)
        self.critical_k = critical_k


class SingularityError(ExactHydroError):
    """A coefficient of an ODE or closed form vanished."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class DomainError(ExactHydroError, ValueError):
    """Argument outside the admissible domain."""


class EquilibriumDegenerateError(ExactHydroError):
    """The tangent part of the entropy gradient vanishes."""


class PreconditionError(ExactHydroError):
    """Input violates a documented precondition."""
