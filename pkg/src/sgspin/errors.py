"""Exception types raised by sgspin."""


class SgspinError(Exception):
    """Base class for all library errors."""


class InvalidParams(SgspinError, ValueError):
    pass


class NotNormalized(SgspinError, ValueError):
    pass


class NonOrthogonalBasis(SgspinError, ValueError):
    pass


class StepUnderflow(SgspinError, ArithmeticError):
    """Adaptive integrator wanted a step below the configured minimum."""

    def __init__(self, message, t=None, step=None):
        super().__init__(message)
        self.t = t
        self.step = step


class EmptyBranch(SgspinError, ValueError):
    pass


class InconsistentRecord(SgspinError, ValueError):
    pass


class InvalidManifold(SgspinError, ValueError):
    pass


class DegenerateDrive(SgspinError, ValueError):
    pass


class Infeasible(SgspinError):
    """Gate timing conditions have no real solution.

    ``reason`` is one of the ``InfeasibilityReason`` values from
    :mod:`sgspin.gates`; ``detail`` is a human readable explanation.
    """

    def __init__(self, reason, detail):
        super().__init__(f"{reason.value}: {detail}")
        self.reason = reason
        self.detail = detail


class NotFound(SgspinError):
    """General synthesis did not reach the infidelity target.

    ``best`` carries the best SynthesisResult that was found.
    """

    def __init__(self, best, message="no parameter point reached the target"):
        super().__init__(f"{message} (best infidelity {best.residual:.3e})")
        self.best = best
