"""Exception types raised by the solver stack."""


class CrapperError(Exception):
    """Base class for every error raised by this package."""


class NonZeroMean(CrapperError, ValueError):
    """A periodic antiderivative was requested for a field with nonzero mean."""


class OutOfDomain(CrapperError, ValueError):
    pass


class OutOfRange(CrapperError, ValueError):
    pass


class GridMismatch(CrapperError, ValueError):
    pass


class SingularSystem(CrapperError):
    pass


class SelfIntersecting(CrapperError):
    pass


class OriginOnCurve(CrapperError):
    pass


class CurvesTooClose(CrapperError):
    pass


class DegeneratePatch(CrapperError, ValueError):
    pass


class PatchTouchesBoundary(CrapperError, ValueError):
    pass


class DegenerateParametrization(CrapperError):
    pass


class NoConvergence(CrapperError):
    """Iteration failed to converge; ``history`` holds the residual log."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history or [])


class InnerNotConverged(CrapperError):
    pass


class NoBracket(CrapperError):
    pass


class SingularJacobian(CrapperError):
    pass


class VersionError(CrapperError, ValueError):
    pass
