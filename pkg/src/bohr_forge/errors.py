"""Exception types raised across bohr_forge."""


class BohrForgeError(Exception):
    """Base class for all library errors."""


class GroupSpecError(BohrForgeError, ValueError):
    pass


class MismatchedGroupError(BohrForgeError, ValueError):
    pass


class NotASubgroupError(BohrForgeError, ValueError):
    pass


class UnnormalizedMeasureError(BohrForgeError, ValueError):
    pass


class NoRegularRadius(BohrForgeError):
    """No candidate radius passed the regularity predicate."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class PreconditionViolated(BohrForgeError, ValueError):
    pass


class WitnessNotFound(BohrForgeError, RuntimeError):
    """A search that is guaranteed to succeed did not; this is a bug."""


class HypothesisFailed(BohrForgeError):
    pass


class ZeroMass(BohrForgeError, ValueError):
    pass


class SizeTooLarge(BohrForgeError, ValueError):
    pass


class CoverageFailure(BohrForgeError):
    pass


class ComparabilityFailed(BohrForgeError):
    pass


class ZeroL2Mass(BohrForgeError):
    pass


class MassBelowThreshold(BohrForgeError):
    pass


class InvalidCertificate(BohrForgeError, ValueError):
    pass


class GroupTooLarge(BohrForgeError, ValueError):
    pass
