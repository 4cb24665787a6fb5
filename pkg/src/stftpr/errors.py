"""Exception types shared across the package."""


class StftprError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatch(StftprError):
    """Inputs disagree on the cyclic dimension d."""


class EmptySupport(StftprError):
    """An operation received a signal or support set with no nonzero entries."""


class WindowClassError(StftprError):
    """A window does not belong to the class an operation requires."""


class NonGenericWindow(WindowClassError):
    """Short window whose ambiguity support is smaller than the full band."""


class AnchorInvalid(StftprError):
    """A proposed hole anchor fails its validation conditions."""


class InconsistentData(StftprError):
    """Measurement data contradicts itself beyond tolerance."""


class InsufficientSamples(StftprError):
    """Not enough sample points to run the limited-sample line recovery."""


class PreconditionViolated(StftprError):
    """Structural precondition of a recovery routine does not hold."""


class RejectionLimit(StftprError):
    """A seeded rejection loop exceeded its draw budget."""


class InvalidBundle(StftprError):
    """A counterexample generator produced a bundle failing its own self-check."""
