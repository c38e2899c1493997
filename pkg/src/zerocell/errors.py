"""Exception types shared across the package."""


class ZerocellError(Exception):
    """Base class for all package-specific errors."""


class EmptyRegionError(ZerocellError):
    """A region required to be nonempty turned out to be empty."""


class UnboundedRegionError(ZerocellError):
    """A region required to be bounded turned out to be unbounded."""


class PreconditionViolation(ZerocellError):
    """Caller violated a documented precondition."""


class UnsupportedSpecError(ZerocellError):
    """The (set, density) pair is outside the supported whitelist."""


class SpecMismatchError(ZerocellError):
    """A density spec does not define values on a component carrying mass."""


class SamplerStallError(ZerocellError):
    """Rejection sampling exceeded its proposal cap."""


class MissingDensityBoundError(ZerocellError):
    """A spherical density was used for sampling without a declared maximum."""


class DomainError(ZerocellError):
    """Numeric argument outside the formula's validity range."""
