"""Exception types shared across the package."""


class OutsideDomain(ValueError):
    """Point is not strictly inside the requested hyperbolic domain."""


class ParameterOutsideDisc(ValueError):
    """Moebius parameter or argument lies outside the open unit disc."""


class ZeroArgument(ValueError):
    """The logarithm is undefined at zero."""


class OnCut(ValueError):
    """Point lies on (or within angular tolerance of) a branch cut."""


class OutsideDisc(ValueError):
    """Point lies outside the disc a branch function is defined on."""


class DiscContainsOrigin(ValueError):
    """A disc that must omit the origin contains it."""


class AnchorMismatch(ValueError):
    """The anchor point does not map into the requested disc."""


class OrbitMismatch(ValueError):
    """A list of points is not a forward orbit of the exponential map."""


class DiscTouchesOrigin(ValueError):
    """A pullback disc along the chain reaches the origin."""


class TargetZero(ValueError):
    """The inverse-branch target must be nonzero."""


class CenterTooFarLeft(ValueError):
    """The disc center's real part is below the admissible threshold."""


class EmptyCompactSet(ValueError):
    """The compact target set must be nonempty."""


class ZeroInCompactSet(ValueError):
    """The compact target set must omit the origin."""


class WitnessNotFound(RuntimeError):
    """A witness search exhausted its budget without a verified result."""
