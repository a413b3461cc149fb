"""Exception types shared across the package.

Every error raised on a modeling-contract violation derives from
FabricModelError so callers can distinguish domain failures from plain
programming mistakes.
"""


class FabricModelError(Exception):
    """Base class for all domain errors raised by this package."""


class ConfigError(FabricModelError):
    """A configuration value or key violates the model's constraints."""


class PortBudgetExceeded(FabricModelError):
    """A switch would need more ports than its radix provides."""


class InfeasibleGlobalPlan(FabricModelError):
    """The per-switch global port plan cannot host the requested links."""


class OddGroupCount(FabricModelError):
    """A balanced group bipartition requires an even compute-group count."""


class NonUniformGlobalPlan(FabricModelError):
    """An analytic formula assumed uniform per-pair global links."""


class OracleTooLarge(FabricModelError):
    """The instance exceeds the exhaustive oracle's enumeration bound."""


class Unreachable(FabricModelError):
    """No route of the requested form exists between the two endpoints."""


class BadIntermediate(FabricModelError):
    """The detour group of an indirect route must differ from both ends."""


class NonPowerOfTwo(FabricModelError):
    """The chosen collective algorithm requires a power-of-two count."""


class NonFactorableParticipants(FabricModelError):
    """Participants must split evenly into ranks per node times nodes."""


class UnsupportedPrecision(FabricModelError):
    """The device does not define the requested arithmetic precision."""


class InsufficientCalibrationData(FabricModelError):
    """Calibration needs at least one latency and one bandwidth point."""
