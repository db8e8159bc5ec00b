"""Exception hierarchy.

Every error raised by the library derives from :class:`TeleportError`; the
CLI reports ``type(err).__name__`` as the machine-readable error name.
"""


class TeleportError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(TeleportError, ValueError):
    pass


class NotPositiveSemidefinite(TeleportError, ValueError):
    pass


class NonSymmetricNoise(TeleportError, ValueError):
    pass


class DegenerateCovariance(TeleportError, ValueError):
    """A density was requested where the covariance has a zero direction."""


class DegenerateObservedBlock(TeleportError, ValueError):
    pass


class DegenerateInput(TeleportError, ValueError):
    pass


class NegativeSqueezing(TeleportError, ValueError):
    pass


class NegativeNoise(TeleportError, ValueError):
    """An added-noise variance came out negative, so the smearing kernel does not exist."""


class UndefinedFidelity(TeleportError, ValueError):
    pass


class ExactLimitUnsupported(TeleportError, ValueError):
    pass


class ImproperLimitCombination(TeleportError, ValueError):
    """An exact-limit resource was paired with a protocol variant under which it diverges."""


class NonPositiveSamples(TeleportError, ValueError):
    pass


class WindowTooNarrow(TeleportError, ValueError):
    pass
