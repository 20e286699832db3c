"""Exception hierarchy shared by every module of the toolkit."""


class GaussianChannelError(Exception):
    """Base class for all errors raised by :mod:`gaussian_channels`."""


class StructuralError(GaussianChannelError, ValueError):
    """Shapes, dimensions or symmetry classes of the inputs do not match."""


class NotPSD(GaussianChannelError, ValueError):
    pass


class NotSymplectic(GaussianChannelError, ValueError):
    pass


class NotOrthogonal(GaussianChannelError, ValueError):
    pass


class BlockStructureViolated(GaussianChannelError, ValueError):
    """An orthosymplectic candidate is not of the form ``[[A, B], [-B, A]]``."""


class NotContraction(GaussianChannelError, ValueError):
    pass


class NotSymplecticSet(GaussianChannelError, ValueError):
    pass


class InvalidTemperature(GaussianChannelError, ValueError):
    pass


class InvalidChannel(GaussianChannelError, ValueError):
    """``Y - i(J - X^T J X)`` is not positive semidefinite."""


class ExtensionFailed(GaussianChannelError, RuntimeError):
    """Symplectic Gram-Schmidt ran out of usable candidate vectors."""
