"""Exception types shared across the package."""


class KickedBecError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(KickedBecError):
    """A run configuration failed validation."""


class BasisOverflowError(KickedBecError):
    """Amplitude reached the edge of the momentum basis.

    Raised instead of silently truncating, because aliased amplitude wraps
    around the spectral grid and corrupts the small tunneling tails this
    code exists to measure.
    """

    def __init__(self, message, rotor=None, kick=None):
        super().__init__(message)
        self.rotor = rotor
        self.kick = kick


class MapRegularError(KickedBecError):
    """No seed escaped into a 2D chaotic region; area estimate undefined."""


class WindowOutOfBasisError(KickedBecError):
    """A mode window left the momentum support of the histogram series."""


class InsufficientDataError(KickedBecError):
    """Too few usable points for a fit."""


class NonPositiveSurvivalError(InsufficientDataError):
    """Too few positive survival values remain inside the fit window."""


class FitError(KickedBecError):
    """A fit could not be performed for a non-data reason."""
