"""Exception hierarchy shared by the library modules and the CLI."""


class UnstableGibbsError(Exception):
    """Base class for every error raised by this package"""


class InvalidSystem(UnstableGibbsError, ValueError):
    """System parameters violate the hyperbolicity constraints"""


class InvalidPoint(UnstableGibbsError, ValueError):
    """Point lies outside the phase space of its system"""


class NoHistory(UnstableGibbsError):
    """A solenoid point was inverted without a stored backward orbit"""


class DegenerateTangent(UnstableGibbsError, ValueError):
    """Tangent vector too small to carry a direction"""


class BadDelta(UnstableGibbsError, ValueError):
    """Seed length must be positive"""


class BadSeed(UnstableGibbsError, ValueError):
    """Waypoint list cannot define a curve"""


class TangentToStable(UnstableGibbsError, ValueError):
    """Seed polyline runs along the stable direction"""


class PointBudgetExceeded(UnstableGibbsError):
    """Curve refinement would exceed the configured point cap"""


class MissingHistory(UnstableGibbsError):
    """Curve does not carry the orbit anchors needed for an n-step density"""


class GridTooCoarse(UnstableGibbsError, ValueError):
    """Separated-set grid pitch exceeds epsilon / 4"""


class PeriodTooLarge(UnstableGibbsError, ValueError):
    """Requested period is outside the enumeration cap"""


class UnsupportedSystem(UnstableGibbsError):
    """Operation is not defined for this kind of system"""


class ConfigError(UnstableGibbsError, ValueError):
    """Experiment configuration could not be parsed"""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_UNSUPPORTED = 4


def exit_code_for(exc):
    """Map an exception to the CLI exit code"""
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, PointBudgetExceeded):
        return EXIT_RESOURCE
    if isinstance(exc, UnsupportedSystem):
        return EXIT_UNSUPPORTED
    return EXIT_FAILURE
