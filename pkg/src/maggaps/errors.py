"""Exception hierarchy shared by all modules."""


class MagGapsError(Exception):
    """Base class; ``module`` names the component that raised."""

    module = "maggaps"

    def __init__(self, message, module=None):
        if module is not None:
            self.module = module
        super().__init__(message)

    def __str__(self):
        return f"[{self.module}] {super().__str__()}"


class ConfigurationError(MagGapsError):
    pass


class DomainError(MagGapsError, ValueError):
    pass


class GeometryError(MagGapsError):
    pass


class NumericalError(MagGapsError, RuntimeError):
    pass


class MorseTypeViolation(DomainError):
    pass


class ResolutionError(NumericalError):
    pass


class CutoffExceeded(DomainError):
    pass


class RangeError(DomainError):
    pass


class MuTooLarge(DomainError):
    pass
