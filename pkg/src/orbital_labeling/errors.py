"""Exception hierarchy shared by all solver modules."""


class OrbitalError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgument(OrbitalError, ValueError):
    pass


class DegenerateInput(OrbitalError, ValueError):
    """Raised when features share a radius and strict mode is active."""


class UnsupportedVariant(OrbitalError):
    pass


class Infeasible(OrbitalError):
    pass


class ParseError(OrbitalError, ValueError):
    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class OracleRefused(OrbitalError):
    """Raised when a brute-force search would exceed its hard size limit."""


class AdmissibleRangeError(OrbitalError):
    """The crossing-free rotation set of a leader pair is not a single arc."""
