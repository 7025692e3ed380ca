"""Exception types shared across the toolkit."""


class StreampartError(Exception):
    """Base class for all streampart errors."""


class FormatError(StreampartError):
    """A binary input file is malformed (truncated or mis-sized)."""


class ConfigError(StreampartError):
    """A parameter is outside its allowed range."""


class IdRangeError(StreampartError):
    """An edge references a vertex id outside the declared range."""


class CapacityError(StreampartError):
    """No partition can accept another edge (unreachable for alpha >= 1)."""
