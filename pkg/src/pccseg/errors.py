"""Exception hierarchy shared by all pccseg modules."""


class PccsegError(Exception):
    """Base class for all pccseg errors."""


class InvalidInputError(PccsegError):
    """Input data violates a precondition (bad geometry, missing class, ...)."""


class InvalidParameterError(PccsegError):
    """A parameter value is out of its valid range (e.g. k >= node count)."""


class FormatError(PccsegError):
    """A file's contents do not match the expected format."""


class ConfigurationError(PccsegError):
    """A configuration object is internally inconsistent."""
