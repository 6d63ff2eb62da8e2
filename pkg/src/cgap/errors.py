"""Exception types shared across the package."""


class CgapError(Exception):
    """Base class for errors raised by this package."""


class FormatError(CgapError):
    """Malformed input file or corrupt index container."""


class VerificationError(CgapError):
    """An oracle or self-check disagreed with the structure under test."""
