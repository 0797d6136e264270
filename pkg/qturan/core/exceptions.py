"""
Exception hierarchy shared by all services.

Input problems also derive from ValueError so callers that only know the
builtin hierarchy still catch them.
"""


class TuranError(Exception):
    """Base class for every toolkit error."""


class InvalidFamilyError(TuranError, ValueError):
    """A family or QFAM file breaks its format or range rules."""


class DimensionError(TuranError, ValueError):
    """A dimension lies outside the cap of the requested operation."""


class PatternError(TuranError, ValueError):
    """A pattern spec or QPAT file is malformed, cyclic or too large."""


class NotFreeError(TuranError, ValueError):
    """An operation needed an F-free family and got one containing a copy."""


class GuardExceededError(TuranError):
    """Copy enumeration would exceed the configured guard."""


class InfeasibleMethodError(TuranError):
    """The requested search method cannot run on these parameters."""
