"""Exception hierarchy shared by every module.

The CLI maps these classes onto distinct exit codes, so new error
conditions should subclass one of the categories below rather than
raising bare ValueError.
"""


class DpfError(Exception):
    """Base class for all library errors."""


class ParameterError(DpfError, ValueError):
    """An argument or parameter combination is invalid."""


class HonestMajorityError(ParameterError):
    """The corruption bound is incompatible with an honest majority."""


class GuardError(DpfError):
    """Refused outright: the parameters exceed a hard resource guard."""


class FormatError(DpfError, ValueError):
    """A serialized key or data file is malformed."""


class InternalError(DpfError):
    """An internal invariant failed; indicates a bug, not bad input."""
