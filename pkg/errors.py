"""
TauSet - Exception hierarchy
Raised by the library modules, converted to exit codes by the command layer.
"""


class TauSetError(Exception):
    """Base class for every error raised by this package."""


class TextFormatError(TauSetError, ValueError):
    """Input bytes could not be decoded into a text."""


class ParameterError(TauSetError, ValueError):
    """A size parameter (tau, b, lambda3, lambda4) is out of range."""


class PipelineOrderError(TauSetError, ValueError):
    """Positions arrived out of order or a position set is not sorted."""


class PositionNotIndexed(TauSetError, KeyError):
    """A query named a position that is not a leaf of the tree."""


class InvariantBreach(TauSetError):
    """A structural guarantee of the construction did not hold."""


class ProviderWindowError(InvariantBreach):
    """An LCE query reached outside the provider's live window."""


class LetterOverflow(InvariantBreach):
    """A letter had more close neighbours than its tuple has fields."""


class RecompressionStall(InvariantBreach):
    """Some distance exponent needed more than three shrink steps."""


class DeterminismError(InvariantBreach):
    """A replayed run produced a different number of positions."""
