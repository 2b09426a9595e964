"""
Warnings and errors raised by tkcore.
"""
from astropy.utils.exceptions import AstropyUserWarning

__all__ = ['TkcoreUserWarning', 'EdgeListParseError', 'IndexFormatError',
           'ForestInvariantError']


class TkcoreUserWarning(AstropyUserWarning):
    """
    Input data was usable but had to be altered, e.g. self-loops were dropped.
    """


class EdgeListParseError(ValueError):
    """
    An edge list could not be parsed.

    Parameters
    ----------
    message: `str`
        Description of the problem.

    line_number: `int` or `None`
        1-based line of the offending input, if there is one.
    """

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class IndexFormatError(ValueError):
    """
    A serialized index is corrupt, truncated or of an unsupported version.
    """


class ForestInvariantError(RuntimeError):
    """
    ECB-Forest maintenance reached a state that contradicts its invariants.
    """
