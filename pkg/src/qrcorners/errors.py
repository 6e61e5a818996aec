"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: ``InvalidInputError`` -> 2,
``ResourceCapError`` -> 3.
"""

from __future__ import annotations


class QRCornersError(Exception):
    """Base class for library errors."""


class InvalidInputError(QRCornersError, ValueError):
    """Malformed descriptor, out-of-range index, inconsistent dimensions."""


class ResourceCapError(QRCornersError, ValueError):
    """A desk-scale enumeration cap would be exceeded."""


class DegeneracyError(QRCornersError, ArithmeticError):
    """Character-degree extraction failed numerically after all retries."""


class ConvergenceError(QRCornersError, RuntimeError):
    """Weak regularity search ran out of budget.

    The best decomposition found so far is attached as ``best``.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best
