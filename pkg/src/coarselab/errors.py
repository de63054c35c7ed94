"""Exception types shared across the library.

The CLI maps these onto exit code 2 (input or precondition problems);
verdict objects that come back with a failing status map onto exit code 1.
"""


class CoarselabError(Exception):
    """Base class for all library errors."""


class ParameterError(CoarselabError):
    """A plain argument is out of range (negative depth, lo > hi, ...)."""


class MalformedFamilyError(CoarselabError):
    """A family member references a point id the space does not contain,
    or a member is empty."""


class SpaceSpecError(CoarselabError):
    """A generator spec (cone weights, box tower, ...) violates its invariants."""


class ActionTableError(CoarselabError):
    """A generator table is not a bijection of the window, or a declared
    inverse pair does not compose to the identity."""


class ModeError(CoarselabError):
    """An operation mode was requested whose precondition fails
    (e.g. the isometric quotient metric for a non-isometric action)."""


class NotFiniteGroupError(CoarselabError):
    """Group closure exceeded the exploration cap."""


class NotDecomposableError(CoarselabError):
    """A band operator has a support pair no (g, R) combination covers."""

    def __init__(self, pair, message=None):
        self.pair = pair
        super().__init__(message or f"support pair {pair!r} is covered by no (g, R)")


class PreconditionError(CoarselabError):
    """A structural precondition of an operation fails (identity element
    passed where a non-identity one is required, closeness witness missing,
    mismatched decompositions, ...)."""
