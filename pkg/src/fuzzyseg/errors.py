"""Exception types raised across the package."""


class FuzzySegError(ValueError):
    """Base class for all package errors."""


class EmptyInput(FuzzySegError):
    pass


class DegenerateSegment(FuzzySegError):
    """Segment height is too small for a shape coefficient."""


class InvalidWidths(FuzzySegError):
    pass


class FaceBehindCamera(FuzzySegError):
    pass


class DegenerateProjection(FuzzySegError):
    pass


class DegenerateModelSegment(FuzzySegError):
    pass


class EmptyScene(FuzzySegError):
    pass


class EmptyMask(FuzzySegError):
    pass


class ParseError(FuzzySegError):
    """Input file could not be parsed; the message names the offending field or line."""
