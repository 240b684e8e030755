"""Exception hierarchy shared by every module of the package."""


class CurveError(Exception):
    """Base class for all errors raised by lorentz_curves."""


class DivisionBySingularity(CurveError, ZeroDivisionError):
    """A jet was divided by a series whose leading coefficient vanishes."""


class PoleError(DivisionBySingularity):
    """A curve was evaluated at (or within the guard band of) a pole."""


class DomainError(CurveError, ValueError):
    """Argument outside the domain of a function or of a curve."""


class ParseError(CurveError, ValueError):
    """Malformed curve expression.

    ``offset`` is the byte offset into the source text at which parsing failed.
    """

    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.message = message
        self.offset = offset


class UnknownFunction(ParseError):
    pass


class UnboundVariable(ParseError):
    pass


class DegenerateCurvature(CurveError):
    """Curvature vanishes, so the Frenet frame is undefined."""


class LightlikeNormal(CurveError):
    """Spacelike curve whose acceleration is lightlike (no Frenet frame)."""


class StraightNullLine(CurveError):
    """Null curve with vanishing second derivative."""


class DegenerateFrame(CurveError):
    pass


class KappaNotOne(CurveError):
    """An identity that needs unit curvature was applied to a curve without it."""


class SigmaSingular(CurveError):
    """The slant-helix indicator denominator vanishes."""


class RangeError(CurveError, ValueError):
    """Torsion family evaluated outside its validity interval."""


class TauRangeError(RangeError):
    pass


class FrameBlowup(CurveError, ArithmeticError):
    pass


class NoConvergence(CurveError):
    """Least-squares fit ran out of iterations.

    The last iterate is kept on the exception as ``params`` and ``rms``.
    """

    def __init__(self, message, params=None, rms=None):
        super().__init__(message)
        self.params = params
        self.rms = rms


class InsufficientSamples(CurveError, ValueError):
    pass


class EmptyGrid(CurveError, ValueError):
    pass


class NotApplicable(CurveError, ValueError):
    """Detector applied to a curve type it is not defined for."""
