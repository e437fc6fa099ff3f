"""Exception hierarchy.

Every data-level failure raised by the library derives from ``ProsodyError``;
the CLI maps these to exit status 2.
"""


class ProsodyError(Exception):
    """Base class for data errors (bad input files, unsatisfiable preconditions)."""


# annotation
class MalformedTextGrid(ProsodyError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class OverlappingIntervals(ProsodyError):
    pass


class EncodingError(ProsodyError):
    pass


class UnknownTier(ProsodyError):
    pass


class NotIntervalTier(ProsodyError):
    pass


# signal
class UnsupportedFormat(ProsodyError):
    pass


class CorruptHeader(ProsodyError):
    pass


class NyquistViolation(ProsodyError):
    pass


class SignalTooShort(ProsodyError):
    pass


class NonUniformSpacing(ProsodyError):
    pass


class NegativeF0(ProsodyError):
    pass


class MalformedRow(ProsodyError):
    pass


class MissingFrameStep(ProsodyError):
    pass


class NoVoicedFrames(ProsodyError):
    pass


# stylization
class InsufficientPoints(ProsodyError):
    pass


class DegenerateAbscissa(ProsodyError):
    pass


class NumericalFailure(ProsodyError):
    pass


class OutsideDomain(ProsodyError):
    pass


class EvenWidth(ProsodyError):
    pass


# metrics
class InsufficientData(ProsodyError):
    def __init__(self, n, needed=2):
        self.n = n
        self.needed = needed
        super().__init__(f"insufficient data: n={n} < {needed}")


class ZeroMean(ProsodyError):
    pass


class NonPositiveDuration(ProsodyError):
    pass


class SequenceShorterThanWindow(ProsodyError):
    pass


class EmptyGroup(ProsodyError):
    pass


class EmptyInput(ProsodyError):
    pass


# scales
class NonPositiveFrequency(ProsodyError):
    pass


# tonefst
class InvalidToneSymbol(ProsodyError):
    pass


# render
class EmptyStats(ProsodyError):
    pass


class EmptySeries(ProsodyError):
    pass
