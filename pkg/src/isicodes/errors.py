"""Exception hierarchy shared by all isicodes modules."""


class IsiCodesError(Exception):
    """Base class for every error raised by this package."""


# finite field
class PolynomialNotPrimitive(IsiCodesError):
    pass


class DegreeMismatch(IsiCodesError):
    pass


class SingularGramMatrix(IsiCodesError):
    pass


# rank codes
class ParamsOutOfRange(IsiCodesError):
    pass


class EnumerationTooLarge(IsiCodesError):
    pass


class NotZeroTailed(IsiCodesError):
    pass


class TailNotZero(IsiCodesError):
    pass


# minimal basis / appendix checks
class SpaceTooLarge(IsiCodesError):
    pass


class NotRepresentable(IsiCodesError):
    """The minimal-basis construction failed to terminate or to span G_f."""


class ShapeMismatch(IsiCodesError):
    pass


class ThresholdNotMet(IsiCodesError):
    pass


# constellation / encoder
class UnsupportedL(IsiCodesError):
    pass


class LabelLengthMismatch(IsiCodesError):
    pass


class IndexOutOfRange(IsiCodesError):
    pass


class IncompatibleLayerParams(IsiCodesError):
    pass


class CodebookTooLarge(IsiCodesError):
    pass


# trellis
class BlockTooShort(IsiCodesError):
    pass


class MessageDegreeTooHigh(IsiCodesError):
    pass


# simulation
class EmptyCodebook(IsiCodesError):
    pass


class InsufficientPoints(IsiCodesError):
    pass


class ConfigError(IsiCodesError):
    """Invalid simulation or CLI configuration."""


class ParseError(IsiCodesError):
    """Malformed input file."""
