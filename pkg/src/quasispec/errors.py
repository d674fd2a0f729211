"""Exception hierarchy.

Every error raised on purpose by the library derives from `QuasispecError`.
The CLI maps `ConfigError` to exit code 2 and `NumericalError` to exit code 3.
"""


class QuasispecError(Exception):
    pass


class ConfigError(QuasispecError, ValueError):
    pass


class NumericalError(QuasispecError):
    pass


# numerics
class NonHermitianInput(NumericalError, ValueError):
    pass


class DimensionZero(NumericalError, ValueError):
    pass


class NonPositiveWeight(NumericalError, ValueError):
    pass


class IterationLimit(NumericalError):
    pass


class EmptyAfterWindow(NumericalError, ValueError):
    pass


class InsufficientSamples(NumericalError, ValueError):
    pass


class DegenerateFit(NumericalError, ValueError):
    pass


# contfrac
class PrecisionExhausted(NumericalError):
    pass


class NotEnoughElements(NumericalError, ValueError):
    pass


# tiling
class UnknownLetter(ConfigError):
    pass


class GenerationTooLarge(NumericalError):
    pass


class NotPrimitive(NumericalError, ValueError):
    pass


# potentials
class EmptyWord(ConfigError):
    pass


# supercell / superspace
class GridTooCoarse(NumericalError, ValueError):
    pass


class MeshTooCoarse(NumericalError, ValueError):
    pass


class TruncationTooSmall(NumericalError, ValueError):
    pass


class IndefiniteWeight(NumericalError):
    pass


# transfermap / interface
class NotInGap(NumericalError):
    pass


class TruncationSuspect(NumericalError):
    pass
