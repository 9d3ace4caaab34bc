"""Exception hierarchy shared by all modules."""


class PencilRankError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(PencilRankError, ValueError):
    """Operand shapes are incompatible."""


class Singular(PencilRankError, ArithmeticError):
    """A pivot fell below the singularity threshold."""


class NonInvertibleFactor(Singular):
    """A factor of a group element is not invertible."""


class NoConvergence(PencilRankError, ArithmeticError):
    """Shifted QR iteration exhausted its sweep budget."""


class Inconclusive(PencilRankError):
    """Randomized test could not reach a verdict within its try budget."""


class AllSliceCombinationsSingular(PencilRankError):
    """Every sampled combination of frontal slices was singular."""


class PerturbationFailed(PencilRankError):
    """No admissible perturbation was found within the attempt budget."""


class FormatError(PencilRankError, ValueError):
    """A tensor or matrix document could not be parsed."""
