"""Exception hierarchy shared by every module of the package."""


class ChebyshevError(Exception):
    """Base class for all errors raised by chebbounds."""


class DimensionError(ChebyshevError, ValueError):
    """Sequences, weights or vectors have incompatible shapes."""


class SequenceTooShort(ChebyshevError, ValueError):
    """A sequence needs at least two members."""


class ExponentError(ChebyshevError, ValueError):
    """A Hölder exponent is not admissible (finite exponents must exceed 1)."""


class DegeneratePartialSum(ChebyshevError, ValueError):
    """A partial sum P_i or tail sum that must be divided by is (near) zero.

    ``index`` is 1-based, matching the usual indexing of partial sums, and
    ``which`` is ``"P"`` for a leading sum or ``"Pbar"`` for a tail sum.
    """

    def __init__(self, index, which="P", value=0.0):
        self.index = index
        self.which = which
        self.value = value
        super().__init__(f"|{which}_{index}| = {abs(value):.3g} is below the degeneracy guard")


class NotProbability(ChebyshevError, ValueError):
    """Weights are required to be nonnegative and to sum to one."""


class EnclosureViolated(ChebyshevError, ValueError):
    """A sequence member lies outside its midpoint ball (index is 1-based)."""

    def __init__(self, index, excess):
        self.index = index
        self.excess = excess
        super().__init__(f"member {index} lies outside the enclosure by {excess:.3g}")


class ComplexFieldUnsupported(ChebyshevError, ValueError):
    """Operation is defined over real inner product spaces only."""


class NonConvexModel(ChebyshevError, ValueError):
    """A function model failed the gradient-inequality convexity spot check."""


class NoKnownWitness(ChebyshevError, LookupError):
    """No constructive equality instance is registered for this bound."""


class CounterexampleFound(ChebyshevError):
    """A sampled instance beat a bound, i.e. the dominance invariant failed.

    This signals a defect, not a recoverable state.
    """

    def __init__(self, instance, ratio, bound, branch):
        self.instance = instance
        self.ratio = ratio
        self.bound = bound
        self.branch = branch
        super().__init__(f"{bound}/{branch}: sampled ratio {ratio!r} exceeds 1")


class NotUniform(NotProbability):
    """A uniform-weight specialisation was given non-uniform weights."""


class EnclosureMissing(ChebyshevError, ValueError):
    """A bound needs bounding vectors that were not supplied."""
