"""Čebyšev functional on weighted vector sequences, its identities and Grüss-type bounds."""

from .bounds import (
    THEOREMS,
    BallEnclosure,
    BoundReport,
    check_enclosure,
    compare_all,
    evaluate,
    k_infinity,
    k_one,
    k_q,
)
from .errors import (
    ChebyshevError,
    ComplexFieldUnsupported,
    CounterexampleFound,
    DegeneratePartialSum,
    DimensionError,
    EnclosureMissing,
    EnclosureViolated,
    ExponentError,
    NoKnownWitness,
    NonConvexModel,
    NotProbability,
    NotUniform,
    SequenceTooShort,
)
from .extremal import SearchConfig, SearchResult, construct_n2_witness, random_search
from .functional import (
    chebyshev,
    chebyshev_uniform,
    double_sum_rhs,
    identity_abel_rhs,
    identity_normalized_rhs,
    identity_residuals,
    identity_tail_mean_rhs,
    kernel,
)
from .instances import Instance, load_instance, parse_instance
from .jensen import BUILTIN_MODELS, ConvexFunctionModel, gradient_gap, jensen_gap, jensen_report
from .vectors import Tolerance, WeightVector, inner, norm

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
