"""Secret-key rates for correlated sources over wiretap channels.

Bounds and capacities for discrete and Gaussian models, side-information and
public-discussion variants, and a small-blocklength simulator of the
random-binning coding scheme.
"""

__version__ = "0.1.0"

from .bounds import (
    AuxiliaryWitness,
    BoundResult,
    OptimizerConfig,
    degraded_capacity,
    lower_bound,
    rate_quantities,
    upper_bound,
)
from .errors import ModelError, NumericalHealthWarning, ParameterError, UsageError
from .extensions import discussion_upper_bound, separate_keys_rate, side_info_capacity
from .gaussian import GaussianParallelModel, gaussian_capacity, discussion_curve, tradeoff_curve
from .models import DegradedProductProblem, DiscreteProblem, SideInfoProblem, WiretapChannel
from .probkit import JointPmf, Pmf, StochasticMatrix

__all__ = [
    "AuxiliaryWitness", "BoundResult", "DegradedProductProblem", "DiscreteProblem",
    "GaussianParallelModel", "JointPmf", "ModelError", "NumericalHealthWarning",
    "OptimizerConfig", "ParameterError", "Pmf", "SideInfoProblem", "StochasticMatrix",
    "UsageError", "WiretapChannel", "__version__", "degraded_capacity", "discussion_curve",
    "discussion_upper_bound", "gaussian_capacity", "lower_bound", "rate_quantities",
    "separate_keys_rate", "side_info_capacity", "tradeoff_curve", "upper_bound",
]
