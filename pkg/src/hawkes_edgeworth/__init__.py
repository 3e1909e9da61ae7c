"""Exponential Hawkes processes: simulation, maximum likelihood, and a
second-order Edgeworth approximation of the MLE distribution."""

from .core import CorePath, CoreState, compensator, core_path
from .edgeworth import (
    EdgeworthCoefficients,
    ReplicationStats,
    collect_replication,
    estimate_coefficients,
    hermite,
    q_t3,
    q_t3_marginal,
    q_t3_marginal_cdf,
)
from .errors import (
    DegenerateInformationError,
    DegenerateLikelihoodError,
    FormatError,
    NonConvergenceError,
    NumericalError,
)
from .experiment import ExperimentConfig, ExperimentResult, qq_table, run
from .kernels import BACKEND
from .likelihood import LogLikDerivatives, ThirdDerivSummands, derivatives, loglik, third_summands
from .mle import FitOptions, MleFit, fit
from .sim import EventSequence, Theta, intensity_at, simulate

__version__ = "0.1.0"
