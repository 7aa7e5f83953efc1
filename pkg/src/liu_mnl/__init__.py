"""Liu shrinkage estimation for multinomial logistic regression."""

from .irls import FitError, MleFit, MulticollinearityError, SeparationError, fit_mle, mle_covariance, mle_scalar_mse
from .linalg import EigenDecomposition, condition_number, solve_spd, symmetric_eigen
from .liu import (
    LiuFit,
    SpectralSummary,
    d_individual,
    fit_liu,
    liu_estimate,
    liu_moments,
    liu_scalar_mse,
    mse_gradient,
    select_d,
    spectral_summary,
)
from .model import CoefficientSet, Dataset, log_likelihood, score, softmax_probabilities, weight_vector
from .simulation import CellResult, SimulationGrid, run_cell, run_grid

__version__ = "0.1.0"
