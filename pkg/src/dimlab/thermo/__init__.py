from .fmb import alpha_cascade, cascade_residuals, g_m, log_alpha_cascade, solve_fmb
from .gibbs import GibbsApprox, gibbs_weights, hdim_gibbs
from .potential import LevelSums, Potential, Table, birkhoff_sum
from .pressure import BetaPressure, GaussPressure, PressureBracket, pressure_beta, pressure_gauss
from .roots import DimensionResult, aitken, bracket_root, solve_dimension_beta, solve_dimension_gauss

__all__ = [
    "alpha_cascade", "cascade_residuals", "g_m", "log_alpha_cascade", "solve_fmb",
    "GibbsApprox", "gibbs_weights", "hdim_gibbs",
    "LevelSums", "Potential", "Table", "birkhoff_sum",
    "BetaPressure", "GaussPressure", "PressureBracket", "pressure_beta", "pressure_gauss",
    "DimensionResult", "aitken", "bracket_root", "solve_dimension_beta", "solve_dimension_gauss",
]
