"""Outage and throughput analysis for a wireless-powered communication link
with a saturating (non-linear) RF energy harvester."""

__version__ = "0.1.0"

from .analysis import (DerivedConstants, ModelMismatchError, OutageEstimate,
                       SeriesPrecisionError, SystemParams, derived_constants,
                       optimal_rate_asymptotic, optimal_tau_asymptotic,
                       outage_asymptotic, outage_quadrature, outage_series,
                       throughput, throughput_asymptotic, ul_gain_threshold)
from .channel import EffectiveChannel, NakagamiLink, ccdf, effective, pdf, sample
from .ehmodel import (FitError, FitReport, Linear, NonLinearSigmoid,
                      PiecewiseLinear, Tabulated, fit_sigmoid, harvested_power,
                      load_tabulated)
from .mcsim import SimConfig, SimResult, simulate
from .numerics import (BracketError, ConvergenceError, DiffSpec, QuadResult,
                       find_root_bracketed, integrate_01,
                       maximize_quasiconcave, richardson_derivative)
from .scenario import (LinkBudget, dbm_to_watts, mean_gain, parse_scenario_file,
                       table1_defaults, watts_to_dbm)
from .specfun import EvalResult, gamma, gamma_upper_int, hyp_u, reg_lower_gamma, whittaker_w
