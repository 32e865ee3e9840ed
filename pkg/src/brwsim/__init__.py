"""Branching random walks in the boundary case: simulation, spine, martingales, fixed point."""
__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .model import (OffspringLaw, AssumptionReport, psi, psi_prime, validate_assumptions,
                    boundary_normalize, extinction_prob, discrete_binary, discrete_gw,
                    gaussian_boundary)
from .simulate import Mode, Generation, TrialStats, step_generation, run_trial, collect, enumerate_exact
from .spine import sample_spine, many_to_one, many_to_one_exact, q_vs_p_consistency
from .martingale import (additive, partition, multiplicative, estimate_lambda, conditioned_samples,
                         NormingEstimate)
from .fixedpoint import PhiTable, solve_phi, smoothing_operator, cstar_fit, xi_star_samples
from .rwtools import RandomWalkPath, stay_positive, min_exp_moment, exponent_regress
