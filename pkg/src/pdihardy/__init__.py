"""Radial verification toolkit for supersolutions of -div(a |u'|^{p-2} u') >= b Phi(u)
and the Caccioppoli and Hardy inequalities derived from them."""

from .caccioppoli import caccioppoli_margin, local_estimate_margin, truncate_profile, young_split
from .compatibility import check_bp_weight, check_psi_g_condition, check_theta_behavior, check_vanishing_tails
from .constants import (
    caccioppoli_constant,
    hardy_mu2_constant,
    hp_constant,
    make_hp_weights,
    make_talenti_profile,
    sobolev_exponent,
)
from .hardy import HardyData, construct_hardy_measures, hardy_margin, sharp_case_measures
from .model import Margin, PDIProblem, RadialDomain, RadialProfile, ScalarFunction, SigmaResult
from .pairs import PsiGPair, exp_over_t_pair, exp_pair, log_pair, power_pair, table_pairs
from .radial import QuadratureGrid, integrate_radial, p_laplace_radial, radial_derivative
from .rayleigh import MinimizerOptions, minimize_rayleigh, rayleigh_quotient, sharpness_probe
from .supersolution import compute_sigma0, strong_residual, weak_form_margin
from .transforms import radial_change_of_variable, transformed_residual
from .weights import WeightFunction

__version__ = "0.1.0"

__all__ = [
    "HardyData",
    "Margin",
    "MinimizerOptions",
    "PDIProblem",
    "PsiGPair",
    "QuadratureGrid",
    "RadialDomain",
    "RadialProfile",
    "ScalarFunction",
    "SigmaResult",
    "WeightFunction",
    "caccioppoli_constant",
    "caccioppoli_margin",
    "check_bp_weight",
    "check_psi_g_condition",
    "check_theta_behavior",
    "check_vanishing_tails",
    "compute_sigma0",
    "construct_hardy_measures",
    "exp_over_t_pair",
    "exp_pair",
    "hardy_margin",
    "hardy_mu2_constant",
    "hp_constant",
    "integrate_radial",
    "local_estimate_margin",
    "log_pair",
    "make_hp_weights",
    "make_talenti_profile",
    "minimize_rayleigh",
    "p_laplace_radial",
    "power_pair",
    "radial_change_of_variable",
    "radial_derivative",
    "rayleigh_quotient",
    "sharp_case_measures",
    "sharpness_probe",
    "sobolev_exponent",
    "strong_residual",
    "table_pairs",
    "transformed_residual",
    "truncate_profile",
    "weak_form_margin",
    "young_split",
]
