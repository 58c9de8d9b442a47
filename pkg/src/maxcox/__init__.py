"""Exact and limiting laws of maxima over random sample sizes, with convergence-rate bounds."""

from .errors import DomainError, NotIntegrableError, ScenarioError, TableFormatError
from .evt_laws import EvtLaw, classical_form, h_tau, log_h_tau
from .exact_law import RandomSizeLaw, max_cdf, normalized_max_cdf
from .mixing import MixingLaw, sup_lambda_power
from .montecarlo import SimConfig, certify, dkw_epsilon, ecdf, sample_max, simulate
from .normalizer import NormalizationPlan, make_plan
from .obs_dist import Domain, ObservationLaw
from .rate_bounds import BoundReport, optimize_parameters

__all__ = [
    "BoundReport", "Domain", "DomainError", "EvtLaw", "MixingLaw", "NormalizationPlan", "NotIntegrableError",
    "ObservationLaw", "RandomSizeLaw", "ScenarioError", "SimConfig", "TableFormatError", "certify",
    "classical_form", "dkw_epsilon", "ecdf", "h_tau", "log_h_tau", "make_plan", "max_cdf", "normalized_max_cdf",
    "optimize_parameters", "sample_max", "simulate", "sup_lambda_power",
]  # fmt: skip
