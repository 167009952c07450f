"""Stochastic separation bounds: optimal/explicit sample-size estimates for
Fisher separability in high dimension, plus Monte Carlo verification."""

from .bounds import (
    BoundResult,
    SeparabilityQuery,
    bound,
    exponent_b,
    exponent_b_numeric,
    m_from_f,
    perturbed_max_m,
    perturbed_probability,
    theorem_ids,
)
from .errors import BudgetExceeded, HypothesisViolation
from .montecarlo import (
    MCEstimate,
    count_inseparable_pairs,
    estimate_set_separability,
    estimate_two_point,
    is_inseparable_ordered,
    sample,
)
from .specfun import LogProb, ln_beta, ln_gamma, reg_inc_beta, reg_inc_beta_upper
from .twopoint import RadialModel, SlcParams, TwoPointResult, chernoff_gamma, chernoff_gamma_n

__version__ = "1.0.0"
