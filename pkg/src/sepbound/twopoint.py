"""Two-point ordered inseparability probabilities and bounds f(n, alpha).

For each distribution family this module computes P[alpha*(x,x) <= (x,y)] for
an i.i.d. pair -- exactly where an exact expression exists, otherwise as an
explicit upper bound or asymptotic form.  Every result is carried in log
domain (:class:`~sepbound.specfun.LogProb`); the master principle in
:mod:`sepbound.bounds` turns these into sample-size bounds.

All operations are pure functions; component and radial-model callables must
be safe for concurrent invocation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .errors import HypothesisViolation
from .numerics import expand_bracket, integrate_adaptive, integrate_log_domain, maximize_unimodal
from .specfun import LogProb, ln_beta, ln_gamma, reg_inc_beta

__all__ = [
    "TwoPointResult",
    "RadialModel",
    "SlcParams",
    "Uniform01",
    "SymmetricBernoulli",
    "ThreePoint",
    "Laplace",
    "NormalComponent",
    "TabulatedDensity",
    "ChernoffResult",
    "ball_upper",
    "ball_exact",
    "ball_asymptotic",
    "ball_radial_model",
    "layer_ratio_cdf",
    "layer_radial_model",
    "exponential_radial_model",
    "spherical_generic",
    "normal_exact",
    "normal_upper_iest2",
    "exponential_exact",
    "exponential_asymptotic",
    "rotgeneral_f",
    "rotsimple_f",
    "slc_f",
    "indbound_exponent",
    "product_hoeffding_f",
    "product_bernstein_f",
    "chernoff_gamma",
    "chernoff_gamma_n",
    "dependent_f",
]

SQRT_HALF = math.sqrt(0.5)

# Exact spherically-invariant integrals switch to log-domain quadrature above
# this dimension; below it linear arithmetic is exact enough and lets the two
# integration routes cross-validate.
_LOG_DOMAIN_N = 60
_REL_TOL = 1e-10


@dataclass(frozen=True)
class TwoPointResult:
    """f(n, alpha) in log domain with its provenance.

    ``kind`` is one of ``exact``, ``upper_bound``, ``asymptotic``;
    ``numeric_error`` is the estimated relative error of the linear value.
    """

    f: LogProb
    kind: str
    numeric_error: float = 0.0

    @property
    def log_f(self) -> float:
        return self.f.log_value


@dataclass(frozen=True)
class RadialModel:
    """Norm-ratio CDF h(n, t) = P[||x||/||y|| <= t] of a spherically invariant law.

    ``log_ratio_cdf`` is optional; if omitted it is derived as log(ratio_cdf)
    and loses accuracy once h underflows, so built-in models supply it.
    """

    ratio_cdf: Callable[[int, float], float]
    description: str = ""
    log_ratio_cdf: Optional[Callable[[int, float], float]] = None

    def log_h(self, n: int, t: float) -> float:
        if self.log_ratio_cdf is not None:
            return self.log_ratio_cdf(n, t)
        h = self.ratio_cdf(n, t)
        if h < 0.0:
            raise ValueError(f"ratio_cdf returned negative value {h}")
        return math.log(h) if h > 0.0 else -math.inf


@dataclass(frozen=True)
class SlcParams:
    """Strong log-concavity parameters of one distribution.

    ``mu`` (norm expectation E||x||) defaults to sqrt(n - 1/gamma) when the
    dimension is known; ``x0_norm`` is the norm of the mean.
    """

    gamma: float
    mu: Optional[float] = None
    x0_norm: float = 0.0

    def __post_init__(self) -> None:
        if not self.gamma > 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.mu is not None and self.mu < 0.0:
            raise ValueError(f"mu must be nonnegative, got {self.mu}")
        if self.x0_norm < 0.0:
            raise ValueError(f"x0_norm must be nonnegative, got {self.x0_norm}")

    def mu_filled(self, n: Optional[int]) -> float:
        if self.mu is not None:
            return self.mu
        if n is None:
            raise ValueError("mu is unset and no dimension was given to fill it")
        return math.sqrt(max(n - 1.0 / self.gamma, 0.0))


def _check_n(n: int, minimum: int = 1) -> None:
    if not (isinstance(n, (int,)) and n >= minimum):
        raise ValueError(f"dimension must be an integer >= {minimum}, got {n!r}")


def _check_alpha(alpha: float, lo_open: float = 0.0) -> None:
    if not (lo_open < alpha <= 1.0):
        raise ValueError(f"alpha must be in ({lo_open}, 1], got {alpha}")


# ---------------------------------------------------------------------------
# Generic spherically invariant integral
#
# p(n, a) = a/B((n-1)/2, 1/2) * int_0^{1/a} (1 - a^2 t^2)^{(n-3)/2} h(n,t) dt.
# The substitution t = sin(u)/a removes the integrable endpoint singularity at
# t = 1/a (present for n = 2) and gives, for every n >= 2,
#     p = 1/B((n-1)/2, 1/2) * int_0^{pi/2} cos(u)^{n-2} h(n, sin(u)/a) du.
# ---------------------------------------------------------------------------


def _spherical_log_p(
    n: int,
    alpha: float,
    model: RadialModel,
    kinks_t: Sequence[float] = (),
    rel_tol: float = _REL_TOL,
) -> tuple[float, float]:
    """Returns (log p(n, alpha), relative error estimate)."""
    ln_b = ln_beta((n - 1) / 2.0, 0.5)
    u_hi = 0.5 * math.pi
    points = sorted(
        {math.asin(alpha * t) for t in kinks_t if 0.0 < alpha * t < 1.0}
    )
    if n > _LOG_DOMAIN_N:

        def f_log(u: float) -> float:
            cu = math.cos(u)
            pow_term = 0.0 if n == 2 else (n - 2) * math.log(cu) if cu > 0.0 else -math.inf
            return pow_term + model.log_h(n, math.sin(u) / alpha)

        res = integrate_log_domain(f_log, 0.0, u_hi, rel_tol, points=points)
        return res.value.log_value - ln_b, res.abs_error_estimate

    def f_lin(u: float) -> float:
        cu = math.cos(u)
        pow_term = 1.0 if n == 2 else cu ** (n - 2)
        return pow_term * model.ratio_cdf(n, math.sin(u) / alpha)

    res = integrate_adaptive(f_lin, 0.0, u_hi, rel_tol, points=points)
    if res.value <= 0.0:
        return -math.inf, res.abs_error_estimate
    rel = res.abs_error_estimate / res.value
    return math.log(res.value) - ln_b, rel


# ---------------------------------------------------------------------------
# Uniform ball
# ---------------------------------------------------------------------------


def ball_radial_model() -> RadialModel:
    """Norm-ratio CDF of the uniform distribution in a ball: h = t^n/2 (t<=1)."""

    def cdf(n: int, t: float) -> float:
        if t <= 0.0:
            return 0.0
        if t <= 1.0:
            return 0.5 * t**n
        return 1.0 - 0.5 * t ** (-n)

    def log_cdf(n: int, t: float) -> float:
        if t <= 0.0:
            return -math.inf
        if t <= 1.0:
            return n * math.log(t) - math.log(2.0)
        return math.log1p(-0.5 * math.exp(-n * math.log(t)))

    return RadialModel(cdf, "uniform ball", log_cdf)


def ball_upper(n: int, alpha: float) -> TwoPointResult:
    """f = (1/2)(2 alpha)^{-n}; an upper bound for the ball, exact at alpha = 1."""
    _check_n(n)
    _check_alpha(alpha)
    log_f = -math.log(2.0) - n * math.log(2.0 * alpha)
    return TwoPointResult(LogProb(log_f), "exact" if alpha == 1.0 else "upper_bound")


def ball_exact(n: int, alpha: float) -> TwoPointResult:
    """Exact two-point probability for the uniform ball (integral form)."""
    _check_n(n, 2)
    _check_alpha(alpha)
    log_p, err = _spherical_log_p(n, alpha, ball_radial_model(), kinks_t=(1.0,))
    return TwoPointResult(LogProb(log_p), "exact", err)


def ball_asymptotic(n: int, alpha: float) -> TwoPointResult:
    """Asymptotically tight upper bound for the ball; formula switches at sqrt(2)/2."""
    _check_alpha(alpha)
    if alpha == SQRT_HALF:
        raise HypothesisViolation("alpha = sqrt(2)/2 is the formula switch point (excluded)")
    if alpha > SQRT_HALF:
        _check_n(n)
        log_f = -math.log(2.0) - n * math.log(2.0 * alpha)
        return TwoPointResult(LogProb(log_f), "upper_bound")
    _check_n(n, 4)
    log_q = (
        -0.5 * math.log(2.0 * math.pi)
        - math.log(alpha * (1.0 - 2.0 * alpha**2))
        + 1.5 * math.log(n)
        - 2.0 * math.log(n - 3.0)
        + 0.5 * (n + 3.0) * math.log1p(-(alpha**2))
    )
    return TwoPointResult(LogProb(log_q), "upper_bound")


# ---------------------------------------------------------------------------
# Spherical layer
# ---------------------------------------------------------------------------


def layer_ratio_cdf(n: int, t: float, R: float) -> float:
    """Norm-ratio CDF of the uniform spherical layer with inner radius R."""
    _check_n(n)
    if not 0.0 < R < 1.0:
        raise ValueError(f"R must be in (0, 1), got {R}")
    return math.exp(_layer_log_cdf(n, t, R)) if t > R else 0.0


def _layer_log_cdf(n: int, t: float, R: float) -> float:
    if t <= R:
        return -math.inf
    if t >= 1.0 / R:
        return 0.0
    log_r = math.log(R)
    # log(1 - R^n), stable for R^n -> 0 and R -> 1
    log_one_minus_rn = math.log1p(-math.exp(n * log_r)) if n * log_r < -1e-17 else math.log(-n * log_r)
    if t <= 1.0:
        # h = t^{-n} (t^n - R^n)^2 / (2 (1-R^n)^2)
        log_t = math.log(t)
        return (
            n * log_t
            + 2.0 * math.log1p(-math.exp(n * (log_r - log_t)))
            - math.log(2.0)
            - 2.0 * log_one_minus_rn
        )
    # h = 1 - t^n (R^n - t^{-n})^2 / (2 (1-R^n)^2); here t^{-n} > R^n
    log_t = math.log(t)
    log_term = (
        -n * log_t
        + 2.0 * math.log1p(-math.exp(n * (log_r + log_t)))
        - math.log(2.0)
        - 2.0 * log_one_minus_rn
    )
    return math.log1p(-math.exp(log_term)) if log_term < 0.0 else -math.inf


def layer_radial_model(R: float) -> RadialModel:
    if not 0.0 < R < 1.0:
        raise ValueError(f"R must be in (0, 1), got {R}")
    return RadialModel(
        lambda n, t: layer_ratio_cdf(n, t, R),
        f"spherical layer R={R}",
        lambda n, t: _layer_log_cdf(n, t, R),
    )


# ---------------------------------------------------------------------------
# Generic spherically invariant distribution
# ---------------------------------------------------------------------------


def spherical_generic(
    n: int,
    alpha: float,
    radial: RadialModel,
    kinks_t: Sequence[float] = (1.0,),
) -> TwoPointResult:
    """Exact two-point probability for any spherically invariant distribution.

    ``radial`` supplies the norm-ratio CDF h(n, t); ``kinks_t`` lists abscissae
    where h has derivative kinks so quadrature panels can be pre-split.
    """
    _check_n(n, 2)
    _check_alpha(alpha)
    log_p, err = _spherical_log_p(n, alpha, radial, kinks_t=kinks_t)
    return TwoPointResult(LogProb(log_p), "exact", err)


# ---------------------------------------------------------------------------
# Standard normal
# ---------------------------------------------------------------------------


def normal_exact(n: int, alpha: float) -> TwoPointResult:
    """f = (1/2) I_{1/(1+alpha^2)}(n/2, 1/2), the exact standard-normal value."""
    _check_n(n)
    _check_alpha(alpha)
    log_i = reg_inc_beta(1.0 / (1.0 + alpha**2), n / 2.0, 0.5).log_value
    return TwoPointResult(LogProb(math.log(0.5) + log_i), "exact", 1e-14)


def normal_upper_iest2(n: int, alpha: float) -> TwoPointResult:
    """Asymptotically tight closed-form upper bound for the normal two-point value.

    f <= sqrt((1+alpha^2)/(2 pi n alpha^2)) * (1+alpha^2)^{-n/2}.
    """
    _check_n(n)
    _check_alpha(alpha)
    a2 = alpha**2
    log_f = 0.5 * (math.log1p(a2) - math.log(2.0 * math.pi * n * a2)) - 0.5 * n * math.log1p(a2)
    return TwoPointResult(LogProb(log_f), "upper_bound")


# ---------------------------------------------------------------------------
# Multivariate exponential (rotation invariant, Gamma(n) radius)
# ---------------------------------------------------------------------------


def _exp_log_h(n: int, t: float) -> float:
    # I_{t/(1+t)}(n, n), evaluated through the numerically stable identity
    # I_{t/(1+t)}(n,n) = 1/2 I_{4t/(1+t)^2}(n, 1/2) for t <= 1 (reflected above).
    if t <= 0.0:
        return -math.inf
    z = 4.0 * t / (1.0 + t) ** 2
    if t <= 1.0:
        return math.log(0.5) + reg_inc_beta(min(z, 1.0), float(n), 0.5).log_value
    li = reg_inc_beta(min(z, 1.0), float(n), 0.5).log_value
    return math.log1p(-0.5 * math.exp(li))


def exponential_radial_model() -> RadialModel:
    return RadialModel(
        lambda n, t: math.exp(_exp_log_h(n, t)),
        "multivariate exponential",
        _exp_log_h,
    )


def exponential_exact(n: int, alpha: float) -> TwoPointResult:
    """Exact two-point probability for the multivariate exponential distribution."""
    _check_n(n, 2)
    _check_alpha(alpha)
    log_p, err = _spherical_log_p(n, alpha, exponential_radial_model(), kinks_t=(1.0,))
    return TwoPointResult(LogProb(log_p), "exact", err)


def exponential_asymptotic(n: int, alpha: float) -> TwoPointResult:
    """Closed-form asymptotic equivalent of the exponential two-point probability."""
    _check_n(n, 4)
    _check_alpha(alpha)
    a2 = alpha**2
    s = math.sqrt(1.0 + 8.0 * a2)
    prefactor = (
        0.5 * math.log(1.0 + 5.0 * a2 + (1.0 + a2) * s)
        - math.log(2.0 * alpha)
        - 0.5 * math.log(math.pi * n)
        - 0.25 * math.log(1.0 + 8.0 * a2)
    )
    rate = 4.0 * math.sqrt(2.0) * alpha * (s - 1.0) / (s + 4.0 * a2 - 1.0) ** 1.5
    return TwoPointResult(LogProb(prefactor + n * math.log(rate)), "asymptotic")


# ---------------------------------------------------------------------------
# General log-concave spherically invariant distribution
# ---------------------------------------------------------------------------


def _log_phi(t: float, n: int, rel_tol: float = 1e-9) -> float:
    """log phi(t, n) = log int g_n(x) (-psi'_{n,t}(x)) dx.

    psi bounds P[||y|| >= x/t] (norm scale-normalized to E||x|| = 1):
    1 for x <= t, exp(-n(x-t)^2/(4t^2)) on [t, 2t], exp(-nx/(8t)) beyond;
    g_n bounds P[||x|| <= x]: exp(-n(1-x)^2/4) below 1, then 1.  psi is
    continuous, so only its derivative pieces are integrated; the piece beyond
    max(2t, 1) where g = 1 has the closed form exp(-n*x0/(8t)).
    """

    def log_g(x: float) -> float:
        return -0.25 * n * (1.0 - x) ** 2 if x < 1.0 else 0.0

    pieces: list[float] = []

    def log_int_a(x: float) -> float:
        # -psi' on (t, 2t): n (x-t)/(2 t^2) exp(-n (x-t)^2 / (4 t^2))
        d = x - t
        if d <= 0.0:
            return -math.inf
        return math.log(n * d / (2.0 * t * t)) - n * d * d / (4.0 * t * t) + log_g(x)

    splits_a = [x for x in (1.0,) if t < x < 2.0 * t]
    res_a = integrate_log_domain(log_int_a, t, 2.0 * t, rel_tol, points=splits_a)
    pieces.append(res_a.value.log_value)

    x0 = max(2.0 * t, 1.0)
    if 2.0 * t < 1.0:
        def log_int_b(x: float) -> float:
            return math.log(n / (8.0 * t)) - n * x / (8.0 * t) + log_g(x)

        res_b = integrate_log_domain(log_int_b, 2.0 * t, 1.0, rel_tol)
        pieces.append(res_b.value.log_value)
    pieces.append(-n * x0 / (8.0 * t))  # analytic tail, g = 1 there

    out = -math.inf
    for piece in pieces:
        if piece == -math.inf:
            continue
        hi, lo = (out, piece) if out >= piece else (piece, out)
        out = hi + (math.log1p(math.exp(lo - hi)) if lo > -math.inf else 0.0)
    return out


def rotgeneral_f(n: int, alpha: float, rel_tol: float = 1e-8) -> TwoPointResult:
    """Explicit upper bound valid for every spherically invariant distribution
    with log-concave radial density (norm scale-normalized to E||x|| = 1, which
    is harmless because the separability check is scale-invariant).

    Supports n = 1 through the continuity limit f(1, alpha) = phi(1/alpha, 1)/2
    (the outer weight collapses to a point mass at t = 1/alpha as n -> 1).
    """
    _check_n(n, 1)
    _check_alpha(alpha)
    if n == 1:
        return TwoPointResult(LogProb(math.log(0.5) + _log_phi(1.0 / alpha, 1)), "upper_bound", 1e-8)

    ln_b = ln_beta((n - 1) / 2.0, 0.5)

    def f_log(u: float) -> float:
        cu = math.cos(u)
        pow_term = 0.0 if n == 2 else (n - 2) * math.log(cu) if cu > 0.0 else -math.inf
        return pow_term + _log_phi(math.sin(u) / alpha, n)

    kinks = sorted({math.asin(a_t) for a_t in (0.5 * alpha, alpha) if 0.0 < a_t < 1.0})
    res = integrate_log_domain(f_log, 0.0, 0.5 * math.pi, rel_tol, points=kinks)
    return TwoPointResult(
        LogProb(res.value.log_value - ln_b), "upper_bound", res.abs_error_estimate + 1e-8
    )


def rotsimple_f(n: int, alpha: float) -> TwoPointResult:
    """f = 2 exp(-n (2 alpha - 1)^2 / (4 (2 alpha + 1)^2)), for alpha > 1/2.

    Valid for every spherically invariant *log-concave* distribution.
    """
    _check_n(n)
    if not 0.5 < alpha <= 1.0:
        raise HypothesisViolation(f"rotsimple requires alpha in (1/2, 1], got {alpha}")
    log_f = math.log(2.0) - n * (2.0 * alpha - 1.0) ** 2 / (4.0 * (2.0 * alpha + 1.0) ** 2)
    return TwoPointResult(LogProb(log_f), "upper_bound")


# ---------------------------------------------------------------------------
# Strongly log-concave distributions
# ---------------------------------------------------------------------------


def slc_f(n: int, alpha: float, slc: SlcParams, improved: bool = True) -> TwoPointResult:
    """Two-point upper bound for an isotropic gamma-SLC distribution.

    ``improved=False`` is the simple route f = 2 exp(-g a^2 mu^2 / (2(1+a)^2));
    ``improved=True`` is the sharper bound (requires n > (1+2a^2)/(g a^2)):
    f = a^2/(1+a^2)^{3/2} sqrt(2 pi g) mu exp(-g a^2 mu^2/(2(1+a^2)))
        + exp(-g a^2 mu^2 / 2).
    """
    _check_n(n)
    _check_alpha(alpha)
    g = slc.gamma
    mu = slc.mu_filled(n)
    a2 = alpha**2
    if not improved:
        log_f = math.log(2.0) - g * a2 * mu**2 / (2.0 * (1.0 + alpha) ** 2)
        return TwoPointResult(LogProb(log_f), "upper_bound")
    if not n > (1.0 + 2.0 * a2) / (g * a2):
        raise HypothesisViolation(
            f"improved SLC bound requires n > (1+2a^2)/(g a^2) = {(1 + 2 * a2) / (g * a2):.3f}, got n={n}"
        )
    log_t1 = (
        math.log(a2)
        - 1.5 * math.log1p(a2)
        + 0.5 * math.log(2.0 * math.pi * g)
        + (math.log(mu) if mu > 0.0 else -math.inf)
        - g * a2 * mu**2 / (2.0 * (1.0 + a2))
    )
    log_t2 = -g * a2 * mu**2 / 2.0
    return TwoPointResult(LogProb((LogProb(log_t1) + LogProb(log_t2)).log_value), "upper_bound")


def indbound_exponent(
    points: Sequence[SlcParams], alpha: float, n: Optional[int] = None
) -> float:
    """Worst-pair exponent E* for independent non-identical gamma_i-SLC data.

    The theorem bound is M < sqrt(delta/2) exp(E*) with
    E* = min_{i,j} g_i g_j (mu_i alpha - ||x_j^0||)^2 / (4 (sqrt(g_j) alpha + sqrt(g_i))^2),
    i.e. the underlying two-point bound is f = 2 exp(-2 E*).  The same formula
    serves mixtures of gamma_i-SLC densities, with components in place of points.
    Requires ||x_j^0|| < alpha mu_i for every ordered pair (i, j).
    """
    _check_alpha(alpha)
    if not points:
        raise ValueError("at least one SlcParams entry is required")
    mus = [p.mu_filled(n) for p in points]
    best = math.inf
    for i, pi in enumerate(points):
        for j, pj in enumerate(points):
            if not pj.x0_norm < alpha * mus[i]:
                raise HypothesisViolation(
                    f"||x0[{j}]|| = {pj.x0_norm} must be < alpha*mu[{i}] = {alpha * mus[i]}"
                )
            num = pi.gamma * pj.gamma * (mus[i] * alpha - pj.x0_norm) ** 2
            den = 4.0 * (math.sqrt(pj.gamma) * alpha + math.sqrt(pi.gamma)) ** 2
            best = min(best, num / den)
    return best


# ---------------------------------------------------------------------------
# Product distributions in the unit cube
# ---------------------------------------------------------------------------

_CENTER_CHOICES = ("general", "cube_center", "mean")


def _hoeffding_range(alpha: float, center: str) -> float:
    """Worst-case per-coordinate support width of z_i, per the center case."""
    if center == "cube_center":
        if alpha >= 0.5:
            return (1.0 + 2.0 * alpha) ** 2 / (16.0 * alpha)
        return 0.5
    # general c in the cube, or c = mean: worst case c'_i = 1
    if alpha >= 0.5:
        return alpha + 1.0 / (4.0 * alpha)
    return (1.0 - alpha) + 1.0 / (4.0 * (1.0 - alpha))


def product_hoeffding_f(
    n: int,
    alpha: float,
    sigma0: float,
    center: str = "general",
    mean_offset_sq: float = 0.0,
) -> TwoPointResult:
    """Hoeffding two-point bound f = exp(-2 n t^2 / range^2) for cube products.

    ``sigma0^2`` is the minimal average per-coordinate variance;
    ``mean_offset_sq`` is (1/n) sum (mu_i - c_i)^2 (zero when the center is the
    mean, the paper's default case).  Requires t = alpha sigma0^2 -
    (1-alpha) mean_offset_sq > 0, which always holds for center = mean or
    alpha = 1.
    """
    _check_n(n)
    _check_alpha(alpha)
    if not 0.0 < sigma0 <= 0.5:
        raise ValueError(f"sigma0 must be in (0, 0.5], got {sigma0}")
    if center not in _CENTER_CHOICES:
        raise ValueError(f"center must be one of {_CENTER_CHOICES}, got {center!r}")
    if center == "mean":
        mean_offset_sq = 0.0
    t = alpha * sigma0**2 - (1.0 - alpha) * mean_offset_sq
    if not t > 0.0:
        raise HypothesisViolation(f"Hoeffding bound needs t > 0, got t = {t}")
    rng = _hoeffding_range(alpha, center)
    return TwoPointResult(LogProb(-2.0 * n * t**2 / rng**2), "upper_bound")


def product_bernstein_f(n: int, alpha: float, sigma0: float) -> TwoPointResult:
    """Bernstein two-point bound for mean-at-cube-center products.

    f = exp(-24 a^2/(12 a^2 + 13) n s0^2) for a >= 1/2 and
    f = exp(-6 a^2/(2 a^2 + a + 3) n s0^2) for a <= 1/2 (equal at a = 1/2).
    """
    _check_n(n)
    _check_alpha(alpha)
    if not 0.0 < sigma0 <= 0.5:
        raise ValueError(f"sigma0 must be in (0, 0.5], got {sigma0}")
    a2 = alpha**2
    if alpha >= 0.5:
        coeff = 24.0 * a2 / (12.0 * a2 + 13.0)
    else:
        coeff = 6.0 * a2 / (2.0 * a2 + alpha + 3.0)
    return TwoPointResult(LogProb(-coeff * n * sigma0**2), "upper_bound")


def dependent_f(n: int, alpha: float, sigma0: float) -> TwoPointResult:
    """Two-point bound for dependent data with conditional product distributions.

    f = exp(-2 (4a/(2a+1))^4 (s0^2 - 1/(16 a^2))^2 n), valid for the cube
    center; requires s0^2 > 1/(16 a^2) (hence alpha > 1/2), which the paper
    shows is unavoidable.
    """
    _check_n(n)
    if not 0.5 < alpha <= 1.0:
        raise HypothesisViolation(f"dependent-data bound requires alpha in (1/2, 1], got {alpha}")
    if not sigma0 > 0.0:
        raise ValueError(f"sigma0 must be positive, got {sigma0}")
    slack = sigma0**2 - 1.0 / (16.0 * alpha**2)
    if not slack > 0.0:
        raise HypothesisViolation(
            f"dependent-data bound requires sigma0^2 > 1/(16 alpha^2); got slack {slack}"
        )
    coeff = (4.0 * alpha / (2.0 * alpha + 1.0)) ** 4
    return TwoPointResult(LogProb(-2.0 * coeff * slack**2 * n), "upper_bound")


# ---------------------------------------------------------------------------
# Chernoff exponents for explicitly given product components
# ---------------------------------------------------------------------------


class ComponentSpec:
    """One coordinate distribution of a product law.

    Components are recentred at their mean before the moment generating
    function is taken: the product theorems separate at the mean point (cube
    center for the symmetric families), and the paper's uniform-cube constant
    0.23319 is defined through the recentred integral.
    """

    def mean(self) -> float:
        raise NotImplementedError

    def variance(self) -> float:
        raise NotImplementedError

    def lambda_sup(self, alpha: float) -> float:
        """Supremum of lambda with E[exp(lambda z)] finite (z = xy - a x^2, centered)."""
        return math.inf

    def neg_log_mgf_z(self, lam: float, alpha: float) -> float:
        """-log E[exp(lam ((x-m)(y-m) - alpha (x-m)^2))]; -inf if the MGF diverges."""
        raise NotImplementedError

    def draw(self, rng, size):  # rng: numpy Generator; used by montecarlo
        raise NotImplementedError


class _DiscreteComponent(ComponentSpec):
    """Finite-support component; the z-MGF is an exact double sum."""

    def _support(self) -> tuple[tuple[float, ...], tuple[float, ...]]:
        raise NotImplementedError

    def mean(self) -> float:
        vals, probs = self._support()
        return sum(v * p for v, p in zip(vals, probs))

    def variance(self) -> float:
        vals, probs = self._support()
        m = self.mean()
        return sum((v - m) ** 2 * p for v, p in zip(vals, probs))

    def neg_log_mgf_z(self, lam: float, alpha: float) -> float:
        vals, probs = self._support()
        m = self.mean()
        acc = 0.0
        for x, px in zip(vals, probs):
            xc = x - m
            for y, py in zip(vals, probs):
                yc = y - m
                acc += px * py * math.exp(lam * (xc * yc - alpha * xc * xc))
        return -math.log(acc)

    def draw(self, rng, size):
        vals, probs = self._support()
        import numpy as np

        return rng.choice(np.asarray(vals, dtype=float), size=size, p=np.asarray(probs))


@dataclass(frozen=True)
class SymmetricBernoulli(_DiscreteComponent):
    """Values 0 and 1, equiprobable (cube vertices after recentring)."""

    def _support(self):
        return (0.0, 1.0), (0.5, 0.5)


@dataclass(frozen=True)
class ThreePoint(_DiscreteComponent):
    """Values 0, 1/2, 1 with probabilities 2 s0^2, 1 - 4 s0^2, 2 s0^2."""

    sigma0: float

    def __post_init__(self):
        if not 0.0 < self.sigma0 <= 0.5:
            raise ValueError(f"ThreePoint requires sigma0 in (0, 0.5], got {self.sigma0}")

    def _support(self):
        q = 2.0 * self.sigma0**2
        return (0.0, 0.5, 1.0), (q, 1.0 - 2.0 * q, q)


class _ContinuousComponent(ComponentSpec):
    """Continuous component with analytic centered MGF; E[exp(lam z)] is the
    iterated integral E_x[exp(-lam a xc^2) M(lam xc)] over the x marginal."""

    def _centered_mgf(self, s: float) -> float:
        raise NotImplementedError

    def _integrate_expectation(self, lam: float, alpha: float) -> float:
        raise NotImplementedError

    def neg_log_mgf_z(self, lam: float, alpha: float) -> float:
        if lam >= self.lambda_sup(alpha):
            return -math.inf
        e = self._integrate_expectation(lam, alpha)
        return -math.log(e)


@dataclass(frozen=True)
class Uniform01(_ContinuousComponent):
    """Uniform on [0, 1]; recentred to [-1/2, 1/2]."""

    def mean(self) -> float:
        return 0.5

    def variance(self) -> float:
        return 1.0 / 12.0

    def _centered_mgf(self, s: float) -> float:
        if abs(s) < 1e-6:
            return 1.0 + s * s / 24.0
        return 2.0 * math.sinh(0.5 * s) / s

    def _integrate_expectation(self, lam: float, alpha: float) -> float:
        res = integrate_adaptive(
            lambda x: math.exp(-lam * alpha * x * x) * self._centered_mgf(lam * x),
            0.0,
            0.5,
            1e-12,
        )
        return 2.0 * res.value

    def draw(self, rng, size):
        return rng.random(size)


@dataclass(frozen=True)
class NormalComponent(_ContinuousComponent):
    """Standard normal coordinate."""

    def mean(self) -> float:
        return 0.0

    def variance(self) -> float:
        return 1.0

    def lambda_sup(self, alpha: float) -> float:
        # E[exp(lam z)] = (1 - lam^2 + 2 lam a)^{-1/2}, finite iff lam < a + sqrt(a^2+1)
        return alpha + math.sqrt(alpha**2 + 1.0)

    def _centered_mgf(self, s: float) -> float:
        return math.exp(0.5 * s * s)

    def _integrate_expectation(self, lam: float, alpha: float) -> float:
        c = 0.5 * lam * lam - lam * alpha  # tilt coefficient on x^2
        norm = 1.0 / math.sqrt(2.0 * math.pi)

        res = integrate_adaptive(
            lambda x: norm * math.exp((c - 0.5) * x * x), 0.0, 12.0, 1e-12
        )
        return 2.0 * res.value  # +/- 12 sigma truncation; error ~ e^{-72}

    def draw(self, rng, size):
        return rng.standard_normal(size)


@dataclass(frozen=True)
class Laplace(_ContinuousComponent):
    """Laplace (double exponential) with the given scale; mean 0.

    The z-MGF diverges for every lambda > 0 (the y tail beats the Gaussian-free
    tilt), so the Chernoff route correctly degenerates to gamma = 0 -- this is
    the family whose product is provably *not* exponentially separable.
    """

    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0.0:
            raise ValueError(f"scale must be positive, got {self.scale}")

    def mean(self) -> float:
        return 0.0

    def variance(self) -> float:
        return 2.0 * self.scale**2

    def lambda_sup(self, alpha: float) -> float:
        return 0.0

    def _centered_mgf(self, s: float) -> float:
        b2s2 = (self.scale * s) ** 2
        if b2s2 >= 1.0:
            return math.inf
        return 1.0 / (1.0 - b2s2)

    def _integrate_expectation(self, lam: float, alpha: float) -> float:
        raise HypothesisViolation("Laplace z-MGF is infinite for every lambda > 0")

    def draw(self, rng, size):
        return rng.laplace(0.0, self.scale, size)


@dataclass(frozen=True)
class TabulatedDensity(_ContinuousComponent):
    """Density given on a finite grid (trapezoid rule throughout)."""

    x: tuple[float, ...]
    density: tuple[float, ...]

    def __post_init__(self):
        if len(self.x) != len(self.density) or len(self.x) < 3:
            raise ValueError("TabulatedDensity needs matching grids of length >= 3")
        if any(d < 0.0 for d in self.density):
            raise ValueError("density values must be nonnegative")

    def _trapz(self, values) -> float:
        acc = 0.0
        for i in range(len(self.x) - 1):
            acc += 0.5 * (values[i] + values[i + 1]) * (self.x[i + 1] - self.x[i])
        return acc

    def _norm(self) -> float:
        return self._trapz(self.density)

    def mean(self) -> float:
        w = self._norm()
        return self._trapz([x * d for x, d in zip(self.x, self.density)]) / w

    def variance(self) -> float:
        m = self.mean()
        w = self._norm()
        return self._trapz([(x - m) ** 2 * d for x, d in zip(self.x, self.density)]) / w

    def _centered_mgf(self, s: float) -> float:
        m = self.mean()
        w = self._norm()
        return self._trapz([math.exp(s * (x - m)) * d for x, d in zip(self.x, self.density)]) / w

    def _integrate_expectation(self, lam: float, alpha: float) -> float:
        m = self.mean()
        w = self._norm()
        vals = [
            math.exp(-lam * alpha * (x - m) ** 2) * self._centered_mgf(lam * (x - m)) * d
            for x, d in zip(self.x, self.density)
        ]
        return self._trapz(vals) / w

    def draw(self, rng, size):
        import numpy as np

        dens = np.asarray(self.density, float)
        xs = np.asarray(self.x, float)
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(xs))])
        cdf /= cdf[-1]
        return np.interp(rng.random(size), cdf, xs)


@dataclass(frozen=True)
class ChernoffResult:
    gamma: float
    lambda_star: float
    c_star: float


def _chernoff_objective(components: Sequence[ComponentSpec], alpha: float):
    def g(lam: float) -> float:
        if lam == 0.0:
            return 0.0
        total = 0.0
        for comp in components:
            v = comp.neg_log_mgf_z(lam, alpha)
            if v == -math.inf:
                return -math.inf
            total += v
        return total

    return g


def _optimize_gamma(components: Sequence[ComponentSpec], alpha: float) -> tuple[float, float]:
    """Returns (sup of -sum log E, argmax lambda)."""
    for comp in components:
        if comp.variance() <= 0.0:
            raise HypothesisViolation("component with zero variance (degenerate point mass)")
    g = _chernoff_objective(components, alpha)
    lam_cap = min((c.lambda_sup(alpha) for c in components), default=math.inf)
    if lam_cap <= 0.0:
        return 0.0, 0.0
    hi0 = min(1.0, 0.5 * lam_cap) if math.isfinite(lam_cap) else 1.0
    hi = expand_bracket(g, hi0)
    if math.isfinite(lam_cap):
        hi = min(hi, lam_cap)
    opt = maximize_unimodal(g, 0.0, hi, tol=1e-11 * max(1.0, hi))
    if opt.max_value <= 0.0:
        return 0.0, 0.0
    return opt.max_value, opt.argmax


def chernoff_gamma(component: ComponentSpec, alpha: float) -> ChernoffResult:
    """Optimal per-coordinate exponent gamma = (1/2) sup_l (-log E[exp(l z)]).

    Also reports the maximizer lambda* and c*, the derivative at lambda* of the
    tilted-mean ratio E[z e^{l z}]/E[e^{l z}] (central finite differences with
    step lambda* * 1e-4), which enter the sharp asymptotic sample-size form.
    """
    _check_alpha(alpha)
    sup_val, lam_star = _optimize_gamma([component], alpha)
    gamma = 0.5 * sup_val
    if lam_star <= 0.0:
        return ChernoffResult(gamma, lam_star, math.nan)
    g = _chernoff_objective([component], alpha)
    h_ratio = lam_star * 1e-4
    h_inner = lam_star * 1e-4

    def tilted_mean(lam: float) -> float:
        # psi'(lam) with psi = log E[exp(lam z)] = -g(lam)
        return (-g(lam + h_inner) + g(lam - h_inner)) / (2.0 * h_inner)

    c_star = (tilted_mean(lam_star + h_ratio) - tilted_mean(lam_star - h_ratio)) / (2.0 * h_ratio)
    return ChernoffResult(gamma, lam_star, c_star)


def chernoff_gamma_n(components: Sequence[ComponentSpec], alpha: float) -> float:
    """gamma_n = (1/2) sup_l (-sum_i log E[exp(l z_i)]) with one shared lambda."""
    _check_alpha(alpha)
    if not components:
        return 0.0
    sup_val, _ = _optimize_gamma(components, alpha)
    return 0.5 * sup_val
