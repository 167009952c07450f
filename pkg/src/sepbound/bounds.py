"""Theorem registry: two-point probabilities to maximum sample sizes M.

The master principle: if every ordered pair is inseparable with probability at
most f(n, alpha), then with
    M < 1/2 + sqrt(1/4 + delta/f)        (exact form), or
    M <= sqrt(delta/f)                   (simple form)
the expected number of inseparable ordered pairs is below delta, hence the set
is separable with probability above 1 - delta.  The exact form is necessary
and sufficient in the i.i.d. case when f is the exact pair probability; those
registry entries are marked ``exact_necessary_sufficient``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import twopoint as tp
from .errors import HypothesisViolation
from .numerics import maximize_unimodal
from .specfun import LogProb

__all__ = [
    "SeparabilityQuery",
    "BoundResult",
    "PerturbedResult",
    "m_from_f",
    "bound",
    "theorem_ids",
    "perturbed_probability",
    "perturbed_max_m",
    "exponent_b",
    "exponent_b_numeric",
]

_LOG10 = math.log(10.0)
_MAX_EXACT_M = 2.0**53


@dataclass(frozen=True)
class SeparabilityQuery:
    """Shared input of every bound computation."""

    n: int
    alpha: float = 1.0
    delta: float = 0.01
    center: str = "origin"  # origin | cube_center | mean | explicit

    def __post_init__(self) -> None:
        if not (isinstance(self.n, int) and self.n >= 1):
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")


@dataclass(frozen=True)
class BoundResult:
    """Maximum admissible M from one theorem, in log10 domain.

    ``M_exact`` is floor(M) when M fits an IEEE-exact integer;
    ``mode`` is ``exact_necessary_sufficient`` only for the if-and-only-if
    theorems; ``b_exponent`` is the asymptotic rate when a closed form exists.
    """

    theorem_id: str
    log10_M: float
    M_exact: Optional[int] = None
    mode: str = "sufficient"
    b_exponent: Optional[float] = None
    validity_notes: tuple[str, ...] = ()
    f_log: Optional[float] = None  # underlying two-point bound, when one exists


def m_from_f(f: LogProb, delta: float, mode: str = "exact") -> BoundResult:
    """Convert a two-point probability (bound) into the admissible M.

    ``mode='exact'``: M < 1/2 + sqrt(1/4 + delta/f) (necessary and sufficient
    for exact i.i.d. f); ``mode='simple'``: M <= sqrt(delta/f).
    """
    if mode not in ("exact", "simple"):
        raise ValueError(f"mode must be 'exact' or 'simple', got {mode!r}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    log_ratio = math.log(delta) - f.log_value  # log(delta / f)
    if mode == "simple":
        log10_m = 0.5 * log_ratio / _LOG10
        m_lin = math.exp(0.5 * log_ratio) if log_ratio < 36.0 else None
    else:
        if log_ratio < 72.0:  # delta/f representable comfortably
            m_lin = 0.5 + math.sqrt(0.25 + math.exp(log_ratio))
            log10_m = math.log10(m_lin)
        else:  # 1/2 and 1/4 are below double resolution of sqrt(delta/f)
            m_lin = None
            log10_m = 0.5 * log_ratio / _LOG10
    m_exact = None
    if m_lin is not None and m_lin < _MAX_EXACT_M:
        m_exact = int(math.floor(m_lin))
    return BoundResult("m_from_f", log10_m, m_exact, mode="sufficient", f_log=f.log_value)


def _result(
    theorem_id: str,
    log10_m: float,
    mode: str,
    b: Optional[float],
    notes: Sequence[str] = (),
    f_log: Optional[float] = None,
) -> BoundResult:
    m_exact = None
    if log10_m < 15.9:
        m_exact = int(math.floor(10.0**log10_m))
    notes = list(notes)
    if log10_m < 0.0:
        notes.append("vacuous (bound below 1)")
    return BoundResult(theorem_id, log10_m, m_exact, mode, b, tuple(notes), f_log)


def _from_f(
    theorem_id: str,
    f: tp.TwoPointResult,
    delta: float,
    mode: str,
    b: Optional[float],
    notes: Sequence[str] = (),
) -> BoundResult:
    base = m_from_f(f.f, delta, mode)
    notes = list(notes)
    if f.kind == "asymptotic":
        notes.append("asymptotic form: not a rigorous bound at finite n")
    return _result(theorem_id, base.log10_M,
                   "exact_necessary_sufficient" if (mode == "exact" and f.kind == "exact") else "sufficient",
                   b, notes, f.f.log_value)


@dataclass(frozen=True)
class PerturbedResult:
    """Lower bound for the separability probability in the perturbed model.

    ``deficit`` = 1 - probability, kept separately because the paper's Table
    prints values like 1 - 5.8e-18 that collapse to 1.0 in a double.
    """

    probability: float
    deficit: float
    theta_star: float


def perturbed_probability(n: int, M: float, epsilon: float) -> PerturbedResult:
    """Best lower bound, over theta, for P[perturbed set is 1-Fisher separable].

    Maximizes 1 - 2M^2/(theta sqrt(n)) (1-theta^2)^{(n+1)/2} - M (2 theta/eps)^n
    over theta in (n^{-1/2}, 1).  May be negative; returned as-is.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must be in (0, 1), got {epsilon}")
    log_m = math.log(M)

    def deficit_log_terms(theta: float) -> float:
        t1 = (
            math.log(2.0)
            + 2.0 * log_m
            - math.log(theta)
            - 0.5 * math.log(n)
            + 0.5 * (n + 1.0) * math.log1p(-theta * theta)
        )
        t2 = log_m + n * (math.log(2.0 * theta) - math.log(epsilon))
        hi, lo = (t1, t2) if t1 >= t2 else (t2, t1)
        return hi + math.log1p(math.exp(lo - hi))

    lo = 1.0 / math.sqrt(n)
    hi = 1.0 - 1e-12
    if lo >= hi:
        raise ValueError("empty theta bracket")
    opt = maximize_unimodal(lambda th: -deficit_log_terms(th), lo, hi, tol=1e-12)
    log_deficit = -opt.max_value
    deficit = math.exp(log_deficit) if log_deficit < 700.0 else math.inf
    return PerturbedResult(1.0 - deficit, deficit, opt.argmax)


def perturbed_max_m(n: int, epsilon: float, delta: float) -> float:
    """Largest M with perturbed separability probability >= 1 - delta (bisection).

    The optimized probability is monotone decreasing in M; the search runs in
    log M over [0, 300 ln 10].
    """
    if perturbed_probability(n, 1.0, epsilon).deficit > delta:
        return 0.0
    lo, hi = 0.0, 300.0 * _LOG10
    if perturbed_probability(n, math.exp(hi), epsilon).deficit <= delta:
        return math.exp(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if perturbed_probability(n, math.exp(mid), epsilon).deficit <= delta:
            lo = mid
        else:
            hi = mid
    return math.exp(lo)


# ---------------------------------------------------------------------------
# Closed-form exponents b(alpha) = lim -log f(n, alpha) / (2n)
# ---------------------------------------------------------------------------


def exponent_b(theorem: str, alpha: float, **params) -> float:
    """Closed-form asymptotic exponent for the given theorem, where one exists."""
    a2 = alpha**2
    if theorem in ("ball_optimal", "ball_known", "ball_simple"):
        if alpha >= tp.SQRT_HALF:
            return 0.5 * math.log(2.0 * alpha)
        return -0.25 * math.log1p(-a2)
    if theorem in ("normal_optimal", "normal_known", "normal_simple"):
        return 0.25 * math.log1p(a2)
    if theorem in ("exponential_optimal", "exponential_simple"):
        s = math.sqrt(1.0 + 8.0 * a2)
        rate = 4.0 * math.sqrt(2.0) * alpha * (s - 1.0) / (s + 4.0 * a2 - 1.0) ** 1.5
        return -0.5 * math.log(rate)
    if theorem == "slc":
        return params["gamma"] * a2 / (4.0 * (1.0 + alpha) ** 2)
    if theorem == "slc_improved":
        return params["gamma"] * a2 / (4.0 * (1.0 + a2))
    if theorem == "rot_simple":
        return (2.0 * alpha - 1.0) ** 2 / (8.0 * (2.0 * alpha + 1.0) ** 2)
    if theorem == "rot_alpha1":
        return 0.07
    if theorem in ("prototype", "prototype_set"):
        return 0.5 * math.log(2.0 * params["r"] * alpha)
    if theorem == "product_hoeffding":
        sigma0 = params["sigma0"]
        center = params.get("center", "general")
        t = alpha * sigma0**2 - (1.0 - alpha) * params.get("mean_offset_sq", 0.0)
        rng = tp._hoeffding_range(alpha, center)
        return t**2 / rng**2
    if theorem == "product_bernstein":
        sigma0 = params["sigma0"]
        if alpha >= 0.5:
            return 12.0 * a2 * sigma0**2 / (12.0 * a2 + 13.0)
        return 3.0 * a2 * sigma0**2 / (2.0 * a2 + alpha + 3.0)
    if theorem == "product_chernoff":
        comps = _chernoff_components(params)
        if len(set(map(type, comps))) == 1 and len({repr(c) for c in comps} )== 1:
            return tp.chernoff_gamma(comps[0], alpha).gamma
        raise ValueError("per-n exponent undefined for heterogeneous component lists")
    if theorem == "product_legacy":
        return params["sigma0"] ** 4 / 4.0
    if theorem == "dependent":
        sigma0 = params["sigma0"]
        slack = sigma0**2 - 1.0 / (16.0 * a2)
        if slack <= 0.0:
            raise HypothesisViolation("dependent exponent undefined: sigma0^2 <= 1/(16 alpha^2)")
        return (4.0 * alpha / (2.0 * alpha + 1.0)) ** 4 * slack**2
    raise ValueError(f"exponent b(alpha) has no closed form for theorem {theorem!r}")


def exponent_b_numeric(
    f_of_n: Callable[[int], LogProb], n: int = 1000
) -> float:
    """Richardson-extrapolated numerical exponent from f evaluated at n and 2n.

    With f = C n^p r^n, b_n := -log f(n)/(2n) has error (log C + p log n)/(2n);
    the combination 2 b(2n) - b(n) cancels it up to p log(2)/(2n).
    """
    b_n = -f_of_n(n).log_value / (2.0 * n)
    b_2n = -f_of_n(2 * n).log_value / (4.0 * n)
    return 2.0 * b_2n - b_n


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


def _chernoff_components(params) -> list[tp.ComponentSpec]:
    comp = params.get("component")
    comps = params.get("components")
    if comps is not None:
        return list(comps)
    if comp is None:
        raise ValueError("product_chernoff needs component=... or components=[...]")
    return [comp]


def _bound_prototype(q: SeparabilityQuery, set_version: bool, params) -> BoundResult:
    r = params.get("r")
    C = params.get("C", 1.0)
    if r is None:
        raise ValueError("prototype bounds need r=...")
    if not q.alpha > 0.5:
        raise HypothesisViolation(f"prototype requires alpha > 1/2, got {q.alpha}")
    if not (1.0 / (2.0 * q.alpha) < r < 1.0):
        raise HypothesisViolation(f"prototype requires 1/(2 alpha) < r < 1, got r={r}")
    if not C > 0.0:
        raise ValueError(f"C must be positive, got {C}")
    # |Y| < delta (2 r alpha)^n / C; set version takes the square root
    log10_full = (math.log(q.delta) + q.n * math.log(2.0 * r * q.alpha) - math.log(C)) / _LOG10
    theorem = "prototype_set" if set_version else "prototype"
    log10_m = 0.5 * log10_full if set_version else log10_full
    b = exponent_b(theorem, q.alpha, r=r)
    notes = ["bounds the size of the non-random set Y"] if not set_version else []
    return _result(theorem, log10_m, "sufficient", b, notes)


def bound(q: SeparabilityQuery, theorem: str, **params) -> BoundResult:
    """Dispatch a separability query to one theorem of the registry.

    Raises :class:`HypothesisViolation` (naming the failed hypothesis) when the
    theorem does not apply, ValueError for malformed parameters, KeyError never.
    """
    n, alpha, delta = q.n, q.alpha, q.delta
    exact_requested = bool(params.pop("exact_mode", False))
    mode = "exact" if exact_requested else "simple"

    if theorem == "prototype":
        return _bound_prototype(q, False, params)
    if theorem == "prototype_set":
        return _bound_prototype(q, True, params)

    if theorem == "ball_known":
        log10_m = (0.5 * (math.log(2.0) + math.log(delta)) + 0.5 * n * math.log(2.0 * alpha)) / _LOG10
        return _result(theorem, log10_m, "sufficient", exponent_b("ball_known", alpha),
                       f_log=-math.log(2.0) - n * math.log(2.0 * alpha))

    if theorem == "ball_optimal":
        f = tp.ball_exact(n, alpha)
        return _from_f(theorem, f, delta, "exact", exponent_b("ball_optimal", alpha))

    if theorem == "ball_simple":
        if not (0.0 < alpha < tp.SQRT_HALF):
            raise HypothesisViolation(f"ball_simple requires alpha < 1/sqrt(2), got {alpha}")
        if not n > 3:
            raise HypothesisViolation(f"ball_simple requires n > 3, got {n}")
        log_m = (
            0.25 * math.log(2.0 * math.pi)
            + 0.5 * math.log(delta * alpha * (1.0 - 2.0 * alpha**2))
            + math.log(n - 3.0)
            - 0.75 * math.log(n)
            - 0.25 * (n + 3.0) * math.log1p(-(alpha**2))
        )
        return _result(theorem, log_m / _LOG10, "sufficient", exponent_b("ball_simple", alpha))

    if theorem == "layer_optimal":
        R = params.get("R")
        if R is None:
            raise ValueError("layer_optimal needs R=...")
        f = tp.spherical_generic(n, alpha, tp.layer_radial_model(R), kinks_t=(R, 1.0, 1.0 / R))
        return _from_f(theorem, f, delta, "exact", None)

    if theorem == "spherical_custom":
        radial = params.get("radial")
        if radial is None:
            raise ValueError("spherical_custom needs radial=RadialModel(...)")
        f = tp.spherical_generic(n, alpha, radial, kinks_t=params.get("kinks_t", (1.0,)))
        return _from_f(theorem, f, delta, "exact", None)

    if theorem in ("slc", "slc_improved"):
        gamma = params.get("gamma")
        if gamma is None:
            raise ValueError(f"{theorem} needs gamma=...")
        slc = tp.SlcParams(gamma=gamma, mu=params.get("mu"), x0_norm=params.get("x0_norm", 0.0))
        f = tp.slc_f(n, alpha, slc, improved=(theorem == "slc_improved"))
        return _from_f(theorem, f, delta, mode, exponent_b(theorem, alpha, gamma=gamma))

    if theorem in ("independent_slc", "mixture_slc"):
        points = params.get("points")
        if not points:
            raise ValueError(f"{theorem} needs points=[SlcParams, ...]")
        e_star = tp.indbound_exponent(points, alpha, n=n)
        # M < sqrt(delta/2) exp(E*); equivalently f = 2 exp(-2 E*)
        f = tp.TwoPointResult(LogProb(math.log(2.0) - 2.0 * e_star), "upper_bound")
        return _from_f(theorem, f, delta, mode, None)

    if theorem == "normal_known":
        log10_m = (0.5 * math.log(delta) + 0.25 * n * math.log1p(alpha**2)) / _LOG10
        return _result(theorem, log10_m, "sufficient", exponent_b("normal_known", alpha),
                       f_log=-0.5 * n * math.log1p(alpha**2))

    if theorem == "normal_optimal":
        f = tp.normal_exact(n, alpha)
        return _from_f(theorem, f, delta, "exact", exponent_b("normal_optimal", alpha))

    if theorem == "normal_simple":
        f = tp.normal_upper_iest2(n, alpha)
        return _from_f(theorem, f, delta, mode, exponent_b("normal_simple", alpha))

    if theorem == "exponential_optimal":
        f = tp.exponential_exact(n, alpha)
        return _from_f(theorem, f, delta, "exact", exponent_b("exponential_optimal", alpha))

    if theorem == "exponential_simple":
        f = tp.exponential_asymptotic(n, alpha)
        return _from_f(theorem, f, delta, mode, exponent_b("exponential_simple", alpha))

    if theorem == "rot_simple":
        f = tp.rotsimple_f(n, alpha)
        return _from_f(theorem, f, delta, mode, exponent_b("rot_simple", alpha))

    if theorem == "rot_general":
        f = tp.rotgeneral_f(n, alpha)
        return _from_f(theorem, f, delta, mode, None)

    if theorem == "rot_alpha1":
        if alpha != 1.0:
            raise HypothesisViolation(f"rot_alpha1 is stated for alpha = 1, got {alpha}")
        if not 1 <= n <= 4000:
            raise HypothesisViolation(f"rot_alpha1 is verified for 1 <= n <= 4000, got n={n}")
        log10_m = (0.5 * math.log(delta) + 0.07 * n) / _LOG10
        return _result(theorem, log10_m, "sufficient", 0.07, f_log=-0.14 * n)

    if theorem == "product_hoeffding":
        sigma0 = params.get("sigma0")
        if sigma0 is None:
            raise ValueError("product_hoeffding needs sigma0=...")
        center = params.get("center", "general")
        f = tp.product_hoeffding_f(n, alpha, sigma0, center, params.get("mean_offset_sq", 0.0))
        b = exponent_b("product_hoeffding", alpha, sigma0=sigma0, center=center,
                       mean_offset_sq=params.get("mean_offset_sq", 0.0))
        return _from_f(theorem, f, delta, mode, b)

    if theorem == "product_bernstein":
        sigma0 = params.get("sigma0")
        if sigma0 is None:
            raise ValueError("product_bernstein needs sigma0=...")
        f = tp.product_bernstein_f(n, alpha, sigma0)
        return _from_f(theorem, f, delta, mode, exponent_b("product_bernstein", alpha, sigma0=sigma0),
                       notes=["requires mean at the cube center"])

    if theorem == "product_chernoff":
        comps = _chernoff_components(params)
        if len(comps) == 1:
            gamma_n = n * tp.chernoff_gamma(comps[0], alpha).gamma
        else:
            if len(comps) != n:
                raise ValueError(f"components list has {len(comps)} entries for n={n}")
            gamma_n = tp.chernoff_gamma_n(comps, alpha)
        f = tp.TwoPointResult(LogProb(-2.0 * gamma_n), "upper_bound")
        b = gamma_n / n
        return _from_f(theorem, f, delta, mode, b)

    if theorem == "product_legacy":
        sigma0 = params.get("sigma0")
        if sigma0 is None:
            raise ValueError("product_legacy needs sigma0=...")
        # (M+1)^2 < delta/3 exp(n sigma0^4 / 2)
        m = math.exp(0.5 * (math.log(delta / 3.0)) + 0.25 * n * sigma0**4) - 1.0
        if m <= 0.0:
            return _result(theorem, -math.inf, "sufficient", exponent_b("product_legacy", alpha, sigma0=sigma0))
        return _result(theorem, math.log10(m), "sufficient",
                       exponent_b("product_legacy", alpha, sigma0=sigma0))

    if theorem == "dependent":
        sigma0 = params.get("sigma0")
        if sigma0 is None:
            raise ValueError("dependent needs sigma0=...")
        f = tp.dependent_f(n, alpha, sigma0)
        return _from_f(theorem, f, delta, mode, exponent_b("dependent", alpha, sigma0=sigma0),
                       notes=["center = cube center; conditional product data"])

    if theorem == "perturbed":
        epsilon = params.get("epsilon")
        if epsilon is None:
            raise ValueError("perturbed needs epsilon=...")
        if alpha != 1.0:
            raise HypothesisViolation(f"perturbed model is stated for alpha = 1, got {alpha}")
        m = perturbed_max_m(n, epsilon, delta)
        if m < 1.0:
            return _result(theorem, -math.inf, "sufficient", None,
                           notes=["no M >= 1 reaches the requested probability"])
        return _result(theorem, math.log10(m), "sufficient", None,
                       notes=["per-point perturbed separability definition"])

    raise ValueError(f"unknown theorem id {theorem!r}")


_THEOREM_IDS = (
    "prototype",
    "prototype_set",
    "ball_known",
    "ball_optimal",
    "ball_simple",
    "layer_optimal",
    "slc",
    "slc_improved",
    "independent_slc",
    "mixture_slc",
    "normal_known",
    "normal_optimal",
    "normal_simple",
    "spherical_custom",
    "exponential_optimal",
    "exponential_simple",
    "rot_simple",
    "rot_general",
    "rot_alpha1",
    "product_hoeffding",
    "product_bernstein",
    "product_chernoff",
    "product_legacy",
    "dependent",
    "perturbed",
)


def theorem_ids() -> tuple[str, ...]:
    """The stable public theorem identifiers accepted by :func:`bound`."""
    return _THEOREM_IDS
