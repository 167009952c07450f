"""Adaptive quadrature (linear and log-domain) and 1-D unimodal maximization.

The quadrature rule is Gauss-Kronrod 15(7) with global adaptive bisection of
the worst panel.  The log-domain variant evaluates integrands that return the
log of a nonnegative function and assembles panel sums with max-shift
rescaling, so integrals spanning hundreds of orders of magnitude at large
dimension stay finite.

Integrand callables must be safe for concurrent invocation; the routines
themselves are pure functions.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .specfun import LogProb

__all__ = [
    "QuadratureResult",
    "OptResult",
    "integrate_adaptive",
    "integrate_log_domain",
    "maximize_unimodal",
    "expand_bracket",
]

# Gauss-Kronrod 15-point nodes on [-1, 1] and weights; the embedded 7-point
# Gauss rule uses the odd-indexed nodes.
_XGK = (
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
)
_WGK = (
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
)
_WG = (
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
)

_MAX_PANELS = 4000
_ABS_FLOOR = 1e-300


def _gk_nodes(a: float, b: float) -> list[float]:
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    xs = []
    for x in _XGK[:-1]:
        xs.append(c - h * x)
        xs.append(c + h * x)
    xs.append(c)
    return xs  # 15 nodes, symmetric pairs first


@dataclass(frozen=True)
class QuadratureResult:
    """Outcome of an adaptive integration.

    For the log-domain variant ``value`` is a :class:`LogProb` and
    ``abs_error_estimate`` is the estimated *relative* error of the linear
    value (equivalently, the absolute error of its log).
    """

    value: float | LogProb
    abs_error_estimate: float
    evaluations: int
    converged: bool = True


@dataclass(frozen=True)
class OptResult:
    argmax: float
    max_value: float
    bracket: tuple[float, float]


def _gk_panel(f: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    """One GK15 evaluation: returns (kronrod value, error estimate)."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fv = []
    for x in _XGK[:-1]:
        fv.append(f(c - h * x))
        fv.append(f(c + h * x))
    f0 = f(c)
    resk = _WGK[-1] * f0
    resg = _WG[-1] * f0
    for i in range(7):
        pair = fv[2 * i] + fv[2 * i + 1]
        resk += _WGK[i] * pair
        if i % 2 == 1:
            resg += _WG[i // 2] * pair
    return resk * h, abs(resk - resg) * h


def integrate_adaptive(
    f: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    *,
    points: Sequence[float] = (),
) -> QuadratureResult:
    """Integrate ``f`` on the finite interval [a, b] to a relative tolerance.

    ``points`` lists interior abscissae where the integrand has kinks; panels
    are pre-split there because bisection converges slowly across derivative
    discontinuities.  If the tolerance cannot be reached within the panel
    budget the best value is returned with ``converged=False`` and an honest
    error estimate; the caller decides.
    """
    if not (math.isfinite(a) and math.isfinite(b)) or a >= b:
        raise ValueError(f"invalid interval [{a}, {b}]")
    edges = sorted({a, b, *(p for p in points if a < p < b)})
    heap: list[tuple[float, float, float, float, float]] = []
    evals = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = _gk_panel(f, lo, hi)
        evals += 15
        heapq.heappush(heap, (-err, lo, hi, val, err))
    for _ in range(_MAX_PANELS):
        total = sum(p[3] for p in heap)
        total_err = sum(p[4] for p in heap)
        if total_err <= rel_tol * abs(total) + _ABS_FLOOR:
            return QuadratureResult(total, total_err, evals, True)
        _, lo, hi, _, _ = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        for seg in ((lo, mid), (mid, hi)):
            val, err = _gk_panel(f, *seg)
            evals += 15
            heapq.heappush(heap, (-err, seg[0], seg[1], val, err))
    total = sum(p[3] for p in heap)
    total_err = sum(p[4] for p in heap)
    return QuadratureResult(total, total_err, evals, total_err <= rel_tol * abs(total) + _ABS_FLOOR)


def _logsumexp2(a: float, b: float) -> float:
    if a == -math.inf:
        return b
    if b == -math.inf:
        return a
    hi, lo = (a, b) if a >= b else (b, a)
    return hi + math.log1p(math.exp(lo - hi))


def _gk_panel_log(f_log: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    """GK15 on exp(f_log) with max-shift rescaling; returns (log value, log error)."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fv = []
    for x in _XGK[:-1]:
        fv.append(f_log(c - h * x))
        fv.append(f_log(c + h * x))
    fv.append(f_log(c))
    m = max(fv)
    if m == -math.inf:
        return -math.inf, -math.inf
    resk = _WGK[-1] * math.exp(fv[14] - m)
    resg = _WG[-1] * math.exp(fv[14] - m)
    for i in range(7):
        pair = math.exp(fv[2 * i] - m) + math.exp(fv[2 * i + 1] - m)
        resk += _WGK[i] * pair
        if i % 2 == 1:
            resg += _WG[i // 2] * pair
    log_val = m + math.log(resk * h)
    diff = abs(resk - resg) * h
    log_err = m + math.log(diff) if diff > 0.0 else -math.inf
    return log_val, log_err


def integrate_log_domain(
    f_log: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    *,
    points: Sequence[float] = (),
) -> QuadratureResult:
    """Compute log of the integral of exp(f_log) over [a, b].

    ``f_log`` returns the log of a nonnegative integrand (-inf allowed).
    Matches :func:`integrate_adaptive` to the requested tolerance whenever the
    linear-domain integrand is representable.
    """
    if not (math.isfinite(a) and math.isfinite(b)) or a >= b:
        raise ValueError(f"invalid interval [{a}, {b}]")
    edges = sorted({a, b, *(p for p in points if a < p < b)})
    heap: list[tuple[float, float, float, float, float]] = []
    evals = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        lval, lerr = _gk_panel_log(f_log, lo, hi)
        evals += 15
        heapq.heappush(heap, (-lerr, lo, hi, lval, lerr))
    log_rel_tol = math.log(rel_tol)
    for _ in range(_MAX_PANELS):
        log_total = -math.inf
        log_err_total = -math.inf
        for p in heap:
            log_total = _logsumexp2(log_total, p[3])
            log_err_total = _logsumexp2(log_err_total, p[4])
        if log_total == -math.inf:
            return QuadratureResult(LogProb(-math.inf), 0.0, evals, True)
        rel_err = math.exp(min(log_err_total - log_total, 700.0))
        if rel_err <= rel_tol:
            return QuadratureResult(LogProb(log_total), rel_err, evals, True)
        neg_lerr, lo, hi, _lv, _le = heapq.heappop(heap)
        if -neg_lerr <= log_rel_tol + log_total - math.log(4.0 * len(heap) + 4.0):
            # every panel is at the roundoff floor; further splits are idle
            heapq.heappush(heap, (neg_lerr, lo, hi, _lv, _le))
            return QuadratureResult(LogProb(log_total), rel_err, evals, rel_err <= rel_tol)
        mid = 0.5 * (lo + hi)
        for seg in ((lo, mid), (mid, hi)):
            lval, lerr = _gk_panel_log(f_log, *seg)
            evals += 15
            heapq.heappush(heap, (-lerr, seg[0], seg[1], lval, lerr))
    log_total = -math.inf
    log_err_total = -math.inf
    for p in heap:
        log_total = _logsumexp2(log_total, p[3])
        log_err_total = _logsumexp2(log_err_total, p[4])
    rel_err = math.exp(min(log_err_total - log_total, 700.0)) if log_total > -math.inf else 0.0
    return QuadratureResult(LogProb(log_total), rel_err, evals, rel_err <= rel_tol)


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def maximize_unimodal(
    g: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
) -> OptResult:
    """Golden-section maximization of a unimodal function on [lo, hi].

    The caller guarantees unimodality.  If the maximum sits at a bracket
    endpoint, that endpoint is returned.
    """
    if not lo < hi:
        raise ValueError(f"invalid bracket [{lo}, {hi}]")
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    gc, gd = g(c), g(d)
    while b - a > tol:
        if gc >= gd:
            b, d, gd = d, c, gc
            c = b - _INVPHI * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + _INVPHI * (b - a)
            gd = g(d)
    xm = 0.5 * (a + b)
    candidates = [(g(xm), xm), (gc, c), (gd, d), (g(lo), lo), (g(hi), hi)]
    best_val, best_x = max(candidates, key=lambda t: t[0])
    return OptResult(best_x, best_val, (lo, hi))


def expand_bracket(
    g: Callable[[float], float],
    hi0: float = 1.0,
    max_doublings: int = 60,
    plateau_tol: float = 1e-13,
) -> float:
    """Doubling search for a right bracket end of a concave objective on [0, inf).

    Doubles ``hi`` until g decreases at the right end, returns -inf there, or
    the gain plateaus below ``plateau_tol`` (objectives whose sup is approached
    only as lambda -> inf, e.g. two-point discrete components, flatten out and
    any further doubling is numerically idle).
    """
    hi = hi0
    g_hi = g(hi)
    for _ in range(max_doublings):
        g_next = g(2.0 * hi)
        if g_next == -math.inf or g_next < g_hi:
            return 2.0 * hi
        if g_next - g_hi <= plateau_tol * max(1.0, abs(g_hi)):
            return 2.0 * hi
        hi, g_hi = 2.0 * hi, g_next
    return hi
