"""Samplers, the Fisher pair check, and Monte Carlo verification estimators.

Reproducibility contract: trials are generated in fixed-size blocks, each from
its own counter-based Philox stream keyed by (seed, purpose, block index), and
reduced by order-independent integer sums -- identical (seed, spec, trials)
give identical hit counts regardless of how the blocks are scheduled.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import ndtri

from .errors import BudgetExceeded
from .twopoint import ComponentSpec, Laplace

__all__ = [
    "UniformBall",
    "SphericalLayer",
    "StandardNormal",
    "SphericalExponential",
    "SphericalRadial",
    "UniformCube",
    "ProductIID",
    "ProductGeneral",
    "GaussianSLC",
    "SlcMixture",
    "LaplaceProduct",
    "PerturbedModel",
    "DependentHalfCube",
    "MCEstimate",
    "SetSeparability",
    "sample",
    "is_inseparable_ordered",
    "count_inseparable_pairs",
    "estimate_two_point",
    "estimate_set_separability",
    "wilson_interval",
    "DEFAULT_CONFIDENCE",
    "max_budget",
]

# 3-sigma two-sided normal coverage; Wilson intervals use the matching quantile.
DEFAULT_CONFIDENCE = 0.9973002039367398

_PAIR_BLOCK = 1 << 16
_PURPOSE_SAMPLE, _PURPOSE_PAIRS, _PURPOSE_SETS = 0, 1, 2
_DEFAULT_BUDGET = 4.0e12
_FAST_COUNT_MIN_M = 8192  # above this the pair counter switches to float32 BLAS


def _rng(seed: int, purpose: int, block: int) -> np.random.Generator:
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64((purpose << 56) | block)],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def max_budget() -> float:
    """Trial budget cap for set verification: trials * M^2 must stay below it."""
    env = os.environ.get("SEPBOUND_MAX_BUDGET")
    return float(env) if env else _DEFAULT_BUDGET


def _unit_directions(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    g = rng.standard_normal((count, n))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g


# ---------------------------------------------------------------------------
# Distribution specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniformBall:
    """Uniform distribution in the unit ball."""

    def draw(self, rng: np.random.Generator, n: int, count: int) -> np.ndarray:
        d = _unit_directions(rng, count, n)
        u = rng.random(count)
        with np.errstate(divide="ignore"):
            r = np.exp(np.log(u) / n)  # U^{1/n} without underflow at large n
        return d * r[:, None]


@dataclass(frozen=True)
class SphericalLayer:
    """Uniform distribution in the spherical layer R <= ||x|| <= 1."""

    R: float

    def __post_init__(self):
        if not 0.0 < self.R < 1.0:
            raise ValueError(f"R must be in (0, 1), got {self.R}")

    def draw(self, rng, n, count):
        d = _unit_directions(rng, count, n)
        rn = math.exp(n * math.log(self.R))
        r = (rn + rng.random(count) * (1.0 - rn)) ** (1.0 / n)  # radius CDF inverse
        return d * r[:, None]


@dataclass(frozen=True)
class StandardNormal:
    def draw(self, rng, n, count):
        return rng.standard_normal((count, n))


@dataclass(frozen=True)
class SphericalExponential:
    """Rotation invariant density ~ exp(-||x||); radius is Gamma(n, 1)."""

    def draw(self, rng, n, count):
        d = _unit_directions(rng, count, n)
        r = rng.standard_gamma(float(n), count)
        return d * r[:, None]


@dataclass(frozen=True)
class SphericalRadial:
    """Rotation invariant with a caller-supplied radius sampler(rng, count)."""

    radial_sampler: Callable[[np.random.Generator, int], np.ndarray]
    description: str = ""

    def draw(self, rng, n, count):
        d = _unit_directions(rng, count, n)
        r = np.asarray(self.radial_sampler(rng, count), dtype=float)
        return d * r[:, None]


@dataclass(frozen=True)
class UniformCube:
    """Uniform in the unit cube [0, 1]^n."""

    def draw(self, rng, n, count):
        return rng.random((count, n))


@dataclass(frozen=True)
class ProductIID:
    component: ComponentSpec

    def draw(self, rng, n, count):
        return np.asarray(self.component.draw(rng, (count, n)), dtype=float)


@dataclass(frozen=True)
class ProductGeneral:
    components: tuple

    def draw(self, rng, n, count):
        if len(self.components) != n:
            raise ValueError(f"need {n} components, got {len(self.components)}")
        cols = [np.asarray(c.draw(rng, count), dtype=float) for c in self.components]
        return np.stack(cols, axis=1)


@dataclass(frozen=True)
class GaussianSLC:
    """Isotropic normal scaled to covariance (1/gamma) * identity."""

    gamma: float

    def __post_init__(self):
        if not self.gamma > 0.0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    def draw(self, rng, n, count):
        return rng.standard_normal((count, n)) / math.sqrt(self.gamma)


@dataclass(frozen=True)
class SlcMixture:
    """Mixture of Gaussians N(mean_i, (1/gamma_i) I) with the given weights."""

    weights: tuple
    means: tuple  # scalar per component (broadcast) or length-n vectors
    gammas: tuple

    def __post_init__(self):
        if not (len(self.weights) == len(self.means) == len(self.gammas)):
            raise ValueError("weights, means, gammas must have equal lengths")
        if any(w < 0 for w in self.weights) or abs(sum(self.weights) - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
        if any(g <= 0 for g in self.gammas):
            raise ValueError("gammas must be positive")

    def draw(self, rng, n, count):
        picks = rng.choice(len(self.weights), size=count, p=np.asarray(self.weights))
        out = rng.standard_normal((count, n))
        for i, (m, g) in enumerate(zip(self.means, self.gammas)):
            sel = picks == i
            if not np.any(sel):
                continue
            mean_vec = np.broadcast_to(np.asarray(m, dtype=float), (n,))
            out[sel] = out[sel] / math.sqrt(g) + mean_vec
        return out


@dataclass(frozen=True)
class LaplaceProduct:
    """i.i.d. double-exponential coordinates with density (sqrt2/2) e^{-sqrt2 |x|}."""

    def draw(self, rng, n, count):
        return rng.laplace(0.0, 1.0 / math.sqrt(2.0), (count, n))

    def component(self) -> ComponentSpec:
        return Laplace(1.0 / math.sqrt(2.0))


@dataclass(frozen=True)
class PerturbedModel:
    """Arbitrary base points in the (1-eps)-ball, each displaced uniformly in an eps-ball.

    ``draw`` returns perturbed realizations of the whole base set, shape
    (count, M, n); separability uses the per-point perturbed definition.
    """

    epsilon: float
    base_points: tuple  # tuple of tuples, shape (M, n)

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        base = np.asarray(self.base_points, dtype=float)
        if base.ndim != 2:
            raise ValueError("base_points must be a 2-D point array")
        norms = np.linalg.norm(base, axis=1)
        if np.any(norms > 1.0 - self.epsilon + 1e-12):
            raise ValueError("base points must lie inside the ball of radius 1 - epsilon")

    def base_array(self) -> np.ndarray:
        return np.asarray(self.base_points, dtype=float)

    def draw(self, rng, n, count):
        base = self.base_array()
        m = base.shape[0]
        if base.shape[1] != n:
            raise ValueError(f"base points have dimension {base.shape[1]}, not {n}")
        noise = UniformBall().draw(rng, n, count * m).reshape(count, m, n)
        return base[None, :, :] + self.epsilon * noise


@dataclass(frozen=True)
class DependentHalfCube:
    """Adversarial dependent pair: y uniform on cube vertices, x uniform on the
    vertices of the twice-smaller cube whose main diagonal joins the cube
    center and y.  Always (1, center)-inseparable."""

    def draw_pairs(self, rng, n, count):
        y = rng.integers(0, 2, size=(count, n)).astype(float)
        take_y = rng.random((count, n)) < 0.5
        x = np.where(take_y, y, 0.5)
        return x, y


_PAIRED_SPECS = (DependentHalfCube,)


def sample(spec, n: int, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` points (or paired/set structures) from a distribution spec.

    Ordinary specs return shape (count, n).  DependentHalfCube returns
    (count, 2, n) stacked (x, y) pairs; PerturbedModel returns (count, M, n)
    perturbed realizations of its base set.
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    rng = _rng(seed, _PURPOSE_SAMPLE, 0)
    if isinstance(spec, DependentHalfCube):
        x, y = spec.draw_pairs(rng, n, count)
        return np.stack([x, y], axis=1)
    return spec.draw(rng, n, count)


# ---------------------------------------------------------------------------
# Fisher pair checks
# ---------------------------------------------------------------------------


def is_inseparable_ordered(x, y, alpha: float, c=None) -> bool:
    """True iff alpha (x-c, x-c) <= (x-c, y-c): the ordered pair (x, y) violates
    the separation inequality.  Ties count as inseparable (the theorem's
    inequality is strict), so x = c returns True."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {y.shape}")
    if c is not None:
        c = np.asarray(c, dtype=float)
        x = x - c
        y = y - c
    return bool(alpha * float(x @ x) <= float(x @ y))


def _count_pairs_center(points: np.ndarray, alpha: float, c) -> int:
    xc = np.asarray(points, dtype=float)
    if c is not None:
        xc = xc - np.asarray(c, dtype=float)
    return _count_pairs(xc, alpha, np.float64)


def _count_pairs(xc: np.ndarray, alpha: float, dtype) -> int:
    """Ordered inseparable pairs in a centered point set (O(M^2) inner products).

    Rows are sorted by norm and the Gram matrix is formed in cache-sized
    stripes against the trailing columns only; each unordered pair is tested
    in both orders from the single shared inner product.
    """
    m = xc.shape[0]
    if m < 2:
        return 0
    d = np.einsum("ij,ij->i", xc, xc)
    order = np.argsort(d, kind="stable")
    d_sorted = d[order]
    x = np.ascontiguousarray(xc[order], dtype=dtype)
    # Ties count as inseparable.  The Gram entries and the row norms are
    # reduced in different summation orders, so an exact tie (duplicated
    # point) can land one ulp on either side; the slack is far above that
    # rounding and far below any genuine margin of the discrete families.
    rel_slack = 1e-12 if dtype == np.float64 else 1e-5
    thr = ((alpha * d_sorted) * (1.0 - rel_slack)).astype(dtype)
    xt = np.ascontiguousarray(x.T)
    stripe = 128
    total = 0
    iu_rows, iu_cols = np.triu_indices(stripe, k=1)
    buf = np.empty((min(stripe, m), m), dtype=dtype)
    for i0 in range(0, m - 1, stripe):
        i1 = min(i0 + stripe, m)
        b = i1 - i0
        g = np.matmul(x[i0:i1], xt[:, i0:], out=buf[:b, : m - i0])
        # diagonal block: strict upper triangle only (each unordered pair once,
        # both ordered directions tested on the shared inner product)
        if b == stripe:
            rows, cols = iu_rows, iu_cols
        else:
            rows, cols = np.triu_indices(b, k=1)
        vals = g[rows, cols]
        total += int(np.count_nonzero(vals >= thr[i0:i1][rows]))
        total += int(np.count_nonzero(vals >= thr[i0:i1][cols]))
        # off-diagonal columns: every (row, col) pair has the column point
        # strictly later in norm order
        go = g[:, b:]
        if go.size:
            total += int(np.count_nonzero(go >= thr[i0:i1, None]))
            # column as x: needs alpha d_j <= G <= sqrt(d_i d_j), hence
            # d_j <= max_row(d_i)/alpha^2; with sorted norms that limits the
            # test to a thin column slice (ties only, when alpha = 1)
            d_cut = d_sorted[i1 - 1] / (alpha * alpha) * (1.0 + 1e-6) + 1e-300
            jmax = int(np.searchsorted(d_sorted, d_cut, side="right"))
            if jmax > i1:
                total += int(np.count_nonzero(go[:, : jmax - i1] >= thr[None, i1:jmax]))
    return total


def count_inseparable_pairs(points, alpha: float, c=None) -> int:
    """Number of ordered pairs (x, y), x != y, with is_inseparable_ordered true."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] < 2:
        raise ValueError("need a 2-D array with at least two points")
    return _count_pairs_center(points, alpha, c)


def _count_pairs_perturbed(x: np.ndarray, base: np.ndarray, alpha: float) -> int:
    """Ordered pair count under the perturbed-model separability definition:
    pair (i, j) is inseparable iff alpha (x_i - y_i, x_i - y_i) <= (x_i - y_i, x_j - y_i)."""
    d = x - base
    lhs = alpha * np.einsum("ij,ij->i", d, d)
    rhs = d @ x.T - np.einsum("ij,ij->i", d, base)[:, None]
    ge = rhs >= lhs[:, None]
    np.fill_diagonal(ge, False)
    return int(np.count_nonzero(ge))


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MCEstimate:
    trials: int
    hits: int
    p_hat: float
    ci_low: float
    ci_high: float
    seed: int
    confidence: float = DEFAULT_CONFIDENCE


@dataclass(frozen=True)
class SetSeparability:
    p_separable: MCEstimate
    mean_inseparable_pairs: float
    total_pairs: int


def wilson_interval(hits: int, trials: int, confidence: float = DEFAULT_CONFIDENCE):
    """Wilson score interval; robust for hit probabilities near zero."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    z = float(ndtri(0.5 * (1.0 + confidence)))
    p = hits / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2.0 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _estimate(hits: int, trials: int, seed: int, confidence: float) -> MCEstimate:
    lo, hi = wilson_interval(hits, trials, confidence)
    return MCEstimate(trials, hits, hits / trials, lo, hi, seed, confidence)


def estimate_two_point(
    spec,
    n: int,
    alpha: float,
    c=None,
    trials: int = 10**6,
    seed: int = 0,
    confidence: float = DEFAULT_CONFIDENCE,
) -> MCEstimate:
    """Monte Carlo estimate of the ordered two-point inseparability probability."""
    if trials < 10**4:
        raise ValueError(f"trials must be >= 1e4, got {trials}")
    if isinstance(spec, PerturbedModel):
        raise ValueError("two-point estimation is undefined for PerturbedModel (no i.i.d. pairs)")
    cvec = None if c is None else np.asarray(c, dtype=float)
    hits = 0
    done = 0
    block_idx = 0
    while done < trials:
        count = min(_PAIR_BLOCK, trials - done)
        rng = _rng(seed, _PURPOSE_PAIRS, block_idx)
        if isinstance(spec, DependentHalfCube):
            x, y = spec.draw_pairs(rng, n, count)
        else:
            x = spec.draw(rng, n, count)
            y = spec.draw(rng, n, count)
        if cvec is not None:
            x = x - cvec
            y = y - cvec
        lhs = alpha * np.einsum("ij,ij->i", x, x)
        rhs = np.einsum("ij,ij->i", x, y)
        hits += int(np.count_nonzero(rhs >= lhs))
        done += count
        block_idx += 1
    return _estimate(hits, trials, seed, confidence)


def estimate_set_separability(
    spec,
    n: int,
    M: int,
    alpha: float,
    c=None,
    trials: int = 1000,
    seed: int = 0,
    confidence: float = DEFAULT_CONFIDENCE,
) -> SetSeparability:
    """Generate independent M-point sets; report the separable fraction and the
    empirical mean ordered inseparable-pair count.

    Refuses upfront when trials * M^2 exceeds the configured budget
    (SEPBOUND_MAX_BUDGET).  Large sets (M > 8192) are counted with float32
    BLAS stripes; the comparison flip probability from f32 rounding is orders
    of magnitude below the statistical resolution of any such run.
    """
    if M < 2:
        raise ValueError(f"M must be >= 2, got {M}")
    if trials < 1:
        raise ValueError("trials must be positive")
    cost = float(trials) * float(M) ** 2
    budget = max_budget()
    if cost > budget:
        raise BudgetExceeded(
            f"trials*M^2 = {cost:.3g} exceeds budget {budget:.3g}; "
            f"set SEPBOUND_MAX_BUDGET >= {cost:.3g} to allow this run"
        )
    if isinstance(spec, DependentHalfCube):
        raise ValueError("set separability is undefined for DependentHalfCube (pair model)")

    perturbed = isinstance(spec, PerturbedModel)
    if perturbed:
        base = spec.base_array()
        if base.shape[0] != M:
            raise ValueError(f"PerturbedModel has {base.shape[0]} base points, M={M}")
    cvec = None if c is None else np.asarray(c, dtype=float)
    dtype = np.float32 if M > _FAST_COUNT_MIN_M else np.float64

    separable = 0
    total_pairs = 0
    for t in range(trials):
        rng = _rng(seed, _PURPOSE_SETS, t)
        if perturbed:
            x = spec.draw(rng, n, 1)[0]
            cnt = _count_pairs_perturbed(x, base, alpha)
        else:
            x = spec.draw(rng, n, M)
            xc = x if cvec is None else x - cvec
            cnt = _count_pairs(xc, alpha, dtype)
        total_pairs += cnt
        separable += int(cnt == 0)
    return SetSeparability(
        _estimate(separable, trials, seed, confidence),
        total_pairs / trials,
        total_pairs,
    )
