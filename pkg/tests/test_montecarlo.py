"""Sampler correctness, pair-check properties, estimator contracts.

Oracles: analytic radial moments, brute-force O(M^2) python pair counting,
and the excluded-ball membership test.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sepbound import montecarlo as mc
from sepbound import twopoint as tp
from sepbound.errors import BudgetExceeded


def _radial_moments(spec, n, count, seed=1234):
    x = mc.sample(spec, n, count, seed)
    r = np.linalg.norm(x, axis=1)
    return r.mean(), (r**2).mean(), r.std(ddof=1) / math.sqrt(count)


class TestSamplers:
    @pytest.mark.parametrize("n", [5, 50])
    def test_uniform_ball_moments(self, n):
        # E[r^k] = n/(n+k); sampled second moment within 4 SE
        x = mc.sample(mc.UniformBall(), n, 40000, 7)
        r2 = (x**2).sum(1)
        se = r2.std(ddof=1) / 200.0
        assert abs(r2.mean() - n / (n + 2)) < 4 * se
        assert np.all(r2 <= 1.0 + 1e-12)

    @pytest.mark.parametrize("n", [5, 50])
    def test_normal_isotropy(self, n):
        x = mc.sample(mc.StandardNormal(), n, 20000, 8)
        var = x.var(axis=0, ddof=1)
        assert np.all(np.abs(var - 1.0) < 4.0 * math.sqrt(2.0 / 20000))

    @pytest.mark.parametrize("n", [5, 50])
    def test_exponential_radius_gamma(self, n):
        m1, m2, se = _radial_moments(mc.SphericalExponential(), n, 40000)
        assert abs(m1 - n) < 4 * se
        assert m2 == pytest.approx(n * (n + 1), rel=0.05)

    @pytest.mark.parametrize("n,R", [(5, 0.3), (50, 0.8)])
    def test_layer_radial_moments(self, n, R):
        # E[r^k] = n (1 - R^{n+k}) / ((n+k)(1 - R^n))
        x = mc.sample(mc.SphericalLayer(R), n, 40000, 9)
        r = np.linalg.norm(x, axis=1)
        want = n * (1.0 - R ** (n + 1)) / ((n + 1) * (1.0 - R**n))
        assert abs(r.mean() - want) < 4 * r.std(ddof=1) / 200.0
        assert np.all((r >= R - 1e-12) & (r <= 1.0 + 1e-12))

    def test_gaussian_slc_covariance(self):
        x = mc.sample(mc.GaussianSLC(0.5), 10, 30000, 10)
        assert x.var(axis=0).mean() == pytest.approx(2.0, rel=0.05)

    def test_laplace_product_variance(self):
        x = mc.sample(mc.LaplaceProduct(), 25, 30000, 11)
        assert x.var() == pytest.approx(1.0, rel=0.05)
        assert abs(x.mean()) < 0.02

    def test_cube_and_product_iid(self):
        x = mc.sample(mc.UniformCube(), 8, 20000, 12)
        assert x.var() == pytest.approx(1.0 / 12.0, rel=0.05)
        y = mc.sample(mc.ProductIID(tp.ThreePoint(0.4)), 8, 20000, 13)
        assert set(np.unique(y)) <= {0.0, 0.5, 1.0}
        assert y.var() == pytest.approx(0.16, rel=0.06)

    def test_product_general_columns(self):
        comps = (tp.Uniform01(), tp.SymmetricBernoulli(), tp.NormalComponent())
        x = mc.sample(mc.ProductGeneral(comps), 3, 20000, 14)
        assert set(np.unique(x[:, 1])) == {0.0, 1.0}
        assert x[:, 2].var() == pytest.approx(1.0, rel=0.06)

    def test_mixture_means(self):
        spec = mc.SlcMixture(weights=(0.3, 0.7), means=(0.0, 2.0), gammas=(1.0, 4.0))
        x = mc.sample(spec, 4, 40000, 15)
        assert x.mean() == pytest.approx(0.7 * 2.0, abs=0.05)

    def test_spherical_radial_custom(self):
        spec = mc.SphericalRadial(lambda rng, count: np.full(count, 2.0), "shell r=2")
        x = mc.sample(spec, 6, 100, 16)
        assert np.allclose(np.linalg.norm(x, axis=1), 2.0)

    def test_half_cube_pair_shape(self):
        pairs = mc.sample(mc.DependentHalfCube(), 7, 50, 17)
        assert pairs.shape == (50, 2, 7)
        x, y = pairs[:, 0], pairs[:, 1]
        assert set(np.unique(y)) <= {0.0, 1.0}
        assert np.all((x == 0.5) | (x == y))

    def test_perturbed_shape_and_radius(self):
        base = [(0.2, 0.0, 0.0), (0.0, -0.3, 0.1)]
        spec = mc.PerturbedModel(0.4, tuple(base))
        x = mc.sample(spec, 3, 20, 18)
        assert x.shape == (20, 2, 3)
        d = np.linalg.norm(x - np.asarray(base)[None], axis=2)
        assert np.all(d <= 0.4 + 1e-12)
        with pytest.raises(ValueError):
            mc.PerturbedModel(0.4, ((0.9, 0.0, 0.0),))


class TestPairCheck:
    def test_orthogonal_pair(self):
        assert not mc.is_inseparable_ordered([1.0, 0.0], [0.0, 1.0], 1.0)

    def test_equal_points_tie(self):
        assert mc.is_inseparable_ordered([0.3, 0.4], [0.3, 0.4], 1.0)

    def test_x_equals_center(self):
        assert mc.is_inseparable_ordered([0.5, 0.5], [0.9, 0.1], 1.0, c=[0.5, 0.5])

    def test_excluded_ball_oracle(self):
        # membership in the ball ||x - y/(2a)|| < ||y||/(2a) is the geometric
        # form of the ordered check
        rng = np.random.default_rng(42)
        for _ in range(100):
            n = int(rng.integers(2, 12))
            a = float(rng.uniform(0.3, 1.0))
            y = rng.standard_normal(n)
            center = y / (2.0 * a)
            radius = np.linalg.norm(y) / (2.0 * a)
            x = center + rng.standard_normal(n) * radius / math.sqrt(n)
            inside = np.linalg.norm(x - center) < radius
            if abs(np.linalg.norm(x - center) - radius) < 1e-12:
                continue
            assert mc.is_inseparable_ordered(x, y, a) == bool(inside)

    @given(st.integers(-20, 20), st.integers(0, 10**6))
    @settings(max_examples=300, deadline=None)
    def test_scale_invariance_powers_of_two(self, k, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 8))
        x, y, c = rng.standard_normal((3, n))
        a = float(rng.uniform(0.2, 1.0))
        s = 2.0**k
        assert mc.is_inseparable_ordered(s * x, s * y, a, s * c) == mc.is_inseparable_ordered(
            x, y, a, c
        )

    @given(st.integers(0, 10**6))
    @settings(max_examples=300, deadline=None)
    def test_center_shift(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 8))
        x, y, c = rng.standard_normal((3, n))
        a = float(rng.uniform(0.2, 1.0))
        assert mc.is_inseparable_ordered(x, y, a, c) == mc.is_inseparable_ordered(
            x - c, y - c, a, None
        )

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mc.is_inseparable_ordered([1.0, 0.0], [1.0], 1.0)


class TestCountPairs:
    def test_orthonormal_basis(self):
        assert mc.count_inseparable_pairs(np.eye(6), 1.0) == 0

    def test_m_copies(self):
        pts = np.tile(np.array([0.3, -0.7, 0.2]), (5, 1))
        assert mc.count_inseparable_pairs(pts, 1.0) == 20

    def test_duplicated_row_exactly_two(self):
        pts = np.vstack([2.0 * np.eye(4), 2.0 * np.eye(4)[:1]])
        assert mc.count_inseparable_pairs(pts, 1.0) == 2

    @pytest.mark.parametrize("alpha", [0.6, 1.0])
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_blocked_vs_bruteforce_oracle(self, alpha, seed):
        rng = np.random.default_rng(seed)
        pts = rng.standard_normal((73, 4)) * 0.6
        c = rng.standard_normal(4) * 0.1
        want = sum(
            mc.is_inseparable_ordered(pts[i], pts[j], alpha, c)
            for i in range(73)
            for j in range(73)
            if i != j
        )
        assert mc.count_inseparable_pairs(pts, alpha, c) == want

    def test_half_cube_pairs_always_inseparable(self):
        pairs = mc.sample(mc.DependentHalfCube(), 9, 500, 99)
        c = np.full(9, 0.5)
        assert all(
            mc.is_inseparable_ordered(x, y, 1.0, c) for x, y in zip(pairs[:, 0], pairs[:, 1])
        )


class TestEstimateTwoPoint:
    def test_reproducible_and_blocked(self):
        # trials not a multiple of the block size; same seed => identical hits
        a = mc.estimate_two_point(mc.UniformBall(), 6, 1.0, trials=150000, seed=5)
        b = mc.estimate_two_point(mc.UniformBall(), 6, 1.0, trials=150000, seed=5)
        assert a.hits == b.hits
        c = mc.estimate_two_point(mc.UniformBall(), 6, 1.0, trials=150000, seed=6)
        assert c.hits != a.hits  # different stream (overwhelmingly)

    def test_ball_matches_theory(self):
        est = mc.estimate_two_point(mc.UniformBall(), 10, 1.0, trials=10**6, seed=42)
        assert est.ci_low <= 2.0**-11 <= est.ci_high

    def test_normal_1d_quarter(self):
        est = mc.estimate_two_point(mc.StandardNormal(), 1, 1.0, trials=10**5, seed=7)
        assert est.ci_low <= 0.25 <= est.ci_high

    def test_invariants(self):
        est = mc.estimate_two_point(mc.UniformCube(), 4, 0.9, np.full(4, 0.5), 20000, 3)
        assert 0.0 <= est.ci_low <= est.p_hat <= est.ci_high <= 1.0
        assert est.hits <= est.trials and est.seed == 3

    def test_rejections(self):
        with pytest.raises(ValueError):
            mc.estimate_two_point(mc.UniformBall(), 5, 1.0, trials=100)
        with pytest.raises(ValueError):
            mc.estimate_two_point(mc.PerturbedModel(0.3, ((0.1, 0.1),)), 2, 1.0, trials=10**4)


class TestEstimateSetSeparability:
    def test_m2_reduces_to_two_point(self):
        n = 8
        res = mc.estimate_set_separability(mc.UniformBall(), n, 2, 1.0, trials=4000, seed=21)
        f = math.exp(tp.ball_exact(n, 1.0).f.log_value)
        # mean ordered pair count over both orders = 2 f; loose 4-sigma band
        se = math.sqrt(max(res.total_pairs, 1)) / 4000
        assert abs(res.mean_inseparable_pairs - 2.0 * f) <= 4.0 * se + 4.0 / 4000

    def test_expected_pairs_calibration_small(self):
        # ball n=16, M set so that M(M-1) f = 1.0; mean count should be near 1
        n = 16
        f = 2.0 ** -(n + 1)
        m = round(0.5 + math.sqrt(0.25 + 1.0 / f))
        res = mc.estimate_set_separability(mc.UniformBall(), n, m, 1.0, trials=400, seed=31)
        se = math.sqrt(max(res.total_pairs, 1)) / 400
        assert abs(res.mean_inseparable_pairs - 1.0) <= 4.0 * se

    def test_fraction_and_pairs_consistent(self):
        res = mc.estimate_set_separability(mc.StandardNormal(), 6, 10, 1.0, trials=300, seed=41)
        assert res.p_separable.trials == 300
        assert res.mean_inseparable_pairs >= 0.0
        if res.p_separable.hits == 300:
            assert res.total_pairs == 0

    def test_budget_refusal(self, monkeypatch):
        monkeypatch.setenv("SEPBOUND_MAX_BUDGET", "1000")
        with pytest.raises(BudgetExceeded):
            mc.estimate_set_separability(mc.UniformBall(), 5, 100, 1.0, trials=10, seed=1)

    def test_perturbed_model_modified_check(self):
        rng = np.random.default_rng(3)
        base = rng.standard_normal((12, 6))
        base *= 0.5 / np.linalg.norm(base, axis=1, keepdims=True)
        spec = mc.PerturbedModel(0.3, tuple(map(tuple, base)))
        res = mc.estimate_set_separability(spec, 6, 12, 1.0, trials=200, seed=51)
        # oracle: brute-force the modified per-point definition on one draw
        x = spec.draw(np.random.default_rng(123), 6, 1)[0]
        b = spec.base_array()
        want = sum(
            float(np.dot(x[i] - b[i], x[j] - b[i]) >= np.dot(x[i] - b[i], x[i] - b[i]))
            for i in range(12)
            for j in range(12)
            if i != j
        )
        got = mc._count_pairs_perturbed(x, b, 1.0)
        assert got == want
        assert 0.0 <= res.p_separable.p_hat <= 1.0

    def test_half_cube_rejected(self):
        with pytest.raises(ValueError):
            mc.estimate_set_separability(mc.DependentHalfCube(), 5, 10, 1.0, trials=10)


class TestWilson:
    def test_basic_properties(self):
        lo, hi = mc.wilson_interval(0, 1000)
        assert lo == 0.0 and 0.0 < hi < 0.02
        lo, hi = mc.wilson_interval(1000, 1000)
        assert hi == 1.0 and lo > 0.98
        lo, hi = mc.wilson_interval(17, 1000)
        assert lo <= 17 / 1000 <= hi

    def test_confidence_widens(self):
        lo1, hi1 = mc.wilson_interval(50, 1000, 0.95)
        lo3, hi3 = mc.wilson_interval(50, 1000, mc.DEFAULT_CONFIDENCE)
        assert hi3 - lo3 > hi1 - lo1
