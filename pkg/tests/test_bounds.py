"""Theorem registry tests: master-principle conversion, named example values,
perturbed model, exponents, and registry-wide invariants."""

import math

import pytest

from sepbound import twopoint as tp
from sepbound.bounds import (
    SeparabilityQuery,
    bound,
    exponent_b,
    exponent_b_numeric,
    m_from_f,
    perturbed_max_m,
    perturbed_probability,
    theorem_ids,
)
from sepbound.errors import HypothesisViolation
from sepbound.specfun import LogProb


def q(n, alpha=1.0, delta=0.01):
    return SeparabilityQuery(n, alpha, delta)


class TestMFromF:
    def test_golden_ratio(self):
        res = m_from_f(LogProb.from_linear(0.01), 0.01, "exact")
        assert 10.0**res.log10_M == pytest.approx(0.5 + math.sqrt(1.25), rel=1e-12)

    def test_ball_corollary_form(self):
        # f = (1/2) 2^{-n} gives M < 1/2 + sqrt(1/4 + delta 2^{n+1})
        n, delta = 30, 0.5
        f = LogProb(-(n + 1) * math.log(2.0))
        res = m_from_f(f, delta, "exact")
        want = 0.5 + math.sqrt(0.25 + delta * 2.0 ** (n + 1))
        assert 10.0**res.log10_M == pytest.approx(want, rel=1e-12)

    def test_normal_example(self):
        res = m_from_f(tp.normal_exact(100, 0.9).f, 0.01, "exact")
        assert res.M_exact == 1141060

    def test_exact_dominates_simple(self):
        for lf in (-3.0, -40.0, -700.0):
            e = m_from_f(LogProb(lf), 0.01, "exact").log10_M
            s = m_from_f(LogProb(lf), 0.01, "simple").log10_M
            assert e >= s
        # they agree within one unit as delta/f grows
        e = m_from_f(LogProb(-50.0), 0.01, "exact")
        s = m_from_f(LogProb(-50.0), 0.01, "simple")
        assert abs(10.0**e.log10_M - 10.0**s.log10_M) <= 1.0

    def test_deep_log_domain(self):
        res = m_from_f(LogProb(-100000.0), 0.01, "exact")
        assert res.log10_M == pytest.approx((0.5 * (math.log(0.01) + 1e5)) / math.log(10.0), rel=1e-12)
        assert res.M_exact is None


class TestNamedExamples:
    """Reference values; closed forms asserted to 0.1%, integrals to 1%."""

    def test_prototype_table_row(self):
        res = bound(q(100, 0.8), "prototype", r=0.75, C=1.0)
        assert 10.0**res.log10_M == pytest.approx(828180.0, rel=1e-3)

    def test_prototype_set_row(self):
        res = bound(q(100, 0.8), "prototype_set", r=0.75, C=1.0)
        assert 10.0**res.log10_M == pytest.approx(910.0, rel=1e-3)

    def test_ball_known(self):
        res = bound(q(100, 1.0), "ball_known")
        assert 10.0**res.log10_M == pytest.approx(1.6e14, rel=2e-2)

    def test_ball_simple_and_optimal_pair(self):
        assert bound(q(200, 0.5), "ball_simple").M_exact == 642465
        assert 642465 == pytest.approx(642645, rel=1e-3)  # printed value, 0.1% tier
        assert bound(q(200, 0.5), "ball_optimal").M_exact == pytest.approx(661243, rel=1e-2)

    def test_normal_triple(self):
        assert bound(q(100, 0.9), "normal_known").M_exact == 276671
        assert bound(q(100, 0.9), "normal_simple").M_exact == 1132950
        assert bound(q(100, 0.9), "normal_optimal").M_exact == 1141060

    def test_normal_optimal_table6(self):
        res = bound(q(100, 1.0), "normal_optimal")
        assert 10.0**res.log10_M == pytest.approx(1.4e7, rel=2e-2)

    def test_slc_improved_table5(self):
        res = bound(q(500, 1.0), "slc_improved", gamma=0.6)
        assert 10.0**res.log10_M == pytest.approx(4.3e14, rel=2e-2)
        assert bound(q(100, 1.0), "slc_improved", gamma=1.0).M_exact == 7974

    def test_exponential_optimal(self):
        assert bound(q(200, 0.6), "exponential_optimal").M_exact == 154501

    def test_rot_alpha1_example(self):
        assert bound(q(400, 1.0), "rot_alpha1").M_exact == 144625706429

    def test_product_chernoff_table10(self):
        # printed cell is truncated to 2 significant digits (true value 1.341e9)
        res = bound(q(100, 1.0), "product_chernoff", component=tp.Uniform01())
        assert 10.0**res.log10_M == pytest.approx(1.3e9, rel=4e-2)
        assert 10.0**res.log10_M == pytest.approx(
            math.sqrt(0.01) * math.exp(100 * 0.233192715438), rel=1e-6
        )

    def test_product_legacy(self):
        res = bound(q(500, 1.0), "product_legacy", sigma0=0.5)
        assert 10.0**res.log10_M == pytest.approx(141.7, rel=1e-3)

    def test_product_hoeffding_examples(self):
        assert bound(q(500, 1.0), "product_hoeffding", sigma0=0.5, center="general").M_exact == 48516519
        assert bound(q(100, 1.0), "product_hoeffding", sigma0=0.5, center="cube_center").M_exact == 37901503
        assert bound(q(500, 0.9), "product_hoeffding", sigma0=0.5, center="mean").M_exact == 8411607

    def test_product_bernstein_example(self):
        assert bound(q(1000, 1.0), "product_bernstein", sigma0=0.2).M_exact == 21799877

    def test_dependent_table11(self):
        assert 10.0 ** bound(q(500, 1.0), "dependent", sigma0=0.4).log10_M == pytest.approx(
            334248.0, rel=1e-3
        )
        assert 10.0 ** bound(q(1000, 1.0), "dependent", sigma0=0.5).log10_M == pytest.approx(
            1.7e47, rel=6e-2
        )


class TestPerturbed:
    def test_table4_spots(self):
        assert perturbed_probability(5000, 1e5, 0.2).probability == pytest.approx(0.95, abs=0.01)
        assert perturbed_probability(1000, 1e5, 0.5).probability == pytest.approx(0.9998, abs=2e-4)
        assert perturbed_probability(500, 1e5, 0.1).probability < 0.0

    def test_deficit_precision(self):
        r = perturbed_probability(2000, 1e5, 0.5)
        assert r.deficit == pytest.approx(5.8e-18, rel=2e-2)

    def test_max_m_monotone_inverse(self):
        m = perturbed_max_m(5000, 0.2, 0.05)
        assert m > 1.0
        assert perturbed_probability(5000, m * 0.999, 0.2).deficit <= 0.05
        assert perturbed_probability(5000, m * 1.01, 0.2).deficit > 0.05

    def test_registry_entry(self):
        res = bound(q(5000, 1.0, 0.05), "perturbed", epsilon=0.2)
        assert res.log10_M > 4.0
        with pytest.raises(HypothesisViolation):
            bound(q(5000, 0.9, 0.05), "perturbed", epsilon=0.2)


class TestExponentB:
    def test_closed_forms(self):
        assert exponent_b("ball_optimal", 1.0) == pytest.approx(0.5 * math.log(2.0), abs=1e-12)
        assert exponent_b("normal_optimal", 1.0) == pytest.approx(0.25 * math.log(2.0), abs=1e-12)
        assert exponent_b("exponential_optimal", 1.0) == pytest.approx(0.1308, abs=5e-5)
        assert exponent_b("slc", 1.0, gamma=1.0) == pytest.approx(1.0 / 16.0, abs=1e-12)
        assert exponent_b("slc_improved", 1.0, gamma=1.0) == pytest.approx(1.0 / 8.0, abs=1e-12)

    def test_ball_branch_continuity(self):
        s = math.sqrt(0.5)
        assert exponent_b("ball_optimal", s - 1e-9) == pytest.approx(
            exponent_b("ball_optimal", s + 1e-9), abs=1e-7
        )

    def test_numeric_extraction_within_two_percent(self):
        cases = [
            (lambda n: tp.ball_exact(n, 1.0).f, exponent_b("ball_optimal", 1.0)),
            (lambda n: tp.normal_exact(n, 1.0).f, exponent_b("normal_optimal", 1.0)),
            (lambda n: tp.exponential_exact(n, 1.0).f, exponent_b("exponential_optimal", 1.0)),
            (
                lambda n: tp.slc_f(n, 1.0, tp.SlcParams(gamma=1.0), improved=True).f,
                exponent_b("slc_improved", 1.0, gamma=1.0),
            ),
        ]
        for f_of_n, want in cases:
            got = exponent_b_numeric(f_of_n, 2000)
            assert got == pytest.approx(want, rel=2e-2)

    def test_unsupported(self):
        with pytest.raises(ValueError):
            exponent_b("perturbed", 1.0)


_COVERAGE_PARAMS = {
    "prototype": dict(n=100, alpha=0.8, kw=dict(r=0.75, C=1.0)),
    "prototype_set": dict(n=100, alpha=0.8, kw=dict(r=0.75, C=1.0)),
    "ball_known": dict(n=100, alpha=1.0, kw={}),
    "ball_optimal": dict(n=100, alpha=1.0, kw={}),
    "ball_simple": dict(n=200, alpha=0.5, kw={}),
    "layer_optimal": dict(n=30, alpha=0.9, kw=dict(R=0.5)),
    "slc": dict(n=100, alpha=1.0, kw=dict(gamma=1.0)),
    "slc_improved": dict(n=100, alpha=1.0, kw=dict(gamma=1.0)),
    "independent_slc": dict(
        n=100, alpha=0.9, kw=dict(points=[tp.SlcParams(1.0), tp.SlcParams(0.7, x0_norm=1.0)])
    ),
    "mixture_slc": dict(
        n=100, alpha=0.9, kw=dict(points=[tp.SlcParams(1.0), tp.SlcParams(0.7, x0_norm=1.0)])
    ),
    "normal_known": dict(n=100, alpha=0.9, kw={}),
    "normal_optimal": dict(n=100, alpha=0.9, kw={}),
    "normal_simple": dict(n=100, alpha=0.9, kw={}),
    "spherical_custom": dict(n=20, alpha=0.8, kw=dict(radial=tp.ball_radial_model())),
    "exponential_optimal": dict(n=100, alpha=1.0, kw={}),
    "exponential_simple": dict(n=100, alpha=1.0, kw={}),
    "rot_simple": dict(n=500, alpha=1.0, kw={}),
    "rot_general": dict(n=100, alpha=1.0, kw={}),
    "rot_alpha1": dict(n=400, alpha=1.0, kw={}),
    "product_hoeffding": dict(n=500, alpha=1.0, kw=dict(sigma0=0.5)),
    "product_bernstein": dict(n=1000, alpha=1.0, kw=dict(sigma0=0.2)),
    "product_chernoff": dict(n=100, alpha=1.0, kw=dict(component=tp.Uniform01())),
    "product_legacy": dict(n=500, alpha=1.0, kw=dict(sigma0=0.5)),
    "dependent": dict(n=500, alpha=1.0, kw=dict(sigma0=0.4)),
    "perturbed": dict(n=5000, alpha=1.0, kw=dict(epsilon=0.2)),
}


class TestRegistry:
    def test_every_id_covered_and_finite(self):
        assert set(_COVERAGE_PARAMS) == set(theorem_ids())
        for name, cfg in _COVERAGE_PARAMS.items():
            res = bound(q(cfg["n"], cfg["alpha"]), name, **cfg["kw"])
            assert math.isfinite(res.log10_M), name
            assert res.theorem_id == name

    def test_exact_ns_mode_entries(self):
        for name in ("ball_optimal", "normal_optimal", "exponential_optimal",
                     "layer_optimal", "spherical_custom"):
            cfg = _COVERAGE_PARAMS[name]
            res = bound(q(cfg["n"], cfg["alpha"]), name, **cfg["kw"])
            assert res.mode == "exact_necessary_sufficient", name

    def test_sufficient_entries_mode(self):
        for name in ("ball_known", "slc", "product_bernstein", "rot_simple"):
            cfg = _COVERAGE_PARAMS[name]
            res = bound(q(cfg["n"], cfg["alpha"]), name, **cfg["kw"])
            assert res.mode == "sufficient", name

    def test_monotone_in_delta_and_n(self):
        for name, cfg in _COVERAGE_PARAMS.items():
            if name == "perturbed":
                continue  # bisection result; covered separately below
            lo = bound(SeparabilityQuery(cfg["n"], cfg["alpha"], 0.005), name, **cfg["kw"])
            hi = bound(SeparabilityQuery(cfg["n"], cfg["alpha"], 0.02), name, **cfg["kw"])
            assert hi.log10_M >= lo.log10_M - 1e-12, name
            big_n = bound(SeparabilityQuery(cfg["n"] + 40, cfg["alpha"], 0.01), name, **cfg["kw"])
            base = bound(SeparabilityQuery(cfg["n"], cfg["alpha"], 0.01), name, **cfg["kw"])
            assert big_n.log10_M >= base.log10_M - 1e-12, name

    def test_perturbed_monotone(self):
        lo = bound(SeparabilityQuery(5000, 1.0, 0.01), "perturbed", epsilon=0.2)
        hi = bound(SeparabilityQuery(5000, 1.0, 0.05), "perturbed", epsilon=0.2)
        big = bound(SeparabilityQuery(8000, 1.0, 0.01), "perturbed", epsilon=0.2)
        assert hi.log10_M >= lo.log10_M
        assert big.log10_M >= lo.log10_M

    def test_vacuous_flagged(self):
        res = bound(q(10, 0.8), "prototype", r=0.75, C=1.0)
        assert any("vacuous" in note for note in res.validity_notes)

    def test_normal_simple_over_optimal_ratio_to_one(self):
        ratios = []
        for n in (200, 1000, 5000):
            s = bound(q(n, 0.8), "normal_simple").log10_M
            o = bound(q(n, 0.8), "normal_optimal").log10_M
            ratios.append(10.0 ** (s - o))
        assert ratios[0] <= 1.0 + 1e-9  # simple never exceeds optimal
        assert abs(ratios[2] - 1.0) < abs(ratios[0] - 1.0)
        assert ratios[2] == pytest.approx(1.0, abs=1e-3)

    def test_exponential_simple_flagged_asymptotic(self):
        res = bound(q(100, 1.0), "exponential_simple")
        assert any("asymptotic" in note for note in res.validity_notes)

    def test_hypothesis_violations(self):
        with pytest.raises(HypothesisViolation):
            bound(q(5000, 1.0), "rot_alpha1")
        with pytest.raises(HypothesisViolation):
            bound(q(100, 0.8), "ball_simple")
        with pytest.raises(HypothesisViolation):
            bound(q(100, 1.0), "dependent", sigma0=0.25)
        with pytest.raises(HypothesisViolation):
            bound(q(100, 0.4), "prototype", r=0.9, C=1.0)
        with pytest.raises(ValueError):
            bound(q(100, 1.0), "no_such_theorem")

    def test_independent_slc_degeneracy_matches_slc(self):
        # identical isotropic points reduce to the simple SLC theorem bound
        res_ind = bound(q(200, 0.9), "independent_slc", points=[tp.SlcParams(0.8)] * 4)
        res_slc = bound(q(200, 0.9), "slc", gamma=0.8)
        assert res_ind.log10_M == pytest.approx(res_slc.log10_M, rel=1e-12)
