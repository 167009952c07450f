"""Quadrature and optimizer tests; scipy.integrate.quad is the independent oracle."""

import math

import pytest
from scipy.integrate import quad

from sepbound.numerics import (
    OptResult,
    expand_bracket,
    integrate_adaptive,
    integrate_log_domain,
    maximize_unimodal,
)
from sepbound.specfun import ln_beta


class TestIntegrateAdaptive:
    def test_linear(self):
        res = integrate_adaptive(lambda x: x, 0.0, 1.0)
        assert res.value == pytest.approx(0.5, rel=1e-13)
        assert res.converged and res.evaluations >= 15 and res.abs_error_estimate >= 0.0

    def test_power_rule(self):
        res = integrate_adaptive(lambda t: t**10, 0.0, 1.0)
        assert res.value == pytest.approx(1.0 / 11.0, rel=1e-12)

    def test_sphere_weight_closed_form(self):
        # oracle: int_0^{1/a} (1 - a^2 t^2)^{(n-3)/2} dt = B((n-1)/2, 1/2)/(2a)
        n, a = 11, 0.8
        res = integrate_adaptive(lambda t: (1.0 - a * a * t * t) ** ((n - 3) / 2), 0.0, 1.0 / a, 1e-12)
        want = math.exp(ln_beta((n - 1) / 2.0, 0.5)) / (2.0 * a)
        assert res.value == pytest.approx(want, rel=1e-10)

    @pytest.mark.parametrize(
        "f,a,b",
        [(lambda x: math.exp(-x) * math.cos(3 * x), 0.0, 5.0),
         (lambda x: 1.0 / (1.0 + x * x), -4.0, 7.0),
         (lambda x: math.sqrt(abs(x - 0.3)), 0.0, 1.0)],
    )
    def test_against_scipy_quad(self, f, a, b):
        want, _ = quad(f, a, b, epsabs=1e-13, epsrel=1e-13, limit=200)
        res = integrate_adaptive(f, a, b, 1e-11)
        assert res.value == pytest.approx(want, rel=1e-9, abs=1e-12)

    def test_kink_points_help(self):
        f = lambda x: abs(x - 1.0 / 3.0)
        res = integrate_adaptive(f, 0.0, 1.0, 1e-12, points=(1.0 / 3.0,))
        want = (1.0 / 3.0) ** 2 / 2.0 + (2.0 / 3.0) ** 2 / 2.0
        assert res.value == pytest.approx(want, rel=1e-13)

    def test_invalid_interval(self):
        with pytest.raises(ValueError):
            integrate_adaptive(lambda x: x, 1.0, 0.0)


class TestIntegrateLogDomain:
    def test_constant_zero(self):
        res = integrate_log_domain(lambda t: 0.0, 0.0, 1.0)
        assert res.value.log_value == pytest.approx(0.0, abs=1e-12)

    def test_constant_shift(self):
        res = integrate_log_domain(lambda t: -1000.0 + math.log(t) if t > 0 else -math.inf, 0.0, 1.0)
        assert res.value.log_value == pytest.approx(-1000.0 + math.log(0.5), rel=1e-10)

    def test_matches_linear_route(self):
        f = lambda x: math.exp(-3.0 * x) * (2.0 + math.sin(5 * x))
        flog = lambda x: -3.0 * x + math.log(2.0 + math.sin(5 * x))
        lin = integrate_adaptive(f, 0.0, 2.0, 1e-11)
        logd = integrate_log_domain(flog, 0.0, 2.0, 1e-11)
        assert logd.value.log_value == pytest.approx(math.log(lin.value), abs=1e-9)

    def test_underflowing_integrand(self):
        # ball integrand at n=500, alpha=1 underflows linearly; the log route
        # must agree with the closed asymptote (1/2) 2^{-n} of its total
        n = 500
        ln_b = ln_beta((n - 1) / 2.0, 0.5)

        def f_log(u):
            cu = math.cos(u)
            su = math.sin(u)
            if cu <= 0.0 or su <= 0.0:
                return -math.inf
            return (n - 2) * math.log(cu) + n * math.log(su) - math.log(2.0)

        res = integrate_log_domain(f_log, 0.0, math.pi / 2.0, 1e-11)
        log_p = res.value.log_value - ln_b
        want = -(n + 1) * math.log(2.0)
        assert log_p == pytest.approx(want, rel=1e-10)

    def test_zero_function(self):
        res = integrate_log_domain(lambda t: -math.inf, 0.0, 1.0)
        assert res.value.log_value == -math.inf


class TestMaximizeUnimodal:
    def test_parabola(self):
        res = maximize_unimodal(lambda x: -((x - 2.0) ** 2), 0.0, 10.0, 1e-10)
        assert res.argmax == pytest.approx(2.0, abs=1e-8)
        assert res.max_value == pytest.approx(0.0, abs=1e-15)
        assert res.bracket == (0.0, 10.0)

    def test_chernoff_normal_analytic_oracle(self):
        # E[exp(l(xy - a x^2))] = (1 - l^2 + 2 l a)^{-1/2} for standard normal
        # components, so -log E = 0.5 log(1 - l^2 + 2 l a), maximized at l = a
        # with value 0.5 log(1 + a^2)
        a = 1.0
        g = lambda lam: 0.5 * math.log(1.0 - lam * lam + 2.0 * lam * a)
        res = maximize_unimodal(g, 0.0, 1.9, 1e-12)
        # argmax localization at a flat quadratic maximum is limited to
        # ~sqrt(eps); the attained value is still accurate to ~eps
        assert res.argmax == pytest.approx(1.0, abs=2e-8)
        assert res.max_value == pytest.approx(0.5 * math.log(2.0), rel=1e-12)

    def test_endpoint_maximum(self):
        res = maximize_unimodal(lambda x: x, 0.0, 3.0, 1e-10)
        assert res.argmax == 3.0
        assert res.max_value == 3.0

    def test_bracket_refinement_stability(self):
        g = lambda x: -((x - 0.7321) ** 2)
        tol = 1e-8
        first = maximize_unimodal(g, 0.0, 2.0, tol)
        again = maximize_unimodal(g, first.argmax - 10 * tol, first.argmax + 10 * tol, tol)
        assert abs(again.argmax - first.argmax) < tol

    def test_invalid_bracket(self):
        with pytest.raises(ValueError):
            maximize_unimodal(lambda x: x, 1.0, 1.0)

    def test_max_at_bracket_interior_against_ends(self):
        res = maximize_unimodal(lambda x: -abs(x - 0.25), 0.0, 1.0, 1e-9)
        assert res.max_value >= -abs(0.0 - 0.25) and res.max_value >= -abs(1.0 - 0.25)


class TestExpandBracket:
    def test_concave_decrease(self):
        hi = expand_bracket(lambda lam: -((lam - 3.0) ** 2))
        assert hi >= 3.0

    def test_plateau_stops(self):
        # objective increasing to an asymptote: doubling must terminate
        hi = expand_bracket(lambda lam: -math.log(0.5 + 0.5 * math.exp(-0.5 * lam)))
        assert math.isfinite(hi)

    def test_neg_inf_stops(self):
        hi = expand_bracket(lambda lam: 0.1 * lam if lam < 5.0 else -math.inf)
        assert hi <= 10.0
