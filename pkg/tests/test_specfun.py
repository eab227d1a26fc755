import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from bhetoscf.errors import ConvergenceError, DomainError
from bhetoscf.specfun import (
    SeriesControl,
    gen_binomial,
    hyp1f1,
    hyp2f1_a1,
    laguerre,
    laguerre_power_coeffs,
    ln_gamma,
    lower_incomplete_gamma,
    pochhammer,
)

mpmath.mp.dps = 40

degrees = st.integers(min_value=0, max_value=8)
upper_index = st.floats(min_value=-0.9, max_value=4.0)
abscissa = st.floats(min_value=0.0, max_value=20.0)


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def mp_laguerre(m, beta, x):
    """Explicit binomial sum at 40 digits, plus the sum of absolute terms."""
    terms = [(-1) ** k * mpmath.binomial(m + beta, m - k) * mpmath.mpf(x) ** k / mpmath.factorial(k) for k in range(m + 1)]
    return float(mpmath.fsum(terms)), float(mpmath.fsum(abs(t) for t in terms))


class TestGamma:
    @pytest.mark.parametrize("x, expected", [(1.0, 0.0), (0.5, 0.5 * math.log(math.pi))])
    def test_known_values(self, x, expected):
        assert ln_gamma(x) == pytest.approx(expected, abs=1e-15)

    def test_product_recurrence(self):
        g = math.sqrt(math.pi)
        for k in range(7):
            g *= 0.5 + k
        assert ln_gamma(7.5) == pytest.approx(math.log(g), rel=1e-14)

    @given(st.floats(min_value=0.1, max_value=50.0))
    def test_recurrence(self, x):
        assert rel(math.exp(ln_gamma(x + 1)), x * math.exp(ln_gamma(x))) < 1e-13

    @pytest.mark.parametrize("x", [0.0, -1.5, math.inf, math.nan])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            ln_gamma(x)

    def test_pochhammer(self):
        assert pochhammer(3.0, 0) == 1.0
        assert pochhammer(2.0, 3) == 24.0
        assert pochhammer(0.5, 2) == 0.75
        with pytest.raises(DomainError):
            pochhammer(1.0, -1)

    def test_binomial(self):
        assert gen_binomial(4, 2) == 6.0
        assert gen_binomial(3.7, 0) == pytest.approx(1.0, rel=1e-15)
        direct = math.gamma(3.5) / (math.gamma(2) * math.gamma(2.5))
        assert gen_binomial(2.5, 1) == pytest.approx(direct, rel=1e-14)
        # Gamma(n - m + 1) pole: coefficient vanishes
        assert gen_binomial(1.0, 3) == 0.0
        with pytest.raises(DomainError):
            gen_binomial(-1.0, 1)

    @given(st.floats(min_value=-0.95, max_value=12.0), st.integers(min_value=0, max_value=12))
    def test_binomial_against_mpmath(self, n, m):
        ref = float(mpmath.binomial(n, m))
        assert abs(gen_binomial(n, m) - ref) <= 1e-12 * max(1.0, abs(ref))


class TestLaguerre:
    def test_low_degrees(self):
        assert laguerre(0, 2.3, 4.0) == 1.0
        assert laguerre(1, 0.4, 2.0) == pytest.approx(-0.6, abs=1e-15)

    def test_power_series_value(self):
        m, beta, x = 3, 1.7, 0.9
        series = sum((-1) ** k * gen_binomial(m + beta, m - k) * x**k / math.factorial(k) for k in range(m + 1))
        assert laguerre(m, beta, x) == pytest.approx(series, rel=1e-13)

    def test_power_coeffs(self):
        assert laguerre_power_coeffs(0, 1.3) == [1.0]
        c = laguerre_power_coeffs(1, 1.3)
        assert c == pytest.approx([2.3, -1.0], rel=1e-15)
        # L^0.5_2(x) = (1.5)(2.5)/2 - 2.5 x + x^2/2
        assert laguerre_power_coeffs(2, 0.5) == pytest.approx([1.875, -2.5, 0.5], rel=1e-14)
        assert laguerre(2, 0.5, 0.0) == pytest.approx(float(mpmath.laguerre(2, 0.5, 0)), rel=1e-15)

    @given(degrees, upper_index, abscissa)
    def test_against_mpmath(self, m, beta, x):
        ref, scale = mp_laguerre(m, beta, x)
        assert abs(laguerre(m, beta, x) - ref) <= 1e-12 * max(scale, 1.0)

    @given(st.integers(min_value=1, max_value=8), upper_index, abscissa)
    def test_upper_index_recurrence(self, m, beta, x):
        lhs = laguerre(m, beta, x)
        rhs = laguerre(m, beta + 1, x) - laguerre(m - 1, beta + 1, x)
        scale = max(abs(laguerre(m, beta + 1, x)), abs(laguerre(m - 1, beta + 1, x)), 1e-300)
        assert abs(lhs - rhs) <= 1e-11 * max(abs(lhs), scale)

    @given(degrees, upper_index, abscissa)
    def test_degree_recurrence(self, m, beta, x):
        lhs = x * laguerre(m, beta + 1, x)
        a = (m + beta + 1) * laguerre(m, beta, x)
        b = (m + 1) * laguerre(m + 1, beta, x)
        assert abs(lhs - (a - b)) <= 1e-11 * max(abs(lhs), abs(a), abs(b), 1e-300)

    @given(st.integers(min_value=0, max_value=10), upper_index, abscissa)
    def test_power_coeffs_match_evaluation(self, m, beta, x):
        coeffs = laguerre_power_coeffs(m, beta)
        poly = math.fsum(c * x**k for k, c in enumerate(coeffs))
        size = math.fsum(abs(c) * x**k for k, c in enumerate(coeffs))
        assert abs(poly - laguerre(m, beta, x)) <= 1e-11 * max(abs(poly), size * 1e-4, 1e-300)

    def test_array_input(self):
        import numpy as np

        x = np.linspace(0, 5, 7)
        vals = laguerre(4, 0.3, x)
        assert vals.shape == x.shape
        assert vals[3] == pytest.approx(laguerre(4, 0.3, float(x[3])), rel=1e-15)

    def test_negative_degree(self):
        with pytest.raises(DomainError):
            laguerre(-1, 0.0, 1.0)


class TestHypergeometric:
    def test_1f1_heads(self):
        assert hyp1f1(0.3, 1.7, 0.0) == 1.0
        assert hyp1f1(-1, 2, 3) == pytest.approx(-0.5, abs=1e-15)

    @given(st.integers(min_value=0, max_value=8), st.floats(min_value=-0.9, max_value=4.0), abscissa)
    def test_laguerre_confluent_relation(self, m, p, x):
        lhs = laguerre(m, p, x)
        rhs = pochhammer(p + 1, m) / math.gamma(m + 1) * hyp1f1(-m, p + 1, x)
        _, scale = mp_laguerre(m, p, x)
        assert abs(lhs - rhs) <= 1e-12 * max(scale, 1.0)

    def test_1f1_integer_example(self):
        lhs = laguerre(2, 0.8, 0.7)
        rhs = pochhammer(1.8, 2) / 2.0 * hyp1f1(-2, 1.8, 0.7)
        assert lhs == pytest.approx(rhs, rel=1e-13)

    def test_1f1_bad_b(self):
        with pytest.raises(DomainError):
            hyp1f1(1.0, -2.0, 0.5)

    def test_2f1_known(self):
        assert hyp2f1_a1(3.3, 4.4, 0.0) == 1.0
        assert hyp2f1_a1(1, 2, 0.5) == pytest.approx(-math.log(0.5) / 0.5, rel=1e-14)

    def test_2f1_mpmath_example(self):
        ref = float(mpmath.hyp2f1(1, 4.2, 5.1, 0.35))
        assert hyp2f1_a1(4.2, 5.1, 0.35) == pytest.approx(ref, rel=1e-14)

    @given(st.floats(min_value=0.1, max_value=30.0), st.floats(min_value=0.0, max_value=0.999))
    def test_2f1_contiguity(self, b, z):
        assert rel(hyp2f1_a1(b, b, z), 1.0 / (1.0 - z)) < 1e-12

    @given(
        st.floats(min_value=0.5, max_value=20.0),
        st.floats(min_value=1.05, max_value=15.0),
        st.floats(min_value=0.0, max_value=0.9999),
    )
    def test_2f1_against_mpmath(self, b, c, z):
        ref = float(mpmath.hyp2f1(1, b, c, z))
        assert rel(hyp2f1_a1(b, c, z), ref) < 1e-12

    def test_2f1_near_one_uses_integral(self):
        # the series budget is too small here, so the Euler integral takes over
        ctl = SeriesControl(max_terms=50)
        ref = float(mpmath.hyp2f1(1, 6.5, 4.5, 0.995))
        assert rel(hyp2f1_a1(6.5, 4.5, 0.995, ctl), ref) < 1e-12

    def test_2f1_budget_error(self):
        with pytest.raises(ConvergenceError) as info:
            hyp2f1_a1(2.0, 3.0, 0.5, SeriesControl(max_terms=3))
        assert info.value.partial is not None

    @pytest.mark.parametrize("args", [(1.0, 0.0, 0.5), (1.0, 2.0, 1.0), (1.0, 2.0, -0.1)])
    def test_2f1_domain(self, args):
        with pytest.raises(DomainError):
            hyp2f1_a1(*args)


class TestIncompleteGamma:
    def test_known(self):
        assert lower_incomplete_gamma(2.0, 0.0) == 0.0
        assert lower_incomplete_gamma(1.0, 1.0) == pytest.approx(1.0 - math.exp(-1.0), rel=1e-15)

    def test_quadrature_value(self):
        from bhetoscf.oracle import integrate_interval

        res = integrate_interval(lambda t: t**1.5 * __import__("numpy").exp(-t), 0.0, 3.0)
        assert lower_incomplete_gamma(2.5, 3.0) == pytest.approx(res.value, rel=1e-12)

    @given(st.floats(min_value=0.05, max_value=40.0), st.floats(min_value=0.0, max_value=80.0))
    def test_against_mpmath(self, s, x):
        ref = float(mpmath.gammainc(s, 0, x))
        assert rel(lower_incomplete_gamma(s, x), ref) < 1e-12

    @pytest.mark.parametrize("args", [(0.0, 1.0), (1.0, -1.0)])
    def test_domain(self, args):
        with pytest.raises(DomainError):
            lower_incomplete_gamma(*args)


def test_series_control_validation():
    with pytest.raises(ValueError):
        SeriesControl(rel_tol=0.0)
    with pytest.raises(ValueError):
        SeriesControl(max_terms=0)
