"""MultiJet algebra tests, cross-checked against the nested univariate engine."""

import math

import pytest

from finslerlab.jets import JetDomainError, exp_, mixed_partial, sin_, sqrt_
from finslerlab.polyjet import jet_space


def smooth(v):
    return exp_(0.3 * v[0]) * sin_(v[1] + 0.2 * v[0]) + v[0] ** 2 * v[1] ** 2


class TestJetSpace:
    def test_monomial_count(self):
        assert jet_space(2, 3).npos == 10      # C(5, 2)
        assert jet_space(4, 2).npos == 15      # C(6, 2)
        assert jet_space(4, 5).npos == 126     # C(9, 4)

    def test_cache_identity(self):
        assert jet_space(3, 2) is jet_space(3, 2)

    def test_space_mismatch_raises(self):
        a = jet_space(2, 2).constant(1.0)
        b = jet_space(2, 3).constant(1.0)
        with pytest.raises(ValueError):
            a + b


class TestAgainstNestedEngine:
    def test_all_partials_of_smooth_field(self):
        space = jet_space(2, 3)
        jets = space.variables([0.7, -0.4])
        value = smooth(jets)
        for alpha in space.monomials:
            expected = mixed_partial(smooth, (0.7, -0.4), alpha)
            got = value.partial(alpha)
            assert got == pytest.approx(expected, rel=1e-10, abs=1e-10)

    def test_division_and_sqrt(self):
        def f(v):
            return sqrt_(1.0 + v[0] * v[0]) / (2.0 + v[1])

        space = jet_space(2, 4)
        jets = space.variables([0.3, 0.5])
        value = f(jets)
        for alpha in [(1, 0), (0, 1), (2, 1), (1, 3), (2, 2)]:
            expected = mixed_partial(f, (0.3, 0.5), alpha)
            assert value.partial(alpha) == pytest.approx(expected, rel=1e-9,
                                                         abs=1e-12)

    def test_polynomial_products_exact(self):
        space = jet_space(3, 4)
        x, y, z = space.variables([1.0, 2.0, -1.5])
        value = (x * y - z * z) * (x + 2.0 * y * z)
        def f(v):
            return (v[0] * v[1] - v[2] * v[2]) * (v[0] + 2.0 * v[1] * v[2])
        for alpha in [(1, 1, 0), (0, 1, 2), (2, 0, 1), (1, 1, 1), (0, 0, 3)]:
            assert value.partial(alpha) == pytest.approx(
                mixed_partial(f, (1.0, 2.0, -1.5), alpha), rel=1e-12)


class TestAnalytic:
    def test_reciprocal_coefficients(self):
        space = jet_space(1, 5)
        t, = space.variables([2.0])
        r = t.reciprocal()
        for k in range(6):
            assert r.partial((k,)) == pytest.approx(
                math.factorial(k) * (-1) ** k / 2.0 ** (k + 1), rel=1e-13)

    def test_sqrt_matches_binomial(self):
        space = jet_space(1, 5)
        t, = space.variables([0.0])
        s = (1.0 + t).sqrt()
        expected = [1.0, 0.5, -0.125, 0.0625, -0.0390625, 0.02734375]
        for k, e in enumerate(expected):
            assert s.c[k] == pytest.approx(e, rel=1e-13)

    def test_sqrt_rejects_nonpositive_lead(self):
        space = jet_space(1, 3)
        t, = space.variables([-0.5])
        with pytest.raises(JetDomainError):
            t.sqrt()

    def test_exp_sin_cos(self):
        space = jet_space(1, 4)
        t, = space.variables([0.3])
        e = t.exp()
        assert e.partial((2,)) == pytest.approx(math.exp(0.3), rel=1e-13)
        s = t.sin()
        assert s.partial((1,)) == pytest.approx(math.cos(0.3), rel=1e-13)
        assert s.partial((3,)) == pytest.approx(-math.cos(0.3), rel=1e-12)
        c = t.cos()
        assert c.partial((2,)) == pytest.approx(-math.cos(0.3), rel=1e-13)

    def test_integer_power(self):
        space = jet_space(2, 3)
        x, y = space.variables([1.5, -0.5])
        p = (x + y) ** 3
        assert p.partial((2, 1)) == pytest.approx(6.0, rel=1e-13)
        assert p.lead() == pytest.approx(1.0)


class TestScalarMixing:
    def test_numbers_enter_at_order_zero(self):
        space = jet_space(2, 2)
        x, y = space.variables([1.0, 2.0])
        v = 3.0 + 2.0 * x - y / 2.0
        assert v.lead() == pytest.approx(4.0)
        assert v.partial((1, 0)) == pytest.approx(2.0)
        assert v.partial((0, 1)) == pytest.approx(-0.5)
        w = 1.0 / (1.0 + x * y)
        assert w.lead() == pytest.approx(1.0 / 3.0)

    def test_max_abs_and_float_refusal(self):
        space = jet_space(1, 2)
        t, = space.variables([2.0])
        assert t.max_abs() == 2.0
        with pytest.raises(TypeError):
            float(t)
