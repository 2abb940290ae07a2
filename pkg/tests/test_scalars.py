"""Exact arithmetic: ring axioms, canonical forms, derivatives, evaluation."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from schouten.scalars import (
    MultiPoly,
    PoleError,
    RationalFn,
    exact_div,
    poly_arith,
    poly_gcd,
    rational_fn_normalize,
)

NVARS = 3

fractions = st.fractions(
    min_value=-4, max_value=4, max_denominator=3
)

exponents = st.tuples(*([st.integers(0, 3)] * NVARS))


@st.composite
def polys(draw, max_terms=5):
    terms = draw(
        st.dictionaries(exponents, fractions, min_size=0, max_size=max_terms)
    )
    return MultiPoly(NVARS, terms)


def poly(spec: dict) -> MultiPoly:
    return MultiPoly(NVARS, {e: Fraction(c) for e, c in spec.items()})


X = poly({(1, 0, 0): 1})
Y = poly({(0, 1, 0): 1})
ONE = MultiPoly.constant(NVARS, 1)


class TestPolyArithmetic:
    def test_cancellation(self):
        assert poly_arith(X + Y, X - Y, "add") == X.scale(2)

    def test_absorbing_zero(self):
        assert poly_arith(X, MultiPoly.zero(NVARS), "mul").is_zero()

    def test_difference_of_squares(self):
        # expected value computed by hand, then cross-checked by evaluation
        product = poly_arith(X + ONE, X - ONE, "mul")
        expected = poly({(2, 0, 0): 1, (0, 0, 0): -1})
        assert product == expected
        for pt in [(2, 0, 0), (Fraction(1, 2), 3, 1), (-5, 1, 7), (Fraction(-3, 4), 0, 0), (11, 2, 3)]:
            pt = tuple(Fraction(v) for v in pt)
            assert product.evaluate(pt) == (pt[0] + 1) * (pt[0] - 1)

    def test_variable_count_mismatch(self):
        with pytest.raises(ValueError, match="variable-count mismatch"):
            poly_arith(X, MultiPoly.constant(2, 1), "add")

    @given(polys(), polys(), polys())
    @settings(max_examples=60, deadline=None)
    def test_ring_axioms(self, a, b, c):
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + b == b + a
        assert a * b == b * a

    @given(polys(), polys())
    @settings(max_examples=40, deadline=None)
    def test_evaluation_is_ring_homomorphism(self, a, b):
        pt = (Fraction(2, 3), Fraction(-1), Fraction(5, 2))
        assert (a * b).evaluate(pt) == a.evaluate(pt) * b.evaluate(pt)
        assert (a + b).evaluate(pt) == a.evaluate(pt) + b.evaluate(pt)


class TestDerivative:
    def test_power_rule(self):
        f = poly({(2, 1, 0): 1})  # x^2 y
        assert f.derivative(0) == poly({(1, 1, 0): 2})

    def test_constant(self):
        assert MultiPoly.constant(NVARS, 7).derivative(2).is_zero()

    def test_quotient_rule_reciprocal(self):
        f = RationalFn(ONE, X)
        d = f.derivative(0)
        assert d == rational_fn_normalize(-ONE, poly({(2, 0, 0): 1}))
        for pt in [(Fraction(1, 2), 0, 0), (3, 1, 1), (-2, 5, 7)]:
            pt = tuple(Fraction(v) for v in pt)
            eps = Fraction(1, 10**12)
            # symmetric difference quotient brackets the exact derivative
            numeric = (f.evaluate((pt[0] + eps, *pt[1:])) - f.evaluate((pt[0] - eps, *pt[1:]))) / (2 * eps)
            assert abs(numeric - d.evaluate(pt)) < Fraction(1, 10**10)

    @given(polys(max_terms=4), polys(max_terms=4))
    @settings(max_examples=40, deadline=None)
    def test_leibniz_rule(self, a, b):
        fa, fb = RationalFn(a), RationalFn(b)
        left = (fa * fb).derivative(1)
        right = fa.derivative(1) * fb + fa * fb.derivative(1)
        assert left == right

    @given(polys(max_terms=4))
    @settings(max_examples=40, deadline=None)
    def test_mixed_partials_commute(self, a):
        f = RationalFn(a)
        assert f.derivative(0).derivative(1) == f.derivative(1).derivative(0)


class TestNormalization:
    def test_factor_cancellation(self):
        x2m1 = poly({(2, 0, 0): 1, (0, 0, 0): -1})
        xm1 = poly({(1, 0, 0): 1, (0, 0, 0): -1})
        f = rational_fn_normalize(x2m1, xm1)
        assert f == RationalFn(X + ONE)

    def test_zero_numerator(self):
        f = rational_fn_normalize(MultiPoly.zero(NVARS), X + Y)
        assert f.is_zero()
        assert f.den == ONE

    def test_content_removal(self):
        f = rational_fn_normalize(poly({(1, 0, 0): 2, (0, 0, 0): 2}), MultiPoly.constant(NVARS, 4))
        assert f.num == X + ONE
        assert f.den == MultiPoly.constant(NVARS, 2)

    def test_zero_denominator_rejected(self):
        with pytest.raises(ZeroDivisionError):
            rational_fn_normalize(X, MultiPoly.zero(NVARS))

    def test_sign_normalization(self):
        f = rational_fn_normalize(X, -Y)
        assert f.den == Y
        assert f.num == -X

    @given(polys(max_terms=3), polys(max_terms=3))
    @settings(max_examples=40, deadline=None)
    def test_normalize_idempotent(self, a, b):
        if b.is_zero():
            b = ONE
        f = rational_fn_normalize(a, b)
        again = rational_fn_normalize(f.num, f.den)
        assert f.num == again.num and f.den == again.den

    @given(polys(max_terms=3), polys(max_terms=2), polys(max_terms=2))
    @settings(max_examples=30, deadline=None)
    def test_common_factor_cancels(self, a, b, g):
        if b.is_zero():
            b = ONE
        if g.is_zero():
            g = ONE
        assert rational_fn_normalize(a * g, b * g) == rational_fn_normalize(a, b)


class TestGcd:
    def test_univariate(self):
        a = poly({(2, 0, 0): 1, (0, 0, 0): -1})
        b = poly({(1, 0, 0): 1, (0, 0, 0): -1})
        assert poly_gcd(a, b) == b

    def test_constants_are_units(self):
        assert poly_gcd(MultiPoly.constant(NVARS, 6), MultiPoly.constant(NVARS, 4)) == ONE

    def test_multivariate(self):
        g = X + Y
        a = g * poly({(1, 0, 0): 1})
        b = g * poly({(0, 1, 0): 1, (0, 0, 0): 3})
        assert poly_gcd(a, b) == g

    def test_exact_div_raises_on_remainder(self):
        with pytest.raises(ValueError, match="not exact"):
            exact_div(X + ONE, Y)


class TestEvaluation:
    def test_simple(self):
        f = RationalFn(X + Y)
        assert f.evaluate((Fraction(1), Fraction(2), Fraction(0))) == 3

    def test_pole(self):
        f = RationalFn(ONE, X)
        with pytest.raises(PoleError):
            f.evaluate((Fraction(0), Fraction(1), Fraction(1)))

    def test_square(self):
        f = RationalFn(poly({(2, 0, 0): 1, (0, 0, 0): -1}))
        assert f.evaluate((Fraction(3), Fraction(0), Fraction(0))) == 8

    def test_substitute(self):
        f = RationalFn(X * Y + X)
        g = f.substitute(1, Fraction(2))
        assert g == RationalFn(X.scale(3))


class TestRationalArithmetic:
    @given(polys(max_terms=3), polys(max_terms=3), polys(max_terms=3))
    @settings(max_examples=30, deadline=None)
    def test_field_axioms(self, a, b, c):
        if c.is_zero():
            c = ONE
        fa, fb, fc = RationalFn(a), RationalFn(b), RationalFn(c)
        assert (fa + fb) * fc == fa * fc + fb * fc
        assert (fa / fc) * fc == fa

    def test_powers(self):
        f = RationalFn(X) ** -2
        assert f == RationalFn(ONE, poly({(2, 0, 0): 1}))

    def test_compose_univariate(self):
        f = RationalFn(X)
        # 1 + 2 w + w^2 at w = x
        g = f.compose_univariate([Fraction(1), Fraction(2), Fraction(1)])
        assert g == RationalFn(poly({(0, 0, 0): 1, (1, 0, 0): 2, (2, 0, 0): 1}))
