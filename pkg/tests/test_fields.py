"""Graded fields: wedge, interior products, pairing, zero-object handling."""

import random
from fractions import Fraction

import pytest

from schouten.fields import (
    Chart,
    ChartMismatchError,
    DifferentialForm,
    MultiVectorField,
    apply_to_covector,
    contract_form_into_multivector,
    differential,
    interior_product,
    pairing,
    wedge,
)
from schouten.oracle import random_form, random_multivector
from schouten.scalars import RationalFn


@pytest.fixture
def chart():
    return Chart(("x", "y", "z"))


def basis_vec(chart, *indices):
    out = MultiVectorField.basis_vector(chart, indices[0])
    for i in indices[1:]:
        out = wedge(out, MultiVectorField.basis_vector(chart, i))
    return out


def basis_form(chart, *indices):
    out = DifferentialForm.basis_form(chart, indices[0])
    for i in indices[1:]:
        out = wedge(out, DifferentialForm.basis_form(chart, i))
    return out


class TestChart:
    def test_duplicate_names_rejected(self):
        with pytest.raises(ValueError):
            Chart(("x", "x"))

    def test_time_index_bounds(self):
        with pytest.raises(ValueError):
            Chart(("x", "y"), time_index=5)

    def test_zero_density_rejected(self):
        with pytest.raises(ValueError):
            Chart(("x",), volume_density=RationalFn.zero(1))

    def test_spatial_indices(self):
        chart = Chart(("t", "x", "y"), time_index=0)
        assert chart.spatial_indices == (1, 2)


class TestWedge:
    def test_self_wedge_vanishes(self, chart):
        dx = MultiVectorField.basis_vector(chart, 0)
        assert wedge(dx, dx).is_zero()

    def test_basis_bivector(self, chart):
        got = wedge(
            MultiVectorField.basis_vector(chart, 0),
            MultiVectorField.basis_vector(chart, 1),
        )
        assert got.coefficient((0, 1)) == chart.scalar(1)

    def test_coefficient_shuffle(self, chart):
        x, y = chart.coordinate("x"), chart.coordinate("y")
        a = MultiVectorField(chart, 1, {(0,): x})
        b = MultiVectorField(chart, 1, {(1,): y, (0,): chart.scalar(1)})
        got = wedge(a, b)
        assert got == MultiVectorField(chart, 2, {(0, 1): x * y})

    def test_graded_commutativity_randomized(self, chart):
        rng = random.Random(5)
        for _ in range(25):
            p, q = rng.randint(0, 2), rng.randint(0, 2)
            A = random_multivector(rng, chart, p)
            B = random_multivector(rng, chart, q)
            sign = 1 if (p * q) % 2 == 0 else -1
            assert wedge(A, B) == wedge(B, A).scale(sign)

    def test_grade_overflow_is_zero(self, chart):
        A = basis_vec(chart, 0, 1)
        B = basis_vec(chart, 1, 2)
        assert wedge(A, B).is_zero()

    def test_chart_mismatch(self, chart):
        other = Chart(("a", "b", "c"))
        with pytest.raises(ChartMismatchError):
            wedge(
                MultiVectorField.basis_vector(chart, 0),
                MultiVectorField.basis_vector(other, 0),
            )

    def test_kind_mismatch(self, chart):
        with pytest.raises(TypeError):
            wedge(
                MultiVectorField.basis_vector(chart, 0),
                DifferentialForm.basis_form(chart, 0),
            )


class TestInteriorProduct:
    def test_vector_into_covector(self, chart):
        got = interior_product(
            MultiVectorField.basis_vector(chart, 0), basis_form(chart, 0)
        )
        assert got.coefficient(()) == chart.scalar(1)

    def test_full_contraction_convention(self, chart):
        # i(dx ^ dy)(dx ^ dy) = 1 pins the front-insertion ordering
        got = interior_product(basis_vec(chart, 0, 1), basis_form(chart, 0, 1))
        assert got.coefficient(()) == chart.scalar(1)

    def test_disjoint_vanishes(self, chart):
        got = interior_product(
            MultiVectorField.basis_vector(chart, 2), basis_form(chart, 0, 1)
        )
        assert got.is_zero()

    def test_front_insertion_sign(self, chart):
        # i(d/dy)(dx ^ dy) = -dx
        got = interior_product(
            MultiVectorField.basis_vector(chart, 1), basis_form(chart, 0, 1)
        )
        assert got == DifferentialForm(chart, 1, {(0,): chart.scalar(-1)})

    def test_grade_error(self, chart):
        with pytest.raises(ValueError):
            interior_product(basis_vec(chart, 0, 1), basis_form(chart, 0))

    def test_composition_matches_iterated_insertion(self, chart):
        rng = random.Random(11)
        for _ in range(10):
            X = random_multivector(rng, chart, 1)
            Y = random_multivector(rng, chart, 1)
            w = random_form(rng, chart, 3)
            # i(X ^ Y) w = i(Y)(i(X) w) under front insertion
            left = interior_product(wedge(X, Y), w)
            right = interior_product(Y, interior_product(X, w))
            assert left == right


class TestDualContraction:
    def test_bivector_on_exact_covector(self, chart):
        P = basis_vec(chart, 0, 1)
        h = chart.coordinate("x")
        got = apply_to_covector(P, differential(h, chart))
        assert got == MultiVectorField.basis_vector(chart, 1)

    def test_decomposable_expansion(self, chart):
        rng = random.Random(3)
        for _ in range(10):
            X = random_multivector(rng, chart, 1)
            Y = random_multivector(rng, chart, 1)
            alpha = random_form(rng, chart, 1)
            left = contract_form_into_multivector(alpha, wedge(X, Y))
            right = X.scale(pairing(alpha, Y)).scale(-1) + Y.scale(pairing(alpha, X))
            # i(alpha)(X ^ Y) = alpha(X) Y - alpha(Y) X
            assert left == right


class TestZeroObjects:
    def test_zero_accepts_operations(self, chart):
        zero2 = MultiVectorField.zero(chart, 2)
        assert wedge(zero2, basis_vec(chart, 0)).is_zero()
        assert (zero2 + basis_vec(chart, 0, 1)) == basis_vec(chart, 0, 1)
        assert zero2.scale(chart.coordinate("x")).is_zero()

    def test_strictly_increasing_enforced(self, chart):
        with pytest.raises(ValueError):
            MultiVectorField(chart, 2, {(1, 0): chart.scalar(1)})

    def test_grade_zero_scalar(self, chart):
        f = MultiVectorField.scalar_field(chart, 5)
        assert f.scalar_value() == chart.scalar(5)


class TestDirectionalDerivative:
    def test_apply_to_function(self, chart):
        x, y = chart.coordinate("x"), chart.coordinate("y")
        X = MultiVectorField(chart, 1, {(0,): x})
        assert X.apply_to_function(x * y) == x * y

    def test_grade_restriction(self, chart):
        with pytest.raises(ValueError):
            basis_vec(chart, 0, 1).apply_to_function(chart.coordinate("x"))
