import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import Z, ZERO, blaschke_products, disk
from dbrinterp.errors import (DegreeCapExceeded, DivisionByZeroFunction, NonUnimodularConstant,
                              PoleEvaluation, ZeroOutsideDisk)
from dbrinterp.rational import (ComplexPolynomial, ComplexRational, blaschke, coefficient_distance,
                                evaluate, is_inner, normalize, rational_arithmetic, schur_check,
                                taylor_coefficients)

HALF = blaschke([0.5])


def same(r, num, den, tol=1e-12):
    return coefficient_distance(r, ComplexRational(num, den)) <= tol


class TestArithmetic:
    def test_square(self):
        assert same(rational_arithmetic(Z, Z, "mul"), [0, 0, 1], [1])

    def test_self_division_cancels(self):
        q = rational_arithmetic(HALF, HALF, "div")
        assert q.degree == 0 and same(q, [1], [1])

    def test_sum_over_common_denominator(self):
        a = ComplexRational([1], [1, -1])
        b = ComplexRational([0, 1], [1, -1])
        r = rational_arithmetic(a, b, "add")
        # (1 + z)/(1 - z) with a monic denominator: -(1 + z)/(z - 1)
        assert same(r, [-1, -1], [-1, 1])
        assert r(0.3) == pytest.approx(1.3 / 0.7)

    def test_operators_match_function(self):
        a, b = ComplexRational([1, 2], [1, -0.5]), ComplexRational([0.3j], [1, 0.2])
        for op, fn in [("add", a + b), ("sub", a - b), ("mul", a * b), ("div", a / b)]:
            assert coefficient_distance(rational_arithmetic(a, b, op), fn) <= 1e-12

    def test_division_by_zero_function(self):
        with pytest.raises(DivisionByZeroFunction):
            Z / ZERO

    def test_unknown_op(self):
        with pytest.raises(ValueError):
            rational_arithmetic(Z, Z, "pow")

    def test_scalar_mixing(self):
        assert (2 * Z + 1)(0.5) == pytest.approx(2)
        assert (1 - Z)(0.25) == pytest.approx(0.75)


class TestPolynomial:
    def test_trailing_zeros_trimmed(self):
        p = ComplexPolynomial([1, 2, 0, 0])
        assert p.degree == 1 and len(p.coeffs) == 2

    def test_zero_polynomial(self):
        p = ComplexPolynomial([0, 0])
        assert p.is_zero and p.degree == -1

    def test_degree_cap(self):
        with pytest.raises(DegreeCapExceeded):
            ComplexPolynomial(np.ones(5000))


class TestEvaluate:
    def test_square_values(self):
        sq = ComplexRational([0, 0, 1])
        assert evaluate(sq, 0.5) == pytest.approx(0.25)
        assert evaluate(sq, 0, 1) == pytest.approx(0)
        assert evaluate(sq, 0, 2) == pytest.approx(2)

    def test_geometric_derivative(self):
        assert evaluate(ComplexRational([1], [1, -0.5]), 0, 1) == pytest.approx(0.5)

    def test_pole(self):
        with pytest.raises(PoleEvaluation):
            evaluate(ComplexRational([1], [1, -1]), 1.0)

    def test_vectorized(self):
        pts = np.array([0, 0.5, 0.5j])
        np.testing.assert_allclose(evaluate(HALF, pts), [HALF(p) for p in pts])

    @given(blaschke_products(1, 3), blaschke_products(0, 2), disk(0.7))
    def test_product_rule_and_finite_differences(self, p, q, z):
        h = 1e-5
        prod = p * q
        symbolic = evaluate(prod, z, 1)
        rule = evaluate(p, z, 1) * q(z) + p(z) * evaluate(q, z, 1)
        central = (prod(z + h) - prod(z - h)) / (2 * h)
        assert abs(symbolic - rule) <= 1e-9 * (1 + abs(symbolic))
        assert abs(symbolic - central) <= 1e-6 * (1 + abs(symbolic))

    def test_taylor_coefficients(self):
        np.testing.assert_allclose(taylor_coefficients(ComplexRational([1], [1, -0.5]), 5),
                                   0.5 ** np.arange(5))


class TestBlaschke:
    def test_empty_is_one(self):
        assert same(blaschke([]), [1], [1])

    def test_single_zero_at_origin(self):
        assert same(blaschke([0]), [0, 1], [1])

    def test_half(self):
        # (z - 1/2)/(1 - z/2) with the denominator scaled to be monic
        assert same(HALF, [1, -2], [-2, 1])
        assert abs(HALF(1.0)) == pytest.approx(1)
        assert HALF(0.5) == pytest.approx(0)

    def test_tiny_zero_is_close_to_origin_factor(self):
        b = blaschke([1e-300])
        assert b(0.5) == pytest.approx(0.5)

    def test_errors(self):
        with pytest.raises(ZeroOutsideDisk):
            blaschke([1.0])
        with pytest.raises(NonUnimodularConstant):
            blaschke([0.1], 0.5)

    @given(blaschke_products(0, 5))
    def test_boundary_modulus_one(self, b):
        rep = schur_check(b)
        assert 1 - 1e-9 <= rep.boundary_sup <= 1 + 1e-9
        assert is_inner(b)


class TestSchurCheck:
    def test_zero(self):
        rep = schur_check(ZERO)
        assert rep.boundary_sup == 0 and rep.is_schur

    def test_two_z(self):
        rep = schur_check(2 * Z)
        assert rep.boundary_sup == pytest.approx(2) and not rep.is_schur

    def test_blaschke_factor(self):
        rep = schur_check(HALF)
        assert abs(rep.boundary_sup - 1) <= 1e-10 and rep.is_schur

    def test_pole_in_disk(self):
        rep = schur_check(ComplexRational([0.01], [1, -2]))
        assert rep.poles_in_closed_disk and not rep.is_schur

    def test_grid_guard(self):
        with pytest.raises(ValueError):
            schur_check(Z, grid_size=10)


class TestNormalize:
    def test_cancels_multiple_root(self):
        b = blaschke([0.3 + 0.2j])
        r = normalize(ComplexRational((b * b * b).num, (b * b).num))
        assert r.degree == 1

    def test_monic(self):
        r = ComplexRational([2], [4, 2])
        assert r.den[-1] == 1 and r(0) == pytest.approx(0.5)

    @given(blaschke_products(1, 4), blaschke_products(0, 3))
    def test_idempotent(self, p, q):
        raw = ComplexRational(np.polynomial.polynomial.polymul(p.num, q.den),
                              np.polynomial.polynomial.polymul(p.den, q.den))
        once = normalize(raw)
        twice = normalize(once)
        assert once.num.shape == twice.num.shape and once.den.shape == twice.den.shape
        assert np.max(np.abs(once.num - twice.num)) <= 1e-12 * max(1, np.max(np.abs(once.num)))
        assert np.max(np.abs(once.den - twice.den)) <= 1e-12 * max(1, np.max(np.abs(once.den)))

    def test_known_roots_at_large_modulus(self):
        # an exact factor (1 - z/5) on both sides, stated as a known root
        num = np.polynomial.polynomial.polymul([1, 2, 3], [1, -0.2])
        den = np.polynomial.polynomial.polymul([1, 0.1], [1, -0.2])
        r = normalize(ComplexRational(num, den), known_roots=[(5.0, 1)])
        assert r.degree == 2 and r(0.3) == pytest.approx((1 + 0.6 + 0.27) / 1.03)

    @given(st.lists(disk(0.9), min_size=1, max_size=4))
    def test_conj_reflect(self, zeros):
        b = blaschke(zeros)
        z = 0.3 - 0.1j
        assert b.conj_reflect()(z) == pytest.approx(np.conj(b(np.conj(z))))
