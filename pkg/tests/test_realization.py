import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import Z, blaschke_products, disk
from dbrinterp.errors import DuplicateNode, InvalidRealization, PoleAtNode
from dbrinterp.rational import ComplexRational, taylor_coefficients
from dbrinterp.realization import (NodeSpec, RealizationPair, build_jordan_realization,
                                   matrix_functional_calculus, observability_coefficients,
                                   observability_eval, resolvent_numerator, row_resolvent,
                                   tangential_eval)


def jordan(*nodes):
    return build_jordan_realization([NodeSpec(p, len(t), t) for p, t in nodes])


def random_nodes(rng, dims):
    pts = []
    while len(pts) < len(dims):
        z = 0.8 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        if all(abs(z - p) > 0.1 for p in pts):
            pts.append(z)
    return [NodeSpec(p, m, rng.standard_normal(m) + 1j * rng.standard_normal(m)) for p, m in zip(pts, dims)]


class TestJordanRealization:
    def test_single_node(self):
        pair, x = jordan((0, [2 - 1j]))
        np.testing.assert_array_equal(pair.T, [[0]])
        np.testing.assert_array_equal(pair.E, [1])
        np.testing.assert_array_equal(x, [2 - 1j])

    def test_jordan_cell(self):
        pair, x = jordan((0, [1, 2]))
        np.testing.assert_array_equal(pair.T, [[0, 1], [0, 0]])
        np.testing.assert_array_equal(pair.E, [1, 0])
        np.testing.assert_array_equal(x, [1, 2])

    def test_two_simple_nodes(self):
        pair, _ = jordan((0, [1]), (0.5, [1]))
        np.testing.assert_array_equal(pair.T, np.diag([0, 0.5]))
        np.testing.assert_array_equal(pair.E, [1, 1])

    def test_conjugated_diagonal(self):
        pair, _ = jordan((0.3j, [1, 1]))
        np.testing.assert_array_equal(np.diag(pair.T), [-0.3j, -0.3j])
        assert pair.T[0, 1] == 1 and pair.T[1, 0] == 0

    def test_duplicate_nodes(self):
        with pytest.raises(DuplicateNode):
            jordan((0.2, [1]), (0.2 + 1e-12, [1]))

    def test_nodespec_validation(self):
        with pytest.raises(ValueError):
            NodeSpec(1.0, 1, [0])
        with pytest.raises(ValueError):
            NodeSpec(0.1, 2, [0])
        with pytest.raises(ValueError):
            NodeSpec(0.1, 0, [])


class TestRealizationPair:
    def test_unstable(self):
        with pytest.raises(InvalidRealization):
            RealizationPair([[1.0]], [1])

    def test_unobservable(self):
        with pytest.raises(InvalidRealization):
            RealizationPair(np.diag([0.1, 0.2]), [1, 0])

    def test_shape_mismatch(self):
        with pytest.raises(InvalidRealization):
            RealizationPair(np.eye(2) * 0.1, [1, 1, 1])

    def test_free_form_eigenvalues(self):
        pair = RealizationPair([[0.2, 1], [0, -0.3]], [1, 1])
        assert not pair.is_jordan
        np.testing.assert_allclose(sorted(pair.eigenvalues().real), [-0.3, 0.2])


class TestTangentialEval:
    def test_square_at_half(self):
        pair, _ = jordan((0.5, [1]))
        np.testing.assert_allclose(tangential_eval(Z * Z, pair), [0.25])

    def test_affine_on_cell(self):
        pair, _ = jordan((0, [1, 1]))
        np.testing.assert_allclose(tangential_eval(3 + 5 * Z, pair), [3, 5])

    def test_scalar_pair_evaluates(self):
        pair, _ = jordan((0, [1]))
        f = ComplexRational([2, 1j], [1, -0.4])
        np.testing.assert_allclose(tangential_eval(f, pair), [2])

    def test_pole_at_node(self):
        pair, _ = jordan((0.5, [1]))
        with pytest.raises(PoleAtNode):
            tangential_eval(ComplexRational([1], [1, -2]), pair)

    @pytest.mark.parametrize("seed", range(15))
    def test_jordan_agrees_with_matrix_calculus(self, seed):
        rng = np.random.default_rng(seed)
        dims = [int(m) for m in rng.integers(1, 4, size=rng.integers(1, 4))]
        pair, _ = build_jordan_realization(random_nodes(rng, dims))
        f = ComplexRational(rng.standard_normal(4) + 1j * rng.standard_normal(4), [1, 0.3 - 0.2j, 0.1])
        np.testing.assert_allclose(tangential_eval(f, pair), matrix_functional_calculus(f, pair),
                                   atol=1e-10, rtol=0)

    @pytest.mark.parametrize("seed", range(10))
    def test_adjoint_identity(self, seed):
        # <f(T*)E*, x> equals the H^2 pairing of f with E(I - zT)^{-1} x
        rng = np.random.default_rng(100 + seed)
        dims = [int(m) for m in rng.integers(1, 3, size=rng.integers(1, 4))]
        pair, _ = build_jordan_realization(random_nodes(rng, dims))
        x = rng.standard_normal(pair.dim) + 1j * rng.standard_normal(pair.dim)
        f = ComplexRational(rng.standard_normal(3) + 1j * rng.standard_normal(3), [1, -0.5j])
        lhs = np.vdot(x, tangential_eval(f, pair))
        fc = taylor_coefficients(f, 2048)
        gc = observability_coefficients(pair, x, 2048)
        assert abs(lhs - np.vdot(gc, fc)) <= 1e-8 * (1 + abs(lhs))


class TestObservability:
    def test_scalar_zero(self):
        pair, _ = jordan((0, [1]))
        assert observability_eval(pair, [3 - 2j], 0.7j) == pytest.approx(3 - 2j)

    def test_nilpotent(self):
        pair, _ = jordan((0, [1, 1]))
        z = 0.3 + 0.4j
        assert observability_eval(pair, [2, 1j], z) == pytest.approx(2 + 1j * z)

    def test_scalar_resolvent(self):
        pair = RealizationPair([[0.5]], [1])
        z = -0.6 + 0.1j
        assert observability_eval(pair, [1], z) == pytest.approx(1 / (1 - z / 2))

    def test_taylor_coefficients_by_cauchy_integral(self, rng):
        pair, _ = build_jordan_realization(random_nodes(rng, [2, 1, 1]))
        x = rng.standard_normal(pair.dim) + 1j * rng.standard_normal(pair.dim)
        # divided differences on a circle of radius r: coefficient k is the k-th DFT term / r^k
        r, m = 0.5, 64
        zs = r * np.exp(2j * np.pi * np.arange(m) / m)
        vals = np.array([observability_eval(pair, x, z) for z in zs])
        approx = np.fft.fft(vals)[:9] / m / r ** np.arange(9)
        np.testing.assert_allclose(approx, observability_coefficients(pair, x, 9), atol=1e-6)


@given(st.lists(disk(0.8), min_size=1, max_size=5, unique=True), blaschke_products(0, 3), disk(0.95))
def test_resolvent_numerator_matches_direct_solve(points, _s, z):
    pts = []
    for p in points:
        if all(abs(p - q) > 1e-3 for q in pts):
            pts.append(p)
    pair, _ = build_jordan_realization([NodeSpec(p, 1, [1]) for p in pts])
    rng = np.random.default_rng(len(pts))
    row = rng.standard_normal(pair.dim) + 1j * rng.standard_normal(pair.dim)
    vec = rng.standard_normal(pair.dim) + 1j * rng.standard_normal(pair.dim)
    direct = row @ np.linalg.solve(np.eye(pair.dim) - z * pair.T, vec)
    via = row_resolvent(pair, row, vec)(z)
    assert abs(direct - via) <= 1e-9 * (1 + abs(direct))


def test_resolvent_numerator_matches_adjugate():
    T = np.array([[0.2, 1, 0], [0, 0.2, 1], [0, 0, -0.4j]])
    pair = RealizationPair(T, [1, 0, 1])
    left, right = np.eye(3), np.eye(3)
    fft = resolvent_numerator(pair, left, right)
    adj = np.moveaxis(pair.adjugate_coefficients(), 0, -1)
    np.testing.assert_allclose(fft, adj, atol=1e-13)
