import numpy as np
import pytest

from conftest import Z, ZERO, problem
from dbrinterp.instances import InstanceConfig, random_instance
from dbrinterp.pick import compute_N, compute_P, schwarz_pick_matrix, solvability_verdict
from dbrinterp.rational import ComplexRational, evaluate, taylor_coefficients
from dbrinterp.realization import NodeSpec, observability_coefficients


class TestComputeN:
    def test_zero_function(self):
        data, _ = problem([(0.3, [1]), (-0.2j, [1, 2])], ZERO)
        np.testing.assert_array_equal(compute_N(data), 0)

    def test_identity_at_origin(self):
        data, _ = problem([(0, [1])], Z)
        np.testing.assert_allclose(compute_N(data), [0])

    def test_square_on_cell(self):
        data, _ = problem([(0, [1, 1])], Z * Z)
        np.testing.assert_allclose(compute_N(data), [0, 0])

    def test_is_conjugate_row(self):
        s = 0.5 * (Z - 0.2j) / (1 + 0.2j * Z)
        data, _ = problem([(0.4, [1])], s)
        assert compute_N(data)[0] == pytest.approx(np.conj(s(0.4)))


class TestComputeP:
    def test_single_node(self):
        _, sys = problem([(0, [1])], ZERO)
        np.testing.assert_allclose(sys.P, [[1]])

    def test_szego_values(self):
        _, sys = problem([(0, [1]), (0.5, [1])], ZERO)
        np.testing.assert_allclose(sys.P, [[1, 1], [1, 4 / 3]], atol=1e-14)
        assert sys.is_positive_definite and sys.solvable

    def test_rank_one_for_identity(self):
        _, sys = problem([(0, [1]), (0.5, [1])], Z)
        np.testing.assert_allclose(sys.P, np.ones((2, 2)), atol=1e-14)
        assert sys.rank == 1

    def test_unimodular_constant_has_rank_zero(self):
        # K_s = 0, so P vanishes; rounding leaves ~1e-16 that must not read as full rank
        c = np.exp(0.25j)
        data, sys = problem([(0.2, [0.1]), (-0.3j, [0.2, 0.1])], ComplexRational([c]))
        assert np.max(np.abs(sys.P)) <= 1e-14
        assert sys.rank == 0 and not sys.is_positive_definite
        assert not sys.solvable

    def test_stein_residual_is_small(self):
        inst = random_instance(7)
        sys = compute_P(inst.data)
        assert sys.stein_residual <= 1e-9 * (1 + np.linalg.norm(sys.P, 2))


class TestSchwarzPick:
    def test_szego_cell(self):
        np.testing.assert_allclose(schwarz_pick_matrix(ZERO, [NodeSpec(0, 2, [0, 0])]), np.eye(2))

    def test_square_cell(self):
        np.testing.assert_allclose(schwarz_pick_matrix(Z * Z, [NodeSpec(0, 2, [0, 0])]), np.eye(2),
                                   atol=1e-15)

    def test_two_points(self):
        M = schwarz_pick_matrix(ZERO, [NodeSpec(0, 1, [0]), NodeSpec(0.5, 1, [0])])
        np.testing.assert_allclose(M, [[1, 1], [1, 4 / 3]])


def cauchy_pick_matrix(s, nodes, r=0.05, m=32):
    """Taylor coefficients of K_s around each node pair by a double DFT on small circles."""
    idx = [(nd.point, l) for nd in nodes for l in range(nd.multiplicity)]
    th = 2 * np.pi * np.arange(m) / m
    out = np.empty((len(idx), len(idx)), dtype=complex)
    for a, (zi, l) in enumerate(idx):
        for b, (zj, k) in enumerate(idx):
            z = zi + r * np.exp(1j * th)
            # conj(zeta) runs over conj(zj) + r e^{i phi}
            zeta = zj + r * np.exp(-1j * th)
            sz, sw = evaluate(s, z), evaluate(s, zeta)
            K = (1 - np.outer(sz, np.conj(sw))) / (1 - np.outer(z, np.conj(zeta)))
            C = np.fft.fft2(K) / m ** 2
            out[a, b] = C[l, k] / r ** (l + k)
    return out


class TestCrossChecks:
    @pytest.mark.parametrize("seed", range(20))
    def test_stein_route_matches_derivative_route(self, seed):
        inst = random_instance(seed, InstanceConfig(max_multiplicity=3))
        P = compute_P(inst.data).P
        M = schwarz_pick_matrix(inst.s, inst.nodes)
        assert np.max(np.abs(P - M)) <= 1e-8

    @pytest.mark.parametrize("seed", range(5))
    def test_derivative_route_matches_contour_oracle(self, seed):
        inst = random_instance(seed, InstanceConfig(max_multiplicity=3, max_nodes=3))
        M = schwarz_pick_matrix(inst.s, inst.nodes)
        assert np.max(np.abs(M - cauchy_pick_matrix(inst.s, inst.nodes))) <= 1e-9

    @pytest.mark.parametrize("seed", range(10))
    def test_output_factors_through_coanalytic_toeplitz(self, seed):
        # coefficients of N(I - zT)^{-1}x equal sum_j conj(s_j) g_{k+j}, g the coefficients of E(I - zT)^{-1}x
        inst = random_instance(seed, InstanceConfig(max_multiplicity=2))
        pair = inst.data.realization
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(pair.dim) + 1j * rng.standard_normal(pair.dim)
        K, L = 2048, 16
        N = compute_N(inst.data)
        g = observability_coefficients(pair, x, K)
        sc = taylor_coefficients(inst.s, K - L)
        lhs = []
        v = x.copy()
        for _ in range(L):
            lhs.append(N @ v)
            v = pair.T @ v
        rhs = [np.sum(np.conj(sc) * g[k:k + K - L]) for k in range(L)]
        np.testing.assert_allclose(lhs, rhs, atol=1e-8)

    @pytest.mark.parametrize("kind", ["blaschke", "scaled"])
    def test_psd_on_random_instances(self, kind):
        for seed in range(25):
            sys = compute_P(random_instance(seed, InstanceConfig(schur_kind=kind, max_multiplicity=2)).data)
            assert sys.certificate.min_eigenvalue >= -1e-10 * np.linalg.norm(sys.P, 2)


class TestSolvability:
    def test_positive_definite_is_solvable(self):
        data, sys = problem([(0, [1]), (0.5, [-3j])], ZERO)
        assert solvability_verdict(sys, data.x_star).member

    def test_kernel_orthogonal_target(self):
        data, sys = problem([(0, [0.7]), (0.5, [0.7])], Z)
        assert solvability_verdict(sys, data.x_star).member

    def test_kernel_component(self):
        data, sys = problem([(0, [1]), (0.5, [2])], Z)
        solvable, residual = solvability_verdict(sys, data.x_star)
        assert not solvable and residual > 1e-3
        assert not sys.solvable
