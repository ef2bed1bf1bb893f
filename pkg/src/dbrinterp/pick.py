"""The row N with N* = s(T*)E*, the Pick matrix P solving
P - T*PT = E*E - N*N, and the solvability verdict x* in Ran P."""

from dataclasses import dataclass
from math import factorial

import numpy as np

from .numerics import (PSD_THRESHOLD, SpectralCertificate, as_hermitian, certify_psd,
                       range_membership, solve_stein, stein_residual)
from .kernel import kernel_mixed_derivative
from .realization import tangential_eval

SOLVABILITY_THRESHOLD = 1e-8


@dataclass(frozen=True, eq=False)
class PickSystem:
    N: np.ndarray
    P: np.ndarray
    certificate: SpectralCertificate
    solvable: bool
    solvability_residual: float
    stein_residual: float = 0.0

    @property
    def dim(self):
        return self.P.shape[0]

    @property
    def is_positive_definite(self):
        return self.certificate.rank == self.dim and self.certificate.min_eigenvalue > 0

    @property
    def rank(self):
        return self.certificate.rank


def compute_N(data):
    """Row N with N* = s(T*)E*."""
    return tangential_eval(data.s, data.realization).conj()


def compute_P(data, N=None, psd_threshold=PSD_THRESHOLD,
              solvability_threshold=SOLVABILITY_THRESHOLD):
    if N is None:
        N = compute_N(data)
    N = np.asarray(N, dtype=complex)
    E = data.realization.E
    T = data.realization.T
    Q = np.outer(E.conj(), E) - np.outer(N.conj(), N)
    P = solve_stein(T, Q)
    # P = P0 - (N part) with P0 the s = 0 Pick matrix, so rounding in P is
    # relative to ||P0||; a unimodular constant s gives P = 0 up to that level
    scale = np.linalg.norm(solve_stein(T, np.outer(E.conj(), E)), 2) if E.size else 0.0
    cert = certify_psd(P, psd_threshold, scale)
    member, residual = range_membership(P, data.x_star, solvability_threshold, scale)
    res = stein_residual(T, as_hermitian(Q), P)
    return PickSystem(N, P, cert, bool(member), residual, res)


def solvability_verdict(system, x_star, threshold=SOLVABILITY_THRESHOLD):
    """(solvable, residual) for the condition x* in Ran P^(1/2)."""
    return range_membership(system.P, x_star, threshold)


def schwarz_pick_matrix(s, nodes):
    """Block matrix of (1/(l! r!)) d^l_z d^r_{conj zeta} K_s at (z_i, z_j)."""
    idx = [(nd.point, l) for nd in nodes for l in range(nd.multiplicity)]
    n = len(idx)
    M = np.empty((n, n), dtype=complex)
    for a, (zi, l) in enumerate(idx):
        for b, (zj, r) in enumerate(idx):
            M[a, b] = kernel_mixed_derivative(s, zi, zj, l, r) / (factorial(l) * factorial(r))
    return as_hermitian(M)
