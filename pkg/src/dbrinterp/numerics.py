"""Dense complex linear algebra: Hermitian solves, PSD certificates, Stein
equations and range membership."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import SingularMatrix, SpectralRadiusTooLarge

PSD_THRESHOLD = 1e-10
# Kronecker-vectorized Stein solve costs O(n^6); above this use the doubling series.
STEIN_DIRECT_MAX_DIM = 32
STEIN_RADIUS_MARGIN = 1e-8


def as_hermitian(M):
    """Return (M + M*)/2 as a complex array."""
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    return 0.5 * (M + M.conj().T)


@dataclass(frozen=True)
class SpectralCertificate:
    min_eigenvalue: float
    rank: int
    threshold: float
    dim: int = 0
    norm: float = 0.0

    @property
    def is_psd(self):
        return self.min_eigenvalue >= -self.threshold * max(self.norm, 1e-300)

    @property
    def is_positive_definite(self):
        return self.rank == self.dim and self.min_eigenvalue > 0


def certify_psd(M, threshold=PSD_THRESHOLD, scale=0.0):
    """Eigenvalue certificate for the Hermitian part of ``M``.

    ``rank`` counts eigenvalues above ``threshold * max(||M||_2, scale)``.
    Pass ``scale`` when ``M`` came out of a cancellation between larger terms.
    """
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    H = as_hermitian(M)
    if H.size == 0:
        return SpectralCertificate(0.0, 0, threshold, 0, 0.0)
    w = scipy.linalg.eigvalsh(H)
    norm = max(float(np.max(np.abs(w))), float(scale))
    rank = int(np.count_nonzero(w > threshold * norm))
    return SpectralCertificate(float(w[0]), rank, threshold, H.shape[0], norm)


def solve_hermitian(P, b, threshold=PSD_THRESHOLD):
    """Solve ``P v = b`` for strictly positive definite ``P``."""
    H = as_hermitian(P)
    cert = certify_psd(H, threshold)
    if cert.rank < cert.dim or cert.min_eigenvalue <= 0:
        raise SingularMatrix(
            f"matrix not strictly positive definite: min eigenvalue {cert.min_eigenvalue:.3e}, "
            f"rank {cert.rank}/{cert.dim}")
    c = scipy.linalg.cho_factor(H, lower=True)
    return scipy.linalg.cho_solve(c, np.asarray(b, dtype=complex))


def spectral_radius(T):
    T = np.atleast_2d(np.asarray(T, dtype=complex))
    if T.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(T))))


def solve_stein(T, Q):
    """Solve the Stein equation ``P - T* P T = Q``.

    Requires the spectral radius of ``T`` to be below ``1 - 1e-8``.
    """
    T = np.atleast_2d(np.asarray(T, dtype=complex))
    Q = as_hermitian(Q)
    n = T.shape[0]
    if T.shape != (n, n) or Q.shape != (n, n):
        raise ValueError(f"shape mismatch: T {T.shape}, Q {Q.shape}")
    rho = spectral_radius(T)
    if rho >= 1 - STEIN_RADIUS_MARGIN:
        raise SpectralRadiusTooLarge(f"spectral radius {rho:.12g} not below 1")
    if n == 0:
        return Q
    if n <= STEIN_DIRECT_MAX_DIM:
        # column-major vec: vec(T* P T) = (T^T kron T*) vec(P)
        K = np.eye(n * n, dtype=complex) - np.kron(T.T, T.conj().T)
        p = np.linalg.solve(K, Q.reshape(-1, order="F"))
        return as_hermitian(p.reshape(n, n, order="F"))
    return as_hermitian(stein_series(T, Q)[0])


def stein_series(T, Q, tol=1e-16, max_doublings=64):
    """Sum ``sum_k T*^k Q T^k`` by squaring (Smith iteration).

    Returns ``(P, tail_bound)`` where ``tail_bound`` bounds the norm of the
    neglected terms by ``||Q|| ||A||^2 / (1 - ||A||^2)`` once the current
    power ``A = T^(2^j)`` is a contraction.
    """
    T = np.atleast_2d(np.asarray(T, dtype=complex))
    P = as_hermitian(Q)
    A = T.copy()
    qnorm = np.linalg.norm(P, 2) if P.size else 0.0
    tail = np.inf
    for _ in range(max_doublings):
        P = P + A.conj().T @ P @ A
        A = A @ A
        a = np.linalg.norm(A, 2) if A.size else 0.0
        if a < 1:
            tail = 2 * np.linalg.norm(P, 2) * a * a / (1 - a * a) if a else 0.0
            if tail <= tol * max(qnorm, 1e-300) or a == 0:
                break
    return P, tail


def stein_residual(T, Q, P):
    T = np.atleast_2d(np.asarray(T, dtype=complex))
    return float(np.linalg.norm(P - T.conj().T @ P @ T - Q, 2))


@dataclass(frozen=True)
class RangeMembership:
    member: bool
    residual: float

    def __iter__(self):
        return iter((self.member, self.residual))

    def __bool__(self):
        return self.member


def range_membership(P, v, threshold=PSD_THRESHOLD, scale=0.0):
    """Test ``v`` in Ran P (equal to Ran P^(1/2) in finite dimension).

    The residual is the norm of the projection of ``v`` onto the numerical
    kernel of ``P`` (eigenvalues at most ``threshold * max(||P||, scale)``).
    """
    H = as_hermitian(P)
    v = np.asarray(v, dtype=complex).ravel()
    w, U = scipy.linalg.eigh(H)
    norm = max(float(np.max(np.abs(w))) if w.size else 0.0, float(scale))
    kernel = U[:, w <= threshold * norm]
    residual = float(np.linalg.norm(kernel.conj().T @ v)) if kernel.size else 0.0
    return RangeMembership(residual <= threshold * np.linalg.norm(v), residual)
