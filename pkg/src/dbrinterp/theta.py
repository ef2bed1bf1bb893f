"""The J-inner function Theta, its linear fractional transform and the
Schur parameter sigma with s = T_Theta[sigma].

Theta is assembled as

    Theta(z) = I + (z - mu) C (I - zT)^{-1} P^{-1} (mu I - T*)^{-1} C* J,
    C = [E; N],  J = diag(1, -1),

which satisfies (J - Theta(z) J Theta(w)*) / (1 - z conj w)
= C (I - zT)^{-1} P^{-1} (I - conj(w) T*)^{-1} C* for |mu| = 1. All four
entries share the denominator det(I - zT).
"""

from dataclasses import dataclass

import numpy as np
import numpy.polynomial.polynomial as npoly

from .errors import (DegenerateDenominator, DegenerateTransform, MuOnSpectrum, SchurCertificationFailure,
                     SingularPick)
from .rational import ComplexRational, as_rational, normalize, schur_check
from .realization import resolvent_numerator

J = np.diag([1.0, -1.0]).astype(complex)
MU_SPECTRUM_DISTANCE = 1e-8
BOUNDARY_GRID = 512
IDENTITY_SAMPLES = 20


@dataclass(frozen=True, eq=False)
class ThetaFunction:
    num: np.ndarray          # (2, 2, n + 1) ascending coefficients
    den: np.ndarray          # det(I - zT), ascending
    mu: complex
    identity_residual: float = np.nan
    boundary_j_residual: float = np.nan
    det_residual: float = np.nan
    # (point, multiplicity) of the interpolation nodes, i.e. the eigenvalues of T*
    node_factors: tuple = ()

    @property
    def pole_factors(self):
        """Roots of det(I - zT): the reflected nodes 1/conj(z_i), z_i != 0."""
        return tuple((1 / np.conj(p), m) for p, m in self.node_factors if p != 0)

    def _entry(self, i, j):
        return normalize(ComplexRational(self.num[i, j], self.den), known_roots=self.pole_factors)

    @property
    def a(self):
        return self._entry(0, 0)

    @property
    def b(self):
        return self._entry(0, 1)

    @property
    def c(self):
        return self._entry(1, 0)

    @property
    def d(self):
        return self._entry(1, 1)

    def __call__(self, z):
        """Theta(z); a (..., 2, 2) array for array input."""
        z = np.asarray(z, dtype=complex)
        q = npoly.polyval(z, self.den)
        out = np.empty(z.shape + (2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                out[..., i, j] = npoly.polyval(z, self.num[i, j]) / q
        return out

    @classmethod
    def identity(cls):
        num = np.zeros((2, 2, 1), dtype=complex)
        num[0, 0, 0] = num[1, 1, 0] = 1
        return cls(num, np.array([1], dtype=complex), 1 + 0j, 0.0, 0.0, 0.0)

    @classmethod
    def from_entries(cls, a, b, c, d, mu=1 + 0j):
        """Theta from four rationals (brought to a common denominator)."""
        ents = [as_rational(e) for e in (a, b, c, d)]
        den = np.array([1], dtype=complex)
        for e in ents:
            den = npoly.polymul(den, e.den)
        nums = []
        for e in ents:
            other = np.array([1], dtype=complex)
            for f in ents:
                if f is not e:
                    other = npoly.polymul(other, f.den)
            nums.append(npoly.polymul(e.num, other))
        m = max(x.size for x in nums)
        num = np.zeros((2, 2, m), dtype=complex)
        for k, x in enumerate(nums):
            num[k // 2, k % 2, :x.size] = x
        return cls(num, den, complex(mu))


def auto_mu(pair, samples=1024, exclude=(), min_separation=0.5):
    """Boundary point farthest from spec(T) and spec(T*).

    Points within ``min_separation`` of any entry of ``exclude`` are skipped,
    which yields a second well-separated choice for invariance checks.
    """
    eig = pair.eigenvalues()
    pts = np.exp(2j * np.pi * np.arange(samples) / samples)
    for e in exclude:
        pts = pts[np.abs(pts - e) >= min_separation]
    if eig.size == 0:
        return complex(pts[0])
    spec = np.concatenate([eig, eig.conj()])
    dist = np.min(np.abs(pts[:, None] - spec[None, :]), axis=1)
    return complex(pts[int(np.argmax(dist))])


def _kernel_identity_rhs(data, system, z, w):
    """C (I - zT)^{-1} P^{-1} (I - conj(w) T*)^{-1} C*."""
    T = data.realization.T
    n = T.shape[0]
    C = np.vstack([data.realization.E, system.N])
    left = np.linalg.solve((np.eye(n) - z * T).T, C.T).T          # C (I - zT)^{-1}
    right = np.linalg.solve(np.eye(n) - np.conj(w) * T.conj().T, C.conj().T)
    return left @ np.linalg.solve(system.P, right)


def verify_kernel_identity(theta, data, system, sample_pairs):
    """Max over pairs of ||lhs - rhs|| / max(1, ||rhs||) for the kernel identity

    (J - Theta(z) J Theta(w)*) / (1 - z conj w) = C R(z) P^{-1} R(w)* C*.
    Both sides grow like ||P^{-1}||, hence the relative scaling.
    """
    worst = 0.0
    for z, w in sample_pairs:
        lhs = (J - theta(z) @ J @ theta(w).conj().T) / (1 - z * np.conj(w))
        rhs = _kernel_identity_rhs(data, system, z, w)
        err = np.linalg.norm(lhs - rhs, 2) / max(1.0, np.linalg.norm(rhs, 2))
        worst = max(worst, float(err))
    return worst


def boundary_residuals(theta, grid_size=BOUNDARY_GRID):
    """(max ||Theta J Theta* - J||, max | |det Theta| - 1 |) over the circle grid."""
    t = np.exp(2j * np.pi * np.arange(grid_size) / grid_size)
    th = theta(t)
    G = th @ J @ np.conj(np.swapaxes(th, -1, -2)) - J
    jres = float(np.max(np.linalg.norm(G, 2, axis=(-2, -1))))
    dres = float(np.max(np.abs(np.abs(np.linalg.det(th)) - 1)))
    return jres, dres


def j_contractivity_min_eigenvalue(theta, points):
    """Smallest eigenvalue of J - Theta(z) J Theta(z)* over ``points``."""
    th = theta(np.asarray(points, dtype=complex))
    G = J - th @ J @ np.conj(np.swapaxes(th, -1, -2))
    G = 0.5 * (G + np.conj(np.swapaxes(G, -1, -2)))
    return float(np.min(np.linalg.eigvalsh(G)))


def random_disk_pairs(rng, count, radius=0.95):
    r = radius * np.sqrt(rng.random((count, 2)))
    ang = 2 * np.pi * rng.random((count, 2))
    pts = r * np.exp(1j * ang)
    return [(complex(a), complex(b)) for a, b in pts]


def node_factors(pair):
    if pair.is_jordan:
        return pair.node_layout
    return tuple((complex(np.conj(lam)), 1) for lam in np.linalg.eigvals(pair.T))


def build_theta(data, system, mu="auto", seed=0):
    if not system.is_positive_definite:
        raise SingularPick(
            f"Pick matrix not strictly positive (rank {system.rank} of {system.dim})")
    pair = data.realization
    if isinstance(mu, str):
        if mu != "auto":
            raise ValueError(f"mu must be a complex number or 'auto', got {mu!r}")
        mu = auto_mu(pair)
    mu = complex(mu)
    if abs(abs(mu) - 1) > 1e-12:
        raise MuOnSpectrum(f"|mu| = {abs(mu)!r} is not 1")
    eig = pair.eigenvalues()
    if eig.size and np.min(np.abs(np.concatenate([eig, eig.conj()]) - mu)) <= MU_SPECTRUM_DISTANCE:
        raise MuOnSpectrum(f"mu = {mu} lies on spec(T)")
    n = pair.dim
    C = np.vstack([pair.E, system.N])
    W = np.linalg.solve(system.P, np.linalg.solve(mu * np.eye(n) - pair.T.conj().T, C.conj().T @ J))
    q = pair.resolvent_denominator()
    # (z - mu) C adj(I - zT) W, plus q(z) I
    inner = resolvent_numerator(pair, C, W)
    if n == 0:
        inner = np.zeros((2, 2, 1), dtype=complex)
    num = np.zeros((2, 2, max(n + 1, q.size)), dtype=complex)
    for i in range(2):
        num[i, i, :q.size] += q
        for j in range(2):
            shifted = npoly.polymul(inner[i, j], [-mu, 1])
            num[i, j, :shifted.size] += shifted
    factors = node_factors(pair)
    theta = ThetaFunction(num, q, mu, node_factors=factors)
    rng = np.random.default_rng(seed)
    ident = verify_kernel_identity(theta, data, system, random_disk_pairs(rng, IDENTITY_SAMPLES))
    jres, dres = boundary_residuals(theta)
    return ThetaFunction(num, q, mu, ident, jres, dres, factors)


def lft_apply(theta, eps):
    """T_Theta[eps] = (a eps + b) / (c eps + d)."""
    eps = as_rational(eps)
    a, b, c, d = theta.num[0, 0], theta.num[0, 1], theta.num[1, 0], theta.num[1, 1]
    top = npoly.polyadd(npoly.polymul(a, eps.num), npoly.polymul(b, eps.den))
    c_part, d_part = npoly.polymul(c, eps.num), npoly.polymul(d, eps.den)
    bottom = npoly.polyadd(c_part, d_part)
    if _negligible(bottom, c_part, d_part):
        raise DegenerateTransform("c*eps + d vanishes identically")
    return normalize(ComplexRational(top, bottom), known_roots=theta.pole_factors)


def _negligible(diff, x, y, rtol=1e-12):
    scale = max(np.max(np.abs(x)), np.max(np.abs(y)))
    return np.max(np.abs(diff)) <= rtol * scale


def u_function(theta, s):
    """u = a - c s."""
    s = as_rational(s)
    a, c = theta.num[0, 0], theta.num[1, 0]
    num = npoly.polysub(npoly.polymul(a, s.den), npoly.polymul(c, s.num))
    return normalize(ComplexRational(num, npoly.polymul(theta.den, s.den)),
                     known_roots=theta.pole_factors)


def extract_sigma(theta, s, check=True):
    """sigma = (d s - b) / (a - c s), normalized and Schur-certified."""
    s = as_rational(s)
    a, b, c, d = theta.num[0, 0], theta.num[0, 1], theta.num[1, 0], theta.num[1, 1]
    a_part, c_part = npoly.polymul(a, s.den), npoly.polymul(c, s.num)
    den = npoly.polysub(a_part, c_part)
    if _negligible(den, a_part, c_part):
        raise DegenerateDenominator("a - c s vanishes identically")
    num = npoly.polysub(npoly.polymul(d, s.num), npoly.polymul(b, s.den))
    # common factors sit at the nodes and, for inner s, also at their reflections
    sigma = normalize(ComplexRational(num, den), known_roots=theta.node_factors + theta.pole_factors)
    if check:
        rep = schur_check(sigma)
        if not rep.is_schur:
            raise SchurCertificationFailure(
                f"extracted sigma fails Schur check (boundary sup {rep.boundary_sup:.12g}, "
                f"poles in disk: {rep.poles_in_closed_disk})")
    return sigma
