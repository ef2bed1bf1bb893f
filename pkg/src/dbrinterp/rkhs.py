"""Inner-product engine on H(K_s) and numerical certificates for the
structure of the solution set.

Norms are never computed from the operator-range definition of H(K_s).
Everything lives in the span of kernel sections, their conj-derivatives and
F^s columns, where the reproducing identities

    <d^r K_s(., w), d^l K_s(., v)> = d^l_z d^r_{conj w} K_s(v, w)
    <F^s P^{-1} a, d^l K_s(., v)>  = (F^s)^(l)(v) P^{-1} a
    <F^s P^{-1} a, F^s P^{-1} b>   = b* P^{-1} a

give exact Gram entries.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.linalg import solve_triangular
from scipy.stats import qmc

from .errors import ContextMismatch, PointOnZeroOfU, PoleInClosedDisk, SingularPick
from .kernel import kernel_eval, kernel_gram
from .numerics import SpectralCertificate, certify_psd, solve_hermitian
from .rational import as_rational, evaluate, taylor_coefficients
from .solver import U_ZERO_TOL, FsFunction, span_rational, zero_order
from .theta import extract_sigma, u_function

__all__ = [
    "KernelElement", "SpanVector", "RKHSContext", "kernel_eval", "kernel_gram", "inner_product",
    "uh_span", "verify_orthogonality", "verify_isometry", "isometry_condition", "positivity_certificate",
    "positivity_matrix", "reduced_positivity_matrix", "certify_positivity", "disk_samples", "h2_norm", "h2_norm_report",
]

POSITIVITY_TOL = 1e-9
ENRICH_START = 20
ENRICH_MAX = 320
H2_TRUNCATION = 2048


@dataclass(frozen=True, eq=False)
class KernelElement:
    """coefficient * d^order K_s(., point), or coefficient * F^s P^{-1} vector."""
    kind: str
    coefficient: complex = 1 + 0j
    point: complex = 0j
    order: int = 0
    vector: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "coefficient", complex(self.coefficient))
        if self.kind == "kernel_section":
            object.__setattr__(self, "point", complex(self.point))
            if abs(self.point) >= 1:
                raise ValueError(f"kernel section point {self.point} not in the open unit disk")
            if self.order < 0:
                raise ValueError("derivative order must be nonnegative")
        elif self.kind == "fs_column":
            v = np.asarray(self.vector, dtype=complex).ravel()
            v.setflags(write=False)
            object.__setattr__(self, "vector", v)
        else:
            raise ValueError(f"unknown element kind {self.kind!r}")

    @classmethod
    def kernel_section(cls, point, order=0, coefficient=1):
        return cls("kernel_section", coefficient, point, int(order))

    @classmethod
    def fs_column(cls, vector, coefficient=1):
        return cls("fs_column", coefficient, vector=vector)

    def scaled(self, c):
        return KernelElement(self.kind, self.coefficient * c, self.point, self.order, self.vector)


@dataclass(frozen=True, eq=False)
class SpanVector:
    elements: tuple = ()
    context: "RKHSContext" = None

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))

    def _check(self, other):
        if self.context is not None and other.context is not None and self.context is not other.context:
            raise ContextMismatch("span vectors belong to different H(K_s) contexts")
        return self.context if self.context is not None else other.context

    def __add__(self, other):
        ctx = self._check(other)
        return SpanVector(self.elements + other.elements, ctx)

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return SpanVector(tuple(e.scaled(c) for e in self.elements), self.context)

    __rmul__ = __mul__


class RKHSContext:
    """One H(K_s): the data, its Pick system and the row function F^s."""

    def __init__(self, data, system):
        self.data = data
        self.system = system
        self.s = data.s
        self.fs = FsFunction(data, system.N)
        self._theta_cache = {}
        self._chol = None

    # -- constructors for span vectors living in this context
    def span(self, elements):
        return SpanVector(tuple(elements), self)

    def kernel_section(self, point, order=0, coefficient=1):
        return self.span([KernelElement.kernel_section(point, order, coefficient)])

    def fs_column(self, vector, coefficient=1):
        if len(vector) != self.data.dim:
            raise ContextMismatch(f"F^s vector of length {len(vector)} in a dimension {self.data.dim} context")
        return self.span([KernelElement.fs_column(vector, coefficient)])

    def minimal_span(self):
        """F^s P^{-1} x*."""
        return self.fs_column(self.data.x_star)

    def from_interpolant(self, interp):
        parts = [KernelElement.fs_column(interp.fs_vector)]
        parts += [KernelElement.kernel_section(w, k, b) for w, k, b in interp.kernel_terms]
        return self.span(parts)

    def sigma_and_u(self, theta):
        key = id(theta)
        if key not in self._theta_cache:
            self._theta_cache[key] = (theta, extract_sigma(theta, self.s), u_function(theta, self.s))
        return self._theta_cache[key][1:]

    # -- engine
    def _pinv(self, v):
        if not self.system.is_positive_definite:
            raise SingularPick("F^s P^{-1} columns need a strictly positive Pick matrix")
        return solve_hermitian(self.system.P, v)

    @property
    def _cholesky(self):
        if self._chol is None:
            if not self.system.is_positive_definite:
                raise SingularPick("F^s P^{-1} columns need a strictly positive Pick matrix")
            self._chol = np.linalg.cholesky(self.system.P)
        return self._chol

    def white(self, v):
        """L^{-1} v for P = L L*; then b* P^{-1} a = <white(a), white(b)>."""
        return solve_triangular(self._cholesky, np.asarray(v, dtype=complex), lower=True)

    def _fs_white(self, point, order):
        return self.white(self.fs.derivative(point, order).conj())

    def _pair(self, a, b):
        """<a, b> for single elements with unit coefficients.

        Every P^{-1} goes through the Cholesky factor on both sides, which
        loses sqrt(cond P) instead of cond P, and identical F^s rows whiten
        to identical vectors so that exact cancellations stay exact.
        """
        if a.kind == "kernel_section" and b.kind == "kernel_section":
            return kernel_eval(self.s, b.point, a.point, b.order, a.order)
        if a.kind == "fs_column" and b.kind == "kernel_section":
            return complex(np.vdot(self._fs_white(b.point, b.order), self.white(a.vector)))
        if a.kind == "kernel_section" and b.kind == "fs_column":
            return np.conj(self._pair(b, a))
        return complex(np.vdot(self.white(b.vector), self.white(a.vector)))

    def inner(self, x, y):
        for v in (x, y):
            if v.context is not None and v.context is not self:
                raise ContextMismatch("span vector belongs to a different H(K_s) context")
        total = 0j
        for a in x.elements:
            for b in y.elements:
                total += a.coefficient * np.conj(b.coefficient) * self._pair(a, b)
        return complex(total)

    def norm_squared(self, x):
        return float(np.real(self.inner(x, x)))

    def to_rational(self, x):
        """The function represented by ``x`` as a ComplexRational."""
        v = np.zeros(self.data.dim, dtype=complex)
        terms = []
        for e in x.elements:
            if e.kind == "fs_column":
                v += e.coefficient * e.vector
            else:
                terms.append((e.point, e.order, e.coefficient))
        c = self._pinv(v) if np.any(v) else v
        return span_rational(self.data, self.fs, c, terms)


def inner_product(context, x, y):
    """<x, y> in H(K_s), linear in x."""
    return context.inner(x, y)


def uh_span(context, theta, h):
    """u h expanded into span elements through the kernel identity linking K_s and K_sigma."""
    _, u = context.sigma_and_u(theta)
    parts = []
    for w, alpha in h.terms:
        k, uk = zero_order(u, w)
        beta = alpha / np.conj(uk)
        parts.append(KernelElement.kernel_section(w, k, beta))
        parts.append(KernelElement.fs_column(context.fs.derivative(w, k).conj(), -beta))
    return context.span(parts)


class OrthogonalityReport(NamedTuple):
    residual: float
    bound: float

    @property
    def passed(self):
        return self.residual <= self.bound


def verify_orthogonality(context, theta, h):
    """|<u h, F^s P^{-1} x*>| with the acceptance bound 1e-9 (||u h|| ||f_min|| + 1)."""
    uh = uh_span(context, theta, h)
    fmin = context.minimal_span()
    residual = abs(context.inner(uh, fmin))
    scale = np.sqrt(max(context.norm_squared(uh), 0.0) * max(context.norm_squared(fmin), 0.0))
    return OrthogonalityReport(float(residual), 1e-9 * (scale + 1))


def verify_isometry(context, theta, combo):
    """(||h||^2 in H(K_sigma), ||u h||^2 in H(K_s)) for h = sum a_i K_sigma(., z_i) conj u(z_i)."""
    if not combo:
        return 0.0, 0.0
    sigma, u = context.sigma_and_u(theta)
    pts = np.array([complex(p) for p, _ in combo])
    alpha = np.array([complex(a) for _, a in combo])
    uz = np.array([evaluate(u, p) for p in pts])
    bad = np.abs(uz) <= U_ZERO_TOL
    if np.any(bad):
        raise PointOnZeroOfU(f"u vanishes at {pts[bad][0]}")
    Ksig = kernel_gram(sigma, pts)                 # [K_sigma(z_i, z_j)]
    c = alpha * uz.conj()
    lhs = float(np.real(c @ Ksig.T @ c.conj()))    # sum c_i conj(c_j) K_sigma(z_j, z_i)
    parts = []
    for p, a in zip(pts, alpha):
        parts.append(KernelElement.kernel_section(p, 0, a))
        parts.append(KernelElement.fs_column(context.fs(p).conj(), -a))
    rhs = context.norm_squared(context.span(parts))
    return lhs, rhs


def isometry_condition(context, combo, norm_squared):
    """Cancellation factor sum_ij |a_i a_j K_s(z_i, z_j)| / ||u h||^2 of the isometry check.

    ||u h||^2 is assembled from terms of kernel size, so the relative
    rounding error of either side grows roughly in proportion to this ratio.
    """
    pts = np.array([complex(p) for p, _ in combo])
    a = np.abs(np.array([complex(x) for _, x in combo]))
    scale = float(a @ np.abs(kernel_gram(context.s, pts)) @ a)
    return scale / norm_squared if norm_squared > 0 else np.inf


def positivity_matrix(context, f, gamma, points):
    """Block matrix [K(z_j, z_l)] with K(z, w) = [[g, x, conj f(w)], [x*, P, F^s(w)*], [f(z), F^s(z), K_s(z, w)]]."""
    f = as_rational(f)
    pts = np.asarray(points, dtype=complex).ravel()
    n = context.data.dim
    xs = context.data.x_star        # the column x*; the row x is its conjugate
    P = context.system.P
    fz = np.asarray(evaluate(f, pts)) if pts.size else pts
    Fz = np.array([context.fs(p) for p in pts]).reshape(pts.size, n)
    Ks = kernel_gram(context.s, pts)
    m = n + 2
    M = np.empty((pts.size * m, pts.size * m), dtype=complex)
    for j in range(pts.size):
        for l in range(pts.size):
            B = np.zeros((m, m), dtype=complex)
            B[0, 0] = gamma
            B[0, 1:n + 1] = xs.conj()
            B[0, -1] = np.conj(fz[l])
            B[1:n + 1, 0] = xs
            B[1:n + 1, 1:n + 1] = P
            B[1:n + 1, -1] = Fz[l].conj()
            B[-1, 0] = fz[j]
            B[-1, 1:n + 1] = Fz[j]
            B[-1, -1] = Ks[j, l]
            M[j * m:(j + 1) * m, l * m:(l + 1) * m] = B
    return M


def reduced_positivity_matrix(context, f, gamma, points):
    """The positivity kernel after eliminating the P blocks by congruence.

    With g(z) = f(z) - F^s(z) P^{-1} x* the result is the 2r x 2r matrix
    [[gamma - x P^{-1} x*, conj g(w)], [g(z), K_s(z, w) - F^s(z) P^{-1} F^s(w)*]]
    over the sample. The eliminated part is ones(r, r) kron P, which is PSD,
    so by Sylvester's law of inertia the full matrix is PSD exactly when this
    one is. Its scale no longer carries ||P||.
    """
    f = as_rational(f)
    pts = np.asarray(points, dtype=complex).ravel()
    r = pts.size
    xs = context.data.x_star
    Fz = np.array([context.fs(p) for p in pts]).reshape(r, context.data.dim)
    Fw = context.white(Fz.conj().T)              # columns L^{-1} F^s(z_j)*
    xw = context.white(xs)
    g = (np.asarray(evaluate(f, pts)) if r else pts) - Fw.conj().T @ xw
    R = np.empty((2 * r, 2 * r), dtype=complex)
    R[:r, :r] = gamma - np.real(np.vdot(xw, xw))
    R[:r, r:] = np.conj(g)[None, :]
    R[r:, :r] = g[:, None]
    R[r:, r:] = kernel_gram(context.s, pts) - Fw.conj().T @ Fw
    return R


def positivity_certificate(context, f, gamma, sample_points, tol=POSITIVITY_TOL):
    """Spectral certificate of the positivity kernel over ``sample_points``.

    Certifies the congruent reduced matrix; a relative threshold on the raw
    block matrix would be dominated by ||P|| and miss small negative eigenvalues.
    """
    if len(sample_points) == 0:
        return SpectralCertificate(0.0, 0, tol, 0, 0.0)
    return certify_psd(reduced_positivity_matrix(context, f, gamma, sample_points), tol)


def disk_samples(count, seed=0, radius=0.95):
    """Quasi-random points in the disk |z| < radius (scrambled Halton, area-uniform)."""
    u = qmc.Halton(d=2, seed=seed).random(count)
    return radius * np.sqrt(u[:, 0]) * np.exp(2j * np.pi * u[:, 1])


@dataclass(frozen=True)
class PositivityVerdict:
    passed: bool
    certificate: SpectralCertificate
    sample_sizes: tuple = field(default=())


def certify_positivity(context, f, gamma, seed=0, start=ENRICH_START, max_points=ENRICH_MAX):
    """Double the sample from ``start`` until two consecutive verdicts agree or ``max_points``.

    The loop stops at the first failing round, since one negative eigenvalue
    already refutes positivity of the kernel.
    """
    sizes, last, count = [], None, start
    while True:
        cert = positivity_certificate(context, f, gamma, disk_samples(count, seed))
        sizes.append(count)
        if not cert.is_psd:
            return PositivityVerdict(False, cert, tuple(sizes))
        if (last is not None and last == cert.is_psd) or count >= max_points:
            return PositivityVerdict(cert.is_psd, cert, tuple(sizes))
        last = cert.is_psd
        count = min(2 * count, max_points)


class H2NormReport(NamedTuple):
    norm: float
    tail_bound: float
    pole_radius: float


def h2_norm_report(f, truncation=H2_TRUNCATION):
    """Truncated coefficient norm with a Cauchy-estimate bound on the neglected tail."""
    f = as_rational(f).normalized()
    poles = f.poles()
    rho = float(np.min(np.abs(poles))) if poles.size else np.inf
    if rho <= 1 + 1e-12:
        raise PoleInClosedDisk(f"pole of modulus {rho:.6g} in the closed unit disk")
    coeffs = taylor_coefficients(f, truncation)
    norm = float(np.sqrt(np.sum(np.abs(coeffs) ** 2)))
    if np.isinf(rho):
        tail = 0.0 if f.num.size <= truncation else float("inf")
        return H2NormReport(norm, tail, rho)
    # |a_k| <= M(R) R^-k on any circle 1 < R < rho
    R = np.sqrt(rho)
    circle = R * np.exp(2j * np.pi * np.arange(256) / 256)
    M = float(np.max(np.abs(evaluate(f, circle))))
    tail = M * R ** (-truncation) / np.sqrt(1 - R ** -2)
    return H2NormReport(norm, float(tail), rho)


def h2_norm(f, truncation=H2_TRUNCATION):
    return h2_norm_report(f, truncation).norm
