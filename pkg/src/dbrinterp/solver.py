"""Minimal-norm interpolant, the parametrization of all solutions and the
degenerate (Blaschke) truncation.

Every solution is represented in the span of kernel sections and F^s
columns:

    f = F^s P^{-1} v + sum_i beta_i K_s(., w_i),

which keeps f rational and its H(K_s) norm exactly computable from
reproducing identities.
"""

from dataclasses import dataclass, field
from math import comb, factorial
from typing import NamedTuple

import numpy as np
import numpy.polynomial.polynomial as npoly

from .errors import (InconsistentData, ParameterSigmaMismatch, PointOnZeroOfU, SingularPick,
                     TruncationSingular, Unsolvable, Unsupported)
from .kernel import kernel_eval
from .numerics import solve_hermitian
from .pick import compute_N, compute_P
from .rational import (ComplexRational, as_rational, coefficient_distance, evaluate, is_inner,
                       normalize)
from .realization import NodeSpec, ProblemData, row_resolvent_rationals, tangential_eval
from .theta import extract_sigma, u_function

SIGMA_MATCH_TOL = 1e-8
U_ZERO_TOL = 1e-10
MAX_ZERO_ORDER = 8
INTERPOLATION_TOL = 1e-8


class FsFunction:
    """F^s(z) = (E - s(z) N)(I - zT)^{-1}, a row-vector valued function."""

    def __init__(self, data, N):
        self.data = data
        self.pair = data.realization
        self.s = data.s
        self.N = np.asarray(N, dtype=complex)
        self._columns = {}

    @property
    def pole_factors(self):
        return tuple((1 / np.conj(p), m) for p, m in self.pair.node_layout if p != 0)

    def __call__(self, z):
        n = self.pair.dim
        row = self.pair.E - evaluate(self.s, z) * self.N
        return np.linalg.solve((np.eye(n) - z * self.pair.T).T, row)

    def apply_parts(self, v):
        """(numerator, denominator) coefficient arrays of F^s v before normalization."""
        e_num, q = row_resolvent_rationals(self.pair, self.pair.E, v)
        n_num, _ = row_resolvent_rationals(self.pair, self.N, v)
        e_num = e_num if e_num.size else np.zeros(1, complex)
        n_num = n_num if n_num.size else np.zeros(1, complex)
        num = npoly.polysub(npoly.polymul(e_num, self.s.den), npoly.polymul(self.s.num, n_num))
        return num, npoly.polymul(q, self.s.den)

    def apply(self, v):
        """F^s v as a ComplexRational."""
        num, den = self.apply_parts(v)
        return normalize(ComplexRational(num, den), known_roots=self.pole_factors)

    def column(self, j):
        if j not in self._columns:
            self._columns[j] = self.apply(np.eye(self.pair.dim)[j])
        return self._columns[j]

    def derivative(self, z, order):
        """Row of order-th derivatives at z, from d^m/dz^m (I - zT)^{-1} = m! T^m (I - zT)^{-(m+1)}."""
        if order == 0:
            return self(z)
        n = self.pair.dim
        At = (np.eye(n) - z * self.pair.T).T

        def resolvent_derivative(row, m):
            row = row @ np.linalg.matrix_power(self.pair.T, m)
            for _ in range(m + 1):
                row = np.linalg.solve(At, row)
            return factorial(m) * row

        out = resolvent_derivative(self.pair.E, order)
        for j in range(order + 1):
            out = out - comb(order, j) * evaluate(self.s, z, j) * resolvent_derivative(self.N, order - j)
        return out


def compute_F_s(data, N=None):
    return FsFunction(data, compute_N(data) if N is None else N)


@dataclass(frozen=True, eq=False)
class ParameterH:
    """h = sum_i alpha_i K_sigma(., w_i)."""
    sigma: ComplexRational
    terms: tuple = ()

    def __post_init__(self):
        terms = tuple((complex(w), complex(a)) for w, a in self.terms)
        for i, (w, _) in enumerate(terms):
            if abs(w) >= 1:
                raise ValueError(f"parameter point {w} not in the open unit disk")
            for w2, _ in terms[i + 1:]:
                if abs(w - w2) <= 1e-10:
                    raise ValueError(f"parameter points {w} and {w2} coincide")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "sigma", as_rational(self.sigma))

    @property
    def points(self):
        return np.array([w for w, _ in self.terms], dtype=complex)

    @property
    def coefficients(self):
        return np.array([a for _, a in self.terms], dtype=complex)

    def gram(self):
        """[K_sigma(w_i, w_j)]."""
        w = self.points
        return np.array([[kernel_eval(self.sigma, wi, wj) for wj in w] for wi in w], dtype=complex)

    def norm_squared(self):
        if not self.terms:
            return 0.0
        a = self.coefficients
        # sum_ij alpha_i conj(alpha_j) K_sigma(w_j, w_i)
        return float(np.real(a.conj() @ self.gram() @ a))

    def __call__(self, z):
        return sum(a * kernel_eval(self.sigma, z, w) for w, a in self.terms)


class NormDecomposition(NamedTuple):
    min_norm_squared: float
    parameter_norm_squared: float
    total: float


@dataclass(frozen=True, eq=False)
class Interpolant:
    f: ComplexRational
    min_part_coeffs: np.ndarray
    parameter: ParameterH
    norm_squared: float
    min_norm_squared: float
    parameter_norm_squared: float
    interpolation_residual: float
    # span form: f = F^s P^{-1} fs_vector + sum beta_i d^k_i K_s(., w_i), terms (w_i, k_i, beta_i)
    fs_vector: np.ndarray = None
    kernel_terms: tuple = ()
    degenerate: bool = False
    truncated_nodes: tuple = field(default=())

    @property
    def decomposition(self):
        return (self.min_norm_squared, self.parameter_norm_squared)

    def __call__(self, z):
        return self.f(z)


def norm_decomposition(interp):
    m, p = interp.min_norm_squared, interp.parameter_norm_squared
    return NormDecomposition(m, p, m + p)


def additivity_residual(interp):
    """| ||f||^2 - (x P^{-1} x* + ||h||^2) | relative to the larger side."""
    total = norm_decomposition(interp).total
    scale = max(abs(total), abs(interp.norm_squared))
    return 0.0 if scale == 0 else abs(interp.norm_squared - total) / scale


def interpolation_residual(f, data):
    return float(np.max(np.abs(tangential_eval(f, data.realization) - data.x_star), initial=0.0))


def _span_norm_squared(data, system, fs, v, kernel_terms):
    """||F^s P^{-1} v + sum beta_i d^k_i K_s(., w_i)||^2 via reproducing identities.

    ``kernel_terms`` holds ``(w, k, beta)``; the section of order k is the
    k-th derivative of K_s(., w) in conj(w), which reproduces f^(k)(w).
    """
    c = solve_hermitian(system.P, v)
    total = np.vdot(v, c)
    if kernel_terms:
        beta = np.array([t[2] for t in kernel_terms])
        Fc = np.array([fs.derivative(w, k) @ c for w, k, _ in kernel_terms])
        total += 2 * np.real(np.vdot(beta, Fc))
        K = np.array([[kernel_eval(data.s, wj, wi, kj, ki) for wi, ki, _ in kernel_terms]
                      for wj, kj, _ in kernel_terms])
        total += beta.conj() @ K @ beta
    return float(np.real(total))


def _require_nondegenerate(system):
    if not system.is_positive_definite:
        raise SingularPick(
            f"Pick matrix not strictly positive (rank {system.rank} of {system.dim}); "
            "use degenerate_solve")


def minimal_interpolant(data, system, fs=None):
    """f_min = F^s P^{-1} x*, the solution of least H(K_s) norm."""
    _require_nondegenerate(system)
    if not system.solvable:
        raise Unsolvable("x* is not in the range of P")
    fs = fs or FsFunction(data, system.N)
    c = solve_hermitian(system.P, data.x_star)
    f = fs.apply(c)
    mn = float(np.real(np.vdot(data.x_star, c)))
    return Interpolant(f, c, ParameterH(ComplexRational.constant(0)), mn, mn, 0.0,
                       interpolation_residual(f, data), data.x_star.copy(), ())


def _span_poles(pair, kernel_terms, tol=1e-12):
    """(point, order) of the poles 1/conj(p) of F^s c + sum beta d^k K_s(., w)."""
    orders = [[p, m] for p, m in pair.node_layout]
    for w, k, _ in kernel_terms:
        for entry in orders:
            if abs(entry[0] - w) <= tol:
                entry[1] = max(entry[1], k + 1)
                break
        else:
            orders.append([w, k + 1])
    return tuple((1 / np.conj(p), m) for p, m in orders if p != 0)


def span_rational(data, fs, c, kernel_terms):
    """F^s c + sum beta_i d^k_i K_s(., w_i) as one normalized rational.

    With kernel terms the exact denominator is known, so the numerator is
    recovered by sampling on the circle and one inverse FFT. Multiplying out
    the separate denominators instead would stack repeated factors whenever
    a parameter point meets a node.
    """
    if not kernel_terms:
        num, den = fs.apply_parts(c)
        return normalize(ComplexRational(num, den), known_roots=fs.pole_factors)
    s = data.s
    poles = _span_poles(data.realization, kernel_terms)
    den = s.den.copy()
    for r, m in poles:
        den = npoly.polymul(den, npoly.polypow([1, -1 / r], m))
    # sections at w = 0 are polynomials of degree k with no pole factor in den
    size = den.size + max(s.num.size, s.den.size) + max(k for _, k, _ in kernel_terms)
    zs = np.exp(-2j * np.pi * np.arange(size) / size)
    vals = np.array([fs(z) @ c + sum(b * kernel_eval(s, z, w, 0, k) for w, k, b in kernel_terms)
                     for z in zs])
    num = np.fft.ifft(vals * npoly.polyval(zs, den))
    return normalize(ComplexRational(num, den), known_roots=poles)


def zero_order(u, w, tol=U_ZERO_TOL, max_order=MAX_ZERO_ORDER):
    """(k, u^(k)(w)) for the first derivative order with |u^(k)(w)| / k! > tol."""
    for k in range(max_order + 1):
        val = evaluate(u, w, k)
        if abs(val) / factorial(k) > tol:
            return k, val
    raise PointOnZeroOfU(f"u vanishes to order > {max_order} at {w}")


def parametrize(data, system, theta, h, fs=None):
    """f = F^s P^{-1} x* + u h with u = a - c s and h = sum alpha_i K_sigma(., w_i).

    u K_sigma(., w) is realized as (K_s(., w) - F^s P^{-1} F^s(w)*) / conj(u(w)).
    Where u has a zero of order k at w, both sides of that identity are
    differentiated k times in conj(w), giving derivative kernel sections.
    """
    _require_nondegenerate(system)
    s = data.s
    sigma = extract_sigma(theta, s)
    dist = coefficient_distance(h.sigma, sigma)
    if dist > SIGMA_MATCH_TOL:
        raise ParameterSigmaMismatch(f"parameter sigma differs from extracted sigma by {dist:.3e}")
    fs = fs or FsFunction(data, system.N)
    u = u_function(theta, s)
    kernel_terms = []
    v = data.x_star.astype(complex).copy()
    for w, alpha in h.terms:
        k, uk = zero_order(u, w)
        beta = alpha / np.conj(uk)
        kernel_terms.append((w, k, beta))
        v = v - beta * fs.derivative(w, k).conj()
    f = span_rational(data, fs, solve_hermitian(system.P, v), kernel_terms)
    c_min = solve_hermitian(system.P, data.x_star)
    mn = float(np.real(np.vdot(data.x_star, c_min)))
    total = _span_norm_squared(data, system, fs, v, kernel_terms)
    return Interpolant(f, c_min, h, total, mn, h.norm_squared(), interpolation_residual(f, data),
                       v, tuple(kernel_terms))


def truncation_orders(nodes, m, order=None):
    """Greedy m_i <= n_i with sum m_i = m, visiting nodes in ``order``."""
    order = list(range(len(nodes))) if order is None else list(order)
    if sorted(order) != list(range(len(nodes))):
        raise ValueError("order must be a permutation of the node indices")
    mi = [0] * len(nodes)
    left = m
    for k in order:
        mi[k] = min(nodes[k].multiplicity, left)
        left -= mi[k]
    return mi


def degenerate_solve(data, system, order=None):
    """Unique solution when s is a Blaschke product of degree rank P < n.

    Solves the truncated problem with sum m_i = rank P conditions and then
    checks every original condition; a violation raises InconsistentData.
    """
    if system.is_positive_definite:
        return minimal_interpolant(data, system)
    if not data.nodes:
        raise Unsupported("degenerate solve needs node (Jordan) data")
    if not system.solvable:
        raise Unsolvable(f"x* not in Ran P (kernel residual {system.solvability_residual:.3e})")
    m = system.rank
    s = data.s
    if not is_inner(s) or s.degree != m:
        raise Unsupported(
            f"singular Pick matrix (rank {m}) but s is not a Blaschke product of degree {m}")
    mi = truncation_orders(data.nodes, m, order)
    kept = tuple(NodeSpec(nd.point, k, nd.targets[:k]) for nd, k in zip(data.nodes, mi) if k)
    sub = ProblemData.from_nodes(kept, s)
    sub_system = compute_P(sub)
    if not sub_system.is_positive_definite:
        raise TruncationSingular(f"truncated Pick matrix has rank {sub_system.rank} of {sub_system.dim}")
    sol = minimal_interpolant(sub, sub_system)
    res = interpolation_residual(sol.f, data)
    if res > INTERPOLATION_TOL * max(1.0, float(np.max(np.abs(data.x_star), initial=0.0))):
        raise InconsistentData(f"truncated solution misses original conditions by {res:.3e}")
    return Interpolant(sol.f, sol.min_part_coeffs, sol.parameter, sol.norm_squared,
                       sol.min_norm_squared, 0.0, res, sol.fs_vector, (), True, kept)
