"""Output-stable pairs (E, T), the tangential functional calculus f(T*)E*
and the observability map x -> E (I - zT)^{-1} x.

Jordan data follow one convention throughout: each node z_i contributes an
upper-triangular Jordan block with conj(z_i) on the diagonal, and E has a 1
in the first slot of each block. Then f(T*)E* stacks f^(j)(z_i)/j!.
A lower-triangular cell with eigenvalue z_i (the transpose-conjugate) gives
the same conditions through A = T*.
"""

from dataclasses import dataclass
from math import factorial

import numpy as np
import numpy.polynomial.polynomial as npoly

from .errors import DuplicateNode, InvalidRealization, PoleAtNode, PoleEvaluation, ValidationError
from .numerics import spectral_radius
from .rational import ComplexRational, as_rational, evaluate, schur_check

NODE_RADIUS_MAX = 1 - 1e-8
NODE_SEPARATION = 1e-10
OBSERVABILITY_TOL = 1e-10


@dataclass(frozen=True)
class NodeSpec:
    point: complex
    multiplicity: int
    targets: tuple

    def __post_init__(self):
        object.__setattr__(self, "point", complex(self.point))
        object.__setattr__(self, "targets", tuple(complex(t) for t in self.targets))
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")
        if len(self.targets) != self.multiplicity:
            raise ValueError(
                f"node {self.point}: {len(self.targets)} targets for multiplicity {self.multiplicity}")
        if abs(self.point) > NODE_RADIUS_MAX:
            raise ValueError(f"node {self.point} outside open unit disk")


@dataclass(frozen=True, eq=False)
class RealizationPair:
    T: np.ndarray
    E: np.ndarray
    node_layout: tuple = ()

    def __post_init__(self):
        T = np.atleast_2d(np.asarray(self.T, dtype=complex))
        E = np.asarray(self.E, dtype=complex).ravel()
        n = T.shape[0]
        if T.shape != (n, n) or E.shape != (n,):
            raise InvalidRealization(f"shapes T {T.shape} and E {E.shape} are inconsistent")
        rho = spectral_radius(T)
        if rho >= 1:
            raise InvalidRealization(f"spectral radius {rho:.6g} is not below 1")
        O = observability_matrix(E, T)
        sv = np.linalg.svd(O, compute_uv=False)
        if n and sv[-1] <= OBSERVABILITY_TOL * sv[0]:
            raise InvalidRealization("pair (E, T) is not observable")
        T.setflags(write=False)
        E.setflags(write=False)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "node_layout", tuple((complex(p), int(m)) for p, m in self.node_layout))

    @property
    def dim(self):
        return self.T.shape[0]

    @property
    def is_jordan(self):
        return bool(self.node_layout)

    def eigenvalues(self):
        if self.is_jordan:
            return np.array([np.conj(p) for p, _ in self.node_layout], dtype=complex)
        return np.linalg.eigvals(self.T)

    def resolvent_denominator(self):
        """Coefficients (ascending) of det(I - zT)."""
        if self.is_jordan:
            c = np.array([1], dtype=complex)
            for p, m in self.node_layout:
                for _ in range(m):
                    c = npoly.polymul(c, [1, -np.conj(p)])
            return c
        # det(I - zT) has the char-poly coefficients in reversed order
        return np.poly(self.T).astype(complex) if self.dim else np.array([1], dtype=complex)

    def adjugate_coefficients(self):
        """Matrices B_k with adj(I - zT) = sum_k z^k B_k, k < n."""
        n = self.dim
        q = self.resolvent_denominator()
        B = np.zeros((max(n, 1), n, n), dtype=complex)
        if n == 0:
            return B[:0]
        B[0] = np.eye(n)
        for k in range(1, n):
            B[k] = self.T @ B[k - 1] + (q[k] if k < q.size else 0) * np.eye(n)
        return B


def observability_matrix(E, T):
    n = T.shape[0]
    rows = []
    row = np.asarray(E, dtype=complex)
    for _ in range(n):
        rows.append(row)
        row = row @ T
    return np.array(rows).reshape(n, n)


@dataclass(frozen=True, eq=False)
class ProblemData:
    realization: RealizationPair
    x_star: np.ndarray
    schur_function: ComplexRational
    nodes: tuple = ()

    def __post_init__(self):
        x = np.asarray(self.x_star, dtype=complex).ravel()
        if x.shape != (self.realization.dim,):
            raise ValidationError(
                f"dimension mismatch: x* has length {x.size}, state dimension is {self.realization.dim}")
        s = as_rational(self.schur_function).normalized()
        report = schur_check(s)
        if not report.is_schur:
            raise ValidationError(
                f"function fails Schur check, boundary sup {report.boundary_sup:.6g}")
        x.setflags(write=False)
        object.__setattr__(self, "x_star", x)
        object.__setattr__(self, "schur_function", s)
        object.__setattr__(self, "nodes", tuple(self.nodes))

    @property
    def dim(self):
        return self.realization.dim

    @property
    def s(self):
        return self.schur_function

    @classmethod
    def from_nodes(cls, nodes, s):
        pair, x = build_jordan_realization(nodes)
        return cls(pair, x, s, tuple(nodes))


def build_jordan_realization(nodes):
    """Jordan pair and stacked targets for a list of ``NodeSpec``."""
    nodes = list(nodes)
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            if abs(a.point - b.point) <= NODE_SEPARATION:
                raise DuplicateNode(f"nodes {a.point} and {b.point} coincide")
    n = sum(nd.multiplicity for nd in nodes)
    T = np.zeros((n, n), dtype=complex)
    E = np.zeros(n, dtype=complex)
    x = []
    k = 0
    for nd in nodes:
        m = nd.multiplicity
        T[k:k + m, k:k + m] = np.conj(nd.point) * np.eye(m) + np.eye(m, k=1)
        E[k] = 1
        x.extend(nd.targets)
        k += m
    layout = tuple((nd.point, nd.multiplicity) for nd in nodes)
    return RealizationPair(T, E, layout), np.array(x, dtype=complex)


def tangential_eval(f, pair):
    """f(T*)E* for rational f."""
    f = as_rational(f)
    if pair.is_jordan:
        out = []
        for p, m in pair.node_layout:
            for j in range(m):
                try:
                    out.append(evaluate(f, p, j) / factorial(j))
                except PoleEvaluation as exc:
                    raise PoleAtNode(f"f has a pole at node {p}") from exc
        return np.array(out, dtype=complex)
    return matrix_functional_calculus(f, pair)


def _matrix_polyval(coeffs, A):
    n = A.shape[0]
    out = np.zeros((n, n), dtype=complex)
    for c in coeffs[::-1]:
        out = out @ A + c * np.eye(n)
    return out


def matrix_functional_calculus(f, pair):
    """q(T*)^{-1} p(T*) E* for f = p/q, valid for any stable pair."""
    f = as_rational(f)
    Ts = pair.T.conj().T
    Q = _matrix_polyval(f.den, Ts)
    if pair.dim and np.linalg.cond(Q) > 1e12:
        raise PoleAtNode("denominator of f vanishes on the spectrum of T*")
    return np.linalg.solve(Q, _matrix_polyval(f.num, Ts) @ pair.E.conj()) if pair.dim else np.zeros(0, complex)


def observability_eval(pair, x, z):
    """E (I - zT)^{-1} x."""
    n = pair.dim
    x = np.asarray(x, dtype=complex)
    return complex(pair.E @ np.linalg.solve(np.eye(n) - z * pair.T, x))


def observability_coefficients(pair, x, count):
    """Taylor coefficients E T^k x, k < count."""
    out = np.empty(count, dtype=complex)
    v = np.asarray(x, dtype=complex)
    for k in range(count):
        out[k] = pair.E @ v
        v = pair.T @ v
    return out


def resolvent_numerator(pair, left, right):
    """Coefficients of left adj(I - zT) right, shape (rows, cols, n), ascending.

    The matrix polynomial has degree below n, so its values
    det(I - zT) left (I - zT)^{-1} right at the n-th roots of unity determine
    it through one inverse FFT. Unlike the adjugate recursion this is
    unitary in the samples and does not amplify rounding.
    """
    left = np.atleast_2d(np.asarray(left, dtype=complex))
    right = np.asarray(right, dtype=complex)
    right = right.reshape(-1, 1) if right.ndim == 1 else right
    n = pair.dim
    if n == 0:
        return np.zeros((left.shape[0], right.shape[1], 0), dtype=complex)
    q = pair.resolvent_denominator()
    zk = np.exp(-2j * np.pi * np.arange(n) / n)
    vals = np.empty((left.shape[0], right.shape[1], n), dtype=complex)
    eye = np.eye(n)
    for k, z in enumerate(zk):
        vals[:, :, k] = npoly.polyval(z, q) * (left @ np.linalg.solve(eye - z * pair.T, right))
    return np.fft.ifft(vals, axis=-1)


def row_resolvent_rationals(pair, row, vec):
    """Numerator coefficients of row adj(I - zT) vec (degree < n) and det(I - zT)."""
    num = resolvent_numerator(pair, row, vec)[0, 0]
    return num, pair.resolvent_denominator()


def row_resolvent(pair, row, vec):
    """row (I - zT)^{-1} vec as a ComplexRational."""
    num, den = row_resolvent_rationals(pair, row, vec)
    return ComplexRational(num if num.size else [0], den).normalized()
