"""Scalar complex rational functions.

Coefficients are stored in ascending degree order. A ``ComplexRational``
always carries a monic denominator; ``normalized()`` additionally cancels
numerically common roots of numerator and denominator.
"""

from dataclasses import dataclass

import numpy as np
import numpy.polynomial.polynomial as npoly
import scipy.optimize
import scipy.signal

from .errors import (DegreeCapExceeded, DivisionByZeroFunction, NonUnimodularConstant,
                     PoleEvaluation, ZeroOutsideDisk)

DEGREE_CAP = 4096
CANCEL_TOL = 1e-9
TRIM_RTOL = 1e-14
POLE_EPS = 1e-12
SCHUR_TOL = 1e-8


def _coeffs(c):
    c = np.atleast_1d(np.asarray(c, dtype=complex)).ravel()
    if not np.all(np.isfinite(c)):
        raise ValueError("non-finite polynomial coefficient")
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return c[:nz[-1] + 1].copy()


def _trim_relative(c, rtol=TRIM_RTOL):
    c = _coeffs(c)
    scale = np.max(np.abs(c))
    if scale == 0:
        return c
    keep = np.flatnonzero(np.abs(c) > rtol * scale)
    return c[:keep[-1] + 1]


class ComplexPolynomial:
    """Polynomial with complex coefficients, ascending order, trailing zeros trimmed."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = _coeffs(coeffs)
        if c.size - 1 > DEGREE_CAP:
            raise DegreeCapExceeded(f"degree {c.size - 1} exceeds cap {DEGREE_CAP}")
        c.setflags(write=False)
        self.coeffs = c

    @property
    def degree(self):
        return -1 if self.is_zero else self.coeffs.size - 1

    @property
    def is_zero(self):
        return self.coeffs.size == 1 and self.coeffs[0] == 0

    def __call__(self, z):
        return npoly.polyval(z, self.coeffs)

    def deriv(self, m=1):
        if self.coeffs.size <= m:
            return ComplexPolynomial([0])
        return ComplexPolynomial(npoly.polyder(self.coeffs, m))

    def roots(self):
        if self.degree < 1:
            return np.zeros(0, dtype=complex)
        return npoly.polyroots(self.coeffs).astype(complex)

    def __add__(self, other):
        return ComplexPolynomial(npoly.polyadd(self.coeffs, _as_poly(other).coeffs))

    def __sub__(self, other):
        return ComplexPolynomial(npoly.polysub(self.coeffs, _as_poly(other).coeffs))

    def __mul__(self, other):
        return ComplexPolynomial(npoly.polymul(self.coeffs, _as_poly(other).coeffs))

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return ComplexPolynomial(-self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, ComplexPolynomial):
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"ComplexPolynomial({self.coeffs.tolist()})"


def _as_poly(p):
    return p if isinstance(p, ComplexPolynomial) else ComplexPolynomial(p)


class ComplexRational:
    """``numerator / denominator`` with a monic, nonzero denominator."""

    __slots__ = ("num", "den")

    def __init__(self, numerator, denominator=(1,)):
        num = _as_poly(numerator).coeffs
        # a leading coefficient at rounding level would blow up the monic scaling
        den = _trim_relative(_as_poly(denominator).coeffs)
        if den.size == 1 and den[0] == 0:
            raise DivisionByZeroFunction("zero denominator")
        lead = den[-1]
        num = _coeffs(num / lead)
        den = _coeffs(den / lead)
        if max(num.size, den.size) - 1 > DEGREE_CAP:
            raise DegreeCapExceeded(f"degree exceeds cap {DEGREE_CAP}")
        num.setflags(write=False)
        den.setflags(write=False)
        self.num = num
        self.den = den

    # construction helpers
    @classmethod
    def constant(cls, c):
        return cls([c], [1])

    @classmethod
    def identity(cls):
        return cls([0, 1], [1])

    @property
    def numerator(self):
        return ComplexPolynomial(self.num)

    @property
    def denominator(self):
        return ComplexPolynomial(self.den)

    @property
    def is_zero(self):
        return self.num.size == 1 and self.num[0] == 0

    @property
    def degree(self):
        return max(self.num.size, self.den.size) - 1

    def poles(self):
        return self.denominator.roots()

    def zeros(self):
        return self.numerator.roots()

    def normalized(self, tol=CANCEL_TOL):
        return normalize(self, tol)

    def __call__(self, z):
        return evaluate(self, z, 0)

    def evaluate(self, z, derivative_order=0):
        return evaluate(self, z, derivative_order)

    def derivative(self, order=1):
        num, power = _derivative_numerator(self.num, self.den, order)
        den = np.asarray([1], dtype=complex)
        for _ in range(power):
            den = npoly.polymul(den, self.den)
        return ComplexRational(num, den)

    def conj_reflect(self):
        """Return r~ with r~(t) = conj(r(conj t))."""
        return ComplexRational(self.num.conj(), self.den.conj())

    def __add__(self, other):
        return rational_arithmetic(self, other, "add")

    def __radd__(self, other):
        return rational_arithmetic(other, self, "add")

    def __sub__(self, other):
        return rational_arithmetic(self, other, "sub")

    def __rsub__(self, other):
        return rational_arithmetic(other, self, "sub")

    def __mul__(self, other):
        return rational_arithmetic(self, other, "mul")

    def __rmul__(self, other):
        return rational_arithmetic(other, self, "mul")

    def __truediv__(self, other):
        return rational_arithmetic(self, other, "div")

    def __rtruediv__(self, other):
        return rational_arithmetic(other, self, "div")

    def __neg__(self):
        return ComplexRational(-self.num, self.den)

    def __eq__(self, other):
        if not isinstance(other, ComplexRational):
            return NotImplemented
        return np.array_equal(self.num, other.num) and np.array_equal(self.den, other.den)

    def __hash__(self):
        return hash((self.num.tobytes(), self.den.tobytes()))

    def __repr__(self):
        return f"ComplexRational(num={self.num.tolist()}, den={self.den.tolist()})"


def as_rational(x):
    if isinstance(x, ComplexRational):
        return x
    if isinstance(x, ComplexPolynomial):
        return ComplexRational(x, [1])
    if np.isscalar(x):
        return ComplexRational.constant(x)
    raise TypeError(f"cannot convert {type(x).__name__} to ComplexRational")


CLUSTER_RADIUS = 1e-2


def _taylor_residual(c, x, i, normwise=False):
    """|p^(i)(x)/i!| relative to the same sum taken over |coefficients| at |x|.

    With ``normwise`` every |coefficient| is replaced by the largest one,
    the backward error for perturbations bounded by the coefficient norm.
    """
    fact = float(np.prod(np.arange(1, i + 1))) if i else 1.0
    if c.size <= i:
        return 0.0
    val = abs(npoly.polyval(x, npoly.polyder(c, i))) / fact
    weights = np.full(c.size, np.max(np.abs(c))) if normwise else np.abs(c)
    scale = npoly.polyval(abs(x), npoly.polyder(weights, i)) / fact
    return val / scale if scale > 0 else 0.0


def _root_multiplicity(c, x, kmax, tol, normwise=False):
    """Largest j <= kmax with the first j Taylor coefficients of c at x negligible."""
    j = 0
    while j < kmax and _taylor_residual(c, x, j, normwise) <= tol:
        j += 1
    return j


def _clusters(roots):
    """Single-linkage groups of roots within CLUSTER_RADIUS * max(1, |r|)."""
    groups = []
    unused = list(range(roots.size))
    while unused:
        group = [unused.pop(0)]
        grew = True
        while grew:
            grew = False
            for k in list(unused):
                if any(abs(roots[k] - roots[g]) <= CLUSTER_RADIUS * max(1.0, abs(roots[g]))
                       for g in group):
                    group.append(k)
                    unused.remove(k)
                    grew = True
        groups.append(roots[group])
    return groups


def _candidate_factors(den, tol):
    """(center, multiplicity) pairs for the roots of ``den``.

    A cluster of k computed roots is accepted as one k-fold root at its
    centroid when ``den`` passes the derivative test there; the centroid of
    a perturbed multiple root is accurate even when individual roots are not.
    """
    out = []
    for cl in _clusters(npoly.polyroots(den).astype(complex)):
        if cl.size > 1:
            c = complex(np.mean(cl))
            if _root_multiplicity(den, c, cl.size, tol) == cl.size:
                out.append((c, cl.size))
                continue
        out.extend((complex(x), 1) for x in cl)
    return out


def _deflate(c, x):
    """Quotient of c by (z - x), remainder dropped.

    Synthetic division runs top-down for |x| <= 1 and bottom-up otherwise,
    the direction in which rounding is damped by 1/|x| instead of amplified.
    """
    n = c.size - 1
    if n < 1:
        return np.zeros(1, dtype=complex)
    b = np.empty(n, dtype=complex)
    if abs(x) <= 1:
        b[n - 1] = c[n]
        for k in range(n - 1, 0, -1):
            b[k - 1] = c[k] + x * b[k]
    else:
        b[0] = -c[0] / x
        for k in range(1, n):
            b[k] = (b[k - 1] - c[k]) / x
    return b


def _divide_root(c, x, j):
    for _ in range(j):
        c = _deflate(c, x)
    return c


def normalize(r, tol=CANCEL_TOL, known_roots=()):
    """Trim negligible leading coefficients, cancel near-common roots, make monic.

    A denominator root (or root cluster) is cancelled when the numerator's
    relative Taylor residuals there are at most ``tol``; this is a backward
    error test, so multiple roots located only to ``eps**(1/k)`` still cancel.

    ``known_roots`` lists ``(point, multiplicity)`` candidates that are tried
    first at their exact location; callers pass them when the common factor
    is known a priori, which avoids the centroid error of a computed cluster.
    """
    num = _trim_relative(r.num)
    den = _trim_relative(r.den)
    if num.size == 1 and num[0] == 0:
        return ComplexRational([0], [1])
    # decide every known factor on the undeflated pair before deflating,
    # so earlier divisions cannot perturb the residual tests of later roots.
    # Known factors inside the closed disk get the normwise test: their
    # coefficients come out of cancelling sums, so the rounding follows the
    # coefficient norm. Outside the disk the high coefficients dominate and
    # are much smaller than the norm, so the componentwise test is kept there.
    found = []
    for x, k in known_roots:
        x = complex(x)
        nw = abs(x) <= 1
        j = min(_root_multiplicity(num, x, min(k, num.size - 1), tol, normwise=nw),
                _root_multiplicity(den, x, min(k, den.size - 1), tol, normwise=nw))
        found.append((x, j))
    for x, j in found:
        num = _divide_root(num, x, j)
        den = _divide_root(den, x, j)
    while den.size > 1 and num.size > 1:
        for x, k in _candidate_factors(den, tol):
            j = _root_multiplicity(num, x, min(k, num.size - 1), tol)
            if j:
                num = _divide_root(num, x, j)
                den = _divide_root(den, x, j)
                break
        else:
            break
    return ComplexRational(num, den)


def rational_arithmetic(lhs, rhs, op):
    """Combine two rationals with ``op`` in {add, sub, mul, div}; result normalized."""
    a, b = as_rational(lhs), as_rational(rhs)
    same_den = a.den.size == b.den.size and np.allclose(a.den, b.den, rtol=1e-15, atol=0)
    if op in ("add", "sub"):
        sign = 1 if op == "add" else -1
        if same_den:
            out = ComplexRational(npoly.polyadd(a.num, sign * b.num), a.den)
        else:
            num = npoly.polyadd(npoly.polymul(a.num, b.den), sign * npoly.polymul(b.num, a.den))
            out = ComplexRational(num, npoly.polymul(a.den, b.den))
    elif op == "mul":
        out = ComplexRational(npoly.polymul(a.num, b.num), npoly.polymul(a.den, b.den))
    elif op == "div":
        if b.is_zero:
            raise DivisionByZeroFunction("division by the zero function")
        out = ComplexRational(npoly.polymul(a.num, b.den), npoly.polymul(a.den, b.num))
    else:
        raise ValueError(f"unknown operation {op!r}")
    return normalize(out)


def _derivative_numerator(num, den, order):
    """Numerator p_k with d^k/dz^k (num/den) = p_k / den^(k+1)."""
    if order < 0:
        raise ValueError("derivative order must be nonnegative")
    p = np.asarray(num, dtype=complex)
    q = np.asarray(den, dtype=complex)
    dq = npoly.polyder(q) if q.size > 1 else np.zeros(1, dtype=complex)
    power = 1
    for _ in range(order):
        dp = npoly.polyder(p) if p.size > 1 else np.zeros(1, dtype=complex)
        # d/dz (p / q^m) = (p' q - m p q') / q^(m+1)
        p = npoly.polysub(npoly.polymul(dp, q), power * npoly.polymul(p, dq))
        power += 1
    return _coeffs(p), power


def evaluate(r, z, derivative_order=0):
    """Value of the ``derivative_order``-th derivative (no factorial division)."""
    r = as_rational(r)
    z_arr = np.asarray(z, dtype=complex)
    qz = npoly.polyval(z_arr, r.den)
    if np.any(np.abs(qz) <= POLE_EPS):
        raise PoleEvaluation(f"evaluation at a pole of {r!r}")
    if derivative_order == 0:
        out = npoly.polyval(z_arr, r.num) / qz
    else:
        p, power = _derivative_numerator(r.num, r.den, derivative_order)
        out = npoly.polyval(z_arr, p) / qz ** power
    return complex(out) if out.ndim == 0 else out


def taylor_coefficients(r, count):
    """First ``count`` Taylor coefficients at 0."""
    r = as_rational(r)
    if r.den[0] == 0:
        raise PoleEvaluation("pole at the origin")
    impulse = np.zeros(count, dtype=complex)
    impulse[0] = 1
    return scipy.signal.lfilter(r.num, r.den, impulse)


def coefficient_distance(r1, r2, tol=CANCEL_TOL):
    """Max coefficient mismatch of the normalized forms, relative to coefficient scale."""
    a, b = normalize(as_rational(r1), tol), normalize(as_rational(r2), tol)
    out = 0.0
    for x, y in ((a.num, b.num), (a.den, b.den)):
        m = max(x.size, y.size)
        xp = np.pad(x, (0, m - x.size))
        yp = np.pad(y, (0, m - y.size))
        scale = max(1.0, np.max(np.abs(xp)), np.max(np.abs(yp)))
        out = max(out, float(np.max(np.abs(xp - yp))) / scale)
    return out


def blaschke(zeros, unimodular_constant=1.0):
    """Finite Blaschke product c * prod (z - a) / (1 - conj(a) z)."""
    c = complex(unimodular_constant)
    if abs(abs(c) - 1) > 1e-12:
        raise NonUnimodularConstant(f"|c| = {abs(c)!r} is not 1")
    num = np.array([c])
    den = np.array([1], dtype=complex)
    for a in zeros:
        a = complex(a)
        if abs(a) >= 1:
            raise ZeroOutsideDisk(f"zero {a} not in the open unit disk")
        num = npoly.polymul(num, [-a, 1])
        den = npoly.polymul(den, [1, -a.conjugate()])
    return ComplexRational(num, den)


@dataclass(frozen=True)
class SchurReport:
    boundary_sup: float
    interior_max: float
    grid_size: int
    is_schur: bool
    boundary_inf: float = 0.0
    poles_in_closed_disk: bool = False


def _boundary_modulus(r, theta):
    return np.abs(evaluate(r, np.exp(1j * np.asarray(theta))))


def schur_check(r, grid_size=1024, tol=SCHUR_TOL):
    """Sample |r| on the circle and a polar interior grid; flag poles in the closed disk."""
    if grid_size < 64:
        raise ValueError("grid_size must be at least 64")
    r = normalize(as_rational(r))
    poles = r.poles()
    in_disk = bool(np.any(np.abs(poles) <= 1 + 1e-9)) if poles.size else False
    if in_disk:
        return SchurReport(np.inf, np.inf, grid_size, False, 0.0, True)
    theta = 2 * np.pi * np.arange(grid_size) / grid_size
    mod = _boundary_modulus(r, theta)
    sup, inf = float(mod.max()), float(mod.min())
    h = 2 * np.pi / grid_size
    # polish the largest and smallest grid samples with a bounded 1-D search
    for k in np.argsort(mod)[-3:]:
        res = scipy.optimize.minimize_scalar(
            lambda t: -_boundary_modulus(r, t), bounds=(theta[k] - h, theta[k] + h),
            method="bounded", options={"xatol": 1e-12})
        sup = max(sup, -float(res.fun))
    for k in np.argsort(mod)[:3]:
        res = scipy.optimize.minimize_scalar(
            lambda t: _boundary_modulus(r, t), bounds=(theta[k] - h, theta[k] + h),
            method="bounded", options={"xatol": 1e-12})
        inf = min(inf, float(res.fun))
    radii = np.linspace(0, 1, 17)[:-1]
    ang = 2 * np.pi * np.arange(max(grid_size // 4, 16)) / max(grid_size // 4, 16)
    pts = (radii[:, None] * np.exp(1j * ang)[None, :]).ravel()
    interior = float(np.abs(evaluate(r, pts)).max())
    return SchurReport(sup, interior, grid_size, sup <= 1 + tol, inf, False)


def is_inner(r, tol=1e-8, grid_size=1024):
    """True when r is Schur with |r| = 1 on the circle (a finite Blaschke product)."""
    rep = schur_check(r, grid_size)
    return rep.is_schur and rep.boundary_inf >= 1 - tol
