"""De Branges-Rovnyak kernel K_s(z, w) = (1 - s(z) conj s(w)) / (1 - z conj w)
and its mixed derivatives, computed in closed form."""

from math import comb, factorial

import numpy as np

from .rational import as_rational, evaluate


def szego_mixed_derivative(z, t, p, q):
    """d^p/dz^p d^q/dt^q of 1/(1 - z t)."""
    w = 1 - z * t
    total = 0j
    for j in range(min(p, q) + 1):
        total += (comb(p, j) * factorial(p + q - j) / factorial(q - j)
                  * z ** (q - j) * t ** (p - j) / w ** (p + q - j + 1))
    return factorial(q) * total


def kernel_mixed_derivative(s, z, zeta, dz, dzeta_bar):
    """d^dz/dz^dz d^r/d(conj zeta)^r of K_s(z, zeta) = (1 - s(z) conj s(zeta)) / (1 - z conj zeta)."""
    s = as_rational(s)
    t = np.conj(zeta)
    sz = [evaluate(s, z, a) for a in range(dz + 1)]
    st = [np.conj(evaluate(s, zeta, b)) for b in range(dzeta_bar + 1)]
    out = szego_mixed_derivative(z, t, dz, dzeta_bar)
    for a in range(dz + 1):
        for b in range(dzeta_bar + 1):
            out -= (comb(dz, a) * comb(dzeta_bar, b) * sz[a] * st[b]
                    * szego_mixed_derivative(z, t, dz - a, dzeta_bar - b))
    return complex(out)


def kernel_eval(s, z, zeta, dz_order=0, dzeta_bar_order=0):
    """Mixed derivative of K_s at (z, zeta); derivatives in z and in conj(zeta)."""
    if dz_order == 0 and dzeta_bar_order == 0:
        s = as_rational(s)
        return complex((1 - evaluate(s, z) * np.conj(evaluate(s, zeta))) / (1 - z * np.conj(zeta)))
    return kernel_mixed_derivative(s, z, zeta, dz_order, dzeta_bar_order)


def kernel_gram(s, points):
    """[K_s(z_i, z_j)]_{i,j}."""
    pts = np.asarray(points, dtype=complex)
    sv = np.asarray(evaluate(as_rational(s), pts)) if pts.size else pts
    return (1 - np.outer(sv, sv.conj())) / (1 - np.outer(pts, pts.conj()))
