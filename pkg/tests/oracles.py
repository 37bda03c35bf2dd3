"""Independent reference implementations used as test oracles.

Everything here recomputes quantities by brute force, structured so that
it shares no code path with the production implementations it checks.
"""
import itertools
import math

import numpy as np

from grassvar.multiindex import enumerate_multiindices, permutation_sign


def reconstruct_full_tensor(comps, k, m):
    """Spread increasing-index components over all k-tuples by sign."""
    T = np.zeros((m,) * k)
    for r, I in enumerate(enumerate_multiindices(k, m)):
        for perm in itertools.permutations(I.indices):
            T[tuple(p - 1 for p in perm)] = permutation_sign(perm) * comps[r]
    return T


def lift_full_tensor_sum(J, comps, k):
    """Lift of a k-vector via the full sum over all index tuples.

    The input components are sign-reconstructed over every k-tuple, the
    Jacobian product is summed over all domain and codomain tuples, and the
    increasing-index output is read off by antisymmetrizing the redundant
    codomain sum (one 1/k! compensates its k!-fold multiplicity; the
    reconstruction sum over domain tuples is absorbed by forming
    determinants, so it carries no extra factor).
    """
    m, n = J.shape
    full_in = reconstruct_full_tensor(comps, k, n)
    T = np.zeros((m,) * k)
    for sigma in itertools.product(range(m), repeat=k):
        acc = 0.0
        for i in itertools.product(range(n), repeat=k):
            prod = 1.0
            for a in range(k):
                prod *= J[sigma[a], i[a]]
            acc += prod * full_in[i]
        T[sigma] = acc

    idx_out = enumerate_multiindices(k, m)
    out = np.zeros(len(idx_out))
    for r, I in enumerate(idx_out):
        acc = 0.0
        for perm in itertools.permutations(I.indices):
            acc += permutation_sign(perm) * T[tuple(p - 1 for p in perm)]
        out[r] = acc / math.factorial(k)
    return out


def wedge_square_brute(comps, m):
    """Full-tensor expansion of Xi ^ Xi for a 2-vector; 4-tensor components
    antisymmetrized into increasing 4-tuples."""
    T = reconstruct_full_tensor(comps, 2, m)
    if m < 4:
        return np.zeros(0)
    idx_out = enumerate_multiindices(4, m)
    out = np.zeros(len(idx_out))
    for r, I in enumerate(idx_out):
        acc = 0.0
        for perm in itertools.permutations(I.indices):
            a = (perm[0] - 1, perm[1] - 1)
            b = (perm[2] - 1, perm[3] - 1)
            acc += permutation_sign(perm) * T[a] * T[b]
        out[r] = acc / (math.factorial(2) * math.factorial(2))
    return out


def gauss_reference_1d(g, a, b, order=40, cells=64):
    """High-order reference quadrature, independent of the package engine."""
    x, w = np.polynomial.legendre.leggauss(order)
    total = 0.0
    h = (b - a) / cells
    for c in range(cells):
        lo = a + c * h
        nodes = lo + 0.5 * h * (x + 1.0)
        total += 0.5 * h * sum(wi * g(t) for wi, t in zip(w, nodes))
    return total
