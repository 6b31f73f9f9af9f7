"""Reference computations that share no code with the package.

Exact rational elimination, explicit determinant loops and brute-force
searches; slow but easy to audit.
"""
from fractions import Fraction
from itertools import combinations

import numpy as np


def _frac_matrix(rows):
    return [[Fraction(x) for x in row] for row in rows]


def rational_rref(rows):
    """Reduced row echelon form over Q; returns (matrix, pivot columns)."""
    m = _frac_matrix(rows)
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][c]
        m[r] = [x / lead for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rational_rank(rows):
    return len(rational_rref(rows)[1])


def rational_nullspace(rows):
    """Basis of {x : M x = 0} over Q, one list per vector."""
    m, pivots = rational_rref(rows)
    ncols = len(rows[0])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x[p] = -m[i][f]
        basis.append(x)
    return basis


def span_contains(columns, x):
    """Exact test that x is in the column span of ``columns`` (lists)."""
    rows = [list(r) for r in zip(*columns)]
    aug = [r + [xi] for r, xi in zip(rows, x)]
    return rational_rank(rows) == rational_rank(aug)


def minors_loop(u, v):
    """2x2 determinants in lexicographic pair order, by explicit loops."""
    out = []
    for i, j in combinations(range(len(u)), 2):
        out.append(u[i] * v[j] - u[j] * v[i])
    return np.array(out, dtype=complex)


def max_overlap_grid(u, v, i, steps=400):
    """max |<e_i, x>|^2 over unit x in span(u, v) by a grid over the sphere.

    x = cos(t) u + e^{ip} sin(t) v with (u, v) orthonormal covers all unit
    vectors up to phase.
    """
    best = 0.0
    for t in np.linspace(0.0, np.pi / 2, steps):
        for p in np.linspace(0.0, 2 * np.pi, steps, endpoint=False):
            x = np.cos(t) * u + np.exp(1j * p) * np.sin(t) * v
            best = max(best, abs(x[i]) ** 2)
    return best


def gram_schmidt(cols):
    """Classical Gram-Schmidt with one reorthogonalization, column lists."""
    out = []
    for c in cols:
        c = np.array(c, dtype=complex)
        for _ in range(2):
            for q in out:
                c = c - q * np.vdot(q, c)
        out.append(c / np.linalg.norm(c))
    return np.array(out).T
