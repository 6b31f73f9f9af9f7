"""Pure numpy versions of the fiber-chart kernels.

A fiber chart over a base point is described by ``normals``, a complex
``(k, 2)`` array whose row ``j`` is the unit functional on the base line that
vanishes at the point ``s_j``. A chart point with moduli ``r_j = |a_j|^2``
has Gram matrix ``G = I + sum_j r_j n_j^H n_j`` and moment values
``mu_i = r_i n_i G^{-1} n_i^H``.
"""
import numpy as np


def _gram_inverse(normals, r):
    # r: (..., k) -> K: (..., 2, 2)
    outer = np.einsum("ja,jb->jab", normals.conj(), normals)
    g = np.eye(2) + np.einsum("...j,jab->...ab", r, outer)
    return np.linalg.inv(g)


def _q_matrix(normals, r):
    k_inv = _gram_inverse(normals, r)
    return np.einsum("ia,...ab,jb->...ij", normals, k_inv, normals.conj())


def chart_moments(normals, r):
    normals = np.asarray(normals, dtype=complex)
    r = np.asarray(r, dtype=float)
    q = _q_matrix(normals, r)
    return r * np.real(np.diagonal(q, axis1=-2, axis2=-1))


def chart_moments_batch(normals, r):
    return chart_moments(normals, np.atleast_2d(r))


def chart_jacobian(normals, r):
    """d mu_i / d r_j."""
    normals = np.asarray(normals, dtype=complex)
    r = np.asarray(r, dtype=float)
    q = _q_matrix(normals, r)
    return np.diag(np.real(np.diag(q))) - r[:, None] * np.abs(q) ** 2


def newton_moduli(normals, c, x0, tol=1e-15, maxiter=200):
    """Damped Newton on ``x = log r`` for ``chart_moments(exp x) = c``.

    Returns ``(x, iterations, residual)`` where residual is the max-norm
    moment error at ``x``. Stops early when the line search cannot reduce
    the residual any further.
    """
    normals = np.asarray(normals, dtype=complex)
    c = np.asarray(c, dtype=float)
    x = np.array(x0, dtype=float)
    res = float(np.max(np.abs(chart_moments(normals, np.exp(x)) - c)))
    it = 0
    while it < maxiter and res > tol:
        it += 1
        r = np.exp(x)
        f = chart_moments(normals, r) - c
        jac = chart_jacobian(normals, r) * r[None, :]
        try:
            dx = np.linalg.solve(jac, -f)
        except np.linalg.LinAlgError:
            break
        big = np.max(np.abs(dx))
        if big > 5.0:
            dx *= 5.0 / big
        lam = 1.0
        accepted = False
        while lam > 1e-10:
            xn = x + lam * dx
            resn = float(np.max(np.abs(chart_moments(normals, np.exp(xn)) - c)))
            if resn < res:
                accepted = True
                break
            lam *= 0.5
        if not accepted:
            break
        x, res = xn, resn
    return x, it, res
