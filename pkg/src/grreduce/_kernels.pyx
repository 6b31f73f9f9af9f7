# cython: language_level=3
"""Compiled fiber-chart kernels; same API and results as ``_fallback``."""
import numpy as np

cimport cython
from libc.math cimport exp, fabs
from libc.stdlib cimport free, malloc


cdef extern from "complex.h" nogil:
    double creal(double complex)
    double cimag(double complex)
    double complex conj(double complex)


cdef inline double abs2(double complex z) nogil:
    return creal(z) * creal(z) + cimag(z) * cimag(z)


cdef void _inverse_gram(const double complex[:, ::1] nr, const double* r, Py_ssize_t k,
                        double complex* kinv) nogil:
    # kinv = (I + sum_j r_j n_j^H n_j)^{-1}, row-major 2x2
    cdef double g00 = 1.0, g11 = 1.0, det
    cdef double complex g01 = 0.0
    cdef Py_ssize_t j
    for j in range(k):
        g00 += r[j] * abs2(nr[j, 0])
        g11 += r[j] * abs2(nr[j, 1])
        g01 += r[j] * conj(nr[j, 0]) * nr[j, 1]
    det = g00 * g11 - abs2(g01)
    kinv[0] = g11 / det
    kinv[1] = -g01 / det
    kinv[2] = -conj(g01) / det
    kinv[3] = g00 / det


cdef inline double complex _q(const double complex[:, ::1] nr, const double complex* kinv,
                              Py_ssize_t i, Py_ssize_t j) nogil:
    # n_i K n_j^H
    cdef double complex a0 = nr[i, 0] * kinv[0] + nr[i, 1] * kinv[2]
    cdef double complex a1 = nr[i, 0] * kinv[1] + nr[i, 1] * kinv[3]
    return a0 * conj(nr[j, 0]) + a1 * conj(nr[j, 1])


cdef void _moments(const double complex[:, ::1] nr, const double* r, Py_ssize_t k,
                   double* mu) nogil:
    cdef double complex kinv[4]
    cdef Py_ssize_t i
    _inverse_gram(nr, r, k, kinv)
    for i in range(k):
        mu[i] = r[i] * creal(_q(nr, kinv, i, i))


cdef double _residual(const double complex[:, ::1] nr, const double* x, const double* c,
                      Py_ssize_t k, double* r, double* mu) nogil:
    cdef Py_ssize_t i
    cdef double res = 0.0, d
    for i in range(k):
        r[i] = exp(x[i])
    _moments(nr, r, k, mu)
    for i in range(k):
        d = fabs(mu[i] - c[i])
        if d > res:
            res = d
    return res


cdef int _solve(double* a, double* b, Py_ssize_t k) nogil:
    # Gaussian elimination with partial pivoting, a is k x k row-major; b overwritten.
    cdef Py_ssize_t i, j, p, col
    cdef double best, t, f
    for col in range(k):
        p = col
        best = fabs(a[col * k + col])
        for i in range(col + 1, k):
            if fabs(a[i * k + col]) > best:
                best = fabs(a[i * k + col])
                p = i
        if best == 0.0:
            return -1
        if p != col:
            for j in range(k):
                t = a[col * k + j]
                a[col * k + j] = a[p * k + j]
                a[p * k + j] = t
            t = b[col]
            b[col] = b[p]
            b[p] = t
        for i in range(col + 1, k):
            f = a[i * k + col] / a[col * k + col]
            for j in range(col, k):
                a[i * k + j] -= f * a[col * k + j]
            b[i] -= f * b[col]
    for i in range(k - 1, -1, -1):
        t = b[i]
        for j in range(i + 1, k):
            t -= a[i * k + j] * b[j]
        b[i] = t / a[i * k + i]
    return 0


def chart_moments(normals, r):
    cdef const double complex[:, ::1] nr = np.ascontiguousarray(normals, dtype=complex)
    cdef double[::1] rv = np.ascontiguousarray(r, dtype=float).copy()
    cdef Py_ssize_t k = nr.shape[0]
    out = np.empty(k)
    cdef double[::1] mu = out
    _moments(nr, &rv[0], k, &mu[0])
    return out


def chart_moments_batch(normals, r):
    cdef const double complex[:, ::1] nr = np.ascontiguousarray(normals, dtype=complex)
    cdef double[:, ::1] rv = np.ascontiguousarray(np.atleast_2d(r), dtype=float).copy()
    cdef Py_ssize_t m = rv.shape[0], k = nr.shape[0], row
    out = np.empty((m, k))
    cdef double[:, ::1] mu = out
    with nogil:
        for row in range(m):
            _moments(nr, &rv[row, 0], k, &mu[row, 0])
    return out


def chart_jacobian(normals, r):
    cdef const double complex[:, ::1] nr = np.ascontiguousarray(normals, dtype=complex)
    cdef double[::1] rv = np.ascontiguousarray(r, dtype=float).copy()
    cdef Py_ssize_t k = nr.shape[0], i, j
    cdef double complex kinv[4]
    out = np.empty((k, k))
    cdef double[:, ::1] jac = out
    _inverse_gram(nr, &rv[0], k, kinv)
    for i in range(k):
        for j in range(k):
            jac[i, j] = -rv[i] * abs2(_q(nr, kinv, i, j))
        jac[i, i] += creal(_q(nr, kinv, i, i))
    return out


def newton_moduli(normals, c, x0, double tol=1e-15, int maxiter=200):
    """Damped Newton on ``x = log r``; see ``_fallback.newton_moduli``."""
    cdef const double complex[:, ::1] nr = np.ascontiguousarray(normals, dtype=complex)
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=float).copy()
    x_out = np.array(x0, dtype=float)
    cdef double[::1] x = x_out
    cdef Py_ssize_t k = nr.shape[0], i, j
    cdef double* r = <double*> malloc(k * sizeof(double))
    cdef double* mu = <double*> malloc(k * sizeof(double))
    cdef double* f = <double*> malloc(k * sizeof(double))
    cdef double* dx = <double*> malloc(k * sizeof(double))
    cdef double* xn = <double*> malloc(k * sizeof(double))
    cdef double* jac = <double*> malloc(k * k * sizeof(double))
    cdef double complex kinv[4]
    cdef double res, resn, lam, big
    cdef int it = 0, accepted
    if not (r and mu and f and dx and xn and jac):
        free(r); free(mu); free(f); free(dx); free(xn); free(jac)
        raise MemoryError()
    try:
        with nogil:
            res = _residual(nr, &x[0], &cv[0], k, r, mu)
            while it < maxiter and res > tol:
                it += 1
                for i in range(k):
                    r[i] = exp(x[i])
                _moments(nr, r, k, mu)
                _inverse_gram(nr, r, k, kinv)
                for i in range(k):
                    f[i] = mu[i] - cv[i]
                    dx[i] = -f[i]
                    for j in range(k):
                        jac[i * k + j] = -r[i] * abs2(_q(nr, kinv, i, j)) * r[j]
                    jac[i * k + i] += creal(_q(nr, kinv, i, i)) * r[i]
                if _solve(jac, dx, k) != 0:
                    break
                big = 0.0
                for i in range(k):
                    if fabs(dx[i]) > big:
                        big = fabs(dx[i])
                if big > 5.0:
                    for i in range(k):
                        dx[i] *= 5.0 / big
                lam = 1.0
                accepted = 0
                while lam > 1e-10:
                    for i in range(k):
                        xn[i] = x[i] + lam * dx[i]
                    resn = _residual(nr, xn, &cv[0], k, r, mu)
                    if resn < res:
                        accepted = 1
                        break
                    lam *= 0.5
                if not accepted:
                    break
                for i in range(k):
                    x[i] = xn[i]
                res = resn
    finally:
        free(r); free(mu); free(f); free(dx); free(xn); free(jac)
    return x_out, it, res
