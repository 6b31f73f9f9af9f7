"""Gr(1, n) inside P(Λ²C^{n+1}): Plücker coordinates, relations and the
Fubini-Study form on tangent vectors.

Coordinates ``w_ij`` (i < j) are stored in lexicographic order, see
:func:`pair_list`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Union

import numpy as np

from .errors import NotDecomposable, StepTooSmall
from .projective import ProjectiveSubspace

TAU_PLUCK = 1e-9

# Below sqrt(eps) a central difference cancels more than half the digits.
MIN_FD_STEP = float(np.sqrt(np.finfo(float).eps))


@lru_cache(maxsize=None)
def pair_list(n: int) -> tuple:
    """Index pairs (i, j), 0 <= i < j <= n, in lexicographic order."""
    return tuple((i, j) for i in range(n + 1) for j in range(i + 1, n + 1))


@lru_cache(maxsize=None)
def _pair_arrays(n: int):
    p = np.array(pair_list(n), dtype=np.intp).reshape(-1, 2)
    return p[:, 0].copy(), p[:, 1].copy()


@lru_cache(maxsize=None)
def pair_index(n: int) -> dict:
    return {p: k for k, p in enumerate(pair_list(n))}


@lru_cache(maxsize=None)
def incidence_matrix(n: int) -> np.ndarray:
    """0/1 matrix, rows = points i, columns = pairs containing i."""
    m = np.zeros((n + 1, len(pair_list(n))))
    for col, (i, j) in enumerate(pair_list(n)):
        m[i, col] = m[j, col] = 1.0
    m.setflags(write=False)
    return m


@lru_cache(maxsize=None)
def _relation_indices(n: int):
    idx = pair_index(n)
    rows = []
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            for k in range(j + 1, n + 1):
                for l in range(k + 1, n + 1):
                    rows.append((idx[i, j], idx[k, l], idx[i, k], idx[j, l], idx[i, l], idx[j, k]))
    return np.array(rows, dtype=np.intp).reshape(-1, 6)


def dimension_from_length(length: int) -> int:
    n = int(round((np.sqrt(8 * length + 1) + 1) / 2)) - 1
    if (n + 1) * n // 2 != length or n < 1:
        raise ValueError(f"{length} is not a Plücker vector length C(n+1, 2)")
    return n


@dataclass(frozen=True, eq=False)
class PluckerLine:
    """Unit-norm Plücker vector of a line in CP^n.

    The constructor normalizes but does not check the Plücker relations, so
    corrupted vectors can be represented; use :func:`plucker_residual`.
    """

    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=complex).reshape(-1)
        norm = np.linalg.norm(w)
        if not np.isfinite(norm) or norm == 0.0:
            raise ValueError("Plücker vector must be finite and nonzero")
        w = w / norm
        w.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "n", dimension_from_length(w.size))

    def coord(self, i: int, j: int) -> complex:
        if i == j:
            return 0j
        sign = 1.0
        if i > j:
            i, j, sign = j, i, -1.0
        return sign * self.w[pair_index(self.n)[i, j]]

    def overlap(self, other: "PluckerLine") -> float:
        """|<w1, w2>|, equal to 1 iff the two represent the same line."""
        return float(abs(np.vdot(self.w, other.w)))

    def __repr__(self):
        return f"PluckerLine(n={self.n}, w={np.array2string(self.w, precision=4)})"


@dataclass(frozen=True, eq=False)
class PluckerTangent:
    """Tangent vector at a unit Plücker vector, orthogonal to it."""

    xi: np.ndarray

    def __post_init__(self):
        xi = np.array(self.xi, dtype=complex).reshape(-1)
        xi.setflags(write=False)
        object.__setattr__(self, "xi", xi)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.xi))

    def rotate(self) -> "PluckerTangent":
        """Image under the complex structure (multiplication by i)."""
        return PluckerTangent(1j * self.xi)


def minors(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """All 2x2 minors ``u_i v_j - u_j v_i``; works on stacked rows too."""
    u = np.asarray(u)
    v = np.asarray(v)
    a, b = _pair_arrays(u.shape[-1] - 1)
    return u[..., a] * v[..., b] - u[..., b] * v[..., a]


def plucker_from_line(line: ProjectiveSubspace) -> PluckerLine:
    if line.proj_dim != 1:
        raise ValueError("expected a projective line")
    return PluckerLine(minors(line.basis[:, 0], line.basis[:, 1]))


def plucker_residual(w) -> float:
    """Largest three-term Plücker relation on the normalized vector."""
    vec = w.w if isinstance(w, PluckerLine) else np.asarray(w, dtype=complex)
    vec = vec / np.linalg.norm(vec)
    n = dimension_from_length(vec.size)
    if n < 3:
        return 0.0
    r = _relation_indices(n)
    rel = vec[r[:, 0]] * vec[r[:, 1]] - vec[r[:, 2]] * vec[r[:, 3]] + vec[r[:, 4]] * vec[r[:, 5]]
    return float(np.max(np.abs(rel)))


def antisymmetric_matrix(w) -> np.ndarray:
    vec = w.w if isinstance(w, PluckerLine) else np.asarray(w, dtype=complex)
    n = dimension_from_length(vec.size)
    a, b = _pair_arrays(n)
    m = np.zeros((n + 1, n + 1), dtype=complex)
    m[a, b] = vec
    m[b, a] = -vec
    return m


def line_from_plucker(w, tol: float = TAU_PLUCK) -> ProjectiveSubspace:
    """The line whose minors are ``w``; the column space of u v^T - v u^T."""
    res = plucker_residual(w)
    if res >= tol:
        raise NotDecomposable(f"Plücker residual {res:.3e} exceeds {tol:.1e}")
    u, _, _ = np.linalg.svd(antisymmetric_matrix(w))
    return ProjectiveSubspace(u[:, :2])


def horizontal(w: PluckerLine, xi: np.ndarray) -> np.ndarray:
    """Remove the component of ``xi`` along the base point."""
    xi = np.asarray(xi, dtype=complex)
    return xi - w.w * np.vdot(w.w, xi)


def gauge_project(w: PluckerLine, xi) -> PluckerTangent:
    return PluckerTangent(horizontal(w, xi))


def line_tangent(line: ProjectiveSubspace, du, dv):
    """Exact tangent of t -> span(u + t du, v + t dv) at t = 0.

    Returns ``(w, tangent)`` with ``w`` the Plücker point of ``line``.
    """
    u, v = line.basis[:, 0], line.basis[:, 1]
    raw = minors(u, v)
    scale = np.linalg.norm(raw)
    w = PluckerLine(raw)
    return w, gauge_project(w, (minors(du, v) + minors(u, dv)) / scale)


def relation_differential_residual(w: PluckerLine, t: PluckerTangent) -> float:
    """Largest derivative of the Plücker relations along ``t``."""
    if w.n < 3:
        return 0.0
    r = _relation_indices(w.n)
    x, d = w.w, t.xi
    rel = (d[r[:, 0]] * x[r[:, 1]] + x[r[:, 0]] * d[r[:, 1]]
           - d[r[:, 2]] * x[r[:, 3]] - x[r[:, 2]] * d[r[:, 3]]
           + d[r[:, 4]] * x[r[:, 5]] + x[r[:, 4]] * d[r[:, 5]])
    return float(np.max(np.abs(rel)))


# Fixed by requiring omega(X_mu, Y) = d mu(Y) with the flow z_i -> e^{i theta} z_i.
FORM_SCALE = -2.0


def symplectic_form(w: PluckerLine, a: PluckerTangent, b: PluckerTangent) -> float:
    """Fubini-Study Kähler form of P(Λ²) at ``w`` on two tangent vectors.

    ``omega(a, b) = FORM_SCALE * Im <a_h, b_h>`` with ``a_h, b_h`` the parts
    orthogonal to ``w``. With FORM_SCALE = -2 the moment maps of the torus
    flows in :mod:`grreduce.moment` are Hamiltonian for this form; as a
    consequence ``omega(a, i a) = -2 |a|^2``.
    """
    ah = horizontal(w, a.xi)
    bh = horizontal(w, b.xi)
    return float(FORM_SCALE * np.imag(np.vdot(ah, bh)))


def phase_align(reference: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Multiply ``w`` by the unit phase that maximizes Re<reference, w>."""
    ov = np.vdot(reference, w)
    if ov == 0:
        return w
    return w * (abs(ov) / ov)


def _plucker_of(value) -> PluckerLine:
    if isinstance(value, PluckerLine):
        return value
    if isinstance(value, ProjectiveSubspace):
        return plucker_from_line(value)
    return PluckerLine(value)


Family = Callable[[float], Union[PluckerLine, ProjectiveSubspace]]


def tangent_from_curve(family: Family, t: float = 0.0, h: float = 1e-4):
    """Central-difference tangent of a family of lines at parameter ``t``.

    Returns ``(base_point, tangent)``. Both samples are phase-aligned to the
    base point before differencing and the result is made horizontal.
    """
    if not h > 0:
        raise ValueError("step must be positive")
    if h < MIN_FD_STEP:
        raise StepTooSmall(f"step {h:.1e} below {MIN_FD_STEP:.1e}")
    w0 = _plucker_of(family(t))
    wp = phase_align(w0.w, _plucker_of(family(t + h)).w)
    wm = phase_align(w0.w, _plucker_of(family(t - h)).w)
    return w0, gauge_project(w0, (wp - wm) / (2 * h))
