"""Moment maps of the coordinate torus on CP^n and the induced maps on Gr(1, n).

Two independent routes compute the induced moment ``mu~_i`` of a line:

* :func:`mu_grass_max` maximizes ``|<e_i, v>|^2`` over unit vectors of the
  2-plane, which equals ``|u_i|^2 + |v_i|^2`` for an orthonormal basis;
* :func:`mu_grass_plucker` uses the rational Plücker formula
  ``sum_{j != i} |w_ij|^2 / sum |w|^2``.

The flow of ``mu~_i`` multiplies ``z_i`` by ``exp(1j*theta)``, i.e. every
Plücker coordinate whose index pair contains ``i``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .plucker import (
    PluckerLine,
    PluckerTangent,
    dimension_from_length,
    incidence_matrix,
    pair_index,
    pair_list,
)
from .projective import HomogeneousVector, ProjectiveSubspace

MOMENT_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class MomentVector:
    """Values of (mu~_0, ..., mu~_{k-1}), or target values c."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size == 0:
            raise ValueError("empty moment vector")
        if np.any(v < -MOMENT_SLACK) or np.any(v > 1 + MOMENT_SLACK):
            raise ValueError(f"moment values outside [0, 1]: {v}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def k(self) -> int:
        return self.values.size

    def is_admissible(self, margin: float = 0.0) -> bool:
        """c_i > margin and sum(c) < 1 - margin."""
        return bool(np.all(self.values > margin) and self.values.sum() < 1.0 - margin)

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return self.values.size


def mu_cp(z: HomogeneousVector, i: int) -> float:
    zz = np.abs(z.entries) ** 2
    return float(zz[i] / zz.sum())


def mu_grass_max(line: ProjectiveSubspace, i: int) -> float:
    if line.proj_dim != 1:
        raise ValueError("expected a projective line")
    return float(np.sum(np.abs(line.basis[i]) ** 2))


def mu_grass_plucker(w: PluckerLine, i: int) -> float:
    return float(moments_from_plucker(w.w)[i])


def moments_from_plucker(w: np.ndarray) -> np.ndarray:
    """All n+1 induced moments; accepts a vector or a stack of row vectors."""
    w = np.asarray(w)
    n = dimension_from_length(w.shape[-1])
    ww = np.abs(w) ** 2
    return (ww @ incidence_matrix(n).T) / ww.sum(axis=-1, keepdims=True)


def moments_from_bases(bases: np.ndarray) -> np.ndarray:
    """Row-norm moments of stacked orthonormal bases of shape (m, n+1, 2)."""
    return np.sum(np.abs(bases) ** 2, axis=-1)


def moment_vector(w: PluckerLine, k: int) -> MomentVector:
    if not 1 <= k <= w.n:
        raise ValueError(f"k={k} outside 1..{w.n}")
    return MomentVector(np.clip(moments_from_plucker(w.w)[:k], 0.0, 1.0))


def sum_identity_residual(w: PluckerLine) -> float:
    """mu~_0 + mu~_1 - 1 - (|w_01|^2 - sum_{2<=a<b}|w_ab|^2)/|w|^2.

    For n = 3 the subtracted sum is just |w_23|^2.
    """
    mu = moments_from_plucker(w.w)
    ww = np.abs(w.w) ** 2
    far = sum(ww[idx] for (a, b), idx in pair_index(w.n).items() if a >= 2)
    return float(abs(mu[0] + mu[1] - 1.0 - (ww[pair_index(w.n)[0, 1]] - far) / ww.sum()))


def _flow_mask(n: int, i: int) -> np.ndarray:
    return np.array([i in p for p in pair_list(n)])


def torus_flow(w: PluckerLine, i: int, theta: float) -> PluckerLine:
    mask = _flow_mask(w.n, i)
    out = np.array(w.w)
    out[mask] *= np.exp(1j * theta)
    return PluckerLine(out)


def torus_orbit(w: PluckerLine, angles) -> PluckerLine:
    """Apply the flows of mu~_0, ..., mu~_{len(angles)-1} in sequence."""
    phase = np.exp(1j * (incidence_matrix(w.n)[: len(angles)].T @ np.asarray(angles, dtype=float)))
    return PluckerLine(w.w * phase)


def hamiltonian_field(w: PluckerLine, i: int) -> PluckerTangent:
    """Generator of the flow of mu~_i, made orthogonal to ``w``."""
    d = incidence_matrix(w.n)[i]
    return PluckerTangent(1j * (d * w.w - mu_grass_plucker(w, i) * w.w))


def moment_differential(w: PluckerLine, i: int, y: PluckerTangent) -> float:
    """Analytic d mu~_i(y) from the quotient rule, for unit ``w``."""
    d = incidence_matrix(w.n)[i]
    mu = mu_grass_plucker(w, i)
    return float(2.0 * np.real(np.vdot(w.w, d * y.xi)) - 2.0 * mu * np.real(np.vdot(w.w, y.xi)))
