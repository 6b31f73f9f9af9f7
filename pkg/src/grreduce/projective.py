"""Linear algebra on complex projective space.

Points are :class:`HomogeneousVector` instances, linear subspaces are
:class:`ProjectiveSubspace` instances carrying an orthonormal column basis.
Rank decisions use singular values relative to the largest one, with the
threshold ``TAU_RANK``; subspace equality uses the largest principal angle
with the threshold ``TAU_SUB``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import IllConditioned

TAU_RANK = 1e-9
TAU_SUB = 1e-8


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class HomogeneousVector:
    """Homogeneous coordinates ``[z_0 : ... : z_n]`` of a point of CP^n."""

    entries: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.entries, dtype=complex).reshape(-1)
        if z.size < 2:
            raise ValueError("need at least two homogeneous coordinates")
        if not np.isfinite(z).all() or np.linalg.norm(z) <= TAU_RANK * 1e-3:
            raise ValueError("homogeneous vector must be finite and nonzero")
        object.__setattr__(self, "entries", _frozen(z))

    @property
    def n(self) -> int:
        return self.entries.size - 1

    def normalized(self) -> np.ndarray:
        return self.entries / np.linalg.norm(self.entries)

    def __repr__(self):
        return f"HomogeneousVector({np.array2string(self.entries, precision=4)})"


@dataclass(frozen=True, eq=False)
class ProjectiveSubspace:
    """Projective subspace spanned by orthonormal columns of ``basis``.

    Build instances with :meth:`span`, :meth:`from_basis` or
    :meth:`coordinate` rather than by hand; the constructor only checks
    orthonormality.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 2 or b.shape[1] < 1 or b.shape[1] > b.shape[0]:
            raise ValueError(f"bad basis shape {b.shape}")
        gram = b.conj().T @ b
        if np.max(np.abs(gram - np.eye(b.shape[1]))) > 1e-12:
            raise ValueError("basis columns must be orthonormal")
        object.__setattr__(self, "basis", _frozen(b))

    @property
    def n(self) -> int:
        return self.basis.shape[0] - 1

    @property
    def proj_dim(self) -> int:
        return self.basis.shape[1] - 1

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    @classmethod
    def span(cls, vectors, tol: float = TAU_RANK) -> "ProjectiveSubspace":
        """Rank-revealing span of the columns of ``vectors`` (or a list)."""
        m = _as_columns(vectors)
        u, s, _ = np.linalg.svd(m, full_matrices=False)
        if s.size == 0 or s[0] == 0.0:
            raise ValueError("cannot span the zero vector")
        rank = int(np.sum(s > tol * s[0]))
        return cls(u[:, :rank])

    @classmethod
    def from_basis(cls, vectors) -> "ProjectiveSubspace":
        """Gram-Schmidt orthonormalization of a full-rank basis.

        Unlike :meth:`span` the result depends smoothly on the input columns,
        which matters when subspaces are differentiated numerically.
        """
        m = _as_columns(vectors).copy()
        scale = max(np.linalg.norm(m, axis=0).max(), 1e-300)
        for j in range(m.shape[1]):
            for _ in range(2):
                m[:, j] -= m[:, :j] @ (m[:, :j].conj().T @ m[:, j])
            norm = np.linalg.norm(m[:, j])
            if norm <= TAU_RANK * scale:
                raise IllConditioned("basis is numerically rank deficient")
            m[:, j] /= norm
        return cls(m)

    @classmethod
    def coordinate(cls, indices: Iterable[int], n: int) -> "ProjectiveSubspace":
        """The coordinate subspace spanned by the points ``p_i``, i in indices."""
        idx = sorted(set(int(i) for i in indices))
        if not idx:
            raise ValueError("coordinate subspace needs at least one index")
        return cls(np.eye(n + 1, dtype=complex)[:, idx])

    def residual(self, x) -> float:
        """Sine of the angle between the point (or subspace) ``x`` and self."""
        m = _as_columns(x)
        q = np.linalg.qr(m)[0]
        off = q - self.basis @ (self.basis.conj().T @ q)
        return float(np.linalg.norm(off, 2))

    def contains(self, x, tol: float = TAU_SUB) -> bool:
        return self.residual(x) < tol

    def angle(self, other: "ProjectiveSubspace") -> float:
        """Largest principal angle; pi/2 when the dimensions differ."""
        if other.proj_dim != self.proj_dim:
            return float(np.pi / 2)
        s = np.linalg.norm(other.basis - self.basis @ (self.basis.conj().T @ other.basis), 2)
        return float(np.arcsin(min(1.0, s)))

    def same_as(self, other: "ProjectiveSubspace", tol: float = TAU_SUB) -> bool:
        return self.angle(other) < tol

    def __repr__(self):
        return f"ProjectiveSubspace(n={self.n}, proj_dim={self.proj_dim})"


Projective = Union[HomogeneousVector, ProjectiveSubspace]


def _as_columns(x) -> np.ndarray:
    if isinstance(x, HomogeneousVector):
        return x.entries.reshape(-1, 1)
    if isinstance(x, ProjectiveSubspace):
        return np.asarray(x.basis)
    if isinstance(x, (list, tuple)):
        return np.concatenate([_as_columns(p) for p in x], axis=1)
    a = np.asarray(x, dtype=complex)
    return a.reshape(-1, 1) if a.ndim == 1 else a


def join(parts) -> ProjectiveSubspace:
    """Smallest projective subspace containing every element of ``parts``."""
    if isinstance(parts, (HomogeneousVector, ProjectiveSubspace)):
        parts = [parts]
    if len(parts) == 0:
        raise ValueError("join needs at least one part")
    return ProjectiveSubspace.span(list(parts))


def meet(a: Projective, b: Projective, tol: float = TAU_RANK):
    """Intersection of two subspaces, or ``None`` when it is empty.

    Solves ``A x = B y`` for the joint null space of ``[A, -B]``.
    """
    ma, mb = _orthonormal(a), _orthonormal(b)
    m = np.concatenate([ma, -mb], axis=1)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    rank = int(np.sum(s > tol * s[0])) if s.size else 0
    null = vh[rank:].conj().T
    if null.shape[1] == 0:
        return None
    pts = ma @ null[: ma.shape[1]]
    return ProjectiveSubspace.span(pts, tol=tol)


def _orthonormal(x) -> np.ndarray:
    if isinstance(x, ProjectiveSubspace):
        return np.asarray(x.basis)
    return ProjectiveSubspace.span(x).basis


def project_from_center(x, center, target: ProjectiveSubspace) -> HomogeneousVector:
    """Central projection of ``x`` from ``center`` onto ``target``.

    ``center`` may be ``None`` (empty center), in which case ``x`` must already
    lie on ``target``. The output lies on ``target`` and on ``join(center, x)``.
    """
    x = x if isinstance(x, HomogeneousVector) else HomogeneousVector(x)
    if center is None:
        if not target.contains(x):
            raise ValueError("with an empty center x must lie on the target")
        return x
    if center.residual(x) < TAU_SUB:
        raise IllConditioned("point lies on the projection center")
    cols = np.concatenate([center.basis, target.basis], axis=1)
    coef, *_ = np.linalg.lstsq(cols, x.entries, rcond=None)
    if np.linalg.norm(cols @ coef - x.entries) > TAU_SUB * np.linalg.norm(x.entries):
        raise ValueError("point is not in the join of center and target")
    y = target.basis @ coef[center.basis.shape[1]:]
    if np.linalg.norm(y) <= TAU_SUB * np.linalg.norm(x.entries):
        raise IllConditioned("projection collapses onto the center")
    return HomogeneousVector(y)


def conjugate(x):
    """Entrywise complex conjugation of a point or subspace."""
    if isinstance(x, HomogeneousVector):
        return HomogeneousVector(np.conj(x.entries))
    if isinstance(x, ProjectiveSubspace):
        return ProjectiveSubspace(np.conj(x.basis))
    raise TypeError(f"cannot conjugate {type(x).__name__}")


def rotate_coordinate(x, i: int, theta: float):
    """Multiply homogeneous coordinate ``i`` by ``exp(1j*theta)``."""
    if isinstance(x, HomogeneousVector):
        z = x.entries.copy()
        z[i] *= np.exp(1j * theta)
        return HomogeneousVector(z)
    if isinstance(x, ProjectiveSubspace):
        b = x.basis.copy()
        b[i] *= np.exp(1j * theta)
        return ProjectiveSubspace(b)
    raise TypeError(f"cannot rotate {type(x).__name__}")


def point_distance(x: HomogeneousVector, y: HomogeneousVector) -> float:
    """Fubini-Study angle between two points, in [0, pi/2]."""
    c = abs(np.vdot(x.normalized(), y.normalized()))
    s = np.linalg.norm(y.normalized() - x.normalized() * np.vdot(x.normalized(), y.normalized()))
    return float(np.arctan2(s, c))


def as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def gaussian_vectors(rng, rows: int, cols: int, real: bool = False) -> np.ndarray:
    if real:
        return rng.standard_normal((rows, cols)).astype(complex)
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_point(n: int, seed=None, real: bool = False) -> HomogeneousVector:
    """Point of CP^n from the unitarily invariant distribution."""
    if n < 1:
        raise ValueError("n must be at least 1")
    z = gaussian_vectors(as_rng(seed), n + 1, 1, real)[:, 0]
    return HomogeneousVector(z / np.linalg.norm(z))


def random_points(n: int, count: int, seed=None) -> np.ndarray:
    """``count`` unit representatives of random points, one per row."""
    z = gaussian_vectors(as_rng(seed), count, n + 1)
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def random_line(n: int, seed=None, real: bool = False) -> ProjectiveSubspace:
    """Line of CP^n from the unitarily invariant distribution."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return ProjectiveSubspace.from_basis(gaussian_vectors(as_rng(seed), n + 1, 2, real))


def random_point_on(sub: ProjectiveSubspace, seed=None, real: bool = False) -> HomogeneousVector:
    """Random point of ``sub``; with ``real`` the coefficients in its basis are real."""
    c = gaussian_vectors(as_rng(seed), sub.basis.shape[1], 1, real)[:, 0]
    return HomogeneousVector(sub.basis @ c)
