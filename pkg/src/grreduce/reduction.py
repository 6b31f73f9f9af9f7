"""Reduction of Gr(1, n) by the torus of the first k coordinates.

A line ``l`` skew to the center ``<p_0, ..., p_{k-1}>`` determines a base
point: the line ``l0 = <l, p_0, ..., p_{k-1}> ∩ <p_k, ..., p_n>`` and k
points ``s_j`` on ``l0``. Over a fixed base point the lines form a toric
fiber, parametrized here by a :class:`FiberChart`: every such line is the
graph ``{x + A x : x in l0}`` of a linear map ``A: l0 -> <p_0..p_{k-1}>``
whose j-th row vanishes at ``s_j``, so the chart coordinates are k complex
numbers ``a_j`` and the torus acts on them by phases.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull

from . import _backend
from .errors import DegenerateFrame, IllConditioned, NoConvergence, NotInChart
from .moment import MomentVector, moments_from_plucker, torus_orbit
from .plucker import PluckerLine, minors, phase_align, plucker_from_line, line_from_plucker
from .projective import (
    TAU_SUB,
    HomogeneousVector,
    ProjectiveSubspace,
    as_rng,
    gaussian_vectors,
    join,
    meet,
    point_distance,
    project_from_center,
)

TAU_OPEN = 1e-6
TAU_SOLVE = 1e-11
MAX_NEWTON = 200

__all__ = [
    "TAU_OPEN",
    "TAU_SOLVE",
    "ReducedPoint",
    "FiberChart",
    "in_gr0",
    "project_to_base",
    "fiber_chart",
    "solve_fiber_moduli",
    "solve_fiber_point",
    "torus_orbit",
    "random_base",
    "sample_level_set",
    "moment_image_sample",
    "delzant_polytope",
    "polytope_vertices",
    "hull_summary",
    "degenerate_fiber_check",
    "fiber_tangent_min_singular",
]


def center(k: int, n: int):
    """``<p_0, ..., p_{k-1}>``, or None for k = 0."""
    return ProjectiveSubspace.coordinate(range(k), n) if k > 0 else None


def complement(k: int, n: int) -> ProjectiveSubspace:
    """``<p_k, ..., p_n>``."""
    return ProjectiveSubspace.coordinate(range(k, n + 1), n)


@dataclass(frozen=True, eq=False)
class ReducedPoint:
    """A line ``l0`` in ``<p_k..p_n>`` together with k points on it."""

    l0: ProjectiveSubspace
    s: tuple = ()

    def __post_init__(self):
        s = tuple(x if isinstance(x, HomogeneousVector) else HomogeneousVector(x) for x in self.s)
        object.__setattr__(self, "s", s)
        if self.l0.proj_dim != 1:
            raise ValueError("l0 must be a projective line")
        k, n = len(s), self.l0.n
        if k > 0 and not complement(k, n).contains(self.l0):
            raise ValueError(f"l0 is not contained in <p_{k}, ..., p_{n}>")
        for j, x in enumerate(s):
            if x.n != n or not self.l0.contains(x):
                raise ValueError(f"s_{j} does not lie on l0")

    @property
    def k(self) -> int:
        return len(self.s)

    @property
    def n(self) -> int:
        return self.l0.n

    def distance(self, other: "ReducedPoint") -> float:
        """Largest of the l0 principal angle and the s_j point distances."""
        if other.k != self.k or other.n != self.n:
            return float(np.pi / 2)
        d = self.l0.angle(other.l0)
        for a, b in zip(self.s, other.s):
            d = max(d, point_distance(a, b))
        return d

    def swapped(self, i: int, j: int) -> "ReducedPoint":
        s = list(self.s)
        s[i], s[j] = s[j], s[i]
        return ReducedPoint(self.l0, tuple(s))


def _as_line(line) -> ProjectiveSubspace:
    if isinstance(line, PluckerLine):
        return line_from_plucker(line)
    return line


def _as_plucker(line) -> PluckerLine:
    if isinstance(line, PluckerLine):
        return line
    return plucker_from_line(line)


def in_gr0(w, k: int, margin: float = TAU_OPEN) -> bool:
    """mu~_i > margin for i < k and sum_{i<k} mu~_i < 1 - margin."""
    mu = moments_from_plucker(_as_plucker(w).w)[:k]
    return bool(np.all(mu > margin) and mu.sum() < 1.0 - margin)


def project_to_base(line, k: int) -> ReducedPoint:
    """Base point (l0, s_0, ..., s_{k-1}) of a line skew to the center.

    ``s_j`` is the point where ``l`` meets ``<l0, p_m : m != j>``, projected
    from ``<p_m : m != j>`` onto ``l0``.
    """
    line = _as_line(line)
    n = line.n
    if not 0 <= k <= n - 1:
        raise ValueError(f"k={k} outside 0..{n - 1}")
    if k == 0:
        return ReducedPoint(line, ())
    hull = join([line, center(k, n)])
    if hull.proj_dim != k + 1:
        raise NotInChart("line meets <p_0, ..., p_{k-1}>")
    l0 = meet(hull, complement(k, n))
    if l0 is None or l0.proj_dim != 1:
        raise NotInChart("l0 is not a line")
    points = []
    for j in range(k):
        others = [m for m in range(k) if m != j]
        cj = ProjectiveSubspace.coordinate(others, n) if others else None
        hyper = join([l0, cj]) if cj is not None else l0
        s0 = meet(hyper, line)
        if s0 is None or s0.proj_dim != 0:
            raise NotInChart(f"line lies in <l0, p_m : m != {j}>")
        try:
            sj = project_from_center(HomogeneousVector(s0.basis[:, 0]), cj, l0)
        except IllConditioned as exc:
            raise NotInChart(str(exc)) from exc
        points.append(sj)
    return ReducedPoint(l0, tuple(points))


@dataclass(frozen=True, eq=False)
class FiberChart:
    """Chart of the toric fiber over ``base``.

    ``frame`` holds the orthonormal basis (f_k, f_{k+1}) of l0 and
    ``s_coeffs`` the unit coordinates (alpha_j, beta_j) of s_j in it. The
    chart point ``a`` is the line spanned by
    ``f_k + sum_j a_j beta_j p_j`` and ``f_{k+1} - sum_j a_j alpha_j p_j``.
    """

    base: ReducedPoint
    frame: np.ndarray
    s_coeffs: np.ndarray

    @property
    def k(self) -> int:
        return self.base.k

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def normals(self) -> np.ndarray:
        """Row j is the functional (beta_j, -alpha_j), which kills s_j."""
        return np.stack([self.s_coeffs[:, 1], -self.s_coeffs[:, 0]], axis=1)

    def basis(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=complex)
        b = np.array(self.frame, dtype=complex)
        b[: self.k] = a[:, None] * self.normals
        return b

    def line(self, a) -> ProjectiveSubspace:
        return ProjectiveSubspace.from_basis(self.basis(a))

    def plucker(self, a) -> PluckerLine:
        b = self.basis(a)
        return PluckerLine(minors(b[:, 0], b[:, 1]))

    def moments(self, a) -> np.ndarray:
        return _backend.chart_moments(self.normals, np.abs(np.asarray(a)) ** 2)

    def moments_orthonormal(self, a) -> np.ndarray:
        """Moments of stacked chart points (rows of ``a``) via QR of the basis.

        Slower than :meth:`moments` but the row norms of an orthonormal basis
        stay in [0, 1] and sum to 2 even when the moduli span many decades.
        """
        a = np.atleast_2d(np.asarray(a, dtype=complex))
        b = np.broadcast_to(self.frame.astype(complex), (a.shape[0],) + self.frame.shape).copy()
        b[:, : self.k] = a[:, :, None] * self.normals[None]
        q, _ = np.linalg.qr(b)
        return np.sum(np.abs(q[:, : self.k]) ** 2, axis=-1)


def fiber_chart(base: ReducedPoint) -> FiberChart:
    f = np.asarray(base.l0.basis)
    coeffs = []
    for j, x in enumerate(base.s):
        ab = f.conj().T @ x.entries
        norm = np.linalg.norm(ab)
        if norm <= TAU_SUB * np.linalg.norm(x.entries):
            raise DegenerateFrame(f"s_{j} has no component on l0")
        coeffs.append(ab / norm)
    coeffs = np.array(coeffs, dtype=complex).reshape(-1, 2)
    return FiberChart(base, f, coeffs)


def _target(c, k: int) -> np.ndarray:
    c = np.asarray(c.values if isinstance(c, MomentVector) else c, dtype=float).reshape(-1)
    if c.size != k:
        raise ValueError(f"expected {k} moment targets, got {c.size}")
    if np.any(c <= TAU_OPEN) or c.sum() >= 1.0 - TAU_OPEN:
        raise ValueError(f"targets {c} not strictly inside the simplex (margin {TAU_OPEN})")
    return c


def _bisection_sweeps(normals, c, x, sweeps=200, tol=1e-9):
    """Gauss-Seidel sweeps; each coordinate solved by bisection in log r.

    mu_i is increasing in r_i with the other moduli fixed.
    """
    x = np.array(x, dtype=float)
    for _ in range(sweeps):
        for i in range(c.size):
            lo, hi = -60.0, 60.0
            for _ in range(200):
                x[i] = 0.5 * (lo + hi)
                if _backend.chart_moments(normals, np.exp(x))[i] < c[i]:
                    lo = x[i]
                else:
                    hi = x[i]
                if hi - lo < 1e-13:
                    break
        if np.max(np.abs(_backend.chart_moments(normals, np.exp(x)) - c)) < tol:
            break
    return x


def solve_fiber_moduli(chart: FiberChart, c) -> np.ndarray:
    """Moduli r_j = |a_j|^2 of the chart torus with moment values ``c``."""
    c = _target(c, chart.k)
    normals = chart.normals
    x0 = np.log(c / (1.0 - c.sum()))
    x, _, res = _backend.newton_moduli(normals, c, x0, 1e-15, MAX_NEWTON)
    if not res < TAU_SOLVE:
        x = _bisection_sweeps(normals, c, x0)
        x, _, res = _backend.newton_moduli(normals, c, x, 1e-15, MAX_NEWTON)
    if not res < TAU_SOLVE:
        raise NoConvergence(
            f"moment residual {res:.3e} after {MAX_NEWTON} Newton steps",
            base=chart.base,
            residual=res,
        )
    return np.exp(x)


def solve_fiber_point(base: ReducedPoint, c) -> PluckerLine:
    """Line over ``base`` with mu~_i = c_i, chart coordinates real positive."""
    chart = fiber_chart(base)
    return chart.plucker(np.sqrt(solve_fiber_moduli(chart, c)))


def random_base(n: int, k: int, seed=None, real: bool = False) -> ReducedPoint:
    """Random l0 in <p_k..p_n> with k random points on it."""
    if not 1 <= k <= n - 1:
        raise ValueError(f"k={k} outside 1..{n - 1}")
    rng = as_rng(seed)
    b = np.zeros((n + 1, 2), dtype=complex)
    b[k:] = gaussian_vectors(rng, n + 1 - k, 2, real)
    l0 = ProjectiveSubspace.from_basis(b)
    coef = gaussian_vectors(rng, 2, k, real)
    return ReducedPoint(l0, tuple(HomogeneousVector(l0.basis @ coef[:, j]) for j in range(k)))


def _child_rngs(seed, count: int):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def sample_level_set(n: int, k: int, c, count: int, seed=None, real: bool = False) -> list:
    """``count`` lines with moment values c: random base, solve, random angles."""
    c = _target(c, k)
    out = []
    for rng in _child_rngs(seed, count):
        base = random_base(n, k, rng, real=real)
        w = solve_fiber_point(base, c)
        out.append(torus_orbit(w, rng.uniform(0.0, 2 * np.pi, k)))
    return out


def moment_image_sample(base: ReducedPoint, count: int, seed=None, log_range: float = 5.0) -> np.ndarray:
    """Moment values of ``count`` chart points, one row each.

    Chart moduli are log-uniform in [10^-log_range, 10^log_range]. Moment
    values depend only on the moduli, so phases are not sampled. Moduli this
    spread make the Gram matrix of the chart badly conditioned, hence the
    orthonormal-basis route.
    """
    if count < 1:
        raise ValueError("count must be positive")
    chart = fiber_chart(base)
    rng = as_rng(seed)
    mod = 10.0 ** rng.uniform(-log_range, log_range, size=(count, chart.k))
    return chart.moments_orthonormal(mod)


def delzant_polytope(k: int):
    """Half-spaces ``A x <= b`` of the unit cube cut by sum(x) <= 2."""
    if k < 1:
        raise ValueError("k must be positive")
    a = np.vstack([-np.eye(k), np.eye(k), np.ones((1, k))])
    b = np.concatenate([np.zeros(k), np.ones(k), [2.0]])
    return a, b


def polytope_vertices(k: int) -> np.ndarray:
    """0/1 vectors with at most two ones."""
    verts = [np.zeros(k)]
    for i in range(k):
        v = np.zeros(k)
        v[i] = 1
        verts.append(v)
        for j in range(i + 1, k):
            v2 = v.copy()
            v2[j] = 1
            verts.append(v2)
    return np.array(verts)


def hull_summary(samples: np.ndarray) -> dict:
    """Containment and Hausdorff distance of the samples to the polytope.

    Since the samples should lie in the polytope, the Hausdorff distance is
    the largest distance from a polytope vertex to the sample hull; it is
    bounded above by the distance to the nearest hull vertex.
    """
    samples = np.atleast_2d(samples)
    k = samples.shape[1]
    a, b = delzant_polytope(k)
    violation = float(max(0.0, np.max(samples @ a.T - b)))
    pts = samples
    if samples.shape[0] > k + 1:
        try:
            pts = samples[ConvexHull(samples).vertices]
        except Exception:  # noqa: BLE001 - degenerate hulls keep all points
            pts = samples
    verts = polytope_vertices(k)
    d = np.min(np.linalg.norm(verts[:, None, :] - pts[None, :, :], axis=-1), axis=1)
    return {
        "k": k,
        "count": int(samples.shape[0]),
        "max_violation": violation,
        "hausdorff": float(max(violation, d.max())),
        "vertex_distance": {",".join(str(int(x)) for x in v): float(dv) for v, dv in zip(verts, d)},
        "max_sum": float(samples.sum(axis=1).max()),
    }


@dataclass
class DegenerateFiberReport:
    pair: tuple
    max_abs_w: float
    max_chart_sum: float
    samples: int
    passed: bool
    residuals: list = field(default_factory=list)


def _coincident_pairs(base: ReducedPoint, tol=TAU_SUB):
    return [(i, j) for i in range(base.k) for j in range(i + 1, base.k)
            if point_distance(base.s[i], base.s[j]) < tol]


def degenerate_fiber_check(base: ReducedPoint, c, count: int = 16, seed=None,
                           tol: float = 1e-8) -> DegenerateFiberReport:
    """Check that the solved fiber over a base with s_i = s_j has w_ij = 0.

    Solutions are flowed around the torus at ``count`` random angle sets;
    chart points with moduli up to 10^2 are sampled to check that the chart
    component stays below sum(mu~) = 1 - TAU_OPEN.
    """
    pairs = _coincident_pairs(base)
    if len(pairs) != 1:
        raise ValueError(f"expected exactly one coincident pair, found {pairs}")
    i, j = pairs[0]
    idx = (i, j)
    rng = as_rng(seed)
    w = solve_fiber_point(base, c)
    res = [float(np.max(np.abs(moments_from_plucker(w.w)[: base.k] - _target(c, base.k))))]
    worst = 0.0
    for _ in range(count):
        wt = torus_orbit(w, rng.uniform(0.0, 2 * np.pi, base.k))
        worst = max(worst, abs(wt.coord(*idx)))
    chart = fiber_chart(base)
    mod = 10.0 ** rng.uniform(-3.0, 2.0, size=(max(count, 1) * 64, base.k))
    sums = _backend.chart_moments_batch(chart.normals, mod**2).sum(axis=1)
    max_sum = float(sums.max())
    return DegenerateFiberReport(idx, worst, max_sum, count,
                                 worst < tol and max_sum < 1.0 - TAU_OPEN, res)


def fiber_tangent_min_singular(chart: FiberChart, r, angles=None, h: float = 1e-5) -> float:
    """Smallest singular value of the normalized tangents of the 2k fiber
    parameters (log-moduli and angles) at the chart point with moduli ``r``."""
    k = chart.k
    r = np.asarray(r, dtype=float)
    angles = np.zeros(k) if angles is None else np.asarray(angles, dtype=float)

    def point(p):
        return chart.plucker(np.exp(0.5 * p[:k]) * np.exp(1j * p[k:])).w

    p0 = np.concatenate([np.log(r), angles])
    w0 = point(p0)
    cols = []
    for a in range(2 * k):
        e = np.zeros(2 * k)
        e[a] = h
        d = (phase_align(w0, point(p0 + e)) - phase_align(w0, point(p0 - e))) / (2 * h)
        d = d - w0 * np.vdot(w0, d)
        cols.append(np.concatenate([d.real, d.imag]) / np.linalg.norm(d))
    return float(np.linalg.svd(np.array(cols).T, compute_uv=False).min())
