"""Lagrangian cycles of Gr(1, n) lifted from real parts of the reduced space.

A cycle is described by ``(n, k, pairs, c)``. Its points are the lines with
moment values ``c`` whose base point ``(l0, s_0, ..., s_{k-1})`` has a real
``l0``, real ``s_j`` for unpaired ``j`` and ``s_j = conj(s_i)`` for every
pair ``(i, j)``. Sample points are produced from local chart parameters

* ``2(n-k-1)`` real coordinates of l0 in the real Grassmannian,
* one real coordinate per unpaired ``s_j``, two per pair,
* ``k`` torus angles,

which add up to ``2(n-1)``, half the real dimension of Gr(1, n).
"""
from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, RankDeficient, StepTooSmall
from .moment import moments_from_plucker, torus_orbit
from .plucker import (
    PluckerLine,
    line_from_plucker,
    minors,
    symplectic_form,
    tangent_from_curve,
)
from .projective import HomogeneousVector, ProjectiveSubspace, conjugate, point_distance
from .reduction import TAU_OPEN, ReducedPoint, project_to_base, solve_fiber_point

TAU_LAG = 1e-5
MIN_SINGULAR = 1e-6
MIN_STEP = 1e-6
MAX_STEP = 1e-3


@dataclass(frozen=True)
class CycleDescriptor:
    n: int
    k: int
    pairs: tuple = ()
    c: tuple = ()

    def __post_init__(self):
        pairs = tuple(tuple(sorted((int(a), int(b)))) for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        object.__setattr__(self, "c", tuple(float(x) for x in self.c))
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not 0 <= self.k <= self.n - 1:
            raise ValueError(f"k={self.k} outside 0..{self.n - 1}")
        flat = [i for p in pairs for i in p]
        if len(set(flat)) != len(flat) or any(not 0 <= i < self.k for i in flat):
            raise ValueError(f"pairs {pairs} must be disjoint and inside 0..{self.k - 1}")
        if any(a == b for a, b in pairs):
            raise ValueError("a pair needs two distinct indices")
        if len(self.c) != self.k:
            raise ValueError(f"need {self.k} moment targets, got {len(self.c)}")
        if self.k:
            c = np.array(self.c)
            if np.any(c <= TAU_OPEN) or c.sum() >= 1.0 - TAU_OPEN:
                raise ValueError(f"targets {self.c} must satisfy c_i > 0, sum < 1")
            if pairs and np.ptp(c) > 1e-12:
                raise ValueError("conjugate pairs require equal moment targets")

    @classmethod
    def symmetric(cls, n: int, k: int, pairs=()) -> "CycleDescriptor":
        """Descriptor with the default equal targets c_i = 1/(2k)."""
        return cls(n, k, tuple(pairs), tuple([1.0 / (2 * k)] * k) if k else ())

    @property
    def m(self) -> int:
        return len(self.pairs)

    @property
    def dimension(self) -> int:
        return 2 * (self.n - 1)

    @property
    def base_dimension(self) -> int:
        return 2 * (self.n - self.k - 1) + (self.k - 2 * self.m) + 2 * self.m

    def param_labels(self) -> list:
        r = self.n - self.k - 1
        labels = [f"l0.x{a}" for a in range(r)] + [f"l0.y{a}" for a in range(r)]
        for j, kind in _s_layout(self):
            labels += [f"s{j}"] if kind == "real" else [f"s{j}.re", f"s{j}.im"]
        return labels + [f"theta{j}" for j in range(self.k)]

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "pairs": [list(p) for p in self.pairs], "c": list(self.c)}


def _s_layout(d: CycleDescriptor):
    """(index, 'real' | 'pair') for each s-point carrying parameters."""
    partner = {i: j for i, j in d.pairs}
    followers = set(partner.values())
    return [(j, "pair" if j in partner else "real") for j in range(d.k) if j not in followers]


@dataclass(frozen=True, eq=False)
class CycleAnchor:
    """Reference data around which a sample point's chart is centered."""

    p: np.ndarray
    q: np.ndarray
    normal: np.ndarray
    s0: np.ndarray
    angles: np.ndarray


@dataclass(frozen=True, eq=False)
class CycleSamplePoint:
    params: np.ndarray
    line: PluckerLine
    anchor: CycleAnchor
    index: int = 0


def _perp(v):
    return np.array([-np.conj(v[1]), np.conj(v[0])])


def _make_anchor(d: CycleDescriptor, rng: np.random.Generator) -> CycleAnchor:
    n, k = d.n, d.k
    q_mat = np.linalg.qr(rng.standard_normal((n + 1 - k, n + 1 - k)))[0]
    frame = np.zeros((n + 1, n + 1 - k))
    frame[k:] = q_mat
    s0 = np.zeros((k, 2), dtype=complex)
    for j in range(k):
        phi = rng.uniform(0.0, np.pi)
        s0[j] = (np.cos(phi), np.sin(phi))
    for i, j in d.pairs:
        z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        s0[i] = z / np.linalg.norm(z)
        s0[j] = np.conj(s0[i])
    return CycleAnchor(frame[:, 0], frame[:, 1], frame[:, 2:], s0, rng.uniform(0.0, 2 * np.pi, k))


def base_from_params(anchor: CycleAnchor, d: CycleDescriptor, params) -> ReducedPoint:
    params = np.asarray(params, dtype=float)
    r = d.n - d.k - 1
    x, y = params[:r], params[r: 2 * r]
    l0 = ProjectiveSubspace.from_basis(np.stack([anchor.p + anchor.normal @ x,
                                                 anchor.q + anchor.normal @ y], axis=1))
    partner = dict(d.pairs)
    coords = [None] * d.k
    pos = 2 * r
    for j, kind in _s_layout(d):
        if kind == "real":
            coords[j] = anchor.s0[j] + params[pos] * _perp(anchor.s0[j])
            pos += 1
        else:
            coords[j] = anchor.s0[j] + (params[pos] + 1j * params[pos + 1]) * _perp(anchor.s0[j])
            coords[partner[j]] = np.conj(coords[j])
            pos += 2
    f = np.asarray(l0.basis)
    return ReducedPoint(l0, tuple(HomogeneousVector(f @ cj) for cj in coords))


def reconstruct(anchor: CycleAnchor, d: CycleDescriptor, params) -> PluckerLine:
    """Base chart -> fiber solve -> torus orbit."""
    params = np.asarray(params, dtype=float)
    base = base_from_params(anchor, d, params)
    if d.k == 0:
        b = base.l0.basis
        return PluckerLine(minors(b[:, 0], b[:, 1]))
    w = solve_fiber_point(base, d.c)
    return torus_orbit(w, anchor.angles + params[len(params) - d.k:])


def _sample_rng(seed, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def make_sample(d: CycleDescriptor, seed, index: int) -> CycleSamplePoint:
    anchor = _make_anchor(d, _sample_rng(seed, index))
    params = np.zeros(d.dimension)
    return CycleSamplePoint(params, reconstruct(anchor, d, params), anchor, index)


def sample_base_cycle(d: CycleDescriptor, count: int, seed=None) -> list:
    """Base points of the real part selected by the descriptor."""
    out = []
    for i in range(count):
        anchor = _make_anchor(d, _sample_rng(seed, i))
        out.append(base_from_params(anchor, d, np.zeros(d.dimension)))
    return out


def lift_cycle_sample(d: CycleDescriptor, count: int, seed=None) -> list:
    """Points of the lifted cycle; the i-th uses an independent child seed."""
    return [make_sample(d, seed, i) for i in range(count)]


def tangent_frame(pt: CycleSamplePoint, d: CycleDescriptor, h: float = 1e-4,
                  check_rank: bool = True) -> list:
    """Central-difference tangents along all ``2(n-1)`` chart parameters."""
    if h < MIN_STEP:
        raise StepTooSmall(f"step {h:.1e} below {MIN_STEP:.0e}")
    if h > MAX_STEP:
        raise ValueError(f"step {h:.1e} above {MAX_STEP:.0e}")
    frame = []
    for a in range(d.dimension):
        e = np.zeros(d.dimension)
        e[a] = 1.0

        def family(t, e=e):
            return reconstruct(pt.anchor, d, pt.params + t * e)

        frame.append(tangent_from_curve(family, 0.0, h)[1])
    if check_rank:
        rank, smin = frame_rank(frame)
        if rank < d.dimension:
            raise RankDeficient(f"tangent frame rank {rank} < {d.dimension} (min sv {smin:.2e})")
    return frame


def frame_rank(frame, tol: float = MIN_SINGULAR):
    """Real rank of the column-normalized tangent frame and its smallest singular value."""
    cols = []
    for t in frame:
        v = t.xi / max(np.linalg.norm(t.xi), 1e-300)
        cols.append(np.concatenate([v.real, v.imag]))
    s = np.linalg.svd(np.array(cols).T, compute_uv=False)
    return int(np.sum(s > tol)), float(s.min())


def omega_matrix(w: PluckerLine, frame) -> np.ndarray:
    """Normalized pairings |omega(t_a, t_b)| / (|t_a| |t_b|)."""
    size = len(frame)
    out = np.zeros((size, size))
    for a in range(size):
        for b in range(a + 1, size):
            v = symplectic_form(w, frame[a], frame[b]) / (frame[a].norm * frame[b].norm)
            out[a, b], out[b, a] = v, -v
    return out


def _negative_control(frame, d: CycleDescriptor) -> list:
    # Put J(t_0) in place of an angle direction: a complex pair is never isotropic.
    frame = list(frame)
    frame[d.dimension - 1] = frame[0].rotate()
    return frame


@dataclass
class SampleResult:
    index: int
    max_omega: float = float("nan")
    max_omega_half: float = float("nan")
    max_omega_base: float = float("nan")
    rank: int = 0
    min_singular: float = 0.0
    moment_residual: float = float("nan")
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


def _evaluate_sample(args) -> SampleResult:
    d, seed, index, h, negative = args
    out = SampleResult(index)
    try:
        pt = make_sample(d, seed, index)
        out.moment_residual = float(np.max(np.abs(moments_from_plucker(pt.line.w)[: d.k] - d.c))) if d.k else 0.0
        frames = {}
        # The halving check is skipped when h/2 falls below the step floor.
        steps = (h, h / 2) if h / 2 >= MIN_STEP else (h,)
        for step in steps:
            frame = tangent_frame(pt, d, step, check_rank=False)
            if negative:
                frame = _negative_control(frame, d)
            frames[step] = frame
        om = np.abs(omega_matrix(pt.line, frames[h]))
        out.max_omega = float(om.max())
        if h / 2 in frames:
            out.max_omega_half = float(np.abs(omega_matrix(pt.line, frames[h / 2])).max())
        nb = d.base_dimension
        out.max_omega_base = float(om[:nb, :nb].max()) if nb > 1 else 0.0
        out.rank, out.min_singular = frame_rank(frames[h])
    except GeometryError as exc:
        out.error = f"{type(exc).__name__}: {exc}"
    return out


@dataclass
class LagrangianReport:
    descriptor: dict
    samples: int
    seed: int
    h: float
    tau_lag: float
    per_sample_max: list = field(default_factory=list)
    global_max: float = float("nan")
    global_max_half_step: float = float("nan")
    halving_ratio: float = float("nan")
    base_block_max: float = float("nan")
    min_frame_rank: int = 0
    min_singular: float = 0.0
    max_moment_residual: float = float("nan")
    dimension: int = 0
    failures: list = field(default_factory=list)
    negative_control: bool = False
    passed: bool = False
    wall_time: float = 0.0

    @property
    def failure_fraction(self) -> float:
        return len(self.failures) / self.samples if self.samples else 0.0

    def to_dict(self) -> dict:
        return {
            "descriptor": self.descriptor,
            "samples": self.samples,
            "seed": self.seed,
            "h": self.h,
            "tau_lag": self.tau_lag,
            "dimension": self.dimension,
            "per_sample_max": self.per_sample_max,
            "global_max": self.global_max,
            "global_max_half_step": self.global_max_half_step,
            "halving_ratio": self.halving_ratio,
            "base_block_max": self.base_block_max,
            "min_frame_rank": self.min_frame_rank,
            "min_singular": self.min_singular,
            "max_moment_residual": self.max_moment_residual,
            "failures": self.failures,
            "negative_control": self.negative_control,
            "pass": self.passed,
            "wall_time": self.wall_time,
        }


def verify_lagrangian(d: CycleDescriptor, count: int = 50, seed: int = 42, h: float = 1e-4,
                      tau_lag: float = TAU_LAG, negative_control: bool = False,
                      jobs: int = 1) -> LagrangianReport:
    """Finite-difference check that omega vanishes on the cycle's tangent frames.

    Passes iff the largest normalized pairing is below ``tau_lag`` and every
    frame has full rank ``2(n-1)``. Samples that fail to reconstruct are
    listed in ``failures`` and do not abort the run.
    """
    t0 = time.perf_counter()
    tasks = [(d, seed, i, h, negative_control) for i in range(count)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate_sample, tasks, chunksize=max(1, count // (4 * jobs))))
    else:
        results = [_evaluate_sample(t) for t in tasks]
    good = [r for r in results if r.ok]
    rep = LagrangianReport(d.to_dict(), count, seed, h, tau_lag, dimension=d.dimension,
                           negative_control=negative_control)
    rep.per_sample_max = [r.max_omega if r.ok else None for r in results]
    rep.failures = [{"index": r.index, "error": r.error} for r in results if not r.ok]
    if good:
        rep.global_max = max(r.max_omega for r in good)
        halves = [r.max_omega_half for r in good if np.isfinite(r.max_omega_half)]
        if halves:
            rep.global_max_half_step = max(halves)
            rep.halving_ratio = (rep.global_max / rep.global_max_half_step
                                 if rep.global_max_half_step > 0 else float("inf"))
        rep.base_block_max = max(r.max_omega_base for r in good)
        rep.min_frame_rank = min(r.rank for r in good)
        rep.min_singular = min(r.min_singular for r in good)
        rep.max_moment_residual = max(r.moment_residual for r in good)
    rep.passed = bool(good) and rep.global_max < tau_lag and rep.min_frame_rank == d.dimension
    rep.wall_time = time.perf_counter() - t0
    return rep


def involution_image(line, d: CycleDescriptor) -> ProjectiveSubspace:
    """Conjugate the line and swap z_i <-> z_j for every pair (i, j)."""
    if isinstance(line, PluckerLine):
        line = line_from_plucker(line)
    b = np.conj(np.array(line.basis))
    for i, j in d.pairs:
        b[[i, j]] = b[[j, i]]
    return ProjectiveSubspace(b)


def cycle_membership_residual(line, d: CycleDescriptor) -> float:
    """How far a line is from the cycle: reality conditions plus moments."""
    if isinstance(line, PluckerLine):
        line = line_from_plucker(line)
    base = project_to_base(line, d.k)
    res = base.l0.angle(conjugate(base.l0))
    partner = dict(d.pairs)
    followers = set(partner.values())
    for j in range(d.k):
        if j in partner:
            res = max(res, point_distance(base.s[partner[j]], conjugate(base.s[j])))
        elif j not in followers:
            res = max(res, point_distance(base.s[j], conjugate(base.s[j])))
    if d.k:
        w = minors(line.basis[:, 0], line.basis[:, 1])
        res = max(res, float(np.max(np.abs(moments_from_plucker(w)[: d.k] - d.c))))
    return float(res)


@dataclass(frozen=True)
class TypeCensus:
    """Cycle types (k, m) of Gr(1, n): k = 0..n-1 and m = 0..floor(k/2)."""

    n: int
    total: int
    formula: int

    @property
    def types(self) -> list:
        return [(k, m) for k in range(self.n) for m in range(k // 2 + 1)]

    def to_dict(self) -> dict:
        return {"n": self.n, "types": [list(t) for t in self.types], "total": self.total,
                "formula": self.formula, "formula_holds": self.total == self.formula}


def count_types(n: int) -> TypeCensus:
    """Count the types k by k in exact integers and compare with the closed form."""
    if n < 2:
        raise ValueError("n must be at least 2")
    total = sum(k // 2 + 1 for k in range(n))
    formula = n + (n // 2) * ((n - 1) // 2)
    census = TypeCensus(n, total, formula)
    assert census.total == formula, (n, census.total, formula)
    return census


def admissible_pairings(k: int) -> list:
    """One representative pairing per m: (0,1), (2,3), ... ."""
    return [tuple((2 * p, 2 * p + 1) for p in range(m)) for m in range(k // 2 + 1)]

