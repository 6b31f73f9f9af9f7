"""Run configuration and machine-readable reports behind the CLI commands."""
from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .cycles import TAU_LAG, CycleDescriptor, count_types, verify_lagrangian
from .moment import (
    hamiltonian_field,
    moment_differential,
    moments_from_bases,
    moments_from_plucker,
    sum_identity_residual,
    torus_flow,
)
from .plucker import (
    TAU_PLUCK,
    PluckerLine,
    line_tangent,
    minors,
    pair_list,
    plucker_residual,
    symplectic_form,
)
from .projective import as_rng, gaussian_vectors, random_line
from .reduction import (
    TAU_OPEN,
    TAU_SOLVE,
    hull_summary,
    moment_image_sample,
    random_base,
    sample_level_set,
)

SCHEMA = "grreduce/1"

# Thresholds of the moment-map checks that are not run-configurable.
TAU_EQUIV = 1e-10
TAU_SUM = 1e-12
TAU_HAM = 1e-8
TAU_FLOW = 1e-12
TAU_HAUSDORFF = 0.05
TAU_CONTAIN = 1e-10


class ConfigError(ValueError):
    """Invalid run configuration (exit code 2)."""


@dataclass
class RunConfig:
    n: int = 3
    k: int = 2
    c: list = None
    pairs: list = field(default_factory=list)
    samples: int = 100
    seed: int = 42
    fd_step: float = 1e-4
    tau_pluck: float = TAU_PLUCK
    tau_solve: float = TAU_SOLVE
    tau_lag: float = TAU_LAG
    tau_open: float = TAU_OPEN

    def __post_init__(self):
        if self.c is None:
            if self.pairs or self.k != 2:
                self.c = [1.0 / (2 * self.k)] * self.k if self.k else []
            else:
                self.c = [0.2, 0.3]

    def validate(self, need_descriptor: bool = True) -> "RunConfig":
        for name in ("tau_pluck", "tau_solve", "tau_lag", "tau_open", "fd_step"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.samples < 1:
            raise ConfigError("samples must be at least 1")
        if self.n < 2:
            raise ConfigError("n must be at least 2")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if need_descriptor:
            self.descriptor()
        return self

    def descriptor(self) -> CycleDescriptor:
        try:
            return CycleDescriptor(self.n, self.k, tuple(tuple(p) for p in self.pairs), tuple(self.c))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pairs"] = [list(p) for p in self.pairs]
        return d

    @classmethod
    def keys(cls) -> set:
        return {f.name for f in fields(cls)}


def parse_c(text: str) -> list:
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad moment list {text!r}") from exc


def parse_pairs(text) -> list:
    if isinstance(text, list):
        return [tuple(int(v) for v in p) for p in text]
    out = []
    for item in str(text).split(","):
        item = item.strip()
        if not item:
            continue
        try:
            a, b = item.split("-")
            out.append((int(a), int(b)))
        except ValueError as exc:
            raise ConfigError(f"bad pair {item!r}, expected i-j") from exc
    return out


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=True) + "\n"


def strip_wall_time(report: dict) -> dict:
    return {k: v for k, v in report.items() if k != "wall_time"}


def _envelope(command: str, cfg: RunConfig, body: dict, t0: float) -> dict:
    out = {"schema": SCHEMA, "command": command, "config": cfg.to_dict()}
    out.update(body)
    out["wall_time"] = time.perf_counter() - t0
    return out


def _check(value: float, tol: float) -> dict:
    return {"max_residual": float(value), "tolerance": tol, "pass": bool(value < tol)}


def moment_report(cfg: RunConfig, corrupt: bool = False) -> dict:
    """Cross-checks of the moment maps on random lines of CP^n."""
    t0 = time.perf_counter()
    rng = as_rng(cfg.seed)
    n = cfg.n
    bases = np.stack([random_line(n, rng).basis for _ in range(cfg.samples)])
    ws = minors(bases[:, :, 0], bases[:, :, 1])
    if corrupt:
        # Break the decomposability of the first sample.
        ws[0] = 0.0
        ws[0, 0] = ws[0, -1] = 1.0 / np.sqrt(2)
    ws /= np.linalg.norm(ws, axis=1, keepdims=True)

    equiv = float(np.max(np.abs(moments_from_bases(bases) - moments_from_plucker(ws))))
    quadric = max(plucker_residual(w) for w in ws)
    sum_id = max(sum_identity_residual(PluckerLine(w)) for w in ws)

    ham = 0.0
    flow = 0.0
    flow_quadric = 0.0
    for _ in range(min(cfg.samples, 200)):
        line = random_line(n, rng)
        du, dv = gaussian_vectors(rng, n + 1, 2).T
        w, y = line_tangent(line, du, dv)
        for i in range(n + 1):
            x = hamiltonian_field(w, i)
            denom = x.norm * y.norm
            if denom > 1e-12:
                ham = max(ham, abs(symplectic_form(w, x, y) - moment_differential(w, i, y)) / denom)
            theta = rng.uniform(0.0, 2 * np.pi)
            wf = torus_flow(w, i, theta)
            flow = max(flow, float(np.max(np.abs(moments_from_plucker(wf.w) - moments_from_plucker(w.w)))))
            flow_quadric = max(flow_quadric, plucker_residual(wf))
    checks = {
        "plucker_residual": _check(quadric, cfg.tau_pluck),
        "basis_vs_plucker": _check(equiv, TAU_EQUIV),
        "sum_identity": _check(sum_id, TAU_SUM),
        "hamiltonian_identity": _check(ham, TAU_HAM),
        "flow_invariance": _check(flow, TAU_FLOW),
        "flow_quadric": _check(flow_quadric, cfg.tau_pluck),
    }
    body = {"checks": checks, "pass": all(c["pass"] for c in checks.values())}
    return _envelope("verify-moment", cfg, body, t0)


def delzant_samples(cfg: RunConfig) -> np.ndarray:
    if cfg.k < 2 or cfg.k > cfg.n - 1:
        raise ConfigError(f"delzant needs 2 <= k <= n-1, got k={cfg.k}, n={cfg.n}")
    rng = as_rng(cfg.seed)
    base = random_base(cfg.n, cfg.k, rng)
    return moment_image_sample(base, cfg.samples, rng)


def delzant_report(cfg: RunConfig, samples: np.ndarray) -> dict:
    t0 = time.perf_counter()
    summary = hull_summary(samples)
    summary["pass"] = bool(summary["max_violation"] < TAU_CONTAIN and summary["hausdorff"] < TAU_HAUSDORFF)
    summary["tolerances"] = {"containment": TAU_CONTAIN, "hausdorff": TAU_HAUSDORFF}
    return _envelope("delzant", cfg, {"hull": summary, "pass": summary["pass"]}, t0)


def samples_csv(samples: np.ndarray) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"x_{i}" for i in range(samples.shape[1])])
    for row in samples:
        writer.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def level_sample_csv(cfg: RunConfig, real: bool = False) -> str:
    lines = sample_level_set(cfg.n, cfg.k, cfg.c, cfg.samples, cfg.seed, real=real)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = []
    for i, j in pair_list(cfg.n):
        header += [f"re_w{i}_{j}", f"im_w{i}_{j}"]
    writer.writerow(header)
    for w in lines:
        row = []
        for z in w.w:
            row += [repr(float(z.real)), repr(float(z.imag))]
        writer.writerow(row)
    return buf.getvalue()


def lagrangian_report(cfg: RunConfig, negative_control: bool = False, jobs: int = 1) -> dict:
    t0 = time.perf_counter()
    rep = verify_lagrangian(cfg.descriptor(), cfg.samples, cfg.seed, cfg.fd_step,
                            tau_lag=cfg.tau_lag, negative_control=negative_control, jobs=jobs)
    body = rep.to_dict()
    body.pop("wall_time")
    return _envelope("verify-lagrangian", cfg, body, t0)


def census_report(cfg: RunConfig) -> dict:
    t0 = time.perf_counter()
    census = count_types(cfg.n).to_dict()
    return _envelope("count-types", cfg, {"census": census, "pass": census["formula_holds"]}, t0)
