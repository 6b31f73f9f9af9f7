"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line; the lines are printed together after
the module finishes (visible without ``-s``).
"""
import json
import time

import numpy as np
import pytest

from grreduce.cli import main
from grreduce.cycles import CycleDescriptor, admissible_pairings, count_types, verify_lagrangian
from grreduce.moment import (
    hamiltonian_field,
    moment_differential,
    moments_from_bases,
    moments_from_plucker,
    sum_identity_residual,
    torus_flow,
)
from grreduce.plucker import PluckerLine, line_tangent, minors, symplectic_form
from grreduce.projective import random_line
from grreduce.reduction import (
    hull_summary,
    moment_image_sample,
    project_to_base,
    random_base,
    ReducedPoint,
    degenerate_fiber_check,
    solve_fiber_point,
)
from grreduce.reports import strip_wall_time

RESULTS = {}


@pytest.fixture(scope="module", autouse=True)
def summary(request):
    yield
    reporter = request.config.pluginmanager.getplugin("terminalreporter")
    write = reporter.write_line if reporter else print
    write("")
    write("acceptance summary")
    for key in sorted(RESULTS):
        write(RESULTS[key])


def record(number, title, ok, detail):
    RESULTS[number] = f"{'PASS' if ok else 'FAIL'}  {number}. {title}: {detail}"
    assert ok, RESULTS[number]


def test_1_moment_equivalence():
    t0 = time.perf_counter()
    worst = 0.0
    rng = np.random.default_rng(1)
    for n in (3, 4, 5, 6):
        bases = np.stack([random_line(n, rng).basis for _ in range(1000)])
        ws = minors(bases[:, :, 0], bases[:, :, 1])
        worst = max(worst, float(np.max(np.abs(moments_from_bases(bases) - moments_from_plucker(ws)))))
    dt = time.perf_counter() - t0
    record(1, "two moment formulas agree", worst < 1e-10 and dt < 10, f"max diff {worst:.2e} (<1e-10), {dt:.2f}s")


def test_2_sum_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(1000):
        b = random_line(3, rng).basis
        w = PluckerLine(minors(b[:, 0], b[:, 1]))
        mu = moments_from_plucker(w.w)
        explicit = abs(mu[0] + mu[1] - 1 - (abs(w.coord(0, 1)) ** 2 - abs(w.coord(2, 3)) ** 2))
        worst = max(worst, explicit, sum_identity_residual(w))
    dt = time.perf_counter() - t0
    record(2, "sum identity on the n=3 quadric", worst < 1e-12 and dt < 1, f"residual {worst:.2e} (<1e-12), {dt:.2f}s")


def test_3_hamiltonian_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    worst = 0.0
    for n in (2, 3, 4, 5):
        for i in range(n + 1):
            for _ in range(200):
                line = random_line(n, rng)
                du, dv = rng.standard_normal((2, n + 1)) + 1j * rng.standard_normal((2, n + 1))
                w, y = line_tangent(line, du, dv)
                x = hamiltonian_field(w, i)
                denom = x.norm * y.norm
                if denom > 1e-12:
                    worst = max(worst, abs(symplectic_form(w, x, y) - moment_differential(w, i, y)) / denom)
    dt = time.perf_counter() - t0
    record(3, "omega(X_i, Y) = d mu_i(Y)", worst < 1e-8 and dt < 30, f"normalized max {worst:.2e} (<1e-8), {dt:.2f}s")


def test_4_fibration_round_trips():
    t0 = time.perf_counter()
    orbit, section = 0.0, 0.0
    for n, k in ((3, 2), (4, 2), (4, 3), (5, 3)):
        rng = np.random.default_rng(10 * n + k)
        c = np.full(k, 0.6 / k)
        for _ in range(100):
            base = random_base(n, k, rng)
            w = solve_fiber_point(base, c)
            section = max(section, project_to_base(w, k).distance(base))
            i = int(rng.integers(k))
            moved = project_to_base(torus_flow(w, i, rng.uniform(0, 2 * np.pi)), k)
            orbit = max(orbit, moved.distance(base))
    dt = time.perf_counter() - t0
    ok = orbit < 1e-9 and section < 1e-8 and dt < 60
    record(4, "projection/section round trips", ok,
           f"orbit drift {orbit:.2e} (<1e-9), project(solve) {section:.2e} (<1e-8), {dt:.2f}s")


def test_5_delzant_polytope():
    t0 = time.perf_counter()
    square = hull_summary(moment_image_sample(random_base(3, 2, seed=5), 100_000, seed=50))
    cube_pts = moment_image_sample(random_base(4, 3, seed=5), 100_000, seed=51)
    cube = hull_summary(cube_pts)
    dt = time.perf_counter() - t0
    viol = max(square["max_violation"], cube["max_violation"])
    haus = max(square["hausdorff"], cube["hausdorff"])
    ok = viol < 1e-10 and haus < 0.05 and cube["max_sum"] < 2 + 1e-10 and np.any(cube_pts.sum(1) > 1.9) and dt < 60
    record(5, "moment image is the cut cube", ok,
           f"violation {viol:.1e} (<1e-10), Hausdorff k=2 {square['hausdorff']:.1e} k=3 {cube['hausdorff']:.1e} (<0.05), {dt:.2f}s")


def test_6_degenerate_fiber():
    t0 = time.perf_counter()
    worst, ok_all = 0.0, True
    rng = np.random.default_rng(6)
    for _ in range(20):
        b = random_base(3, 2, rng)
        base = ReducedPoint(b.l0, (b.s[0], b.s[0]))
        c = rng.uniform(0.05, 0.45, 2)
        rep = degenerate_fiber_check(base, c, count=16, seed=rng)
        worst = max(worst, rep.max_abs_w)
        ok_all &= rep.passed
    dt = time.perf_counter() - t0
    record(6, "coincident s_0 = s_1 forces w_01 = 0", ok_all and worst < 1e-8 and dt < 10,
           f"max |w_01| {worst:.2e} (<1e-8), {dt:.2f}s")


def _descriptors():
    out = []
    for n, k in ((3, 2), (4, 2), (4, 3), (5, 4)):
        for pairs in admissible_pairings(k):
            if (n, k) == (3, 2) and not pairs:
                out.append(CycleDescriptor(n, k, (), (0.2, 0.3)))
            elif k == 3 and pairs:
                out.append(CycleDescriptor(n, k, pairs, (0.2, 0.2, 0.2)))
            else:
                out.append(CycleDescriptor.symmetric(n, k, pairs))
    return out


def test_7_lagrangian():
    t0 = time.perf_counter()
    lines, ok = [], True
    for d in _descriptors():
        rep = verify_lagrangian(d, 50, seed=42, h=1e-4)
        good = rep.passed and rep.min_frame_rank == 2 * (d.n - 1) and rep.halving_ratio >= 3
        ok &= good
        lines.append(f"(n={d.n},k={d.k},m={d.m}) max {rep.global_max:.1e} ratio {rep.halving_ratio:.2f} rank {rep.min_frame_rank}")
    neg = verify_lagrangian(CycleDescriptor(3, 2, (), (0.2, 0.3)), 50, seed=42, negative_control=True)
    ok &= (not neg.passed) and neg.global_max > 0.1
    dt = time.perf_counter() - t0
    ok &= dt < 300
    worst = max(float(l.split("max ")[1].split()[0]) for l in lines)
    record(7, "lifted cycles are Lagrangian", ok,
           f"{len(lines)} descriptors, worst |omega| {worst:.1e} (<1e-5), negative control {neg.global_max:.2f} (>0.1), {dt:.1f}s")
    for l in lines:
        print(l)


def test_8_type_census():
    t0 = time.perf_counter()
    ok = all(count_types(n).total == n + (n // 2) * ((n - 1) // 2) for n in range(2, 1001))
    ok &= count_types(3).types == [(0, 0), (1, 0), (2, 0), (2, 1)]
    ok &= count_types(4).types == [(0, 0), (1, 0), (2, 0), (2, 1), (3, 0), (3, 1)]
    ok &= count_types(5).types == [(0, 0), (1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (4, 0), (4, 1), (4, 2)]
    dt = time.perf_counter() - t0
    record(8, "type census formula", ok and dt < 1, f"n = 2..1000 exact, lists n = 3, 4, 5, {dt:.3f}s")


COMMANDS = [
    ["verify-moment", "--samples", "200"],
    ["delzant", "--samples", "2000"],
    ["verify-lagrangian", "--samples", "5"],
    ["count-types", "--n", "7"],
    ["level-sample", "--samples", "5"],
]


def test_9_determinism(tmp_path):
    t0 = time.perf_counter()
    ok = True
    for argv in COMMANDS:
        outs = []
        for run in range(2):
            path = tmp_path / f"{argv[0]}-{run}.out"
            main(argv + ["--seed", "1234", "--out", str(path)])
            text = path.read_text()
            if argv[0] in ("level-sample",):
                outs.append(text)
            else:
                outs.append(json.dumps(strip_wall_time(json.loads(text)), sort_keys=True))
        ok &= outs[0] == outs[1]
    dt = time.perf_counter() - t0
    record(9, "identical seeds give identical reports", ok, f"{len(COMMANDS)} commands, {dt:.2f}s")
