"""Acceptance criteria, one test and one PASS/FAIL summary line each.

Lines are collected in ``conftest.ACCEPTANCE_LINES`` and printed in the
terminal summary. Tolerances are the stated ones; nothing is relaxed.
"""

import filecmp
import math
import os
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, ALL_KINDS, H, POLY_KINDS
from fcnn_rd.cli import main
from fcnn_rd.equations import EquationSpec, StepParams, fdm_rollout, fdm_step, stability_dt
from fcnn_rd.evaluation import (
    center_fn_compare, coefficient_error, eval_shapes, eval_sweep, noise_sweep, rollout_model,
)
from fcnn_rd.fcnn import FcnnModel, analytic_model, forward, gradients, init_model, loss_mse
from fcnn_rd.grid import Field, laplacian_5pt, pad_neumann
from fcnn_rd.ic import ic_random

JOBS = os.cpu_count() or 1


def record(name, ok, detail):
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, detail


def field(rng, n=100, lo=-1.0, hi=1.0):
    return Field.from_interior(rng.uniform(lo, hi, (n, n)))


def test_c1_oracle_equivalence():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    step_err = roll_err = 0.0
    for kind in POLY_KINDS:
        spec = EquationSpec.from_kind(kind)
        dt = stability_dt(spec, H)
        model = analytic_model(spec, dt, H)
        for _ in range(3):
            f = field(rng)
            step_err = max(step_err, np.abs(forward(model, f).data - fdm_step(f, spec, dt, H).data).max())
        init = ic_random(100, 100, 0.1, 11)
        ours = rollout_model(model, init, 100)
        ref = fdm_rollout(init, spec, StepParams(dt, H, 100))
        roll_err = max(roll_err, max(np.abs(a.data - b.data).max() for a, b in zip(ours, ref)))
    secs = time.perf_counter() - t0
    record("C1 oracle equivalence", step_err <= 1e-13 and roll_err <= 1e-12 and secs < 5,
           f"step max {step_err:.1e} (<=1e-13), 100-step rollout max {roll_err:.1e} (<=1e-12), {secs:.1f}s (<5s)")


def test_c2_gradient_correctness():
    # the loss is quadratic in theta, so central differences are exact up to
    # rounding; a wide step keeps that rounding far below the tolerance
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for kind in ALL_KINDS:
        spec = EquationSpec.from_kind(kind)
        dt = stability_dt(spec, H)
        for _ in range(20):
            u0 = field(rng, 8)
            u1 = fdm_step(u0, spec, dt, H)
            n = spec.poly_order
            m = init_model(n, seed=0).with_theta(rng.uniform(-1, 1, n + 4))
            g = gradients(m, u0, u1)[1].to_vector()
            for k in range(g.size):
                tp, tm = m.theta.copy(), m.theta.copy()
                tp[k] += 1e-3
                tm[k] -= 1e-3
                fd = (loss_mse(forward(m.with_theta(tp), u0), u1)
                      - loss_mse(forward(m.with_theta(tm), u0), u1)) / 2e-3
                worst = max(worst, abs(g[k] - fd) / max(abs(fd), 1e-300))
    secs = time.perf_counter() - t0
    record("C2 gradient correctness", worst <= 1e-6 and secs < 5,
           f"worst relative mismatch {worst:.1e} (<=1e-6) over 5 equations x 20 models, {secs:.1f}s (<5s)")


def test_c3_coefficient_recovery(trained):
    parts, ok = [], True
    for kind in ALL_KINDS:
        t = trained(kind)
        err = coefficient_error(t.model, t.spec, t.dt, t.h)
        ok &= err <= 1e-4 and t.seconds <= 300
        parts.append(f"{kind} {err:.1e} ({t.seconds:.0f}s)")
    record("C3 coefficient recovery", ok, ", ".join(parts) + "  [<=1e-4, <=300s each]")


def test_c4_error_sweeps(trained):
    parts, ok = [], True
    for kind in ALL_KINDS:
        t = trained(kind)
        t0 = time.perf_counter()
        rep = eval_sweep(t.model, t.spec, t.dt, t.h, n_runs=20, horizon=50, jobs=JOBS)
        secs = time.perf_counter() - t0
        limit = 1e-4 if kind == "ac" else 1e-3
        ok &= rep.n_failed == 0 and rep.mean <= limit and secs <= 120
        parts.append(f"{kind} {rep.mean:.1e}+-{rep.ci95:.0e}")
    record("C4 error sweeps", ok, ", ".join(parts) + "  [20 runs, 50 steps; <=1e-3, ac <=1e-4]")


def test_c5_shape_generalization(trained):
    parts, failed = [], []
    for kind in ALL_KINDS:
        t = trained(kind)
        errs = eval_shapes(t.model, t.spec, t.dt, t.h, horizon=50)
        worst = max(errs.values(), key=lambda v: math.inf if math.isnan(v) else v)
        if not worst <= 1e-2:
            failed.append(kind)
        parts.append(f"{kind} worst {worst:.1e}")
    detail = ", ".join(parts) + "  [<=1e-2 per shape]"
    if failed:
        detail += f"; failing: {', '.join(failed)}"
    record("C5 shape generalization", not failed, detail)


def test_c6_noise_ordering():
    spec = EquationSpec.from_kind("ac")
    dt = stability_dt(spec, H)
    rows = noise_sweep(spec, dt, H, n_runs=20, horizon=50, jobs=JOBS)
    means = [r.report.mean for r in rows]
    increasing = all(a < b for a, b in zip(means, means[1:]))
    ok = increasing and means[-1] > 1e-2
    detail = ", ".join(f"s={r.sigma:g}: {r.report.mean:.1e} ({r.report.n_failed} diverged)" for r in rows)
    record("C6 noise ordering", ok, detail + "  [strictly increasing, last >1e-2]")


def test_c7_conservation_and_properties():
    rng = np.random.default_rng(7)
    checks = {}
    heat = EquationSpec.from_kind("heat")
    init = field(rng, 50, 0.0, 1.0)
    traj = fdm_rollout(init, heat, StepParams(stability_dt(heat, H), H, 1000))
    m0 = traj[0].interior.sum()
    drift = max(abs(t.interior.sum() - m0) for t in traj) / abs(m0)
    checks["mass"] = drift <= 1e-10

    f = field(rng, 30)
    g = field(rng, 30)
    p = pad_neumann(f)
    checks["pad idempotence"] = pad_neumann(p) == p
    lap_f = laplacian_5pt(pad_neumann(f), H).interior
    lap_g = laplacian_5pt(pad_neumann(g), H).interior
    combo = Field.from_interior(2.0 * f.interior - 3.0 * g.interior)
    checks["linearity"] = np.allclose(laplacian_5pt(pad_neumann(combo), H).interior, 2 * lap_f - 3 * lap_g,
                                      rtol=0, atol=1e-9)
    checks["zero sum"] = abs(lap_f.sum()) * H * H <= 1e-11

    ac = EquationSpec.from_kind("ac")
    dt = stability_dt(ac, H)
    u = np.zeros((20, 20))
    pat = rng.uniform(-1, 1, (6, 6))
    u[4:10, 4:10] = pat
    v = np.zeros((20, 20))
    v[6:12, 5:11] = pat
    a = fdm_step(Field.from_interior(u), ac, dt, H).interior
    b = fdm_step(Field.from_interior(v), ac, dt, H).interior
    checks["translation"] = np.array_equal(np.roll(np.roll(a, 2, 0), 1, 1), b)

    w = rng.uniform(-1, 1, (17, 23))
    checks["transpose fdm"] = np.array_equal(fdm_step(Field.from_interior(w), ac, dt, H).interior.T,
                                             fdm_step(Field.from_interior(w.T), ac, dt, H).interior)
    m = init_model(3, seed=3)
    sym = FcnnModel(m.w_vert, m.w_vert, m.w_center, m.a)
    checks["transpose fcnn"] = np.allclose(forward(sym, Field.from_interior(w)).interior.T,
                                           forward(sym, Field.from_interior(w.T)).interior, rtol=0, atol=1e-15)
    bad = [k for k, v in checks.items() if not v]
    record("C7 conservation and properties", not bad,
           f"heat mass drift {drift:.1e} over 1000 steps (<=1e-10); "
           + ("all property checks hold" if not bad else f"failing: {', '.join(bad)}"))


def test_c8_center_function(trained):
    parts, failed = [], []
    for kind in ALL_KINDS:
        t = trained(kind)
        gap = center_fn_compare(t.model, t.spec, t.dt, t.h).max_gap
        limit = 1e-3 if kind in POLY_KINDS else 1e-2
        if not gap <= limit:
            failed.append(kind)
        parts.append(f"{kind} {gap:.1e}")
    detail = ", ".join(parts) + "  [<=1e-3 heat/fisher/ac, <=1e-2 sine/tanh]"
    if failed:
        detail += f"; failing: {', '.join(failed)}"
    record("C8 center function", not failed, detail)


def test_c9_cli_determinism(tmp_path):
    model = tmp_path / "m.fcnn"
    # converged model so shape and rollout recipes stay finite
    assert main(["train", "--equation", "ac", "--nx", "20", "--out", str(model)]) == 0
    recipes = {
        "generate": ["generate", "--equation", "fisher", "--ic", "circles3", "--nx", "20", "--noise-sigma", "1e-4",
                     "--out-dir", "{d}"],
        "train": ["train", "--equation", "sine", "--nx", "20", "--noise-sigma", "1e-5", "--max-epochs", "300",
                  "--out", "{d}/m.fcnn"],
        "eval": ["eval", "--model", "{m}", "--runs", "10", "--horizon", "10", "--jobs", str(JOBS),
                 "--out", "{d}/e.csv"],
        "eval --shapes": ["eval", "--model", "{m}", "--shapes", "--horizon", "10", "--out", "{d}/s.csv"],
        "noise-sweep": ["noise-sweep", "--nx", "20", "--runs", "3", "--horizon", "5", "--max-epochs", "200",
                        "--jobs", str(JOBS), "--out", "{d}/n.csv"],
        "rollout": ["rollout", "--model", "{m}", "--ic", "torus", "--steps", "20", "--save-every", "5",
                    "--format", "pgm", "--out-dir", "{d}"],
        "center-fn": ["center-fn", "--model", "{m}", "--out", "{d}/c.csv"],
    }
    bad = []
    for name, recipe in recipes.items():
        dirs = [tmp_path / f"{name}-{k}".replace(" ", "") for k in (1, 2)]
        codes = []
        for d in dirs:
            d.mkdir()
            codes.append(main([a.format(d=d, m=model) for a in recipe]))
        names = sorted(p.name for p in dirs[0].iterdir())
        same = names == sorted(p.name for p in dirs[1].iterdir()) and bool(names) and all(
            filecmp.cmp(dirs[0] / n, dirs[1] / n, shallow=False) for n in names)
        if codes != [0, 0] or not same:
            bad.append(name)
    record("C9 CLI determinism", not bad,
           f"{len(recipes) - len(bad)}/{len(recipes)} subcommand recipes byte-identical on rerun"
           + (f"; failing: {', '.join(bad)}" if bad else ""))
