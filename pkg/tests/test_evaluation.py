import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import H
from fcnn_rd.equations import EquationSpec, InstabilityError, fdm_step, stability_dt
from fcnn_rd.evaluation import (
    EvalReport, center_fn_compare, coefficient_error, compare_rollouts, eval_shapes, eval_sweep,
    noise_sweep, rollout_model, summarize, trajectory_errors,
)
from fcnn_rd.fcnn import FcnnModel, analytic_model, forward, init_model
from fcnn_rd.grid import GridGeometry
from fcnn_rd.ic import SHAPES, ic_random
from fcnn_rd.training import TrainConfig

AC = EquationSpec.from_kind("ac")
DT = stability_dt(AC, H)
SMALL = GridGeometry(24, 24)


def test_summarize_examples():
    mean, ci = summarize([1.0, 2.0, 3.0])
    assert mean == 2.0
    assert ci == pytest.approx(1.96 * 1.0 / math.sqrt(3))
    assert summarize([0.5, 0.5]) == (0.5, 0.0)
    assert math.isnan(summarize([1.0])[1])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=2, max_size=30))
def test_summarize_against_numpy(xs):
    mean, ci = summarize(xs)
    assert mean == pytest.approx(np.mean(xs), abs=1e-15)
    assert ci == pytest.approx(1.96 * np.std(xs, ddof=1) / math.sqrt(len(xs)), abs=1e-15)
    assert ci >= 0


def test_rollout_model_composes_forward(rng):
    m = init_model(3, seed=1)
    f = ic_random(10, 10, 0.1, 1)
    traj = rollout_model(m, f, 3)
    assert len(traj) == 4
    assert traj[3] == forward(m, forward(m, forward(m, f)))


def test_rollout_model_divergence_reports_step():
    m = FcnnModel(0, 0, 0, (0.0, 0.0, 0.0, 1e3))
    with pytest.raises(InstabilityError) as err:
        rollout_model(m, ic_random(5, 5, 0.9, 0), 200)
    assert err.value.step >= 2


def test_analytic_model_tracks_fdm():
    f = ic_random(30, 30, 0.1, 4)
    errs = trajectory_errors(analytic_model(AC, DT, H), AC, f, DT, H, 50)
    assert len(errs) == 50
    assert max(errs) < 1e-12


def test_compare_rollouts_reference_is_fdm():
    f = ic_random(12, 12, 0.1, 2)
    ours, ref, errs = compare_rollouts(analytic_model(AC, DT, H), AC, f, DT, H, 4)
    assert len(ours) == len(ref) == 5 and len(errs) == 4
    assert ref[1] == fdm_step(f, AC, DT, H)


def test_eval_sweep_seeds_and_stats():
    m = init_model(3, seed=0)
    rep = eval_sweep(m, AC, DT, H, n_runs=4, horizon=5, nx=16, ny=16)
    assert rep.seeds == [10000, 10001, 10002, 10003]
    assert rep.n_runs == 4 and rep.n_failed == 0
    assert (rep.mean, rep.ci95) == summarize(rep.errors)
    same = eval_sweep(m, AC, DT, H, horizon=5, nx=16, ny=16, seeds=[7, 7, 7])
    assert same.ci95 == 0.0


def test_eval_sweep_error_at_all_and_parallel():
    m = init_model(3, seed=0)
    final = eval_sweep(m, AC, DT, H, n_runs=3, horizon=4, nx=12, ny=12)
    mean_all = eval_sweep(m, AC, DT, H, n_runs=3, horizon=4, nx=12, ny=12, error_at="all")
    f = ic_random(12, 12, 0.1, 10000)
    errs = trajectory_errors(m, AC, f, DT, H, 4)
    assert final.errors[0] == errs[-1]
    assert mean_all.errors[0] == pytest.approx(np.mean(errs))
    par = eval_sweep(m, AC, DT, H, n_runs=3, horizon=4, nx=12, ny=12, jobs=2)
    assert np.array_equal(par.errors, final.errors)


def test_eval_sweep_counts_failures():
    m = FcnnModel(0, 0, 0, (0.0, 0.0, 0.0, 1e3))
    rep = eval_sweep(m, AC, DT, H, n_runs=3, horizon=200, nx=6, ny=6, amplitude=0.9)
    assert rep.n_failed == 3 and rep.n_runs == 0 and math.isnan(rep.mean)


def test_eval_sweep_validation():
    m = init_model(3)
    with pytest.raises(ValueError):
        eval_sweep(m, AC, DT, H, n_runs=1)
    with pytest.raises(ValueError):
        eval_sweep(m, AC, DT, H, n_runs=2, error_at="mid")


def test_eval_shapes_analytic():
    out = eval_shapes(analytic_model(AC, DT, H), AC, DT, H, horizon=5, geom=SMALL)
    assert set(out) == {s.value for s in SHAPES}
    assert max(out.values()) < 1e-12


def test_eval_shapes_marks_divergence():
    m = FcnnModel(0, 0, 0, (0.0, 0.0, 0.0, 1e3))
    out = eval_shapes(m, AC, DT, H, horizon=100, geom=SMALL)
    assert all(math.isnan(v) for v in out.values())


def test_coefficient_error_example():
    r = DT * AC.alpha / H**2
    assert coefficient_error(FcnnModel(r + 1e-3, r, 0, (0.0, 1.0)), AC, DT, H) == pytest.approx(5e-4, rel=1e-10)
    assert coefficient_error(analytic_model(AC, DT, H), AC, DT, H) == 0.0


def test_center_fn_compare_analytic_poly():
    c = center_fn_compare(analytic_model(AC, DT, H), AC, DT, H)
    assert c.phi.size == 101 and c.phi[0] == -1.0 and c.phi[-1] == 1.0
    assert c.max_gap < 1e-14
    assert len(c.rows()) == 101


@pytest.mark.parametrize("kind, bound", [
    # Lagrange remainder on |phi| <= 1: dt beta max|f^(10)| / 10!
    # max|tanh^(10)| on [-1, 1] is 45572.04 (sympy, dense sampling)
    ("sine", lambda dtb: dtb * math.pi**10 / math.factorial(10)),
    ("tanh", lambda dtb: dtb * 45573.0 / math.factorial(10)),
])
def test_center_fn_taylor_remainder(kind, bound):
    s = EquationSpec.from_kind(kind)
    dt = stability_dt(s, H)
    gap = center_fn_compare(analytic_model(s, dt, H), s, dt, H).max_gap
    assert 0 < gap <= bound(dt * s.beta)


def test_noise_sweep_rows():
    cfg = TrainConfig(max_epochs=200)
    rows = noise_sweep(AC, DT, H, sigmas=(0.0, 1e-2), n_runs=3, horizon=3, cfg=cfg, nx=12, ny=12)
    assert [r.sigma for r in rows] == [0.0, 1e-2]
    assert all(isinstance(r.report, EvalReport) for r in rows)
    with pytest.raises(ValueError):
        noise_sweep(AC, DT, H, sigmas=(1e-2, 0.0))


def test_noise_sweep_zero_sigma_matches_direct():
    from fcnn_rd.training import make_pairs, train
    cfg = TrainConfig(max_epochs=100)
    row = noise_sweep(AC, DT, H, sigmas=(0.0,), n_runs=2, horizon=3, cfg=cfg, nx=10, ny=10)[0]
    tr, va = make_pairs(AC, DT, H, 0, 0.0, 10, 10)
    m, _ = train(init_model(3, seed=0), tr, va, cfg)
    direct = eval_sweep(m, AC, DT, H, 2, 3, nx=10, ny=10)
    assert np.array_equal(row.report.errors, direct.errors)
