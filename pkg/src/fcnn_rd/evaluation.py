"""Error sweeps, shape tests, noise sweeps and center-function comparisons."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import logging
import math

import numpy as np

from .equations import InstabilityError, StepParams, analytic_center_fn, fdm_rollout
from .fcnn import forward, init_model, learned_center_fn
from .grid import GridGeometry, pad_neumann, relative_l2
from .ic import SHAPES, IcParams, Shape, ic_random, make_ic
from .training import TrainConfig, make_pairs, train

log = logging.getLogger(__name__)

DEFAULT_HORIZON = 50
DEFAULT_SIGMAS = (0.0, 1e-6, 1e-4, 1e-2)


@dataclass
class EvalReport:
    errors: np.ndarray
    mean: float
    ci95: float
    n_runs: int
    horizon: int
    n_failed: int = 0
    label: str = ""
    seeds: list = field(default_factory=list)

    @classmethod
    def from_errors(cls, errors, horizon, n_failed=0, label="", seeds=()):
        errors = np.asarray(errors, dtype=np.float64)
        mean, ci = summarize(errors)
        return cls(errors, mean, ci, errors.size, horizon, n_failed, label, list(seeds))


def summarize(errors):
    """Mean and normal-approximation 95% half-width ``1.96 * s / sqrt(n)``."""
    errors = np.asarray(errors, dtype=np.float64)
    if errors.size == 0:
        return math.nan, math.nan
    if errors.size == 1:
        return float(errors[0]), math.nan
    return float(errors.mean()), float(1.96 * errors.std(ddof=1) / math.sqrt(errors.size))


def rollout_model(model, init, n_steps):
    traj = [pad_neumann(init)]
    for k in range(1, n_steps + 1):
        try:
            traj.append(forward(model, traj[-1]))
        except (FloatingPointError, ValueError) as exc:
            raise InstabilityError(f"model rollout diverged at step {k}: {exc}", step=k) from exc
    return traj


def trajectory_errors(model, spec, init, dt, h, horizon):
    """Relative L2 error of the model against FDM at steps 1..horizon."""
    ours = rollout_model(model, init, horizon)
    ref = fdm_rollout(init, spec, StepParams(dt, h, horizon))
    return [relative_l2(p, r) for p, r in zip(ours[1:], ref[1:])]


def _run_error(model, spec, init, dt, h, horizon, error_at):
    if horizon == 0:
        return 0.0
    errs = trajectory_errors(model, spec, init, dt, h, horizon)
    return errs[-1] if error_at == "final" else float(np.mean(errs))


def _sweep_task(args):
    model, spec, dt, h, horizon, seed, nx, ny, amplitude, error_at = args
    init = ic_random(nx, ny, amplitude, seed)
    try:
        return _run_error(model, spec, init, dt, h, horizon, error_at)
    except InstabilityError as exc:
        log.warning("run with seed %d failed: %s", seed, exc)
        return None


def _map(fn, items, jobs):
    if jobs is None or jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def eval_sweep(model, spec, dt, h, n_runs=100, horizon=DEFAULT_HORIZON, base_seed=10_000,
               nx=100, ny=100, amplitude=0.1, error_at="final", jobs=1, seeds=None):
    """Model-vs-FDM relative L2 over ``n_runs`` random ICs with seeds ``base_seed + k``.

    ``seeds`` overrides the generated list. Unstable runs are dropped from
    the statistics and counted in ``n_failed``.
    """
    seeds = [base_seed + k for k in range(n_runs)] if seeds is None else list(seeds)
    if len(seeds) < 2:
        raise ValueError("n_runs must be >= 2")
    if error_at not in ("final", "all"):
        raise ValueError("error_at must be 'final' or 'all'")
    tasks = [(model, spec, dt, h, horizon, s, nx, ny, amplitude, error_at) for s in seeds]
    results = _map(_sweep_task, tasks, jobs)
    ok = [(s, e) for s, e in zip(seeds, results) if e is not None]
    return EvalReport.from_errors(
        [e for _, e in ok], horizon, n_failed=len(seeds) - len(ok),
        label=spec.kind.value, seeds=[s for s, _ in ok],
    )


def eval_shapes(model, spec, dt, h, horizon=DEFAULT_HORIZON, geom=None, ic_params=IcParams(),
                error_at="final"):
    """Relative L2 per named shape; ``nan`` marks an unstable rollout."""
    geom = geom or GridGeometry()
    out = {}
    for shape in SHAPES:
        init = make_ic(IcParams(shape, ic_params.r0, ic_params.r1, ic_params.r2, ic_params.eps), geom)
        try:
            out[shape.value] = _run_error(model, spec, init, dt, h, horizon, error_at)
        except InstabilityError as exc:
            log.warning("shape %s failed: %s", shape.value, exc)
            out[shape.value] = math.nan
    return out


@dataclass
class NoiseRow:
    sigma: float
    report: EvalReport
    train_report: object = None
    error: str = ""


def _noise_task(args):
    spec, dt, h, sigma, n_runs, horizon, base_seed, train_seed, cfg, nx, ny = args
    try:
        tr, va = make_pairs(spec, dt, h, train_seed, sigma, nx, ny)
        model, rep = train(init_model(spec.poly_order, seed=train_seed), tr, va, cfg)
        report = eval_sweep(model, spec, dt, h, n_runs, horizon, base_seed, nx, ny)
        return NoiseRow(sigma, report, rep)
    except Exception as exc:  # recorded per row
        log.warning("noise sweep sigma=%g failed: %s", sigma, exc)
        return NoiseRow(sigma, EvalReport.from_errors([], horizon, n_failed=n_runs), None, str(exc))


def noise_sweep(spec, dt, h, sigmas=DEFAULT_SIGMAS, n_runs=100, horizon=DEFAULT_HORIZON,
                base_seed=10_000, train_seed=0, cfg=TrainConfig(), nx=100, ny=100, jobs=1):
    """Train one model per noise level on ``u0, u1 + eta`` and sweep it."""
    sigmas = [float(s) for s in sigmas]
    if sigmas != sorted(sigmas):
        raise ValueError("sigmas must be sorted ascending")
    tasks = [(spec, dt, h, s, n_runs, horizon, base_seed, train_seed, cfg, nx, ny) for s in sigmas]
    return _map(_noise_task, tasks, jobs)


def coefficient_error(model, spec, dt, h):
    """Mean absolute deviation of the tied neighbour weights from ``dt alpha / h^2``."""
    r = dt * spec.alpha / (h * h)
    return (abs(model.w_vert - r) + abs(model.w_horiz - r)) / 2.0


@dataclass
class CenterCurve:
    phi: np.ndarray
    analytic: np.ndarray
    learned: np.ndarray

    @property
    def max_gap(self):
        return float(np.max(np.abs(self.analytic - self.learned)))

    def rows(self):
        return list(zip(self.phi.tolist(), self.analytic.tolist(), self.learned.tolist()))


def center_fn_compare(model, spec, dt, h, phi_grid=None):
    phi = np.linspace(-1.0, 1.0, 101) if phi_grid is None else np.asarray(phi_grid, dtype=np.float64)
    return CenterCurve(phi, analytic_center_fn(spec, dt, h, phi), learned_center_fn(model, phi))


def compare_rollouts(model, spec, init, dt, h, n_steps):
    """Model and FDM trajectories side by side plus per-step relative L2."""
    ours = rollout_model(model, init, n_steps)
    ref = fdm_rollout(init, spec, StepParams(dt, h, n_steps))
    errors = [relative_l2(p, r) for p, r in zip(ours[1:], ref[1:])]
    return ours, ref, errors


def ic_for(shape, geom, params=IcParams()):
    """Convenience wrapper: the named IC on ``geom`` with other params from ``params``."""
    shape = Shape(shape)
    return make_ic(IcParams(shape, params.r0, params.r1, params.r2, params.eps, params.amplitude, params.seed), geom)
