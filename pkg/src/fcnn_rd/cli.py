"""Command-line entry point: ``fcnn-rd <subcommand> [flags]``.

Data goes to files; diagnostics go to stderr. Any subcommand also takes
``--config FILE`` with ``key=value`` lines (keys are flag names with
dashes or underscores); explicit flags override the file.
"""

import argparse
from dataclasses import dataclass
import logging
import math
import os
from pathlib import Path
import sys

import numpy as np

from . import io
from .equations import EquationSpec, InstabilityError, Kind, stability_dt
from .evaluation import (
    DEFAULT_HORIZON, DEFAULT_SIGMAS, center_fn_compare, coefficient_error, compare_rollouts,
    eval_shapes, eval_sweep, noise_sweep,
)
from .fcnn import init_model
from .grid import GridGeometry
from .ic import IcParams, Shape, make_ic
from .training import SnapshotPair, TrainConfig, TrainingError, make_pairs, noisy_successor, train

log = logging.getLogger("fcnn_rd")

EQUATIONS = [k.value for k in Kind]


class CliError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved settings for one invocation."""

    spec: EquationSpec
    geom: GridGeometry
    dt: float
    seed: int
    noise_sigma: float
    train: TrainConfig


def _say(msg):
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------- parser


def _add_common(p):
    p.add_argument("--config", default=None, help="key=value file of flag defaults (default: none)")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging (default: off)")


def _add_grid(p):
    p.add_argument("--nx", type=int, default=100, help="interior cells in x (default: 100)")
    p.add_argument("--ny", type=int, default=None, help="interior cells in y (default: same as --nx)")
    p.add_argument("--domain", type=float, nargs=4, default=[0.0, 1.0, 0.0, 1.0],
                   metavar=("A", "B", "C", "D"), help="domain (A,B)x(C,D) (default: 0 1 0 1)")


def _add_equation(p, required=True, default=None):
    p.add_argument("--equation", choices=EQUATIONS, required=required and default is None, default=default,
                   help=f"reaction-diffusion equation (default: {default})")
    p.add_argument("--alpha", type=float, default=None, help="diffusion override (default: table value)")
    p.add_argument("--beta", type=float, default=None, help="reaction override (default: table value)")
    p.add_argument("--poly-order", type=int, default=None,
                   help="polynomial order N (default: 3 for heat/fisher/ac, 9 for sine/tanh)")
    p.add_argument("--dt", type=float, default=None, help="time step (default: stability_dt, factor 0.4)")
    p.add_argument("--force-dt", action="store_true", help="allow --dt above the stability bound (default: off)")


def _add_ic(p, default="random"):
    p.add_argument("--ic", choices=[s.value for s in Shape], default=default,
                   help=f"initial condition shape (default: {default})")
    p.add_argument("--r0", type=float, default=0.25, help="circle radius (default: 0.25)")
    p.add_argument("--r1", type=float, default=0.4, help="torus outer radius (default: 0.4)")
    p.add_argument("--r2", type=float, default=0.2, help="torus inner radius (default: 0.2)")
    p.add_argument("--eps", type=float, default=0.012, help="interface thickness (default: 0.012)")
    p.add_argument("--amplitude", type=float, default=0.1, help="random IC amplitude (default: 0.1)")


def _add_training(p):
    p.add_argument("--seed", type=int, default=0, help="seed for data, init and noise (default: 0)")
    p.add_argument("--noise-sigma", type=float, default=0.0, help="std of noise added to u1 (default: 0)")
    p.add_argument("--lr", type=float, default=0.01, help="Adam learning rate (default: 0.01)")
    p.add_argument("--patience", type=int, default=500, help="early-stopping patience in epochs (default: 500)")
    p.add_argument("--max-epochs", type=int, default=50_000, help="epoch cap (default: 50000)")
    p.add_argument("--delta", type=float, default=1e-20, help="training-loss stop threshold (default: 1e-20)")


def _add_eval(p):
    p.add_argument("--runs", type=int, default=100, help="random initial conditions (default: 100)")
    p.add_argument("--horizon", type=int, default=DEFAULT_HORIZON,
                   help=f"rollout steps before measuring (default: {DEFAULT_HORIZON})")
    p.add_argument("--base-seed", type=int, default=10_000, help="seed of run k is base+k (default: 10000)")
    p.add_argument("--error-at", choices=["final", "all"], default="final",
                   help="error at final step or mean over steps (default: final)")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                   help="worker processes (default: available cores)")


def build_parser():
    parser = argparse.ArgumentParser(prog="fcnn-rd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write an FDM snapshot pair u0/u1")
    _add_common(p)
    _add_equation(p)
    _add_grid(p)
    _add_ic(p)
    p.add_argument("--seed", type=int, default=0, help="seed for random IC and noise (default: 0)")
    p.add_argument("--noise-sigma", type=float, default=0.0, help="std of noise added to u1 (default: 0)")
    p.add_argument("--out-dir", default=".", help="output directory (default: .)")
    p.add_argument("--prefix", default="pair", help="file prefix (default: pair)")

    p = sub.add_parser("train", help="train an FCNN on one snapshot pair")
    _add_common(p)
    _add_equation(p)
    _add_grid(p)
    _add_training(p)
    p.add_argument("--train-pair", default=None, help="prefix of existing <prefix>_0/_1.fgrid pair (default: generate)")
    p.add_argument("--val-pair", default=None, help="prefix of validation pair (default: generate)")
    p.add_argument("--out", default="model.fcnn", help="checkpoint path (default: model.fcnn)")

    p = sub.add_parser("eval", help="relative L2 error sweep against FDM")
    _add_common(p)
    p.add_argument("--model", required=True, help="checkpoint file")
    p.add_argument("--equation", choices=EQUATIONS, default=None, help="must match checkpoint (default: from checkpoint)")
    _add_eval(p)
    p.add_argument("--shapes", action="store_true", help="evaluate named shapes instead of random ICs (default: off)")
    p.add_argument("--out", default="eval.csv", help="CSV output (default: eval.csv)")

    p = sub.add_parser("noise-sweep", help="train and evaluate per noise level")
    _add_common(p)
    _add_equation(p, default="ac")
    _add_grid(p)
    _add_training(p)
    _add_eval(p)
    p.add_argument("--sigmas", default=",".join(f"{s:g}" for s in DEFAULT_SIGMAS),
                   help="comma-separated noise levels (default: 0,1e-06,0.0001,0.01)")
    p.add_argument("--out", default="noise.csv", help="CSV output (default: noise.csv)")

    p = sub.add_parser("rollout", help="export FCNN and FDM trajectories side by side")
    _add_common(p)
    p.add_argument("--model", required=True, help="checkpoint file")
    p.add_argument("--equation", choices=EQUATIONS, default=None, help="must match checkpoint (default: from checkpoint)")
    _add_ic(p, default="circle")
    p.add_argument("--seed", type=int, default=0, help="seed for a random IC (default: 0)")
    p.add_argument("--steps", type=int, default=100, help="rollout steps (default: 100)")
    p.add_argument("--save-every", type=int, default=25, help="snapshot interval (default: 25)")
    p.add_argument("--format", choices=["fgrid", "pgm"], default="fgrid",
                   help="pgm also writes 8-bit images of [-1,1] (default: fgrid)")
    p.add_argument("--out-dir", default=".", help="output directory (default: .)")
    p.add_argument("--prefix", default="rollout", help="file prefix (default: rollout)")

    p = sub.add_parser("center-fn", help="analytic vs learned center function")
    _add_common(p)
    p.add_argument("--model", required=True, help="checkpoint file")
    p.add_argument("--equation", choices=EQUATIONS, default=None, help="must match checkpoint (default: from checkpoint)")
    p.add_argument("--points", type=int, default=101, help="grid points (default: 101)")
    p.add_argument("--phi-min", type=float, default=-1.0, help="grid start (default: -1)")
    p.add_argument("--phi-max", type=float, default=1.0, help="grid end (default: 1)")
    p.add_argument("--out", default="center.csv", help="CSV output (default: center.csv)")
    return parser


def _subparser(parser, name):
    for action in parser._subparsers._group_actions:
        if name in action.choices:
            return action.choices[name]
    raise KeyError(name)


def _config_path(argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    return known.config


def _apply_config(sp, command, path):
    known = {a.dest: a for a in sp._actions}
    defaults = {}
    for key, value in io.read_keyvalue(path).items():
        dest = key.replace("-", "_")
        if dest not in known or dest in ("config", "help"):
            raise CliError(f"config key {key!r} is not a flag of '{command}'")
        action = known[dest]
        if action.nargs == 4:
            defaults[dest] = [float(v) for v in value.split()]
        elif action.const is True:
            defaults[dest] = value.lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            defaults[dest] = action.type(value)
        else:
            defaults[dest] = value
        action.required = False
    sp.set_defaults(**defaults)


def parse_args(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    path = _config_path(argv)
    if path is not None:
        command = next((a for a in argv if not a.startswith("-")), None)
        try:
            sp = _subparser(parser, command)
        except KeyError:
            raise CliError(f"--config needs a subcommand, got {command!r}") from None
        _apply_config(sp, command, path)
    return parser.parse_args(argv)


# ---------------------------------------------------------------- resolution


def resolve(args):
    a, b, c, d = args.domain
    nx = args.nx
    ny = args.ny if args.ny is not None else nx
    geom = GridGeometry(nx, ny, a, b, c, d)
    spec = EquationSpec.from_kind(args.equation, args.alpha, args.beta, args.poly_order)
    bound = stability_dt(spec, geom.h)
    dt = bound if args.dt is None else args.dt
    if dt > bound and not args.force_dt:
        raise CliError(
            f"dt={dt:g} exceeds the explicit stability bound {bound:g} for {spec.kind.value} "
            f"with h={geom.h:g}; pass --force-dt to run anyway"
        )
    cfg = TrainConfig(
        lr=getattr(args, "lr", 0.01), max_epochs=getattr(args, "max_epochs", 50_000),
        delta=getattr(args, "delta", 1e-20), patience=getattr(args, "patience", 500),
        seed=args.seed,
    )
    return RunConfig(spec, geom, dt, args.seed, getattr(args, "noise_sigma", 0.0), cfg)


def _load_checkpoint(args):
    path = Path(args.model)
    if not path.exists():
        raise CliError(f"checkpoint not found: {path}")
    ckpt = io.read_checkpoint(path)
    if args.equation is not None and Kind(args.equation) is not ckpt.kind:
        raise CliError(f"checkpoint was trained for '{ckpt.kind.value}', refusing to evaluate as '{args.equation}'")
    spec = EquationSpec.from_kind(ckpt.kind, poly_order=ckpt.model.poly_order)
    nx = int(round(1.0 / ckpt.h))
    return ckpt, spec, GridGeometry(nx, nx)


def _ic_params(args):
    return IcParams(Shape(args.ic), args.r0, args.r1, args.r2, args.eps, args.amplitude, args.seed)


# ---------------------------------------------------------------- commands


def cmd_generate(args):
    run = resolve(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    u0 = make_ic(_ic_params(args), run.geom)
    u1 = noisy_successor(u0, run.spec, run.dt, run.geom.h, run.noise_sigma, run.seed)
    paths = io.write_trajectory(out / args.prefix, [u0, u1], [0, 1], run.spec, run.dt, run.geom.h, 1)
    _say(f"wrote {', '.join(paths)} (dt={run.dt:g}, h={run.geom.h:g})")


def _load_pair(prefix, run):
    u0 = io.read_fgrid(f"{prefix}_0.fgrid")
    u1 = io.read_fgrid(f"{prefix}_1.fgrid")
    return SnapshotPair(u0, u1, run.spec, run.dt, run.geom.h, run.seed, run.noise_sigma)


def cmd_train(args):
    run = resolve(args)
    h = run.geom.h
    train_pair, val_pair = make_pairs(run.spec, run.dt, h, run.seed, run.noise_sigma, run.geom.nx, run.geom.ny)
    if args.train_pair:
        train_pair = _load_pair(args.train_pair, run)
    if args.val_pair:
        val_pair = _load_pair(args.val_pair, run)
    model0 = init_model(run.spec.poly_order, seed=run.seed)
    model, report = train(model0, train_pair, val_pair, run.train)
    out = Path(args.out)
    io.write_checkpoint(out, io.Checkpoint(model, run.spec.kind, run.dt, h, run.seed))
    rows = [(k + 1, tl, vl) for k, (tl, vl) in enumerate(zip(report.train_history, report.val_history))]
    io.write_csv(out.with_suffix(".trainlog"), ["epoch", "train_loss", "val_loss"], rows)
    _say(f"stop_reason={report.stop_reason.value} epochs={report.epochs_run} "
         f"train_loss={report.final_train_loss:.3e} val_loss={report.final_val_loss:.3e} "
         f"coefficient_error={coefficient_error(model, run.spec, run.dt, h):.3e}")


def cmd_eval(args):
    ckpt, spec, geom = _load_checkpoint(args)
    if args.shapes:
        table = eval_shapes(ckpt.model, spec, ckpt.dt, ckpt.h, args.horizon, geom, error_at=args.error_at)
        io.write_csv(args.out, ["shape", "rel_l2"], list(table.items()))
        for k, v in table.items():
            _say(f"{k:9s} {v:.3e}")
        if any(math.isnan(v) for v in table.values()):
            raise CliError("one or more shape rollouts were unstable (rel_l2=nan)")
        return
    rep = eval_sweep(ckpt.model, spec, ckpt.dt, ckpt.h, args.runs, args.horizon, args.base_seed,
                     geom.nx, geom.ny, error_at=args.error_at, jobs=args.jobs)
    rows = [(k, s, float(e), None) for k, (s, e) in enumerate(zip(rep.seeds, rep.errors))]
    rows.append(("summary", None, rep.mean, rep.ci95))
    io.write_csv(args.out, ["run", "seed", "rel_l2", "ci95"], rows)
    _say(f"{spec.kind.value}: relative L2 = {rep.mean:.3e} +- {rep.ci95:.1e} "
         f"over {rep.n_runs} runs ({rep.n_failed} failed)")


def cmd_noise_sweep(args):
    run = resolve(args)
    sigmas = [float(s) for s in args.sigmas.split(",") if s.strip()]
    rows_out = noise_sweep(run.spec, run.dt, run.geom.h, sigmas, args.runs, args.horizon, args.base_seed,
                           run.seed, run.train, run.geom.nx, run.geom.ny, jobs=args.jobs)
    rows = []
    for r in rows_out:
        reason = r.train_report.stop_reason.value if r.train_report else "failed"
        rows.append((r.sigma, r.report.mean, r.report.ci95, r.report.n_runs, r.report.n_failed, reason))
        _say(f"sigma={r.sigma:g}: {r.report.mean:.3e} +- {r.report.ci95:.1e} ({reason})")
    io.write_csv(args.out, ["sigma", "mean", "ci95", "n_runs", "n_failed", "stop_reason"], rows)


def cmd_rollout(args):
    ckpt, spec, geom = _load_checkpoint(args)
    if args.save_every < 1:
        raise CliError("--save-every must be >= 1")
    init = make_ic(_ic_params(args), geom)
    ours, ref, errors = compare_rollouts(ckpt.model, spec, init, ckpt.dt, ckpt.h, args.steps)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    steps = list(range(0, args.steps + 1, args.save_every))
    for tag, traj in (("fcnn", ours), ("fdm", ref)):
        prefix = out / f"{args.prefix}_{tag}"
        io.write_trajectory(prefix, [traj[s] for s in steps], steps, spec, ckpt.dt, ckpt.h, args.save_every)
        if args.format == "pgm":
            for s in steps:
                io.write_pgm(f"{prefix}_{s}.pgm", traj[s])
    io.write_csv(out / f"{args.prefix}_errors.csv", ["step", "rel_l2"],
                 [(k + 1, float(e)) for k, e in enumerate(errors)])
    if errors:
        _say(f"final relative L2 after {args.steps} steps: {errors[-1]:.3e}")


def cmd_center_fn(args):
    ckpt, spec, _ = _load_checkpoint(args)
    phi = np.linspace(args.phi_min, args.phi_max, args.points)
    curve = center_fn_compare(ckpt.model, spec, ckpt.dt, ckpt.h, phi)
    io.write_csv(args.out, ["phi", "analytic", "learned"], curve.rows())
    _say(f"max |analytic - learned| on [{args.phi_min:g}, {args.phi_max:g}] = {curve.max_gap:.3e}")


COMMANDS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "eval": cmd_eval,
    "noise-sweep": cmd_noise_sweep,
    "rollout": cmd_rollout,
    "center-fn": cmd_center_fn,
}


def main(argv=None):
    try:
        args = parse_args(argv)
    except (CliError, OSError, ValueError) as exc:
        _say(f"error: {exc}")
        return 2
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        COMMANDS[args.command](args)
    except (CliError, InstabilityError, TrainingError, ValueError, OSError) as exc:
        _say(f"error: {exc}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
