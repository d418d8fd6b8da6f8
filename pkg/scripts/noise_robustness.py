"""Allen-Cahn models trained on noisy successors: error against noise level."""

import argparse

from _common import H, JOBS
from fcnn_rd.equations import EquationSpec, stability_dt
from fcnn_rd.evaluation import DEFAULT_SIGMAS, noise_sweep
from fcnn_rd.io import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--runs", type=int, default=100, help="random ICs per noise level (default: 100)")
    ap.add_argument("--horizon", type=int, default=50, help="rollout steps (default: 50)")
    ap.add_argument("--sigmas", type=float, nargs="+", default=list(DEFAULT_SIGMAS),
                    help="noise levels (default: 0 1e-6 1e-4 1e-2)")
    ap.add_argument("--out", default=None, help="optional CSV path (default: none)")
    args = ap.parse_args()

    spec = EquationSpec.from_kind("ac")
    dt = stability_dt(spec, H)
    rows = noise_sweep(spec, dt, H, args.sigmas, args.runs, args.horizon, jobs=JOBS)
    out = []
    for r in rows:
        reason = r.train_report.stop_reason.value if r.train_report else "failed"
        print(f"sigma={r.sigma:<8g} rel L2 {r.report.mean:.3e} +- {r.report.ci95:.1e} "
              f"({r.report.n_failed} diverged, {reason})")
        out.append((r.sigma, r.report.mean, r.report.ci95, r.report.n_failed, reason))
    if args.out:
        write_csv(args.out, ["sigma", "mean", "ci95", "n_failed", "stop_reason"], out)


if __name__ == "__main__":
    main()
