"""Relative L2 error of trained models on the five named initial shapes."""

import argparse
import math

from _common import H, KINDS, train_default
from fcnn_rd.evaluation import eval_shapes
from fcnn_rd.ic import SHAPES
from fcnn_rd.io import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--horizon", type=int, default=50, help="rollout steps (default: 50)")
    ap.add_argument("--equations", nargs="+", default=KINDS, choices=KINDS, help="(default: all five)")
    ap.add_argument("--out", default=None, help="optional CSV path (default: none)")
    args = ap.parse_args()

    names = [s.value for s in SHAPES]
    print(f"{'equation':8s} " + " ".join(f"{n:>9s}" for n in names))
    rows = []
    for kind in args.equations:
        spec, dt, model, _, _ = train_default(kind)
        errs = eval_shapes(model, spec, dt, H, args.horizon)
        cells = ["diverged" if math.isnan(errs[n]) else f"{errs[n]:.2e}" for n in names]
        print(f"{kind:8s} " + " ".join(f"{c:>9s}" for c in cells))
        rows.append((kind, *[errs[n] for n in names]))
    if args.out:
        write_csv(args.out, ["equation", *names], rows)


if __name__ == "__main__":
    main()
