"""Learned versus analytic center function of each trained model on [-1, 1]."""

import argparse

from _common import H, KINDS, train_default
from fcnn_rd.evaluation import center_fn_compare
from fcnn_rd.io import write_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--equations", nargs="+", default=KINDS, choices=KINDS, help="(default: all five)")
    ap.add_argument("--out-prefix", default=None, help="write <prefix>_<equation>.csv curves (default: none)")
    args = ap.parse_args()

    for kind in args.equations:
        spec, dt, model, _, _ = train_default(kind)
        curve = center_fn_compare(model, spec, dt, H)
        print(f"{kind:8s} max |analytic - learned| = {curve.max_gap:.3e}")
        if args.out_prefix:
            write_csv(f"{args.out_prefix}_{kind}.csv", ["phi", "analytic", "learned"], curve.rows())


if __name__ == "__main__":
    main()
