"""Shared helpers for the experiment scripts."""

import os
import time

from fcnn_rd.equations import EquationSpec, stability_dt
from fcnn_rd.fcnn import init_model
from fcnn_rd.training import TrainConfig, make_pairs, train

H = 0.01
KINDS = ["heat", "fisher", "ac", "sine", "tanh"]
JOBS = os.cpu_count() or 1


def train_default(kind, seed=0, cfg=TrainConfig(), amplitude=0.1):
    """Default model for ``kind`` on a 100x100 grid; returns (spec, dt, model, report, seconds)."""
    spec = EquationSpec.from_kind(kind)
    dt = stability_dt(spec, H)
    tr, va = make_pairs(spec, dt, H, seed, amplitude=amplitude)
    t0 = time.perf_counter()
    model, report = train(init_model(spec.poly_order, seed=seed), tr, va, cfg)
    return spec, dt, model, report, time.perf_counter() - t0
