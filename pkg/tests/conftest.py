import time

import hypothesis
import numpy as np
import pytest

from fcnn_rd.equations import EquationSpec, Kind, stability_dt
from fcnn_rd.fcnn import init_model
from fcnn_rd.grid import Field
from fcnn_rd.training import make_pairs, train

hypothesis.settings.register_profile("default", max_examples=50, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")

H = 0.01
ALL_KINDS = [k.value for k in Kind]
POLY_KINDS = ["heat", "fisher", "ac"]

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_field(rng, nx, ny=None, lo=-1.0, hi=1.0):
    ny = nx if ny is None else ny
    return Field.from_interior(rng.uniform(lo, hi, (ny, nx)))


class Trained:
    def __init__(self, kind, seed=0):
        self.spec = EquationSpec.from_kind(kind)
        self.h = H
        self.dt = stability_dt(self.spec, H)
        self.train_pair, self.val_pair = make_pairs(self.spec, self.dt, H, seed)
        t0 = time.perf_counter()
        self.model, self.report = train(init_model(self.spec.poly_order, seed=seed), self.train_pair, self.val_pair)
        self.seconds = time.perf_counter() - t0


_CACHE = {}


@pytest.fixture(scope="session")
def trained():
    """Lazily trained default model per equation, shared by the whole session."""

    def get(kind):
        if kind not in _CACHE:
            _CACHE[kind] = Trained(kind)
        return _CACHE[kind]

    return get
