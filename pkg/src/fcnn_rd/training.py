"""Snapshot pairs, Adam, and the full-batch training loop."""

from dataclasses import dataclass, field
import enum
import logging
import math

import numpy as np

from .equations import fdm_step
from .fcnn import GradientVector, design_matrix, forward, loss_mse
from .grid import Field
from .ic import ic_random
from .prng import Xoshiro256, derive_seed

log = logging.getLogger(__name__)

NOISE_STREAM = 1
VAL_STREAM = 2


@dataclass(frozen=True)
class SnapshotPair:
    u0: Field
    u1: Field
    spec: object
    dt: float
    h: float
    seed: int
    noise_sigma: float = 0.0


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.01
    max_epochs: int = 50_000
    delta: float = 1e-20
    patience: int = 500
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if not self.lr > 0:
            raise ValueError("lr must be positive")
        if self.patience < 1:
            raise ValueError("patience must be >= 1")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")


@dataclass(frozen=True)
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n):
        return cls(np.zeros(n), np.zeros(n), 0)


class StopReason(enum.Enum):
    DELTA_REACHED = "DeltaReached"
    EARLY_STOPPED = "EarlyStopped"
    MAX_EPOCHS = "MaxEpochs"


@dataclass
class TrainReport:
    epochs_run: int
    final_train_loss: float
    final_val_loss: float
    stop_reason: StopReason
    best_epoch: int
    train_history: list = field(default_factory=list)
    val_history: list = field(default_factory=list)


class TrainingError(RuntimeError):
    pass


def noisy_successor(u0, spec, dt, h, noise_sigma=0.0, seed=0):
    """One FDM step of ``u0`` plus ``N(0, sigma^2)`` noise on the interior.

    Noise comes from a stream derived from ``seed``; ghosts are re-padded.
    """
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be non-negative")
    u1 = fdm_step(u0, spec, dt, h)
    if noise_sigma > 0:
        eta = Xoshiro256(derive_seed(seed, NOISE_STREAM)).normal(u0.nx * u0.ny)
        u1 = Field.from_interior(u1.interior + noise_sigma * eta.reshape(u0.ny, u0.nx))
    return u1


def make_pair(spec, dt, h, seed, noise_sigma=0.0, nx=100, ny=100, amplitude=0.1):
    """Random initial state and its (optionally noisy) one-step successor."""
    u0 = ic_random(nx, ny, amplitude, seed)
    u1 = noisy_successor(u0, spec, dt, h, noise_sigma, seed)
    return SnapshotPair(u0, u1, spec, dt, h, seed, noise_sigma)


def make_pairs(spec, dt, h, seed, noise_sigma=0.0, nx=100, ny=100, amplitude=0.1):
    """Training pair from ``seed`` and a validation pair from an independent IC."""
    train = make_pair(spec, dt, h, seed, noise_sigma, nx, ny, amplitude)
    val = make_pair(spec, dt, h, derive_seed(seed, VAL_STREAM), noise_sigma, nx, ny, amplitude)
    return train, val


def adam_step(state, params, grad, cfg):
    g = grad.to_vector() if isinstance(grad, GradientVector) else np.asarray(grad, dtype=np.float64)
    params = np.asarray(params, dtype=np.float64)
    if g.shape != params.shape or state.m.shape != params.shape:
        raise ValueError("parameter, gradient and state layouts differ")
    b1, b2 = cfg.adam_beta1, cfg.adam_beta2
    t = state.t + 1
    m = b1 * state.m + (1.0 - b1) * g
    v = b2 * state.v + (1.0 - b2) * (g * g)
    m_hat = m / (1.0 - b1**t)
    v_hat = v / (1.0 - b2**t)
    new = params - cfg.lr * m_hat / (np.sqrt(v_hat) + cfg.adam_eps)
    return new, AdamState(m, v, t)


class _Objective:
    """Cached features of one pair: loss and gradient for a parameter vector."""

    def __init__(self, pair, poly_order, b):
        self.X = design_matrix(pair.u0, poly_order, b)
        self.y = pair.u1.interior.ravel().copy()
        self.scale = 2.0 / self.y.size

    def __call__(self, theta):
        with np.errstate(over="ignore", invalid="ignore"):
            r = self.X @ theta - self.y
            return float(np.mean(r * r)), self.scale * (self.X.T @ r)


def _val_loss(model, theta, pair):
    if not np.all(np.isfinite(theta)):
        return math.nan
    try:
        return loss_mse(forward(model.with_theta(theta), pair.u0), pair.u1)
    except FloatingPointError:
        return math.nan


def train(model, train_pair, val_pair, cfg=TrainConfig()):
    """Fit the trainables of ``model`` to one snapshot pair.

    Each epoch evaluates the training loss and gradient and the validation
    loss at the current parameters, then takes one Adam step. Training
    stops when the training loss drops below ``cfg.delta`` (current
    parameters kept) or when validation loss has not improved for
    ``cfg.patience`` epochs or ``max_epochs`` run out (best-validation
    parameters restored).
    """
    if train_pair.u0.shape != val_pair.u0.shape or train_pair.u0.shape != train_pair.u1.shape:
        raise ValueError("training and validation pairs must share dimensions")
    objective = _Objective(train_pair, model.poly_order, model.b)
    theta = model.theta
    state = AdamState.zeros(theta.size)
    train_hist, val_hist = [], []
    best_val, best_theta, best_epoch = math.inf, theta, 0
    reason = StopReason.MAX_EPOCHS
    returned_theta = None

    for epoch in range(1, cfg.max_epochs + 1):
        loss, grad = objective(theta)
        val = _val_loss(model, theta, val_pair)
        if not (math.isfinite(loss) and math.isfinite(val)):
            raise TrainingError(
                f"loss became non-finite at epoch {epoch} (lr={cfg.lr:g}); "
                "lower the learning rate or check the snapshot data"
            )
        train_hist.append(loss)
        val_hist.append(val)
        if val < best_val:
            best_val, best_theta, best_epoch = val, theta, epoch
        if loss < cfg.delta:
            reason, returned_theta = StopReason.DELTA_REACHED, theta
            break
        if epoch - best_epoch >= cfg.patience:
            reason = StopReason.EARLY_STOPPED
            break
        theta, state = adam_step(state, theta, grad, cfg)

    if returned_theta is None:
        returned_theta = best_theta
        idx = best_epoch - 1
    else:
        idx = len(train_hist) - 1
    report = TrainReport(
        epochs_run=len(train_hist),
        final_train_loss=train_hist[idx],
        final_val_loss=val_hist[idx],
        stop_reason=reason,
        best_epoch=best_epoch,
        train_history=train_hist,
        val_history=val_hist,
    )
    log.info("training stopped: %s after %d epochs", reason.value, report.epochs_run)
    return model.with_theta(returned_theta), report
