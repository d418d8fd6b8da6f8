"""Five-point stencil CNN: a tied 3x3 stencil plus a pointwise polynomial.

One step maps a padded field to

    out = w_vert * (up + down) + w_horiz * (left + right)
          + w_center * phi + a_0 + sum_k a_k (phi - b)^k

where up/down are the axis-0 neighbours and left/right the axis-1
neighbours. The trainable vector is laid out as
``(w_vert, w_horiz, w_center, a_0, ..., a_N)``; ``b`` is fixed.
"""

from dataclasses import dataclass, replace
import math

import numpy as np
from numpy.polynomial import polynomial as P

from .equations import POLY_REACTION, Kind
from .grid import Field, pad_neumann
from .prng import Xoshiro256

INIT_SCALE = 0.01


@dataclass(frozen=True)
class FcnnModel:
    w_vert: float
    w_horiz: float
    w_center: float
    a: tuple
    b: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        if len(self.a) < 2:
            raise ValueError("polynomial needs at least a_0 and a_1")
        if not all(math.isfinite(v) for v in self.theta):
            raise ValueError("model parameters must be finite")

    @property
    def poly_order(self):
        return len(self.a) - 1

    @property
    def n_trainable(self):
        return 3 + len(self.a)

    @property
    def theta(self):
        return np.array([self.w_vert, self.w_horiz, self.w_center, *self.a])

    def with_theta(self, theta):
        theta = [float(v) for v in theta]
        if len(theta) != self.n_trainable:
            raise ValueError(f"expected {self.n_trainable} parameters, got {len(theta)}")
        return replace(self, w_vert=theta[0], w_horiz=theta[1], w_center=theta[2], a=theta[3:])


@dataclass(frozen=True)
class GradientVector:
    d_w_vert: float
    d_w_horiz: float
    d_w_center: float
    d_a: tuple

    @classmethod
    def from_vector(cls, g):
        g = [float(v) for v in g]
        return cls(g[0], g[1], g[2], tuple(g[3:]))

    def to_vector(self):
        return np.array([self.d_w_vert, self.d_w_horiz, self.d_w_center, *self.d_a])


def init_model(poly_order, b=0.0, seed=0):
    """Parameters i.i.d. uniform on [-0.01, 0.01], drawn in layout order."""
    if poly_order < 1:
        raise ValueError("poly_order must be >= 1")
    theta = Xoshiro256(seed).uniform(-INIT_SCALE, INIT_SCALE, 3 + poly_order + 1)
    return FcnnModel(theta[0], theta[1], theta[2], tuple(theta[3:]), float(b))


def _shift_poly(coef, b):
    """Monomial coefficients in ``phi`` -> coefficients in ``(phi - b)``."""
    coef = np.asarray(coef, dtype=np.float64)
    out = np.zeros(len(coef))
    # Horner in (s + b), collected in powers of s
    acc = np.zeros(1)
    for c in coef[::-1]:
        acc = P.polyadd(P.polymul(acc, [b, 1.0]), [c])
    out[: len(acc)] = acc
    return out


def _sine_taylor(scale, b, n):
    """Taylor coefficients of ``scale * sin(pi phi)`` about ``b`` up to degree n."""
    return np.array(
        [scale * math.pi**k * math.sin(math.pi * b + k * math.pi / 2) / math.factorial(k) for k in range(n + 1)]
    )


def _tanh_taylor(scale, b, n):
    # d/dphi p(t) = p'(t) (1 - t^2) with t = tanh(phi)
    t = math.tanh(b)
    deriv = np.array([0.0, 1.0])
    out = []
    for k in range(n + 1):
        out.append(scale * P.polyval(t, deriv) / math.factorial(k))
        deriv = P.polymul(P.polyder(deriv), [1.0, 0.0, -1.0])
    return np.array(out)


def analytic_model(spec, dt, h, b=0.0, poly_order=None):
    """Parameters that reproduce one explicit FDM step.

    Exact for Heat, Fisher and Allen-Cahn. For Sine and Tanh the
    polynomial is the degree-N Taylor expansion about ``b``.
    """
    n = spec.poly_order if poly_order is None else int(poly_order)
    r = dt * spec.alpha / (h * h)
    scale = dt * spec.beta
    if spec.is_polynomial:
        react = POLY_REACTION[spec.kind]
        if scale != 0 and len(react) - 1 > n:
            raise ValueError(f"{spec.kind.value} needs poly_order >= {len(react) - 1}, got {n}")
        g = np.zeros(max(n, len(react) - 1) + 1)
        g[: len(react)] = scale * np.asarray(react)
        g[1] += 1.0
        a = _shift_poly(g, b)[: n + 1]
    else:
        taylor = _sine_taylor if spec.kind is Kind.SINE else _tanh_taylor
        a = taylor(scale, b, n)
        a[0] += b
        a[1] += 1.0
    return FcnnModel(r, r, -4.0 * r, tuple(a), float(b))


def polynomial_eval(model, phi):
    """Horner evaluation of ``a_0 + sum_k a_k (phi - b)^k``."""
    s = np.asarray(phi, dtype=np.float64) - model.b
    acc = np.full_like(s, model.a[-1])
    for c in model.a[-2::-1]:
        acc = acc * s + c
    return acc[()] if acc.ndim == 0 else acc


def forward(model, phi0):
    """One model step; pads the input first and returns a padded field."""
    p = pad_neumann(phi0).data
    c = p[1:-1, 1:-1]
    with np.errstate(over="ignore", invalid="ignore"):
        out = (
            model.w_vert * (p[:-2, 1:-1] + p[2:, 1:-1])
            + model.w_horiz * (p[1:-1, :-2] + p[1:-1, 2:])
            + model.w_center * c
            + polynomial_eval(model, c)
        )
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("model forward produced NaN/Inf")
    return Field.from_interior(out)


def loss_mse(pred, target):
    if pred.shape != target.shape:
        raise ValueError(f"field shapes differ: {pred.shape} vs {target.shape}")
    d = pred.interior - target.interior
    with np.errstate(over="ignore"):
        return float(np.mean(d * d))


def design_matrix(phi0, poly_order, b=0.0):
    """Per-pixel features ``(n_pix, 3 + N + 1)``; ``forward`` is linear in them."""
    p = pad_neumann(phi0).data
    c = p[1:-1, 1:-1].ravel()
    s = c - b
    cols = [(p[:-2, 1:-1] + p[2:, 1:-1]).ravel(), (p[1:-1, :-2] + p[1:-1, 2:]).ravel(), c]
    power = np.ones_like(s)
    for _ in range(poly_order + 1):
        cols.append(power)
        power = power * s
    return np.stack(cols, axis=1)


def gradients(model, phi0, u1):
    """MSE loss of ``forward(model, phi0)`` against ``u1`` and its exact gradient."""
    pred = forward(model, phi0)
    if pred.shape != u1.shape:
        raise ValueError(f"field shapes differ: {pred.shape} vs {u1.shape}")
    resid = (pred.interior - u1.interior).ravel()
    loss = float(np.mean(resid * resid))
    X = design_matrix(phi0, model.poly_order, model.b)
    g = (2.0 / resid.size) * (X.T @ resid)
    return loss, GradientVector.from_vector(g)


def learned_center_fn(model, phi):
    """Center-cell part of the update: ``w_center * phi + polynomial(phi)``."""
    phi = np.asarray(phi, dtype=np.float64)
    out = model.w_center * phi + polynomial_eval(model, phi)
    return out[()] if np.ndim(out) == 0 else out
