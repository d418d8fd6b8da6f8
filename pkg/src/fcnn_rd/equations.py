"""Reaction-diffusion equations ``phi_t = alpha * lap(phi) + beta * f(phi)``
and their explicit five-point finite difference solver."""

from dataclasses import dataclass, field
import enum

import numpy as np

from .grid import Field, pad_neumann, stencil_5pt

SAFETY = 0.4


class Kind(enum.Enum):
    HEAT = "heat"
    FISHER = "fisher"
    ALLEN_CAHN = "ac"
    SINE = "sine"
    TANH = "tanh"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        aliases = {"allen-cahn": "ac", "allencahn": "ac", "allen_cahn": "ac"}
        return cls(aliases.get(key, key))


# (alpha, beta, polynomial order N). AC beta is 1/rho^2 with rho ~ 0.012,
# stored rounded to 6944 as tabulated.
DEFAULTS = {
    Kind.HEAT: (1.0, 0.0, 3),
    Kind.FISHER: (1.0, 20.0, 3),
    Kind.ALLEN_CAHN: (1.0, 6944.0, 3),
    Kind.SINE: (0.1, 40.0, 9),
    Kind.TANH: (0.5, 10.0, 9),
}

# Monomial coefficients of f in phi for the polynomial reactions.
POLY_REACTION = {
    Kind.HEAT: (0.0,),
    Kind.FISHER: (0.0, 1.0, -1.0),
    Kind.ALLEN_CAHN: (0.0, 1.0, 0.0, -1.0),
}


@dataclass(frozen=True)
class EquationSpec:
    kind: Kind
    alpha: float
    beta: float
    poly_order: int

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.beta < 0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")
        if self.poly_order < 1:
            raise ValueError("poly_order must be >= 1")

    @classmethod
    def from_kind(cls, kind, alpha=None, beta=None, poly_order=None):
        kind = Kind.parse(kind)
        a, b, n = DEFAULTS[kind]
        return cls(
            kind,
            a if alpha is None else float(alpha),
            b if beta is None else float(beta),
            n if poly_order is None else int(poly_order),
        )

    @property
    def is_polynomial(self):
        return self.kind in POLY_REACTION


@dataclass(frozen=True)
class StepParams:
    dt: float
    h: float
    n_steps: int = field(default=1)

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.h > 0:
            raise ValueError(f"h must be positive, got {self.h}")
        if self.n_steps < 0:
            raise ValueError("n_steps must be non-negative")


class InstabilityError(RuntimeError):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


def reaction_eval(spec, phi):
    """Pointwise reaction ``f(phi)``; works on scalars and arrays."""
    phi = np.asarray(phi, dtype=np.float64)
    kind = spec.kind
    if kind is Kind.HEAT:
        out = np.zeros_like(phi)
    elif kind is Kind.FISHER:
        out = phi - phi * phi
    elif kind is Kind.ALLEN_CAHN:
        out = phi - phi * phi * phi
    elif kind is Kind.SINE:
        out = np.sin(np.pi * phi)
    else:
        out = np.tanh(phi)
    return out[()] if out.ndim == 0 else out


def stability_dt(spec, h):
    """Default explicit time step: ``0.4 * min(h^2 / (4 alpha), 1 / beta)``."""
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")
    bound = h * h / (4.0 * spec.alpha)
    if spec.beta > 0:
        bound = min(bound, 1.0 / spec.beta)
    return SAFETY * bound


def fdm_step(field, spec, dt, h):
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    padded = pad_neumann(field)
    u = padded.interior
    if not h > 0:
        raise ValueError(f"grid spacing must be positive, got {h}")
    lap = stencil_5pt(padded.data, h)
    with np.errstate(over="ignore", invalid="ignore"):
        new = u + dt * spec.alpha * lap + dt * spec.beta * reaction_eval(spec, u)
    if not np.all(np.isfinite(new)):
        raise InstabilityError(
            f"non-finite values after explicit step with dt={dt:g}; "
            f"stability_dt for this equation is {stability_dt(spec, h):g}"
        )
    return Field.from_interior(new)


def fdm_rollout(init, spec, params):
    """Trajectory ``[phi^0, ..., phi^n_steps]`` of the explicit scheme."""
    traj = [pad_neumann(init)]
    for n in range(params.n_steps):
        try:
            traj.append(fdm_step(traj[-1], spec, params.dt, params.h))
        except InstabilityError as exc:
            raise InstabilityError(f"step {n + 1}: {exc}", step=n + 1) from exc
    return traj


def analytic_center_fn(spec, dt, h, phi):
    """All center-cell terms of one explicit step:
    ``(1 - 4 dt alpha / h^2) phi + dt beta f(phi)``."""
    phi = np.asarray(phi, dtype=np.float64)
    r = dt * spec.alpha / (h * h)
    out = (1.0 - 4.0 * r) * phi + dt * spec.beta * reaction_eval(spec, phi)
    return out[()] if np.ndim(out) == 0 else out
