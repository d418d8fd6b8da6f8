"""Cell-centered 2D grids with a one-cell ghost ring.

Arrays are indexed ``data[j, i]``: axis 0 runs along y (rows), axis 1
along x (columns). Ghost cells hold boundary values only; all norms
and losses are taken over the interior.
"""

from dataclasses import dataclass
import logging
import math

import numpy as np

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Field:
    """Padded scalar grid of shape ``(ny + 2, nx + 2)``.

    The array is made read-only on construction; operations return new
    fields.
    """

    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64)  # private copy
        if data.ndim != 2 or data.shape[0] < 3 or data.shape[1] < 3:
            raise ValueError(f"field data must be 2D with shape >= (3, 3), got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("field contains NaN or Inf")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @classmethod
    def from_interior(cls, interior):
        """Wrap an ``(ny, nx)`` interior array and fill ghosts by Neumann padding."""
        interior = np.asarray(interior, dtype=np.float64)
        return cls(_padded(interior))

    @property
    def nx(self):
        return self.data.shape[1] - 2

    @property
    def ny(self):
        return self.data.shape[0] - 2

    @property
    def shape(self):
        return self.data.shape

    @property
    def interior(self):
        return self.data[1:-1, 1:-1]

    def __eq__(self, other):
        if not isinstance(other, Field):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))

    __hash__ = None


@dataclass(frozen=True)
class GridGeometry:
    """Uniform square-cell grid on ``(a, b) x (c, d)``."""

    nx: int = 100
    ny: int = 100
    a: float = 0.0
    b: float = 1.0
    c: float = 0.0
    d: float = 1.0

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("grid needs nx >= 1 and ny >= 1")
        hx = (self.b - self.a) / self.nx
        hy = (self.d - self.c) / self.ny
        if hx <= 0 or not math.isclose(hx, hy, rel_tol=1e-12):
            raise ValueError(f"cells must be square: hx={hx}, hy={hy}")

    @property
    def h(self):
        return (self.b - self.a) / self.nx

    def x_centers(self):
        """x of all ``nx + 2`` columns, ghosts included (h/2 outside [a, b])."""
        return self.a + (np.arange(self.nx + 2) - 0.5) * self.h

    def y_centers(self):
        return self.c + (np.arange(self.ny + 2) - 0.5) * self.h

    def interior_mesh(self):
        """``(X, Y)`` arrays of interior cell centers, each shaped ``(ny, nx)``."""
        return np.meshgrid(self.x_centers()[1:-1], self.y_centers()[1:-1])


def new_field(nx, ny, fill=0.0):
    if nx < 1 or ny < 1:
        raise ValueError(f"field dimensions must be positive, got nx={nx}, ny={ny}")
    if not math.isfinite(fill):
        raise ValueError("fill value must be finite")
    return Field(np.full((ny + 2, nx + 2), float(fill)))


def _padded(interior):
    out = np.empty((interior.shape[0] + 2, interior.shape[1] + 2))
    out[1:-1, 1:-1] = interior
    _fill_ghosts(out)
    return out


def _fill_ghosts(p):
    # edges first, then the row copies carry the corners along
    p[1:-1, 0] = p[1:-1, 1]
    p[1:-1, -1] = p[1:-1, -2]
    p[0, :] = p[1, :]
    p[-1, :] = p[-2, :]


def pad_neumann(field):
    """Overwrite the ghost ring with copies of the adjacent interior cells.

    Corner ghosts copy the diagonal interior corner. The five-point
    stencil never reads them.
    """
    return Field(_padded(field.interior))


def laplacian_5pt(field, h):
    """Five-point Laplacian on the interior; the result's ghost ring is zero.

    Reads the ghost ring as given, so pad first.
    """
    if not h > 0:
        raise ValueError(f"grid spacing must be positive, got {h}")
    out = np.zeros_like(field.data)
    out[1:-1, 1:-1] = stencil_5pt(field.data, h)
    return Field(out)


def stencil_5pt(p, h):
    """Raw five-point Laplacian of a padded array, interior cells only.

    No finiteness check, so callers can detect blow-up themselves.
    """
    c = p[1:-1, 1:-1]
    with np.errstate(over="ignore", invalid="ignore"):
        # grouped so a transposed input gives a bit-identical transposed result
        return ((p[2:, 1:-1] + p[:-2, 1:-1]) + (p[1:-1, 2:] + p[1:-1, :-2]) - 4.0 * c) / (h * h)


def _check_same_shape(a, b):
    if a.shape != b.shape:
        raise ValueError(f"field shapes differ: {a.shape} vs {b.shape}")


def l2_error(pred, ref):
    """Relative L2 error over interiors plus a flag set when ``ref`` is zero.

    With a zero reference the absolute norm ``||pred||`` is returned instead.
    """
    _check_same_shape(pred, ref)
    ref_norm = float(np.linalg.norm(ref.interior))
    diff = float(np.linalg.norm(pred.interior - ref.interior))
    if ref_norm == 0.0:
        return float(np.linalg.norm(pred.interior)), True
    return diff / ref_norm, False


def relative_l2(pred, ref):
    value, absolute = l2_error(pred, ref)
    if absolute:
        log.warning("relative_l2: reference norm is zero, returning absolute norm")
    return value
