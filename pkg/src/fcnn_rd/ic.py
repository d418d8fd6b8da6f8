"""Initial conditions: random noise and tanh-profile shapes.

Every generator evaluates its profile at interior cell centers and
returns a Neumann-padded field.
"""

from dataclasses import dataclass
import enum
import math

import numpy as np

from .grid import Field, GridGeometry
from .prng import Xoshiro256

SQRT2 = math.sqrt(2.0)

CIRCLES3_CENTERS = ((0.3, 0.3), (0.7, 0.3), (0.5, 0.7))
CIRCLES3_RADII = (0.12, 0.12, 0.12)


class Shape(enum.Enum):
    RANDOM = "random"
    CIRCLE = "circle"
    STAR = "star"
    CIRCLES3 = "circles3"
    TORUS = "torus"
    MAZE = "maze"


SHAPES = (Shape.CIRCLE, Shape.STAR, Shape.CIRCLES3, Shape.TORUS, Shape.MAZE)


@dataclass(frozen=True)
class IcParams:
    shape: Shape = Shape.RANDOM
    r0: float = 0.25
    r1: float = 0.4
    r2: float = 0.2
    eps: float = 0.012
    amplitude: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.r2 < self.r1:
            raise ValueError(f"torus radii need 0 < r2 < r1, got r1={self.r1}, r2={self.r2}")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.amplitude < 0:
            raise ValueError("amplitude must be non-negative")


def ic_random(nx, ny, amplitude=0.1, seed=0):
    """i.i.d. uniform values on [-amplitude, amplitude], row-major draw order."""
    rng = Xoshiro256(seed)
    vals = rng.uniform(-amplitude, amplitude, nx * ny).reshape(ny, nx)
    return Field.from_interior(vals)


def _profile(signed_dist, eps):
    return np.tanh(signed_dist / (SQRT2 * eps))


def _circle_values(geom, center, r0, eps):
    x, y = geom.interior_mesh()
    dist = np.sqrt((x - center[0]) ** 2 + (y - center[1]) ** 2)
    return _profile(r0 - dist, eps)


def ic_circle(geom, r0=0.25, eps=0.012, center=(0.5, 0.5)):
    if not (r0 > 0 and eps > 0):
        raise ValueError("r0 and eps must be positive")
    return Field.from_interior(_circle_values(geom, center, r0, eps))


def ic_star(geom, eps=0.012):
    """Six-armed star with radius ``0.25 + 0.1 cos(6 theta)``.

    theta comes from atan2, which matches the two-branch arctangent rule
    off the column x = 0.5 and is continuous on it.
    """
    if not eps > 0:
        raise ValueError("eps must be positive")
    x, y = geom.interior_mesh()
    theta = np.arctan2(y - 0.5, x - 0.5)
    dist = np.sqrt((x - 0.5) ** 2 + (y - 0.5) ** 2)
    return Field.from_interior(_profile(0.25 + 0.1 * np.cos(6.0 * theta) - dist, eps))


def ic_torus(geom, r1=0.4, r2=0.2, eps=0.012):
    if not 0 < r2 < r1:
        raise ValueError(f"need 0 < r2 < r1, got r1={r1}, r2={r2}")
    x, y = geom.interior_mesh()
    dist = np.sqrt((x - 0.5) ** 2 + (y - 0.5) ** 2)
    vals = -1.0 + _profile(r1 - dist, eps) - _profile(r2 - dist, eps)
    return Field.from_interior(vals)


def ic_three_circles(geom, centers=CIRCLES3_CENTERS, radii=CIRCLES3_RADII, eps=0.012):
    """Union of three circles as the pointwise max of their profiles."""
    if len(centers) != 3 or len(radii) != 3:
        raise ValueError("need exactly three centers and three radii")
    if min(radii) <= 0:
        raise ValueError("radii must be positive")
    vals = np.maximum.reduce([_circle_values(geom, c, r, eps) for c, r in zip(centers, radii)])
    return Field.from_interior(vals)


def maze_path(lo=0.1, hi=0.9, pitch=0.1):
    """Vertices of a rectangular spiral walking inward from (lo, lo)."""
    pts = [(lo, lo)]
    x0, y0, x1, y1 = lo, lo, hi, hi
    while x1 - x0 > pitch / 2 and y1 - y0 > pitch / 2:
        pts += [(x1, y0), (x1, y1), (x0, y1)]
        y0 += pitch
        if y1 - y0 <= pitch / 2:
            break
        pts.append((x0, y0))
        x0 += pitch
        x1 -= pitch
        y1 -= pitch
    return np.array(pts)


def _segment_distance(x, y, path):
    best = np.full(x.shape, np.inf)
    for (ax, ay), (bx, by) in zip(path[:-1], path[1:]):
        dx, dy = bx - ax, by - ay
        t = np.clip(((x - ax) * dx + (y - ay) * dy) / (dx * dx + dy * dy), 0.0, 1.0)
        best = np.minimum(best, np.hypot(x - (ax + t * dx), y - (ay + t * dy)))
    return best


def ic_maze(geom, eps=0.012):
    """Fixed spiral channel of +1 on a -1 background.

    The channel is 4 cells wide at the default 100x100 resolution
    (half-width 0.02 in domain units). The layout is this package's own;
    it does not attempt to match any published maze geometry.
    """
    if geom.nx != geom.ny:
        raise ValueError("maze requires a square grid")
    x, y = geom.interior_mesh()
    # map to the unit square so the pattern scales with the domain
    u = (x - geom.a) / (geom.b - geom.a)
    v = (y - geom.c) / (geom.d - geom.c)
    dist = _segment_distance(u, v, maze_path()) * (geom.b - geom.a)
    half_width = 0.02 * (geom.b - geom.a)
    return Field.from_interior(_profile(half_width - dist, eps))


def make_ic(params, geom):
    """Dispatch on ``params.shape``."""
    shape = Shape(params.shape)
    if shape is Shape.RANDOM:
        return ic_random(geom.nx, geom.ny, params.amplitude, params.seed)
    if shape is Shape.CIRCLE:
        return ic_circle(geom, params.r0, params.eps)
    if shape is Shape.STAR:
        return ic_star(geom, params.eps)
    if shape is Shape.CIRCLES3:
        return ic_three_circles(geom, eps=params.eps)
    if shape is Shape.TORUS:
        return ic_torus(geom, params.r1, params.r2, params.eps)
    return ic_maze(geom, params.eps)
