"""Text file formats: fgrid v1 fields, fcnn v1 checkpoints, key=value
manifests, CSV tables and 8-bit PGM images. Floats are written with
``%.17g`` so every value round-trips exactly."""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .equations import Kind
from .fcnn import FcnnModel
from .grid import Field


def fmt(x):
    return "%.17g" % x


def write_fgrid(path, field):
    lines = [f"fgrid 1 {field.nx} {field.ny}"]
    lines += [" ".join(fmt(v) for v in row) for row in field.data]
    Path(path).write_text("\n".join(lines) + "\n")


def read_fgrid(path):
    lines = Path(path).read_text().split("\n")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "fgrid" or head[1] != "1":
        raise ValueError(f"{path}: not an fgrid v1 file")
    nx, ny = int(head[2]), int(head[3])
    rows = [ln.split() for ln in lines[1:] if ln.strip()]
    data = np.array([[float(v) for v in r] for r in rows])
    if data.shape != (ny + 2, nx + 2):
        raise ValueError(f"{path}: expected {(ny + 2, nx + 2)} values, got {data.shape}")
    return Field(data)


def write_keyvalue(path, items):
    Path(path).write_text("".join(f"{k}={fmt(v) if isinstance(v, float) else v}\n" for k, v in items))


def read_keyvalue(path):
    out = {}
    for ln in Path(path).read_text().splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        key, sep, value = ln.partition("=")
        if not sep:
            raise ValueError(f"{path}: malformed line {ln!r}")
        out[key.strip()] = value.strip()
    return out


@dataclass(frozen=True)
class Checkpoint:
    model: FcnnModel
    kind: Kind
    dt: float
    h: float
    seed: int = 0


def write_checkpoint(path, ckpt):
    m = ckpt.model
    items = [
        ("version", 1),
        ("kind", ckpt.kind.value),
        ("poly_order", m.poly_order),
        ("b", float(m.b)),
        ("w_vert", float(m.w_vert)),
        ("w_horiz", float(m.w_horiz)),
        ("w_center", float(m.w_center)),
    ]
    items += [(f"a_{k}", float(v)) for k, v in enumerate(m.a)]
    items += [("dt", float(ckpt.dt)), ("h", float(ckpt.h)), ("seed", int(ckpt.seed))]
    write_keyvalue(path, items)


def read_checkpoint(path):
    kv = read_keyvalue(path)
    if kv.get("version") != "1":
        raise ValueError(f"{path}: unsupported checkpoint version {kv.get('version')!r}")
    n = int(kv["poly_order"])
    model = FcnnModel(
        float(kv["w_vert"]), float(kv["w_horiz"]), float(kv["w_center"]),
        tuple(float(kv[f"a_{k}"]) for k in range(n + 1)), float(kv["b"]),
    )
    return Checkpoint(model, Kind(kv["kind"]), float(kv["dt"]), float(kv["h"]), int(kv.get("seed", 0)))


def write_trajectory(prefix, traj, steps, spec, dt, h, save_every):
    """``<prefix>_<step>.fgrid`` for each saved step plus ``<prefix>.meta``."""
    prefix = str(prefix)
    paths = []
    for step, field in zip(steps, traj):
        p = f"{prefix}_{step}.fgrid"
        write_fgrid(p, field)
        paths.append(p)
    write_keyvalue(f"{prefix}.meta", [
        ("kind", spec.kind.value), ("alpha", float(spec.alpha)), ("beta", float(spec.beta)),
        ("h", float(h)), ("dt", float(dt)), ("n_steps", max(steps) if steps else 0),
        ("save_every", save_every),
    ])
    return paths


def write_csv(path, header, rows):
    def cell(v):
        if isinstance(v, float):
            return fmt(v)
        return "" if v is None else str(v)

    text = ",".join(header) + "\n" + "".join(",".join(cell(v) for v in r) + "\n" for r in rows)
    Path(path).write_text(text)


def to_gray(field, lo=-1.0, hi=1.0):
    """Interior mapped linearly from [lo, hi] to 0..255, clamped; top row is max y."""
    scaled = (field.interior - lo) / (hi - lo) * 255.0
    return np.clip(np.rint(scaled), 0, 255).astype(np.uint8)[::-1]


def write_pgm(path, field, lo=-1.0, hi=1.0):
    img = to_gray(field, lo, hi)
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii")
    Path(path).write_bytes(header + img.tobytes())
