"""JSON file format for matrix fields and configurations.

A field file is ``{"n", "N", "Lx", "Ly", "data"}`` where ``data`` is a nested
``[N][N][n][n][2]`` array of ``(re, im)`` pairs indexed ``(iy, ix, row, col)``.
Floats are written with 17 significant digits so files round-trip exactly.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .lattice import Configuration, Grid, MatrixField


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            raise ValueError("non-finite value cannot be written")
        s = format(v, ".17g")
        if not any(ch in s for ch in ".en"):
            s += ".0"
        return s
    if isinstance(v, str):
        return json.dumps(v)
    if v is None:
        return "null"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_fmt(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps17(obj) -> str:
    """JSON text with every float at 17 significant digits."""
    return _fmt(obj)


def field_to_dict(f: MatrixField) -> dict:
    pairs = np.stack([f.data.real, f.data.imag], axis=-1)
    return {"n": f.grid.n, "N": f.grid.N, "Lx": f.grid.Lx, "Ly": f.grid.Ly,
            "deriv_scheme": f.grid.deriv_scheme, "data": pairs.tolist()}


def field_from_dict(obj: dict, grid: Grid = None) -> MatrixField:
    try:
        n, N = int(obj["n"]), int(obj["N"])
        Lx, Ly = float(obj["Lx"]), float(obj["Ly"])
        raw = obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed field object: {exc}") from None
    if grid is None:
        grid = Grid(N, Lx, Ly, n, obj.get("deriv_scheme", "spectral"))
    elif (grid.N, grid.n, grid.Lx, grid.Ly) != (N, n, Lx, Ly):
        raise ValueError("field header does not match the expected grid")
    try:
        arr = np.asarray(raw, dtype=np.float64)
    except ValueError:
        raise ValueError("ragged field data") from None
    if arr.shape != (N, N, n, n, 2):
        raise ValueError(f"field data has shape {arr.shape}, expected {(N, N, n, n, 2)}")
    return MatrixField(grid, arr[..., 0] + 1j * arr[..., 1])


def write_field(path, f: MatrixField) -> None:
    with open(path, "w") as fh:
        fh.write(dumps17(field_to_dict(f)))
        fh.write("\n")


def read_field(path) -> MatrixField:
    with open(path) as fh:
        return field_from_dict(json.load(fh))


def write_configuration(path, c: Configuration) -> None:
    obj = {"a_zbar": field_to_dict(c.a_zbar), "phi_z": field_to_dict(c.phi_z)}
    with open(path, "w") as fh:
        fh.write(dumps17(obj))
        fh.write("\n")


def read_configuration(path) -> Configuration:
    with open(path) as fh:
        obj = json.load(fh)
    if not isinstance(obj, dict) or "a_zbar" not in obj or "phi_z" not in obj:
        raise ValueError("configuration file needs fields 'a_zbar' and 'phi_z'")
    a = field_from_dict(obj["a_zbar"])
    phi = field_from_dict(obj["phi_z"], grid=a.grid)
    return Configuration.from_fields(a, phi)
