"""Reader and writer for a strict NRRD subset.

Supported files: magic ``NRRD0004``, 3-dimensional, ``encoding: raw``,
little-endian, sample type ``short`` (scalar volumes) or ``uchar`` (label
masks), per-axis ``spacings`` (or an axis-aligned diagonal
``space directions``).  The payload is the raw sample stream in x-fastest
order.  Anything outside this subset is rejected rather than guessed at.

Writing is canonical: header keys are emitted in the fixed order
type, dimension, sizes, spacings, endian, encoding, so identical grids
serialize to identical bytes.
"""
from __future__ import annotations

import os

import numpy as np

from .errors import BadMagic, MissingField, PayloadLengthMismatch, UnsupportedValue
from .grid import LabelGrid, VolumeGrid

MAGIC = b"NRRD0004"

_DTYPES = {"short": np.dtype("<i2"), "uchar": np.dtype("u1")}


def _parse_space_directions(raw: str) -> tuple[float, float, float]:
    # expects three parenthesized vectors forming a positive diagonal matrix
    parts = raw.replace("(", " ").replace(")", " ").split()
    if len(parts) != 3:
        raise UnsupportedValue("space directions", raw)
    rows = [p.split(",") for p in parts]
    if any(len(r) != 3 for r in rows):
        raise UnsupportedValue("space directions", raw)
    try:
        mat = [[float(v) for v in r] for r in rows]
    except ValueError:
        raise UnsupportedValue("space directions", raw) from None
    for i in range(3):
        for j in range(3):
            if i != j and mat[i][j] != 0.0:
                raise UnsupportedValue("space directions", raw)
    diag = (mat[0][0], mat[1][1], mat[2][2])
    if any(not (d > 0) for d in diag):
        raise UnsupportedValue("space directions", raw)
    return diag


def parse_nrrd(data: bytes) -> VolumeGrid | LabelGrid:
    """Parse NRRD bytes into a VolumeGrid (short) or LabelGrid (uchar)."""
    newline = data.find(b"\n")
    first = data[: newline if newline >= 0 else len(data)].rstrip(b"\r")
    if first != MAGIC:
        raise BadMagic(f"expected magic {MAGIC.decode()}, got {first[:16]!r}")

    fields: dict[str, str] = {}
    pos = newline + 1
    while True:
        end = data.find(b"\n", pos)
        if end < 0:
            raise MissingField("payload (header never terminated by a blank line)")
        line = data[pos:end].rstrip(b"\r")
        pos = end + 1
        if line == b"":
            break
        if line.startswith(b"#"):
            continue
        key, sep, value = line.partition(b": ")
        if not sep:
            raise UnsupportedValue("header line", line.decode("latin-1"))
        fields[key.decode("ascii").strip()] = value.decode("ascii").strip()

    def require(key: str) -> str:
        if key not in fields:
            raise MissingField(key)
        return fields[key]

    type_name = require("type")
    if type_name not in _DTYPES:
        raise UnsupportedValue("type", type_name)
    if require("dimension") != "3":
        raise UnsupportedValue("dimension", fields["dimension"])
    if require("encoding") != "raw":
        raise UnsupportedValue("encoding", fields["encoding"])
    if type_name == "short":
        if require("endian") != "little":
            raise UnsupportedValue("endian", fields["endian"])
    elif fields.get("endian", "little") != "little":
        raise UnsupportedValue("endian", fields["endian"])

    try:
        dims = tuple(int(s) for s in require("sizes").split())
    except ValueError:
        raise UnsupportedValue("sizes", fields["sizes"]) from None
    if len(dims) != 3 or any(d < 1 for d in dims):
        raise UnsupportedValue("sizes", fields["sizes"])

    if "spacings" in fields:
        try:
            spacing = tuple(float(s) for s in fields["spacings"].split())
        except ValueError:
            raise UnsupportedValue("spacings", fields["spacings"]) from None
        if len(spacing) != 3 or any(not (s > 0) for s in spacing):
            raise UnsupportedValue("spacings", fields["spacings"])
    elif "space directions" in fields:
        spacing = _parse_space_directions(fields["space directions"])
    else:
        raise MissingField("spacings")

    dtype = _DTYPES[type_name]
    payload = data[pos:]
    expected = dims[0] * dims[1] * dims[2] * dtype.itemsize
    if len(payload) != expected:
        raise PayloadLengthMismatch(expected, len(payload))

    flat = np.frombuffer(payload, dtype=dtype)
    arr = flat.reshape(dims, order="F")      # x-fastest payload -> [x, y, z]
    if type_name == "short":
        return VolumeGrid(intensities=arr, spacing=spacing)
    return LabelGrid(labels=arr, spacing=spacing)


def write_nrrd(grid: VolumeGrid | LabelGrid) -> bytes:
    """Serialize a grid; parse_nrrd(write_nrrd(g)) == g, bit-exact."""
    if isinstance(grid, VolumeGrid):
        type_name, arr = "short", grid.intensities
    elif isinstance(grid, LabelGrid):
        type_name, arr = "uchar", grid.labels
    else:
        raise TypeError(f"expected VolumeGrid or LabelGrid, got {type(grid)!r}")
    nx, ny, nz = grid.dims
    header = (
        f"NRRD0004\n"
        f"type: {type_name}\n"
        f"dimension: 3\n"
        f"sizes: {nx} {ny} {nz}\n"
        f"spacings: {grid.spacing[0]!r} {grid.spacing[1]!r} {grid.spacing[2]!r}\n"
        f"endian: little\n"
        f"encoding: raw\n"
        f"\n"
    )
    payload = np.ravel(arr, order="F").tobytes()
    return header.encode("ascii") + payload


def read_nrrd(path: str | os.PathLike) -> VolumeGrid | LabelGrid:
    with open(path, "rb") as fh:
        return parse_nrrd(fh.read())


def write_nrrd_file(grid: VolumeGrid | LabelGrid, path: str | os.PathLike) -> None:
    with open(path, "wb") as fh:
        fh.write(write_nrrd(grid))
