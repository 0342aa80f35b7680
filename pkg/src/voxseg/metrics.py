"""Overlap and distance metrics between binary masks.

Distances are measured in index space (voxel units), so every Hausdorff
value is the square root of an integer; the squared distance field is kept
in exact integer-valued float64 arithmetic and the square root is taken
only at the very end.  The distance transform is the
separable squared-distance method: an axial two-way scan along x followed by
lower-envelope-of-parabolas passes along y and z.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import BothEmpty, DimsMismatch, EmptyMask
from .grid import LabelGrid


@dataclass(frozen=True)
class CaseMetrics:
    """One mask-pair comparison row: overlap, distance, size, and timing."""

    dsc: float                 # Dice coefficient as a fraction in [0, 1]
    hd: float                  # Hausdorff distance, voxel units
    volume_a_mm3: float
    volume_b_mm3: float
    voxels_a: int
    voxels_b: int
    elapsed_seconds: float = 0.0


def _check_same_dims(a: LabelGrid, b: LabelGrid) -> None:
    if a.dims != b.dims:
        raise DimsMismatch(f"mask dims differ: {a.dims} vs {b.dims}")


def dice(a: LabelGrid, b: LabelGrid) -> float:
    """Dice coefficient 2|A∩B| / (|A|+|B|) over foreground voxel sets."""
    _check_same_dims(a, b)
    fa = a.labels != 0
    fb = b.labels != 0
    na = int(np.count_nonzero(fa))
    nb = int(np.count_nonzero(fb))
    if na == 0 and nb == 0:
        raise BothEmpty("dice undefined: both masks are empty")
    inter = int(np.count_nonzero(fa & fb))
    return 2.0 * inter / (na + nb)


@njit(cache=True, nogil=True)
def _sq_edt_pass_x(fg, out, inf):
    nx, ny, nz = fg.shape
    for z in range(nz):
        for y in range(ny):
            d = inf
            for x in range(nx):
                d = 0.0 if fg[x, y, z] else d + 1.0
                out[x, y, z] = d
            d = inf
            for x in range(nx - 1, -1, -1):
                d = 0.0 if fg[x, y, z] else d + 1.0
                if d < out[x, y, z]:
                    out[x, y, z] = d
    # square the per-line distances; inf stays effectively infinite
    for z in range(nz):
        for y in range(ny):
            for x in range(nx):
                v = out[x, y, z]
                out[x, y, z] = v * v if v < inf else inf


@njit(cache=True, nogil=True)
def _sq_edt_pass_axis(sq, axis):
    # lower envelope of parabolas along axis 1 or 2; sentinel heights from the
    # previous pass are finite but exceed every true in-range distance, so
    # they never win and need no special casing
    nx, ny, nz = sq.shape
    n = sq.shape[axis]
    f = np.empty(n, dtype=np.float64)
    d = np.empty(n, dtype=np.float64)
    v = np.empty(n, dtype=np.int64)
    zb = np.empty(n + 1, dtype=np.float64)
    if axis == 1:
        n_outer1, n_outer2 = nx, nz
    else:
        n_outer1, n_outer2 = nx, ny
    for o1 in range(n_outer1):
        for o2 in range(n_outer2):
            for i in range(n):
                f[i] = sq[o1, i, o2] if axis == 1 else sq[o1, o2, i]
            k = 0
            v[0] = 0
            zb[0] = -np.inf
            zb[1] = np.inf
            for q in range(1, n):
                p = v[k]
                s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * (q - p))
                while s <= zb[k]:
                    k -= 1
                    p = v[k]
                    s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * (q - p))
                k += 1
                v[k] = q
                zb[k] = s
                zb[k + 1] = np.inf
            k = 0
            for q in range(n):
                while zb[k + 1] < q:
                    k += 1
                p = v[k]
                d[q] = (q - p) * (q - p) + f[p]
            for i in range(n):
                if axis == 1:
                    sq[o1, i, o2] = d[i]
                else:
                    sq[o1, o2, i] = d[i]


def squared_distance_field(mask: LabelGrid) -> np.ndarray:
    """Exact squared Euclidean index-space distance to the nearest foreground voxel.

    Values are exact integers held in float64 (inputs are integer grid
    coordinates, so every squared distance is an integer well below 2**53).
    """
    fg = mask.labels != 0
    if not fg.any():
        raise EmptyMask("distance transform undefined for an empty mask")
    nx, ny, nz = mask.dims
    sentinel = float(nx * nx + ny * ny + nz * nz + 1)
    out = np.empty(mask.dims, dtype=np.float64)
    _sq_edt_pass_x(fg, out, sentinel)
    _sq_edt_pass_axis(out, 1)
    _sq_edt_pass_axis(out, 2)
    return out


def euclidean_distance_transform(mask: LabelGrid) -> np.ndarray:
    """Exact Euclidean index-space distance to the nearest foreground voxel."""
    return np.sqrt(squared_distance_field(mask))


def hausdorff(a: LabelGrid, b: LabelGrid) -> float:
    """Symmetric Hausdorff distance between foreground sets, voxel units."""
    _check_same_dims(a, b)
    fa = a.labels != 0
    fb = b.labels != 0
    if not fa.any() or not fb.any():
        raise EmptyMask("hausdorff undefined when a mask is empty")
    sq_to_b = squared_distance_field(b)
    sq_to_a = squared_distance_field(a)
    h_ab = float(sq_to_b[fa].max())
    h_ba = float(sq_to_a[fb].max())
    return float(np.sqrt(max(h_ab, h_ba)))


def physical_volume(mask: LabelGrid, spacing: tuple[float, float, float] | None = None) -> float:
    """Foreground volume in mm³: voxel count times the spacing product."""
    sx, sy, sz = spacing if spacing is not None else mask.spacing
    return mask.foreground_count() * sx * sy * sz


def compare_masks(a: LabelGrid, b: LabelGrid, elapsed_seconds: float = 0.0) -> CaseMetrics:
    """All four assessment values for one ordered mask pair."""
    return CaseMetrics(
        dsc=dice(a, b),
        hd=hausdorff(a, b),
        volume_a_mm3=physical_volume(a),
        volume_b_mm3=physical_volume(b),
        voxels_a=a.foreground_count(),
        voxels_b=b.foreground_count(),
        elapsed_seconds=elapsed_seconds,
    )
