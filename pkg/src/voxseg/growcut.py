"""Stroke-seeded cellular-automaton segmentation (GrowCut).

Each voxel holds a label and a strength theta in [0, 1].  Seeded voxels start
at theta = 1; everything else is unlabeled at theta = 0.  One iteration is a
synchronous sweep: every voxel p looks at its in-bounds 26-neighbors q and
the strongest attack  a(q->p) = g(|C_p - C_q|) * theta_q,  with
g(d) = 1 - d / d_max  and d_max the volume's intensity range (g == 1 on a
constant volume).  If the best attack strictly exceeds theta_p, p adopts the
winning attacker's label and strength.  Ties between equally strong attackers
go to the smallest (dz, dy, dx) offset, so runs are bit-for-bit reproducible.

The strict inequality makes seeds immutable and theta non-decreasing, which
bounds the run: the sweep loop stops at the first sweep with no changes.
``segment`` only re-evaluates voxels next to the previous sweep's changes; a
voxel whose neighborhood did not change cannot change either, so this is
observationally identical to sweeping the full grid (``full_sweep=True``
forces the plain full sweep for comparison).
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from numba import njit

from .errors import ConflictingSeed, EmptyForeground, OutOfRange
from .grid import LabelGrid, VolumeGrid

UNLABELED = 0
FOREGROUND = 1
BACKGROUND = 2

_LABEL_NAMES = {"foreground": FOREGROUND, "background": BACKGROUND}

# 26-neighborhood offsets in ascending (dz, dy, dx) order; the sweep scans
# them in this order so "first best wins" implements the documented tie-break
_OFFSETS = np.array(
    sorted(
        (
            (dx, dy, dz)
            for dz in (-1, 0, 1)
            for dy in (-1, 0, 1)
            for dx in (-1, 0, 1)
            if (dx, dy, dz) != (0, 0, 0)
        ),
        key=lambda o: (o[2], o[1], o[0]),
    ),
    dtype=np.int64,
)
_DX = np.ascontiguousarray(_OFFSETS[:, 0])
_DY = np.ascontiguousarray(_OFFSETS[:, 1])
_DZ = np.ascontiguousarray(_OFFSETS[:, 2])


class Stroke(NamedTuple):
    """One painted stroke: pixels on a single slice, all one label."""

    plane: str                      # axial | sagittal | coronal
    index: int                      # slice position along the plane normal
    pixels: Sequence[tuple[int, int]]
    label: str                      # foreground | background


def strokes_to_json(strokes: Iterable[Stroke]) -> str:
    return json.dumps(
        {
            "strokes": [
                {
                    "plane": s.plane,
                    "index": int(s.index),
                    "label": s.label,
                    "pixels": [[int(u), int(v)] for u, v in s.pixels],
                }
                for s in strokes
            ]
        }
    )


def strokes_from_json(text: str) -> list[Stroke]:
    doc = json.loads(text)
    return [
        Stroke(
            plane=entry["plane"],
            index=int(entry["index"]),
            pixels=[(int(u), int(v)) for u, v in entry["pixels"]],
            label=entry["label"],
        )
        for entry in doc["strokes"]
    ]


@dataclass(frozen=True, eq=False)
class SeedSet:
    """Deduplicated seed voxels in canonical (z, y, x) order."""

    coords: np.ndarray              # (n, 3) int64 voxel coordinates
    labels: np.ndarray              # (n,) uint8, FOREGROUND or BACKGROUND

    @staticmethod
    def from_entries(entries: Iterable[tuple[tuple[int, int, int], int]]) -> "SeedSet":
        by_coord: dict[tuple[int, int, int], int] = {}
        for coord, label in entries:
            coord = (int(coord[0]), int(coord[1]), int(coord[2]))
            prev = by_coord.get(coord)
            if prev is not None and prev != label:
                raise ConflictingSeed(coord)
            by_coord[coord] = int(label)
        ordered = sorted(by_coord.items(), key=lambda kv: (kv[0][2], kv[0][1], kv[0][0]))
        coords = np.array([c for c, _ in ordered], dtype=np.int64).reshape(-1, 3)
        labels = np.array([l for _, l in ordered], dtype=np.uint8)
        return SeedSet(coords=coords, labels=labels)

    @property
    def entries(self) -> list[tuple[tuple[int, int, int], int]]:
        return [
            ((int(x), int(y), int(z)), int(l))
            for (x, y, z), l in zip(self.coords, self.labels)
        ]

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeedSet):
            return NotImplemented
        return np.array_equal(self.coords, other.coords) and np.array_equal(
            self.labels, other.labels
        )

    def merge(self, other: "SeedSet") -> "SeedSet":
        return SeedSet.from_entries(self.entries + other.entries)

    def foreground_count(self) -> int:
        return int(np.count_nonzero(self.labels == FOREGROUND))


def strokes_to_seeds(strokes: Iterable[Stroke], dims: tuple[int, int, int]) -> SeedSet:
    """Map in-plane stroke pixels onto voxels.

    axial slice k:    (u, v) -> (u, v, k)
    sagittal slice i: (u, v) -> (i, u, v)
    coronal slice j:  (u, v) -> (u, j, v)

    Same-label repaints are deduplicated; painting one voxel with both labels
    raises ConflictingSeed, anything outside the grid raises OutOfRange.
    """
    nx, ny, nz = dims
    entries: list[tuple[tuple[int, int, int], int]] = []
    for stroke in strokes:
        stroke = Stroke(*stroke)
        if stroke.label not in _LABEL_NAMES:
            raise ValueError(f"unknown stroke label {stroke.label!r}")
        label = _LABEL_NAMES[stroke.label]
        idx = int(stroke.index)
        for u, v in stroke.pixels:
            u, v = int(u), int(v)
            if stroke.plane == "axial":
                voxel, bounds = (u, v, idx), (nx, ny, nz)
            elif stroke.plane == "sagittal":
                voxel, bounds = (idx, u, v), (nx, ny, nz)
            elif stroke.plane == "coronal":
                voxel, bounds = (u, idx, v), (nx, ny, nz)
            else:
                raise ValueError(f"unknown plane {stroke.plane!r}")
            if not all(0 <= c < b for c, b in zip(voxel, bounds)):
                raise OutOfRange(
                    f"stroke pixel ({u}, {v}) on {stroke.plane} slice {idx} "
                    f"maps to voxel {voxel} outside dims {dims}"
                )
            entries.append((voxel, label))
    return SeedSet.from_entries(entries)


@dataclass
class AutomatonState:
    """Mutable per-voxel automaton state: labels, strengths, iteration count."""

    labels: np.ndarray              # uint8 (nx, ny, nz)
    theta: np.ndarray               # float64 (nx, ny, nz), in [0, 1]
    iteration: int = 0

    def copy(self) -> "AutomatonState":
        return AutomatonState(
            labels=self.labels.copy(), theta=self.theta.copy(), iteration=self.iteration
        )


@dataclass(frozen=True)
class GrowCutParams:
    """Automaton knobs; the 26-neighborhood itself is fixed.

    max_iterations defaults to nx + ny + nz (an upper bound on how far a
    front can propagate); d_max defaults to the volume's intensity range.
    """

    max_iterations: int | None = None
    d_max: float | None = None

    def resolve(self, volume: VolumeGrid) -> tuple[int, float]:
        if self.max_iterations is not None:
            max_iters = int(self.max_iterations)
        else:
            max_iters = int(sum(volume.dims))
        if max_iters < 1:
            raise ValueError(f"max_iterations must be >= 1, got {max_iters}")
        if self.d_max is not None:
            d_max = float(self.d_max)
        else:
            lo, hi = volume.value_range()
            d_max = float(hi - lo)
        if d_max < 0:
            raise ValueError(f"d_max must be >= 0, got {d_max}")
        inv_dmax = 0.0 if d_max == 0.0 else 1.0 / d_max
        return max_iters, inv_dmax


def init_state(volume: VolumeGrid, seeds: SeedSet) -> AutomatonState:
    """Seeded voxels get their label at full strength; the rest start empty."""
    if seeds.foreground_count() == 0:
        raise EmptyForeground("at least one foreground seed is required")
    nx, ny, nz = volume.dims
    if len(seeds) and (
        seeds.coords.min() < 0
        or (seeds.coords >= np.array([nx, ny, nz], dtype=np.int64)).any()
    ):
        raise OutOfRange(f"seed coordinates outside volume dims {volume.dims}")
    labels = np.zeros(volume.dims, dtype=np.uint8)
    theta = np.zeros(volume.dims, dtype=np.float64)
    xs, ys, zs = seeds.coords[:, 0], seeds.coords[:, 1], seeds.coords[:, 2]
    labels[xs, ys, zs] = seeds.labels
    theta[xs, ys, zs] = 1.0
    return AutomatonState(labels=labels, theta=theta, iteration=0)


@njit(cache=True, nogil=True)
def _sweep(intensity, labels, theta, active, n_active, inv_dmax,
           upd_idx, upd_label, upd_theta, dxs, dys, dzs):
    nx, ny, nz = intensity.shape
    count = 0
    for ii in range(n_active):
        p = active[ii]
        x = p % nx
        r = p // nx
        y = r % ny
        z = r // ny
        cp = float(intensity[x, y, z])
        best = -1.0
        best_label = np.uint8(0)
        for k in range(26):
            qx = x + dxs[k]
            qy = y + dys[k]
            qz = z + dzs[k]
            if qx < 0 or qx >= nx or qy < 0 or qy >= ny or qz < 0 or qz >= nz:
                continue
            d = cp - float(intensity[qx, qy, qz])
            if d < 0.0:
                d = -d
            attack = (1.0 - d * inv_dmax) * theta[qx, qy, qz]
            if attack > best:
                best = attack
                best_label = labels[qx, qy, qz]
        if best > theta[x, y, z]:
            upd_idx[count] = p
            upd_label[count] = best_label
            upd_theta[count] = best
            count += 1
    return count


@njit(cache=True, nogil=True)
def _apply(labels, theta, upd_idx, upd_label, upd_theta, count):
    nx = labels.shape[0]
    ny = labels.shape[1]
    for ii in range(count):
        p = upd_idx[ii]
        x = p % nx
        r = p // nx
        y = r % ny
        z = r // ny
        labels[x, y, z] = upd_label[ii]
        theta[x, y, z] = upd_theta[ii]


@njit(cache=True, nogil=True)
def _collect_active(changed, n_changed, stamp, stamp_val, out, dxs, dys, dzs):
    nx, ny, nz = stamp.shape
    count = 0
    for ii in range(n_changed):
        p = changed[ii]
        x = p % nx
        r = p // nx
        y = r % ny
        z = r // ny
        if stamp[x, y, z] != stamp_val:
            stamp[x, y, z] = stamp_val
            out[count] = p
            count += 1
        for k in range(26):
            qx = x + dxs[k]
            qy = y + dys[k]
            qz = z + dzs[k]
            if qx < 0 or qx >= nx or qy < 0 or qy >= ny or qz < 0 or qz >= nz:
                continue
            if stamp[qx, qy, qz] != stamp_val:
                stamp[qx, qy, qz] = stamp_val
                out[count] = qx + nx * (qy + ny * qz)
                count += 1
    return count


def step(
    state: AutomatonState, volume: VolumeGrid, params: GrowCutParams | None = None
) -> tuple[AutomatonState, int]:
    """One full synchronous sweep; returns the new state and how many voxels changed."""
    params = params or GrowCutParams()
    _, inv_dmax = params.resolve(volume)
    n = int(np.prod(volume.dims))
    active = np.arange(n, dtype=np.int64)
    upd_idx = np.empty(n, dtype=np.int64)
    upd_label = np.empty(n, dtype=np.uint8)
    upd_theta = np.empty(n, dtype=np.float64)
    new = state.copy()
    count = _sweep(
        volume.intensities, state.labels, state.theta, active, n, inv_dmax,
        upd_idx, upd_label, upd_theta, _DX, _DY, _DZ,
    )
    _apply(new.labels, new.theta, upd_idx, upd_label, upd_theta, count)
    new.iteration = state.iteration + 1
    return new, int(count)


@dataclass(frozen=True)
class SegmentationResult:
    mask: LabelGrid
    iterations: int
    elapsed_seconds: float
    converged: bool
    state: AutomatonState | None = None   # final labels/strengths


def segment(
    volume: VolumeGrid,
    seeds: SeedSet,
    params: GrowCutParams | None = None,
    *,
    full_sweep: bool = False,
) -> SegmentationResult:
    """Run the automaton to a fixed point and export the foreground mask.

    Stops at the first sweep with no changes, or after max_iterations sweeps
    (``converged`` is False in that case; the mask is still returned).
    """
    t0 = time.perf_counter()
    params = params or GrowCutParams()
    max_iters, inv_dmax = params.resolve(volume)
    state = init_state(volume, seeds)
    labels, theta = state.labels, state.theta
    nx, ny, nz = volume.dims
    n = nx * ny * nz

    upd_idx = np.empty(n, dtype=np.int64)
    upd_label = np.empty(n, dtype=np.uint8)
    upd_theta = np.empty(n, dtype=np.float64)
    if full_sweep:
        active = np.arange(n, dtype=np.int64)
        n_active = n
    else:
        stamp = np.zeros((nx, ny, nz), dtype=np.int64)
        active = np.empty(n, dtype=np.int64)
        changed = (
            seeds.coords[:, 0]
            + nx * (seeds.coords[:, 1] + ny * seeds.coords[:, 2])
        ).astype(np.int64)
        n_changed = len(changed)

    iterations = 0
    converged = False
    while iterations < max_iters:
        if not full_sweep:
            n_active = _collect_active(
                changed, n_changed, stamp, iterations + 1, active, _DX, _DY, _DZ
            )
        count = _sweep(
            volume.intensities, labels, theta, active, n_active, inv_dmax,
            upd_idx, upd_label, upd_theta, _DX, _DY, _DZ,
        )
        _apply(labels, theta, upd_idx, upd_label, upd_theta, count)
        iterations += 1
        if count == 0:
            converged = True
            break
        if not full_sweep:
            changed = upd_idx
            n_changed = count

    mask = LabelGrid(
        labels=(labels == FOREGROUND).astype(np.uint8), spacing=volume.spacing
    )
    state.iteration = iterations
    return SegmentationResult(
        mask=mask,
        iterations=iterations,
        elapsed_seconds=time.perf_counter() - t0,
        converged=converged,
        state=state,
    )
