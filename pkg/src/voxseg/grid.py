"""Voxel grid containers and slice extraction.

A grid stores its samples in an array indexed ``[x, y, z]`` with shape
``(nx, ny, nz)``.  The canonical linear (file) order is x-fastest, then y,
then z, i.e. the sample at linear index ``x + nx*(y + ny*z)``; this is the
Fortran ravel of the array.  Grids are immutable after construction and can
be shared freely between threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IndexOutOfRange, NonPositiveWindow

PLANES = ("axial", "sagittal", "coronal")


def _validate_geometry(dims, spacing, array, expected_dtype):
    if len(dims) != 3 or any(int(d) < 1 for d in dims):
        raise ValueError(f"dims must be three positive integers, got {dims}")
    if len(spacing) != 3 or any(not (s > 0) for s in spacing):
        raise ValueError(f"spacing must be three positive reals, got {spacing}")
    if array.shape != tuple(dims):
        raise ValueError(f"array shape {array.shape} != dims {tuple(dims)}")
    if array.dtype != expected_dtype:
        raise ValueError(f"expected dtype {expected_dtype}, got {array.dtype}")


@dataclass(frozen=True, eq=False)
class VolumeGrid:
    """3D scalar CT volume (signed 16-bit, Hounsfield-unit scale)."""

    intensities: np.ndarray          # int16, shape (nx, ny, nz), indexed [x, y, z]
    spacing: tuple[float, float, float]   # mm per voxel along x, y, z

    def __post_init__(self):
        arr = np.asarray(self.intensities)
        _validate_geometry(arr.shape, self.spacing, arr, np.dtype(np.int16))
        arr.flags.writeable = False
        object.__setattr__(self, "intensities", arr)
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.intensities.shape

    @property
    def array(self) -> np.ndarray:
        return self.intensities

    def value_range(self) -> tuple[int, int]:
        return int(self.intensities.min()), int(self.intensities.max())

    def __eq__(self, other) -> bool:
        if not isinstance(other, VolumeGrid):
            return NotImplemented
        return self.spacing == other.spacing and np.array_equal(
            self.intensities, other.intensities
        )


@dataclass(frozen=True, eq=False)
class LabelGrid:
    """Integer label volume; binary masks are the {0, 1} case."""

    labels: np.ndarray               # uint8, shape (nx, ny, nz), indexed [x, y, z]
    spacing: tuple[float, float, float]

    def __post_init__(self):
        arr = np.asarray(self.labels)
        _validate_geometry(arr.shape, self.spacing, arr, np.dtype(np.uint8))
        arr.flags.writeable = False
        object.__setattr__(self, "labels", arr)
        object.__setattr__(self, "spacing", tuple(float(s) for s in self.spacing))

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.labels.shape

    @property
    def array(self) -> np.ndarray:
        return self.labels

    def foreground_count(self) -> int:
        return int(np.count_nonzero(self.labels))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabelGrid):
            return NotImplemented
        return self.spacing == other.spacing and np.array_equal(self.labels, other.labels)


@dataclass(frozen=True)
class SliceImage:
    """One 2D slice through a grid.

    ``samples[v, u]`` is the in-plane pixel at column ``u``, row ``v``;
    flattening row-major therefore walks u fastest.
    """

    plane: str
    index: int
    width: int
    height: int
    samples: np.ndarray = field(repr=False)


def extract_slice(grid: VolumeGrid | LabelGrid, plane: str, index: int) -> SliceImage:
    """Cut an axial, sagittal, or coronal slice out of a grid.

    In-plane axes per plane: axial -> (x, y), sagittal -> (y, z),
    coronal -> (x, z).  Raises IndexOutOfRange when ``index`` exceeds the
    extent along the plane normal.
    """
    if plane not in PLANES:
        raise ValueError(f"unknown plane {plane!r}, expected one of {PLANES}")
    nx, ny, nz = grid.dims
    arr = grid.array
    index = int(index)
    if plane == "axial":
        if not 0 <= index < nz:
            raise IndexOutOfRange(f"axial index {index} outside [0, {nz})")
        samples = arr[:, :, index].T          # (ny, nx)
        width, height = nx, ny
    elif plane == "sagittal":
        if not 0 <= index < nx:
            raise IndexOutOfRange(f"sagittal index {index} outside [0, {nx})")
        samples = arr[index, :, :].T          # (nz, ny)
        width, height = ny, nz
    else:
        if not 0 <= index < ny:
            raise IndexOutOfRange(f"coronal index {index} outside [0, {ny})")
        samples = arr[:, index, :].T          # (nz, nx)
        width, height = nx, nz
    return SliceImage(plane=plane, index=index, width=width, height=height, samples=samples)


def plane_extent(dims: tuple[int, int, int], plane: str) -> int:
    """Number of slices a grid has along the given plane's normal."""
    nx, ny, nz = dims
    return {"axial": nz, "sagittal": nx, "coronal": ny}[plane]


def window_level(image: SliceImage, window: float, level: float) -> np.ndarray:
    """Map scalar samples to 8-bit display values.

    out = round(255 * clamp((v - (level - window/2)) / window, 0, 1)),
    with half-up rounding so v == level maps to 128.
    """
    if not window > 0:
        raise NonPositiveWindow(f"window must be > 0, got {window}")
    lo = level - window / 2.0
    scaled = (image.samples.astype(np.float64) - lo) / float(window)
    np.clip(scaled, 0.0, 1.0, out=scaled)
    return np.floor(scaled * 255.0 + 0.5).astype(np.uint8)
