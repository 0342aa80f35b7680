"""Slice-by-slice closed contours and their conversion to solid binary masks.

Pixel centers sit at integer coordinates; contour vertices are continuous,
so hand-drawn outlines may pass between centers.  Fill rule: a pixel is
inside when a ray cast toward -x from its center crosses an odd number of
polygon edges, with edges counted half-open at their upper-y vertex and a
crossing counted only when it lies strictly left of the center.  The rule is
deterministic on shared edges: two contours that abut along a common edge
neither overlap nor leave a gap.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneratePolygon, IndexOutOfRange
from .grid import LabelGrid

Polygon = list[tuple[float, float]]


@dataclass(frozen=True)
class ContourStack:
    """Closed polygons per axial slice index."""

    slices: dict[int, list[Polygon]] = field(default_factory=dict)

    def max_index(self) -> int:
        return max(self.slices) if self.slices else -1


def contours_from_json(text: str) -> ContourStack:
    """Parse ``{"slices":[{"index":k,"polygons":[[[x,y],...],...]}]}``."""
    doc = json.loads(text)
    slices: dict[int, list[Polygon]] = {}
    for entry in doc["slices"]:
        polys = [[(float(x), float(y)) for x, y in poly] for poly in entry["polygons"]]
        slices.setdefault(int(entry["index"]), []).extend(polys)
    return ContourStack(slices=slices)


def contours_to_json(stack: ContourStack) -> str:
    entries = [
        {"index": k, "polygons": [[[x, y] for x, y in poly] for poly in polys]}
        for k, polys in sorted(stack.slices.items())
    ]
    return json.dumps({"slices": entries})


def _fill_polygon(poly: Polygon, out: np.ndarray) -> None:
    # scanline even-odd fill; out is uint8 indexed [x, y]
    nx, ny = out.shape
    ys = [p[1] for p in poly]
    jmin = max(0, int(np.ceil(min(ys))))
    jmax = min(ny - 1, int(np.floor(max(ys))))
    n = len(poly)
    for j in range(jmin, jmax + 1):
        crossings = []
        for i in range(n):
            x1, y1 = poly[i]
            x2, y2 = poly[(i + 1) % n]
            # half-open span: the vertex with larger y is excluded
            if (y1 <= j < y2) or (y2 <= j < y1):
                crossings.append(x1 + (j - y1) * (x2 - x1) / (y2 - y1))
        crossings.sort()
        for k in range(0, len(crossings) - 1, 2):
            xl, xr = crossings[k], crossings[k + 1]
            # inside means an odd crossing count strictly left of the center:
            # fill integer i with xl < i <= xr
            start = int(np.floor(xl)) + 1
            stop = int(np.floor(xr))
            if start < 0:
                start = 0
            if stop > nx - 1:
                stop = nx - 1
            if start <= stop:
                out[start : stop + 1, j] = 1


def rasterize_slice(polygons: list[Polygon], nx: int, ny: int) -> np.ndarray:
    """Fill the union of closed polygons onto an (nx, ny) grid of pixel centers.

    Returns a uint8 array indexed ``[i, j]``.  Raises DegeneratePolygon for
    any ring with fewer than 3 vertices.
    """
    for poly in polygons:
        if len(poly) < 3:
            raise DegeneratePolygon(f"polygon has {len(poly)} vertices, need >= 3")
    out = np.zeros((nx, ny), dtype=np.uint8)
    for poly in polygons:
        _fill_polygon([(float(x), float(y)) for x, y in poly], out)
    return out


def stack_to_mask(
    stack: ContourStack,
    dims: tuple[int, int, int],
    spacing: tuple[float, float, float],
) -> LabelGrid:
    """Rasterize every slice of a contour stack into one solid binary mask.

    Slices absent from the stack stay zero.  Raises IndexOutOfRange when a
    contour sits on a slice index outside [0, nz).
    """
    nx, ny, nz = dims
    for k in stack.slices:
        if not 0 <= k < nz:
            raise IndexOutOfRange(f"contour slice index {k} outside [0, {nz})")
    labels = np.zeros((nx, ny, nz), dtype=np.uint8)
    for k, polys in stack.slices.items():
        labels[:, :, k] = rasterize_slice(polys, nx, ny)
    return LabelGrid(labels=labels, spacing=spacing)
