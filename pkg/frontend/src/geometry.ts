/**
 * Canvas-space to slice-space mapping and brush geometry.
 *
 * Slice pixels sit on an integer grid; a canvas point maps to the pixel
 * floor((canvas - pan) / zoom), clamped into the slice. A circular brush of
 * integer radius r covers the offsets with dx^2 + dy^2 <= (r - 0.5)^2, so
 * radius 1 is exactly the center pixel and radius 2 the 3x3 block minus
 * nothing (nine pixels).
 */

export type Plane = 'axial' | 'sagittal' | 'coronal';
export type BrushLabel = 'foreground' | 'background';

export interface Point {
  x: number;
  y: number;
}

/** One painted stroke: centers swept on a single slice, all one label. */
export interface BrushStroke {
  plane: Plane;
  index: number;
  label: BrushLabel;
  points: Point[];
  radius: number;
}

/** The wire schema the segmentation engine accepts. */
export interface StrokePayload {
  strokes: Array<{
    plane: Plane;
    index: number;
    label: BrushLabel;
    pixels: Array<[number, number]>;
  }>;
}

export class EmptyStrokeError extends Error {
  constructor() {
    super('stroke has no pixels');
    this.name = 'EmptyStrokeError';
  }
}

const clamp = (v: number, lo: number, hi: number) => Math.min(Math.max(v, lo), hi);

/** Map a canvas point to the in-plane pixel under it, clamped to the slice. */
export function screenToPixel(
  canvas: Point,
  zoom: number,
  pan: Point,
  width: number,
  height: number,
): [number, number] {
  if (zoom <= 0) throw new RangeError(`zoom must be > 0, got ${zoom}`);
  const px = Math.floor((canvas.x - pan.x) / zoom);
  const py = Math.floor((canvas.y - pan.y) / zoom);
  return [clamp(px, 0, width - 1), clamp(py, 0, height - 1)];
}

/** Offsets of the circular brush footprint for an integer radius >= 1. */
export function brushDisk(radius: number): Array<[number, number]> {
  if (!Number.isInteger(radius) || radius < 1) {
    throw new RangeError(`brush radius must be an integer >= 1, got ${radius}`);
  }
  const limit = (radius - 0.5) * (radius - 0.5);
  const offsets: Array<[number, number]> = [];
  for (let dy = -radius; dy <= radius; dy++) {
    for (let dx = -radius; dx <= radius; dx++) {
      if (dx * dx + dy * dy <= limit) offsets.push([dx, dy]);
    }
  }
  return offsets;
}

/**
 * Expand the brush footprint around every swept center, deduplicate, and
 * emit the engine's stroke JSON. Footprint pixels falling outside the slice
 * are dropped; an entirely empty result is an error.
 */
export function strokeToPayload(
  stroke: BrushStroke,
  width: number,
  height: number,
): StrokePayload {
  const disk = brushDisk(stroke.radius);
  const seen = new Set<number>();
  const pixels: Array<[number, number]> = [];
  for (const p of stroke.points) {
    for (const [dx, dy] of disk) {
      const x = p.x + dx;
      const y = p.y + dy;
      if (x < 0 || x >= width || y < 0 || y >= height) continue;
      const key = y * width + x;
      if (!seen.has(key)) {
        seen.add(key);
        pixels.push([x, y]);
      }
    }
  }
  if (pixels.length === 0) throw new EmptyStrokeError();
  return {
    strokes: [
      { plane: stroke.plane, index: stroke.index, label: stroke.label, pixels },
    ],
  };
}

export type Dims = [number, number, number];

/** Number of slices along the plane normal. */
export function planeExtent(dims: Dims, plane: Plane): number {
  const [nx, ny, nz] = dims;
  return plane === 'axial' ? nz : plane === 'sagittal' ? nx : ny;
}

/** In-plane (width, height) of a slice, matching the server's slice images. */
export function planeBounds(dims: Dims, plane: Plane): [number, number] {
  const [nx, ny, nz] = dims;
  if (plane === 'axial') return [nx, ny];
  if (plane === 'sagittal') return [ny, nz];
  return [nx, nz];
}
