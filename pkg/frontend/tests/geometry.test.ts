import { describe, expect, it } from 'vitest';

import {
  BrushStroke,
  EmptyStrokeError,
  brushDisk,
  planeBounds,
  planeExtent,
  screenToPixel,
  strokeToPayload,
} from '../src/geometry.js';

describe('screenToPixel', () => {
  it('floors at unit zoom with no pan', () => {
    expect(screenToPixel({ x: 5.7, y: 6.2 }, 1, { x: 0, y: 0 }, 100, 100)).toEqual([5, 6]);
  });

  it('applies pan then zoom', () => {
    expect(screenToPixel({ x: 14, y: 14 }, 2, { x: 10, y: 10 }, 100, 100)).toEqual([2, 2]);
  });

  it('clamps points outside the slice to the nearest border pixel', () => {
    expect(screenToPixel({ x: -3, y: 4 }, 1, { x: 0, y: 0 }, 10, 10)).toEqual([0, 4]);
    expect(screenToPixel({ x: 99, y: 99 }, 1, { x: 0, y: 0 }, 10, 10)).toEqual([9, 9]);
    expect(screenToPixel({ x: 4, y: -1 }, 1, { x: 0, y: 0 }, 10, 10)).toEqual([4, 0]);
  });

  it('rejects non-positive zoom', () => {
    expect(() => screenToPixel({ x: 0, y: 0 }, 0, { x: 0, y: 0 }, 10, 10)).toThrow(RangeError);
  });
});

describe('brushDisk', () => {
  it('radius 1 is exactly the center pixel', () => {
    expect(brushDisk(1)).toEqual([[0, 0]]);
  });

  it('radius 2 is the nine-pixel disk dx^2+dy^2 <= 2.25', () => {
    const disk = brushDisk(2);
    expect(disk).toHaveLength(9);
    const expected = new Set(
      [-1, 0, 1].flatMap((dy) => [-1, 0, 1].map((dx) => `${dx},${dy}`)),
    );
    expect(new Set(disk.map(([dx, dy]) => `${dx},${dy}`))).toEqual(expected);
  });

  it('radius 3 stays within the r - 0.5 disk rule', () => {
    for (const [dx, dy] of brushDisk(3)) {
      expect(dx * dx + dy * dy).toBeLessThanOrEqual(6.25);
    }
    expect(brushDisk(3).length).toBe(21);
  });

  it('rejects radius below one and fractional radii', () => {
    expect(() => brushDisk(0)).toThrow(RangeError);
    expect(() => brushDisk(1.5)).toThrow(RangeError);
  });
});

describe('strokeToPayload', () => {
  const stroke = (over: Partial<BrushStroke>): BrushStroke => ({
    plane: 'axial',
    index: 3,
    label: 'foreground',
    points: [{ x: 5, y: 6 }],
    radius: 1,
    ...over,
  });

  it('radius-1 single point emits exactly that pixel', () => {
    const payload = strokeToPayload(stroke({}), 16, 16);
    expect(payload).toEqual({
      strokes: [{ plane: 'axial', index: 3, label: 'foreground', pixels: [[5, 6]] }],
    });
  });

  it('expands the disk and deduplicates overlapping sweeps', () => {
    const payload = strokeToPayload(
      stroke({ points: [{ x: 5, y: 5 }, { x: 6, y: 5 }], radius: 2 }),
      16,
      16,
    );
    const pixels = payload.strokes[0].pixels;
    const keys = new Set(pixels.map(([x, y]) => `${x},${y}`));
    expect(keys.size).toBe(pixels.length);   // no duplicates
    expect(pixels.length).toBe(12);          // two overlapping 9-pixel disks
  });

  it('drops footprint pixels outside the slice', () => {
    const payload = strokeToPayload(stroke({ points: [{ x: 0, y: 0 }], radius: 2 }), 16, 16);
    expect(new Set(payload.strokes[0].pixels.map(([x, y]) => `${x},${y}`))).toEqual(
      new Set(['0,0', '1,0', '0,1', '1,1']),
    );
  });

  it('throws EmptyStroke when nothing lands on the slice', () => {
    expect(() => strokeToPayload(stroke({ points: [] }), 16, 16)).toThrow(EmptyStrokeError);
  });
});

describe('plane helpers', () => {
  const dims: [number, number, number] = [512, 256, 180];

  it('extent follows the plane normal', () => {
    expect(planeExtent(dims, 'axial')).toBe(180);
    expect(planeExtent(dims, 'sagittal')).toBe(512);
    expect(planeExtent(dims, 'coronal')).toBe(256);
  });

  it('bounds match the service slice images', () => {
    expect(planeBounds(dims, 'axial')).toEqual([512, 256]);
    expect(planeBounds(dims, 'sagittal')).toEqual([256, 180]);
    expect(planeBounds(dims, 'coronal')).toEqual([512, 180]);
  });
});
