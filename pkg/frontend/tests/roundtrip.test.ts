/**
 * End-to-end round trip against a live server: paint one axial stroke with
 * the brush geometry, segment, and check that (a) every accumulated seed
 * voxel sits on the painted slice, (b) identical strokes reproduce the
 * identical content-addressed mask id, (c) the DSC served by /metrics equals
 * an out-of-band metrics computation on the same masks to 1e-12, and
 * (d) overlay fetches neither mutate session state nor vary between calls.
 */
import { spawn, spawnSync, ChildProcess } from 'node:child_process';
import { mkdtempSync, rmSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { WorkbenchClient } from '../src/api.js';
import { strokeToPayload } from '../src/geometry.js';

const PORT = 18731;
const BASE = `http://127.0.0.1:${PORT}`;

let dataDir: string;
let server: ChildProcess | null = null;

const MAKE_PHANTOM = `
import sys
import numpy as np
from voxseg import LabelGrid, VolumeGrid, write_nrrd_file

out = sys.argv[1]
n = 32
ax = np.arange(n, dtype=np.float64)
d2 = ((ax[:, None, None] - 15.5) ** 2 + (ax[None, :, None] - 15.5) ** 2
      + (ax[None, None, :] - 15.5) ** 2)
sphere = d2 <= 10.0 ** 2
write_nrrd_file(VolumeGrid(intensities=np.where(sphere, 300, -400).astype(np.int16),
                           spacing=(1.0, 1.0, 1.0)), out + "/phantom.nrrd")
# ground truth intentionally tighter than the imaged sphere so DSC != 1
gt = d2 <= 8.0 ** 2
write_nrrd_file(LabelGrid(labels=gt.astype(np.uint8), spacing=(1.0, 1.0, 1.0)),
                out + "/phantom_gt.nrrd")
print("ok")
`;

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 120; i++) {
    try {
      const resp = await fetch(`${BASE}/volumes`);
      if (resp.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 500));
  }
  throw new Error('server did not become ready');
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), 'voxseg-ui-'));
  const gen = spawnSync('python3', ['-c', MAKE_PHANTOM, dataDir], { encoding: 'utf8' });
  if (!gen.stdout.includes('ok')) {
    throw new Error(`phantom generation failed: ${gen.stderr}`);
  }
  server = spawn(
    'python3',
    ['-m', 'voxseg.cli', 'serve', '--port', String(PORT), '--data-dir', dataDir],
    { stdio: 'ignore' },
  );
  await waitForServer();
});

afterAll(() => {
  server?.kill('SIGTERM');
  rmSync(dataDir, { recursive: true, force: true });
});

describe('workbench round trip', () => {
  it('stroke -> segment -> metrics with overlay idempotence', async () => {
    const client = new WorkbenchClient(BASE);

    const volumes = await client.volumes();
    expect(volumes.map((v) => v.id)).toEqual(['phantom']);
    expect(volumes[0].dims).toEqual([32, 32, 32]);

    let session = await client.openSession('phantom');

    // one axial stroke with a radius-2 brush swept across the sphere center
    const sliceIndex = 15;
    const payload = strokeToPayload(
      {
        plane: 'axial',
        index: sliceIndex,
        label: 'foreground',
        points: [
          { x: 14, y: 15 },
          { x: 15, y: 15 },
          { x: 16, y: 15 },
        ],
        radius: 2,
      },
      32,
      32,
    );
    session = await client.sendStrokes(session.id, payload);

    // server-side seed voxels land only on the painted slice, one per pixel
    const expected = new Set(payload.strokes[0].pixels.map(([x, y]) => `${x},${y}`));
    expect(session.seeds.length).toBe(expected.size);
    for (const [x, y, z, label] of session.seeds) {
      expect(z).toBe(sliceIndex);
      expect(label).toBe(1); // foreground
      expect(expected.has(`${x},${y}`)).toBe(true);
    }

    const run = await client.segment(session.id);
    expect(run.converged).toBe(true);
    expect(run.iterations).toBeGreaterThan(0);

    // identical strokes reproduce an identical mask id content hash
    const rerun = await client.segment(session.id);
    expect(rerun.mask_id).toBe(run.mask_id);

    await client.registerGroundTruth(session.id, 'phantom_gt.nrrd');
    const served = await client.metrics(session.id);
    expect(served.dsc).toBeGreaterThan(0);
    expect(served.dsc).toBeLessThan(1);

    // out-of-band computation on the same masks: download the served mask,
    // then compare it against the ground-truth file with the CLI
    const maskBytes = Buffer.from(await client.maskBytes(run.mask_id));
    const maskPath = join(dataDir, 'served_mask.nrrd');
    writeFileSync(maskPath, maskBytes);
    const cmp = spawnSync(
      'python3',
      ['-m', 'voxseg.cli', 'compare', '--a', maskPath, '--b', join(dataDir, 'phantom_gt.nrrd'), '--json'],
      { encoding: 'utf8' },
    );
    const local = JSON.parse(cmp.stdout);
    expect(Math.abs(local.dsc - served.dsc)).toBeLessThanOrEqual(1e-12);
    expect(local.voxels_a).toBe(served.voxels_a);
    expect(local.voxels_b).toBe(served.voxels_b);

    // overlay fetches: byte-identical and side-effect free
    const stateBefore = JSON.stringify(await client.session(session.id));
    const overlay1 = Buffer.from(await client.overlayBytes(session.id, 'axial', sliceIndex));
    const overlay2 = Buffer.from(await client.overlayBytes(session.id, 'axial', sliceIndex));
    expect(overlay1.equals(overlay2)).toBe(true);
    const stateAfter = JSON.stringify(await client.session(session.id));
    expect(stateAfter).toBe(stateBefore);
  });
});
