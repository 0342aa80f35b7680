import { describe, expect, it, vi } from 'vitest';

import { ApiError, WorkbenchClient } from '../src/api.js';

type Handler = (url: string, init?: RequestInit) => Response | Promise<Response>;

const jsonResponse = (body: unknown, status = 200) =>
  new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });

function clientWith(handler: Handler) {
  const fetchImpl = vi.fn((input: RequestInfo | URL, init?: RequestInit) =>
    Promise.resolve(handler(String(input), init)),
  );
  return { client: new WorkbenchClient('http://test', fetchImpl as typeof fetch), fetchImpl };
}

describe('WorkbenchClient', () => {
  it('fetches the volume catalog', async () => {
    const { client, fetchImpl } = clientWith(() =>
      jsonResponse([{ id: 'v1', dims: [2, 3, 4], spacing: [1, 1, 1] }]),
    );
    const vols = await client.volumes();
    expect(vols[0].id).toBe('v1');
    expect(fetchImpl).toHaveBeenCalledWith('http://test/volumes', undefined);
  });

  it('builds slice and overlay urls with query parameters', () => {
    const { client } = clientWith(() => jsonResponse({}));
    expect(client.sliceUrl('v1', 'axial', 7, 2000, 400)).toBe(
      'http://test/volumes/v1/slice?plane=axial&index=7&window=2000&level=400',
    );
    expect(client.overlayUrl('s1', 'coronal', 3)).toBe(
      'http://test/sessions/s1/overlay?plane=coronal&index=3',
    );
  });

  it('posts stroke payloads as JSON', async () => {
    let captured: RequestInit | undefined;
    const { client } = clientWith((url, init) => {
      captured = init;
      expect(url).toBe('http://test/sessions/s1/strokes');
      return jsonResponse({ id: 's1', seeds: [] });
    });
    await client.sendStrokes('s1', {
      strokes: [{ plane: 'axial', index: 1, label: 'foreground', pixels: [[1, 2]] }],
    });
    expect(captured?.method).toBe('POST');
    expect(JSON.parse(String(captured?.body))).toEqual({
      strokes: [{ plane: 'axial', index: 1, label: 'foreground', pixels: [[1, 2]] }],
    });
  });

  it('raises ApiError with the server error fields', async () => {
    const { client } = clientWith(() =>
      jsonResponse({ error: 'ConflictingSeed', message: 'voxel painted twice' }, 422),
    );
    await expect(client.sendStrokes('s1', { strokes: [] })).rejects.toMatchObject({
      name: 'ApiError',
      status: 422,
      error: 'ConflictingSeed',
    });
  });

  it('polls a detached segmentation until it settles', async () => {
    let polls = 0;
    const { client } = clientWith((url, init) => {
      if (init?.method === 'POST') {
        return jsonResponse({ status: 'running', poll: '/sessions/s1/segment' }, 202);
      }
      polls += 1;
      if (polls < 2) return jsonResponse({ status: 'running' });
      return jsonResponse({
        status: 'done', mask_id: 'abc', iterations: 5, elapsed_seconds: 0.1, converged: true,
      });
    });
    const run = await client.segment('s1');
    expect(run.mask_id).toBe('abc');
    expect(polls).toBe(2);
  });

  it('surfaces a failed detached segmentation as ApiError', async () => {
    const { client } = clientWith((url, init) => {
      if (init?.method === 'POST') return jsonResponse({ status: 'running' }, 202);
      return jsonResponse({ status: 'error', error: 'EmptyForeground', message: 'no strokes' });
    });
    await expect(client.segment('s1')).rejects.toMatchObject({ error: 'EmptyForeground' });
  });

  it('throws ApiError on non-JSON failures too', async () => {
    const { client } = clientWith(() => new Response('boom', { status: 500 }));
    await expect(client.volumes()).rejects.toBeInstanceOf(ApiError);
  });
});
