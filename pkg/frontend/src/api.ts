/**
 * Thin typed client for the workbench HTTP API. All methods throw ApiError
 * with the server's error/message fields on non-2xx responses. A long
 * segmentation answered with 202 is polled until it settles.
 */

import type { Plane, StrokePayload } from './geometry.js';

export interface VolumeInfo {
  id: string;
  dims: [number, number, number];
  spacing: [number, number, number];
}

export interface SessionState {
  id: string;
  volume_id: string;
  stroke_count: number;
  seeds: Array<[number, number, number, number]>; // x, y, z, label
  latest_mask_id: string | null;
  ground_truth_registered: boolean;
  segmenting: boolean;
}

export interface SegmentRun {
  status?: string;
  mask_id: string;
  iterations: number;
  elapsed_seconds: number;
  converged: boolean;
}

export interface Metrics {
  dsc: number;
  hd: number;
  volume_a_mm3: number;
  volume_b_mm3: number;
  voxels_a: number;
  voxels_b: number;
  elapsed_seconds: number;
  a: string;
  b: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly error: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

const sleep = (ms: number) => new Promise((r) => setTimeout(r, ms));

export class WorkbenchClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    if (!resp.ok && resp.status !== 202) {
      let error = 'HttpError';
      let message = `${resp.status} on ${path}`;
      try {
        const body = await resp.json();
        error = body.error ?? error;
        message = body.message ?? message;
      } catch {
        // non-JSON error body; keep the defaults
      }
      throw new ApiError(resp.status, error, message);
    }
    return resp;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.request(path, init);
    return (await resp.json()) as T;
  }

  volumes(): Promise<VolumeInfo[]> {
    return this.json('/volumes');
  }

  sliceUrl(volumeId: string, plane: Plane, index: number, window: number, level: number): string {
    const q = new URLSearchParams({
      plane,
      index: String(index),
      window: String(window),
      level: String(level),
    });
    return `${this.baseUrl}/volumes/${encodeURIComponent(volumeId)}/slice?${q}`;
  }

  overlayUrl(sessionId: string, plane: Plane, index: number): string {
    const q = new URLSearchParams({ plane, index: String(index) });
    return `${this.baseUrl}/sessions/${encodeURIComponent(sessionId)}/overlay?${q}`;
  }

  openSession(volumeId: string): Promise<SessionState> {
    return this.json('/sessions', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ volume_id: volumeId }),
    });
  }

  session(sessionId: string): Promise<SessionState> {
    return this.json(`/sessions/${encodeURIComponent(sessionId)}`);
  }

  sendStrokes(sessionId: string, payload: StrokePayload): Promise<SessionState> {
    return this.json(`/sessions/${encodeURIComponent(sessionId)}/strokes`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(payload),
    });
  }

  clearStrokes(sessionId: string): Promise<SessionState> {
    return this.json(`/sessions/${encodeURIComponent(sessionId)}/strokes`, {
      method: 'DELETE',
    });
  }

  async segment(sessionId: string, maxIters?: number): Promise<SegmentRun> {
    const resp = await this.request(`/sessions/${encodeURIComponent(sessionId)}/segment`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(maxIters ? { max_iters: maxIters } : {}),
    });
    let run = (await resp.json()) as SegmentRun & { error?: string; message?: string };
    while (run.status === 'running') {
      await sleep(250);
      run = await this.json(`/sessions/${encodeURIComponent(sessionId)}/segment`);
    }
    if (run.status === 'error') {
      throw new ApiError(422, run.error ?? 'SegmentationError', run.message ?? 'segmentation failed');
    }
    return run;
  }

  registerGroundTruth(sessionId: string, path: string): Promise<SessionState> {
    return this.json(`/sessions/${encodeURIComponent(sessionId)}/ground_truth`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ path }),
    });
  }

  metrics(sessionId: string): Promise<Metrics> {
    return this.json(`/sessions/${encodeURIComponent(sessionId)}/metrics`);
  }

  async maskBytes(maskId: string): Promise<ArrayBuffer> {
    const resp = await this.request(`/masks/${encodeURIComponent(maskId)}`);
    return resp.arrayBuffer();
  }

  async overlayBytes(sessionId: string, plane: Plane, index: number): Promise<ArrayBuffer> {
    const resp = await this.fetchImpl(this.overlayUrl(sessionId, plane, index));
    if (!resp.ok) {
      throw new ApiError(resp.status, 'HttpError', `overlay fetch failed: ${resp.status}`);
    }
    return resp.arrayBuffer();
  }
}
