/**
 * DOM bootstrap for the workbench: three synchronized slice panes with
 * per-pane index sliders and shared window/level, a foreground/background
 * brush, GrowCut runs with a single in-flight guard, mask overlay, and a
 * metrics readout once a ground truth is registered.
 */

import { WorkbenchClient, ApiError, VolumeInfo, SessionState, SegmentRun } from './api.js';
import {
  BrushLabel,
  BrushStroke,
  Plane,
  Point,
  planeBounds,
  planeExtent,
  screenToPixel,
  strokeToPayload,
} from './geometry.js';

const PLANES: Plane[] = ['axial', 'sagittal', 'coronal'];
const STROKE_COLORS: Record<BrushLabel, string> = {
  foreground: 'rgba(76, 175, 80, 0.55)',
  background: 'rgba(212, 192, 74, 0.55)',
};

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

interface PaneView {
  plane: Plane;
  canvas: HTMLCanvasElement;
  slider: HTMLInputElement;
  indexLabel: HTMLSpanElement;
  index: number;
  zoom: number;
  pan: Point;
  baseImage: HTMLImageElement | null;
  overlayImage: HTMLImageElement | null;
  painting: BrushStroke | null;
  panning: { startX: number; startY: number; panX: number; panY: number } | null;
}

class App {
  private readonly client = new WorkbenchClient('');
  private volume: VolumeInfo | null = null;
  private session: SessionState | null = null;
  private panes: PaneView[] = [];
  private brushLabel: BrushLabel = 'foreground';
  private running = false;
  private overlayOn = false;

  async start(): Promise<void> {
    this.buildPanes();
    this.wireToolbar();
    const volumes = await this.client.volumes();
    const select = $<HTMLSelectElement>('volume-select');
    for (const v of volumes) {
      const opt = document.createElement('option');
      opt.value = v.id;
      opt.textContent = `${v.id} (${v.dims.join('x')})`;
      select.appendChild(opt);
    }
    select.addEventListener('change', () => void this.openVolume(select.value));
    if (volumes.length > 0) await this.openVolume(volumes[0].id);
  }

  private buildPanes(): void {
    const host = $<HTMLElement>('panes');
    for (const plane of PLANES) {
      const root = document.createElement('div');
      root.className = 'pane';
      root.innerHTML = `
        <div class="head"><strong>${plane}</strong><span class="idx">0</span></div>
        <canvas width="512" height="512"></canvas>
        <input type="range" min="0" max="0" value="0" />`;
      host.appendChild(root);
      const pane: PaneView = {
        plane,
        canvas: root.querySelector('canvas')!,
        slider: root.querySelector('input')!,
        indexLabel: root.querySelector('.idx')!,
        index: 0,
        zoom: 1,
        pan: { x: 0, y: 0 },
        baseImage: null,
        overlayImage: null,
        painting: null,
        panning: null,
      };
      pane.slider.addEventListener('input', () => {
        pane.index = Number(pane.slider.value);
        pane.indexLabel.textContent = String(pane.index);
        void this.refreshPane(pane);
      });
      this.wirePointer(pane);
      this.panes.push(pane);
    }
  }

  private wireToolbar(): void {
    $<HTMLButtonElement>('label-foreground').addEventListener('click', () => this.setLabel('foreground'));
    $<HTMLButtonElement>('label-background').addEventListener('click', () => this.setLabel('background'));
    $<HTMLButtonElement>('run').addEventListener('click', () => void this.runSegmentation());
    $<HTMLButtonElement>('clear').addEventListener('click', () => void this.clearStrokes());
    $<HTMLInputElement>('overlay').addEventListener('change', (e) => {
      this.overlayOn = (e.target as HTMLInputElement).checked;
      void this.refreshAll();
    });
    for (const id of ['window', 'level']) {
      $<HTMLInputElement>(id).addEventListener('change', () => void this.refreshAll());
    }
    $<HTMLButtonElement>('gt-register').addEventListener('click', () => void this.registerGroundTruth());
  }

  private setLabel(label: BrushLabel): void {
    this.brushLabel = label;
    $<HTMLButtonElement>('label-foreground').classList.toggle('active', label === 'foreground');
    $<HTMLButtonElement>('label-background').classList.toggle('active', label === 'background');
  }

  private async openVolume(volumeId: string): Promise<void> {
    const volumes = await this.client.volumes();
    this.volume = volumes.find((v) => v.id === volumeId) ?? null;
    if (!this.volume) return;
    this.session = await this.client.openSession(volumeId);
    this.overlayOn = false;
    $<HTMLInputElement>('overlay').checked = false;
    for (const pane of this.panes) {
      const extent = planeExtent(this.volume.dims, pane.plane);
      pane.slider.max = String(extent - 1);
      pane.index = Math.floor(extent / 2);
      pane.slider.value = String(pane.index);
      pane.indexLabel.textContent = String(pane.index);
      pane.zoom = 1;
      pane.pan = { x: 0, y: 0 };
      pane.overlayImage = null;
    }
    $<HTMLButtonElement>('run').disabled = false;
    $<HTMLButtonElement>('clear').disabled = false;
    $<HTMLButtonElement>('gt-register').disabled = false;
    this.setStatus(`session ${this.session.id}`);
    this.updateSeedCount();
    await this.refreshAll();
  }

  private windowLevel(): [number, number] {
    return [Number($<HTMLInputElement>('window').value) || 2000,
            Number($<HTMLInputElement>('level').value) || 0];
  }

  private loadImage(url: string): Promise<HTMLImageElement> {
    return new Promise((resolve, reject) => {
      const img = new Image();
      img.onload = () => resolve(img);
      img.onerror = () => reject(new Error(`failed to load ${url}`));
      img.src = url;
    });
  }

  private async refreshPane(pane: PaneView): Promise<void> {
    if (!this.volume) return;
    const [w, l] = this.windowLevel();
    pane.baseImage = await this.loadImage(
      this.client.sliceUrl(this.volume.id, pane.plane, pane.index, w, l),
    );
    pane.overlayImage = null;
    if (this.overlayOn && this.session?.latest_mask_id) {
      try {
        const blob = await (await fetch(this.client.overlayUrl(this.session.id, pane.plane, pane.index))).blob();
        pane.overlayImage = await this.loadImage(URL.createObjectURL(blob));
      } catch {
        pane.overlayImage = null;
      }
    }
    this.drawPane(pane);
  }

  private async refreshAll(): Promise<void> {
    await Promise.all(this.panes.map((p) => this.refreshPane(p)));
  }

  private drawPane(pane: PaneView): void {
    const ctx = pane.canvas.getContext('2d');
    if (!ctx) return;
    ctx.imageSmoothingEnabled = false;
    ctx.fillStyle = '#000';
    ctx.fillRect(0, 0, pane.canvas.width, pane.canvas.height);
    if (!pane.baseImage) return;
    const img = pane.baseImage;
    ctx.save();
    ctx.translate(pane.pan.x, pane.pan.y);
    ctx.scale(pane.zoom, pane.zoom);
    ctx.drawImage(img, 0, 0);
    if (pane.overlayImage) ctx.drawImage(pane.overlayImage, 0, 0);
    if (pane.painting) {
      ctx.fillStyle = STROKE_COLORS[pane.painting.label];
      const r = pane.painting.radius;
      for (const p of pane.painting.points) {
        ctx.fillRect(p.x - r + 1, p.y - r + 1, 2 * r - 1, 2 * r - 1);
      }
    }
    ctx.restore();
  }

  /** Canvas CSS pixels -> backing pixels -> slice pixel under the cursor. */
  private eventPixel(pane: PaneView, ev: PointerEvent): [number, number] {
    if (!this.volume) return [0, 0];
    const rect = pane.canvas.getBoundingClientRect();
    const cx = ((ev.clientX - rect.left) / rect.width) * pane.canvas.width;
    const cy = ((ev.clientY - rect.top) / rect.height) * pane.canvas.height;
    const [bw, bh] = planeBounds(this.volume.dims, pane.plane);
    return screenToPixel({ x: cx, y: cy }, pane.zoom, pane.pan, bw, bh);
  }

  private wirePointer(pane: PaneView): void {
    pane.canvas.addEventListener('contextmenu', (e) => e.preventDefault());
    pane.canvas.addEventListener('pointerdown', (ev) => {
      pane.canvas.setPointerCapture(ev.pointerId);
      if (ev.button === 2 || ev.button === 1) {
        pane.panning = { startX: ev.clientX, startY: ev.clientY, panX: pane.pan.x, panY: pane.pan.y };
        return;
      }
      if (!this.session) return;
      const radius = Math.max(1, Math.round(Number($<HTMLInputElement>('brush-radius').value) || 1));
      const [x, y] = this.eventPixel(pane, ev);
      pane.painting = {
        plane: pane.plane,
        index: pane.index,
        label: this.brushLabel,
        points: [{ x, y }],
        radius,
      };
      this.drawPane(pane);
    });
    pane.canvas.addEventListener('pointermove', (ev) => {
      if (pane.panning) {
        pane.pan = {
          x: pane.panning.panX + (ev.clientX - pane.panning.startX),
          y: pane.panning.panY + (ev.clientY - pane.panning.startY),
        };
        this.drawPane(pane);
        return;
      }
      if (!pane.painting) return;
      const [x, y] = this.eventPixel(pane, ev);
      const last = pane.painting.points[pane.painting.points.length - 1];
      if (last.x !== x || last.y !== y) {
        pane.painting.points.push({ x, y });
        this.drawPane(pane);
      }
    });
    const finish = () => void this.finishStroke(pane);
    pane.canvas.addEventListener('pointerup', finish);
    pane.canvas.addEventListener('pointercancel', () => {
      pane.painting = null;
      pane.panning = null;
      this.drawPane(pane);
    });
    pane.canvas.addEventListener('wheel', (ev) => {
      ev.preventDefault();
      const factor = ev.deltaY < 0 ? 1.25 : 0.8;
      const rect = pane.canvas.getBoundingClientRect();
      const cx = ((ev.clientX - rect.left) / rect.width) * pane.canvas.width;
      const cy = ((ev.clientY - rect.top) / rect.height) * pane.canvas.height;
      const next = Math.min(32, Math.max(0.25, pane.zoom * factor));
      pane.pan = {
        x: cx - ((cx - pane.pan.x) / pane.zoom) * next,
        y: cy - ((cy - pane.pan.y) / pane.zoom) * next,
      };
      pane.zoom = next;
      this.drawPane(pane);
    });
  }

  private async finishStroke(pane: PaneView): Promise<void> {
    if (pane.panning) {
      pane.panning = null;
      return;
    }
    const stroke = pane.painting;
    pane.painting = null;
    if (!stroke || !this.session || !this.volume) return;
    const [bw, bh] = planeBounds(this.volume.dims, pane.plane);
    try {
      this.session = await this.client.sendStrokes(
        this.session.id,
        strokeToPayload(stroke, bw, bh),
      );
      this.updateSeedCount();
      this.setStatus('strokes updated');
    } catch (err) {
      this.reportError(err);
    }
    this.drawPane(pane);
  }

  private async clearStrokes(): Promise<void> {
    if (!this.session) return;
    this.session = await this.client.clearStrokes(this.session.id);
    this.updateSeedCount();
    this.setStatus('strokes cleared');
  }

  private async runSegmentation(): Promise<void> {
    if (!this.session || this.running) return;
    this.running = true;
    const runBtn = $<HTMLButtonElement>('run');
    runBtn.disabled = true;
    this.setStatus('segmenting...');
    try {
      const run: SegmentRun = await this.client.segment(this.session.id);
      this.session = await this.client.session(this.session.id);
      $<HTMLElement>('iterations').textContent = String(run.iterations);
      $<HTMLElement>('elapsed').textContent = `${run.elapsed_seconds.toFixed(2)} s`;
      this.setStatus(run.converged ? 'converged' : 'iteration budget hit');
      this.overlayOn = true;
      $<HTMLInputElement>('overlay').checked = true;
      $<HTMLInputElement>('overlay').disabled = false;
      await this.refreshAll();
      if (this.session.ground_truth_registered) await this.refreshMetrics();
    } catch (err) {
      this.reportError(err);
    } finally {
      this.running = false;
      runBtn.disabled = false;
    }
  }

  private async registerGroundTruth(): Promise<void> {
    if (!this.session) return;
    const path = $<HTMLInputElement>('gt-path').value.trim();
    if (!path) return;
    try {
      this.session = await this.client.registerGroundTruth(this.session.id, path);
      this.setStatus('ground truth registered');
      if (this.session.latest_mask_id) await this.refreshMetrics();
    } catch (err) {
      this.reportError(err);
    }
  }

  private async refreshMetrics(): Promise<void> {
    if (!this.session) return;
    try {
      const m = await this.client.metrics(this.session.id);
      $<HTMLElement>('metric-dsc').textContent = `${(m.dsc * 100).toFixed(2)} %`;
      $<HTMLElement>('metric-hd').textContent = `${m.hd.toFixed(2)} voxels`;
      $<HTMLElement>('metric-volume').textContent =
        `${m.volume_a_mm3.toFixed(1)} / ${m.volume_b_mm3.toFixed(1)} mm³`;
      $<HTMLElement>('metric-voxels').textContent = `${m.voxels_a} / ${m.voxels_b}`;
    } catch {
      // metrics simply stay blank until both mask and ground truth exist
    }
  }

  private updateSeedCount(): void {
    $<HTMLElement>('seed-count').textContent = String(this.session?.seeds.length ?? 0);
  }

  private setStatus(text: string): void {
    $<HTMLElement>('status').textContent = text;
  }

  private reportError(err: unknown): void {
    if (err instanceof ApiError) {
      this.setStatus(`${err.error}: ${err.message}`);
    } else {
      this.setStatus(String(err));
    }
  }
}

void new App().start();
