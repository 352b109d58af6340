import { Frame } from "./types.js";

/** Re-times clip frames onto a session's single monotone clock.
 * The service rejects non-increasing timestamps, so every streamed
 * performance continues strictly after whatever was sent before. */
export class FrameStreamer {
  private lastT = -Infinity;

  /** Shift the clip to start one tick after the last streamed frame. */
  retime(frames: Frame[], rate: number): Frame[] {
    if (frames.length === 0) return [];
    const tick = 1 / (rate > 0 ? rate : 30);
    const start = this.lastT === -Infinity ? 0 : this.lastT + tick;
    const t0 = frames[0].t;
    const out = frames.map((f) => ({ ...f, t: start + (f.t - t0) }));
    this.lastT = out[out.length - 1].t;
    return out;
  }

  /** Frozen-pose padding that lets the segmenter close the gesture. */
  stillness(pose: Frame, seconds: number, rate: number): Frame[] {
    const tick = 1 / (rate > 0 ? rate : 30);
    const n = Math.max(1, Math.round(seconds * rate));
    const out: Frame[] = [];
    for (let i = 0; i < n; i++) {
      out.push({ ...pose, t: this.lastT + tick * (i + 1) });
    }
    this.lastT = out[out.length - 1].t;
    return out;
  }

  batches<T>(items: T[], size: number): T[][] {
    const out: T[][] = [];
    for (let i = 0; i < items.length; i += size) out.push(items.slice(i, i + size));
    return out;
  }
}
