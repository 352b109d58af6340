import { ClipPayload, Frame } from "./types.js";
import { isValidFrame } from "./stickFigure.js";

/** Playback timing for a clip: maps elapsed wall time to a frame.
 * The render loop owns the clock; this stays pure and testable. */
export class ClipPlayer {
  readonly frames: Frame[];
  readonly rate: number;
  private paused = false;
  private elapsed = 0;

  constructor(clip: ClipPayload) {
    this.frames = clip.frames.filter(isValidFrame);
    this.rate = clip.rate > 0 ? clip.rate : 30;
  }

  get duration(): number {
    if (this.frames.length < 2) return 0;
    return this.frames[this.frames.length - 1].t - this.frames[0].t;
  }

  get malformed(): boolean {
    return this.frames.length < 2;
  }

  /** Advance by dt seconds of wall time; returns the frame to show. */
  tick(dt: number): Frame | null {
    if (this.malformed) return null;
    if (!this.paused) this.elapsed = Math.min(this.elapsed + dt, this.duration);
    return this.frameAt(this.elapsed);
  }

  frameAt(elapsed: number): Frame {
    const t0 = this.frames[0].t;
    let idx = Math.round((elapsed) * this.rate);
    // timestamps are authoritative; the rate only estimates the index
    idx = Math.max(0, Math.min(idx, this.frames.length - 1));
    while (idx > 0 && this.frames[idx].t - t0 > elapsed) idx--;
    while (idx < this.frames.length - 1 && this.frames[idx + 1].t - t0 <= elapsed) idx++;
    return this.frames[idx];
  }

  get finished(): boolean {
    return !this.malformed && this.elapsed >= this.duration;
  }

  pause(): void {
    this.paused = true;
  }

  resume(): void {
    this.paused = false;
  }

  get isPaused(): boolean {
    return this.paused;
  }

  replay(): void {
    this.elapsed = 0;
    this.paused = false;
  }
}
