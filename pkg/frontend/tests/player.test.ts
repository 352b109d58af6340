import { describe, expect, test } from "vitest";

import { ClipPlayer } from "../src/player.js";
import { ClipPayload, Frame, Vec3 } from "../src/types.js";

function pose(x = 0): Omit<Frame, "t"> {
  const v = (a: number, b: number, c: number): Vec3 => [a, b, c];
  return {
    head: v(x, 1.6, 0),
    shoulder_l: v(x + 0.2, 1.45, 0),
    shoulder_r: v(x - 0.2, 1.45, 0),
    elbow_l: v(x + 0.3, 1.15, 0),
    elbow_r: v(x - 0.3, 1.15, 0),
    hand_l: v(x + 0.34, 0.95, 0),
    hand_r: v(x - 0.34, 0.95, 0),
    torso: v(x, 1.2, 0),
  };
}

function clip(n: number, rate = 30): ClipPayload {
  const frames: Frame[] = [];
  for (let i = 0; i < n; i++) {
    frames.push({ t: i / rate, ...pose(i * 0.01) });
  }
  return { id: "c", rate, frames };
}

describe("ClipPlayer", () => {
  test("three-second clip plays for three seconds of ticks", () => {
    const player = new ClipPlayer(clip(91, 30)); // 90 intervals = 3.0 s
    expect(player.duration).toBeCloseTo(3.0, 5);
    let ticks = 0;
    while (!player.finished && ticks < 1000) {
      player.tick(1 / 60);
      ticks++;
    }
    expect(ticks / 60).toBeGreaterThan(2.9);
    expect(ticks / 60).toBeLessThan(3.1);
  });

  test("two-frame clip completes and replay restarts at frame zero", () => {
    const player = new ClipPlayer(clip(2));
    player.tick(1.0);
    expect(player.finished).toBe(true);
    expect(player.frameAt(player.duration)).toEqual(player.frames[1]);
    player.replay();
    expect(player.finished).toBe(false);
    expect(player.tick(0)).toEqual(player.frames[0]);
  });

  test("stationary clip renders a static figure", () => {
    const frames: Frame[] = [0, 1, 2].map((i) => ({ t: i / 30, ...pose(0) }));
    const player = new ClipPlayer({ id: "s", rate: 30, frames });
    const a = player.tick(0.01)!;
    const b = player.tick(0.01)!;
    expect(a.hand_l).toEqual(b.hand_l);
  });

  test("pause freezes the frame, resume continues", () => {
    const player = new ClipPlayer(clip(31));
    player.tick(0.2);
    player.pause();
    const frozen = player.tick(0.5)!;
    expect(frozen).toEqual(player.frameAt(0.2));
    player.resume();
    const moving = player.tick(0.3)!;
    expect(moving).not.toEqual(frozen);
  });

  test("malformed frames are dropped and flagged", () => {
    const bad = { id: "b", rate: 30, frames: [{ t: 0, head: [1, 2] }] } as unknown as ClipPayload;
    const player = new ClipPlayer(bad);
    expect(player.malformed).toBe(true);
    expect(player.tick(0.1)).toBeNull();
  });

  test("frameAt follows timestamps, not just the nominal rate", () => {
    const frames: Frame[] = [
      { t: 0.0, ...pose(0) },
      { t: 0.5, ...pose(1) },
      { t: 2.0, ...pose(2) },
    ];
    const player = new ClipPlayer({ id: "v", rate: 30, frames });
    expect(player.frameAt(0.4)).toEqual(frames[0]);
    expect(player.frameAt(0.6)).toEqual(frames[1]);
    expect(player.frameAt(2.0)).toEqual(frames[2]);
  });
});
