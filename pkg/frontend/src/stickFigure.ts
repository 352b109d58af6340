import { Frame, JOINT_KEYS, JointKey, Vec3 } from "./types.js";

// head-torso, torso-shoulders, shoulders-elbows-hands
export const BONES: [JointKey, JointKey][] = [
  ["head", "torso"],
  ["torso", "shoulder_l"],
  ["torso", "shoulder_r"],
  ["shoulder_l", "elbow_l"],
  ["elbow_l", "hand_l"],
  ["shoulder_r", "elbow_r"],
  ["elbow_r", "hand_r"],
];

export interface Point2 {
  x: number;
  y: number;
}

export interface Viewport {
  width: number;
  height: number;
  /** world-space bounds the figure is fitted into */
  cx: number;
  cy: number;
  span: number;
}

export function isValidFrame(frame: unknown): frame is Frame {
  if (typeof frame !== "object" || frame === null) return false;
  const f = frame as Record<string, unknown>;
  return JOINT_KEYS.every((k) => {
    const v = f[k];
    return Array.isArray(v) && v.length === 3 && v.every((x) => Number.isFinite(x));
  });
}

/** Frontal orthographic projection: world x maps right-to-left so the figure
 * faces the viewer like a mirror, y maps up. */
export function project(p: Vec3, vp: Viewport): Point2 {
  const scale = Math.min(vp.width, vp.height) / vp.span;
  return {
    x: vp.width / 2 - (p[0] - vp.cx) * scale,
    y: vp.height / 2 - (p[1] - vp.cy) * scale,
  };
}

/** Viewport fitted to a whole clip so the figure does not jitter per frame. */
export function fitViewport(frames: Frame[], width: number, height: number): Viewport {
  let minX = Infinity,
    maxX = -Infinity,
    minY = Infinity,
    maxY = -Infinity;
  for (const frame of frames) {
    for (const key of JOINT_KEYS) {
      const [x, y] = frame[key];
      minX = Math.min(minX, x);
      maxX = Math.max(maxX, x);
      minY = Math.min(minY, y);
      maxY = Math.max(maxY, y);
    }
  }
  const span = Math.max(maxX - minX, maxY - minY, 0.5) * 1.3;
  return { width, height, cx: (minX + maxX) / 2, cy: (minY + maxY) / 2, span };
}

export interface FigureGeometry {
  segments: [Point2, Point2][];
  joints: Point2[];
  headCenter: Point2;
  headRadius: number;
}

/** Pure geometry for one frame; the canvas layer just strokes it. */
export function figureGeometry(frame: Frame, vp: Viewport): FigureGeometry {
  const pts = new Map<JointKey, Point2>();
  for (const key of JOINT_KEYS) pts.set(key, project(frame[key], vp));
  const segments: [Point2, Point2][] = BONES.map(([a, b]) => [pts.get(a)!, pts.get(b)!]);
  const scale = Math.min(vp.width, vp.height) / vp.span;
  return {
    segments,
    joints: [...pts.values()],
    headCenter: pts.get("head")!,
    headRadius: 0.09 * scale,
  };
}

export function drawFigure(ctx: CanvasRenderingContext2D, frame: Frame, vp: Viewport): void {
  const geo = figureGeometry(frame, vp);
  ctx.clearRect(0, 0, vp.width, vp.height);
  ctx.strokeStyle = "#f2f2e9";
  ctx.fillStyle = "#f2f2e9";
  ctx.lineWidth = 3;
  ctx.lineCap = "round";
  for (const [a, b] of geo.segments) {
    ctx.beginPath();
    ctx.moveTo(a.x, a.y);
    ctx.lineTo(b.x, b.y);
    ctx.stroke();
  }
  for (const p of geo.joints) {
    ctx.beginPath();
    ctx.arc(p.x, p.y, 4, 0, 2 * Math.PI);
    ctx.fill();
  }
  ctx.beginPath();
  ctx.arc(geo.headCenter.x, geo.headCenter.y, geo.headRadius, 0, 2 * Math.PI);
  ctx.stroke();
}

export function drawPlaceholder(ctx: CanvasRenderingContext2D, width: number, height: number, text: string): void {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#8a8a80";
  ctx.font = "20px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(text, width / 2, height / 2);
}
