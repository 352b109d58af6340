export type Vec3 = [number, number, number];

export const JOINT_KEYS = [
  "head",
  "shoulder_l",
  "shoulder_r",
  "elbow_l",
  "elbow_r",
  "hand_l",
  "hand_r",
  "torso",
] as const;

export type JointKey = (typeof JOINT_KEYS)[number];

export interface Frame {
  t: number;
  head: Vec3;
  shoulder_l: Vec3;
  shoulder_r: Vec3;
  elbow_l: Vec3;
  elbow_r: Vec3;
  hand_l: Vec3;
  hand_r: Vec3;
  torso: Vec3;
}

export interface ClipPayload {
  id: string;
  rate: number;
  frames: Frame[];
}

export interface SessionInfo {
  session_id: string;
  mode: string;
}

export interface SegmentPrediction {
  segment: { start_t: number; end_t: number; n_frames: number; peak_energy: number };
  label: string;
  losses: Record<string, number>;
}

export interface SessionResult {
  predictions: SegmentPrediction[];
  pending: boolean;
}

export interface BodyGameState {
  mode: "body-emotion-game";
  phase: "watch" | "guess" | "act" | "done";
  clip_id: string;
  score: number;
  attempt: number;
  max_attempts: number;
  armed: boolean;
  guessed: string | null;
  target: string | null;
  last_feedback: string | null;
}

export interface CharadesState {
  mode: "charades";
  phase: "choose" | "perform" | "judge";
  round: number;
  expresser: "p1" | "p2";
  guesser: "p1" | "p2";
  scores: { p1: number; p2: number };
  tally: { human: number; computer: number };
  computer_guess: string | null;
  guesser_guess: string | null;
  has_computer_guess: boolean;
  has_guesser_guess: boolean;
}

export type GameState = BodyGameState | CharadesState;

export interface HealthInfo {
  status: string;
  classes: string[];
  clips: number;
}
