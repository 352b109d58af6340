import { BodyGameState, CharadesState, GameState } from "./types.js";

export type Screen =
  | "menu"
  | "clip-playback"
  | "guess-select"
  | "act-with-feedback"
  | "charades-lobby"
  | "charades-round"
  | "scoreboard";

export interface CommittedScores {
  body: number | null;
  charades: { p1: number; p2: number; human: number; computer: number } | null;
}

export interface UiState {
  screen: Screen;
  classes: string[];
  banner: string | null;
  session: { id: string; mode: string } | null;
  body: BodyGameState | null;
  charades: CharadesState | null;
  localRole: "p1" | "p2" | null;
  committed: CommittedScores;
}

export type UiEvent =
  | { kind: "health"; classes: string[] }
  | { kind: "nav"; to: "menu" | "body-game" | "charades-lobby" | "scoreboard" }
  | { kind: "session-created"; id: string; mode: string }
  | { kind: "charades-joined"; id: string; role: "p1" | "p2" }
  | { kind: "game-state"; state: GameState }
  | { kind: "clip-ended" }
  | { kind: "service-error"; status: number; detail: string }
  | { kind: "banner-dismissed" };

export const initialState: UiState = {
  screen: "menu",
  classes: [],
  banner: null,
  session: null,
  body: null,
  charades: null,
  localRole: null,
  committed: { body: null, charades: null },
};

function bodyScreen(game: BodyGameState): Screen {
  switch (game.phase) {
    case "watch":
      return "clip-playback";
    case "guess":
      return "guess-select";
    case "act":
      return "act-with-feedback";
    case "done":
      return "scoreboard";
  }
}

function commit(state: UiState, game: GameState): CommittedScores {
  if (game.mode === "body-emotion-game") {
    return { ...state.committed, body: game.score };
  }
  return {
    ...state.committed,
    charades: { ...game.scores, ...game.tally },
  };
}

/** Pure reducer: the screen graph is a function of service responses and
 * local navigation only, so a recorded event log replays identically. */
export function reduce(state: UiState, event: UiEvent): UiState {
  switch (event.kind) {
    case "health":
      return { ...state, classes: [...event.classes] };
    case "nav":
      switch (event.to) {
        case "menu":
          // committed scores survive; the live session is abandoned
          return { ...state, screen: "menu", banner: null, session: null, body: null, charades: null, localRole: null };
        case "body-game":
          return { ...state, screen: "clip-playback", banner: null };
        case "charades-lobby":
          return { ...state, screen: "charades-lobby", banner: null };
        case "scoreboard":
          return { ...state, screen: "scoreboard", banner: null };
      }
      return state;
    case "session-created":
      return { ...state, session: { id: event.id, mode: event.mode } };
    case "charades-joined":
      return {
        ...state,
        session: { id: event.id, mode: "charades" },
        localRole: event.role,
        screen: "charades-round",
      };
    case "game-state": {
      const committed = commit(state, event.state);
      if (event.state.mode === "body-emotion-game") {
        return { ...state, body: event.state, committed, screen: bodyScreen(event.state) };
      }
      return { ...state, charades: event.state, committed, screen: "charades-round" };
    }
    case "clip-ended":
      return state; // playback offers replay; advancing is an explicit button
    case "service-error":
      // surfaced as a retryable banner; never corrupts game state
      return { ...state, banner: `${event.status}: ${event.detail}` };
    case "banner-dismissed":
      return { ...state, banner: null };
  }
}

/** The guess/choose buttons: exactly the active class set, nothing else. */
export function emotionButtons(state: UiState): string[] {
  return [...state.classes];
}

/** What the act screen offers right now. */
export function actControls(game: BodyGameState): {
  canPerform: boolean;
  canRetry: boolean;
  canStop: boolean;
} {
  const failed = game.phase === "act" && !game.armed;
  return {
    canPerform: game.phase === "act" && game.armed,
    canRetry: failed && game.attempt < game.max_attempts,
    canStop: failed,
  };
}

/** Charades controls are role-gated client-side; the expresser never sees
 * guess buttons and the guesser never sees the judge panel. */
export function charadesControls(
  game: CharadesState,
  role: "p1" | "p2",
): { canChoose: boolean; canPerform: boolean; canGuess: boolean; canJudge: boolean } {
  const expressing = game.expresser === role;
  return {
    canChoose: expressing && game.phase === "choose",
    canPerform: expressing && game.phase === "perform",
    canGuess: !expressing && game.phase === "perform" && !game.has_guesser_guess,
    canJudge: expressing && game.phase === "judge",
  };
}

export function replayScreens(events: UiEvent[]): Screen[] {
  const screens: Screen[] = [];
  let state = initialState;
  for (const event of events) {
    state = reduce(state, event);
    screens.push(state.screen);
  }
  return screens;
}
