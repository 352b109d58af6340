import type {
  ClipPayload,
  Frame,
  GameState,
  HealthInfo,
  SessionInfo,
  SessionResult,
} from "./types.js";

export class ServiceError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`${status}: ${detail}`);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the classification/game service. */
export class ServiceClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(this.baseUrl + path, init);
    if (!res.ok) {
      let detail = res.statusText;
      try {
        const body = await res.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ServiceError(res.status, detail);
    }
    return (await res.json()) as T;
  }

  private post<T>(path: string, body?: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? "[]" : JSON.stringify(body),
    });
  }

  health(): Promise<HealthInfo> {
    return this.request("/health");
  }

  createSession(mode: string): Promise<SessionInfo> {
    return this.post("/sessions", { mode });
  }

  sendFrames(sessionId: string, frames: Frame[]): Promise<{ accepted: number; segments_closed: number }> {
    return this.post(`/sessions/${sessionId}/frames`, frames);
  }

  result(sessionId: string): Promise<SessionResult> {
    return this.request(`/sessions/${sessionId}/result`);
  }

  listClips(): Promise<{ clips: { id: string }[] }> {
    return this.request("/clips");
  }

  clip(clipId: string): Promise<ClipPayload> {
    return this.request(`/clips/${clipId}`);
  }

  gameState(sessionId: string): Promise<GameState> {
    return this.request(`/game/${sessionId}`);
  }

  watched(sessionId: string): Promise<GameState> {
    return this.post(`/game/${sessionId}/watched`);
  }

  guess(sessionId: string, emotion: string): Promise<GameState> {
    return this.post(`/game/${sessionId}/guess`, { emotion });
  }

  retry(sessionId: string): Promise<GameState> {
    return this.post(`/game/${sessionId}/retry`);
  }

  stop(sessionId: string): Promise<GameState> {
    return this.post(`/game/${sessionId}/stop`);
  }

  choose(sessionId: string, emotion: string): Promise<GameState> {
    return this.post(`/game/${sessionId}/choose`, { emotion });
  }

  judge(sessionId: string, computerCorrect: boolean, p2Correct: boolean): Promise<GameState> {
    return this.post(`/game/${sessionId}/judge`, {
      computer_correct: computerCorrect,
      p2_correct: p2Correct,
    });
  }
}
