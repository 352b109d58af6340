import { ServiceClient, ServiceError } from "./api.js";
import { ClipPlayer } from "./player.js";
import { FrameStreamer } from "./streamer.js";
import { drawFigure, drawPlaceholder, fitViewport } from "./stickFigure.js";
import {
  UiEvent,
  UiState,
  actControls,
  charadesControls,
  emotionButtons,
  initialState,
  reduce,
} from "./state.js";
import { BodyGameState, ClipPayload } from "./types.js";

const POLL_MS = 700;

export class App {
  private state: UiState = initialState;
  private player: ClipPlayer | null = null;
  private playerClip: string | null = null;
  private streamer = new FrameStreamer();
  private busy = false; // one in-flight mutation per screen
  private pollTimer: number | null = null;
  private lastFrameTime = 0;

  constructor(
    private root: HTMLElement,
    private client: ServiceClient,
  ) {}

  async start(): Promise<void> {
    try {
      const health = await this.client.health();
      this.dispatch({ kind: "health", classes: health.classes });
    } catch (err) {
      this.showError(err);
    }
    requestAnimationFrame((t) => this.frameLoop(t));
  }

  private dispatch(event: UiEvent): void {
    this.state = reduce(this.state, event);
    this.render();
  }

  private showError(err: unknown): void {
    if (err instanceof ServiceError) {
      this.dispatch({ kind: "service-error", status: err.status, detail: err.detail });
    } else {
      this.dispatch({ kind: "service-error", status: 0, detail: String(err) });
    }
  }

  private async action(fn: () => Promise<void>): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    try {
      await fn();
    } catch (err) {
      this.showError(err);
    } finally {
      this.busy = false;
    }
  }

  // ------------------------------------------------------------- polling

  private setPolling(active: boolean): void {
    if (active && this.pollTimer === null) {
      this.pollTimer = window.setInterval(() => void this.poll(), POLL_MS);
    } else if (!active && this.pollTimer !== null) {
      window.clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }

  private async poll(): Promise<void> {
    const session = this.state.session;
    if (!session) return;
    try {
      const game = await this.client.gameState(session.id);
      this.dispatch({ kind: "game-state", state: game });
    } catch {
      // transient polling errors are not banners; the next tick retries
    }
  }

  // ------------------------------------------------------------ playback

  private frameLoop(t: number): void {
    const dt = this.lastFrameTime ? (t - this.lastFrameTime) / 1000 : 0;
    this.lastFrameTime = t;
    const canvas = this.root.querySelector<HTMLCanvasElement>("canvas#figure");
    if (canvas && this.player) {
      const ctx = canvas.getContext("2d")!;
      if (this.player.malformed) {
        drawPlaceholder(ctx, canvas.width, canvas.height, "no playable frames");
      } else {
        const frame = this.player.tick(dt);
        if (frame) {
          const vp = fitViewport(this.player.frames, canvas.width, canvas.height);
          drawFigure(ctx, frame, vp);
        }
      }
    }
    requestAnimationFrame((next) => this.frameLoop(next));
  }

  private async loadPlayerClip(clipId: string): Promise<void> {
    if (this.playerClip === clipId && this.player) return;
    const clip = await this.client.clip(clipId);
    this.player = new ClipPlayer(clip);
    this.playerClip = clipId;
  }

  private async streamPerformance(clipId: string): Promise<void> {
    const session = this.state.session;
    if (!session) return;
    const clip: ClipPayload = await this.client.clip(clipId);
    const frames = this.streamer.retime(clip.frames, clip.rate);
    const tail = this.streamer.stillness(frames[frames.length - 1], 1.5, clip.rate);
    for (const batch of this.streamer.batches([...frames, ...tail], 30)) {
      await this.client.sendFrames(session.id, batch);
    }
    await this.poll();
  }

  // ------------------------------------------------------------- screens

  private render(): void {
    this.setPolling(
      this.state.session !== null &&
        (this.state.screen === "act-with-feedback" || this.state.screen === "charades-round"),
    );
    this.root.innerHTML = "";
    if (this.state.banner) {
      const banner = el("div", "banner", this.state.banner + " (tap to dismiss)");
      banner.onclick = () => this.dispatch({ kind: "banner-dismissed" });
      this.root.appendChild(banner);
    }
    switch (this.state.screen) {
      case "menu":
        return this.renderMenu();
      case "clip-playback":
        return this.renderWatch();
      case "guess-select":
        return this.renderGuess();
      case "act-with-feedback":
        return this.renderAct();
      case "charades-lobby":
        return this.renderCharadesLobby();
      case "charades-round":
        return this.renderCharadesRound();
      case "scoreboard":
        return this.renderScoreboard();
    }
  }

  private chalkButton(label: string, onClick: () => void): HTMLButtonElement {
    const b = el("button", "chalk", label) as HTMLButtonElement;
    b.onclick = onClick;
    return b;
  }

  private backButton(): HTMLElement {
    return this.chalkButton("back to menu", () => this.dispatch({ kind: "nav", to: "menu" }));
  }

  private renderMenu(): void {
    this.root.append(
      el("h1", "title", "the emotion blackboard"),
      this.chalkButton("body emotion game", () =>
        void this.action(async () => {
          const info = await this.client.createSession("body-emotion-game");
          this.dispatch({ kind: "session-created", id: info.session_id, mode: info.mode });
          const game = await this.client.gameState(info.session_id);
          this.dispatch({ kind: "game-state", state: game });
        }),
      ),
      this.chalkButton("emotional charades", () => this.dispatch({ kind: "nav", to: "charades-lobby" })),
      this.chalkButton("scoreboard", () => this.dispatch({ kind: "nav", to: "scoreboard" })),
    );
  }

  private canvas(): HTMLCanvasElement {
    const canvas = el("canvas") as HTMLCanvasElement;
    canvas.id = "figure";
    canvas.width = 480;
    canvas.height = 420;
    return canvas;
  }

  private renderWatch(): void {
    const game = this.state.body;
    if (!game) return void this.root.append(el("p", "", "loading..."), this.backButton());
    void this.action(() => this.loadPlayerClip(game.clip_id));
    this.root.append(
      el("h2", "title", "watch closely"),
      this.canvas(),
      this.chalkButton("pause / resume", () => {
        if (this.player) this.player.isPaused ? this.player.resume() : this.player.pause();
      }),
      this.chalkButton("replay", () => this.player?.replay()),
      this.chalkButton("I've watched it", () =>
        void this.action(async () => {
          const next = await this.client.watched(this.sessionId());
          this.dispatch({ kind: "game-state", state: next });
        }),
      ),
      this.backButton(),
    );
  }

  private renderGuess(): void {
    this.root.append(el("h2", "title", "which emotion was that?"));
    const row = el("div", "button-row");
    for (const emotion of emotionButtons(this.state)) {
      row.appendChild(
        this.chalkButton(emotion, () =>
          void this.action(async () => {
            const next = await this.client.guess(this.sessionId(), emotion);
            this.dispatch({ kind: "game-state", state: next });
          }),
        ),
      );
    }
    this.root.append(row, this.backButton());
  }

  private renderAct(): void {
    const game = this.state.body as BodyGameState;
    const controls = actControls(game);
    this.root.append(
      el("h2", "title", `now act it out: ${game.target}`),
      el("p", "note",
        (game.guessed === game.target ? "right guess, +1 point. " : `it was ${game.target}. `) +
          `attempt ${game.attempt} of ${game.max_attempts}`),
    );
    if (game.last_feedback && game.last_feedback !== "recognized") {
      this.root.append(el("p", "note", `the machine saw: ${game.last_feedback}`));
    }
    if (controls.canPerform) {
      this.root.append(el("p", "note", "stream a recorded clip as your performance:"));
      this.root.append(this.clipPicker("perform", (clipId) =>
        void this.action(() => this.streamPerformance(clipId))));
    }
    if (controls.canRetry) {
      this.root.append(
        this.chalkButton("try again", () =>
          void this.action(async () => {
            const next = await this.client.retry(this.sessionId());
            this.dispatch({ kind: "game-state", state: next });
          }),
        ),
      );
    }
    if (controls.canStop) {
      this.root.append(
        this.chalkButton("no, stop here", () =>
          void this.action(async () => {
            const next = await this.client.stop(this.sessionId());
            this.dispatch({ kind: "game-state", state: next });
          }),
        ),
      );
    }
    this.root.append(this.backButton());
  }

  private clipPicker(action: string, onPick: (clipId: string) => void): HTMLElement {
    const wrap = el("div", "picker");
    const select = el("select") as HTMLSelectElement;
    void this.client.listClips().then(({ clips }) => {
      for (const { id } of clips) {
        const opt = el("option") as HTMLOptionElement;
        opt.value = id;
        opt.textContent = id;
        select.appendChild(opt);
      }
    });
    wrap.append(select, this.chalkButton(action, () => select.value && onPick(select.value)));
    return wrap;
  }

  private renderCharadesLobby(): void {
    this.root.append(el("h2", "title", "emotional charades"));
    this.root.append(
      this.chalkButton("start a new match (you are player 1)", () =>
        void this.action(async () => {
          const info = await this.client.createSession("charades");
          this.dispatch({ kind: "charades-joined", id: info.session_id, role: "p1" });
          await this.poll();
        }),
      ),
    );
    const joinRow = el("div", "picker");
    const input = el("input") as HTMLInputElement;
    input.placeholder = "match id from player 1";
    joinRow.append(
      input,
      this.chalkButton("join as player 2", () => {
        if (input.value.trim()) {
          this.dispatch({ kind: "charades-joined", id: input.value.trim(), role: "p2" });
          void this.poll();
        }
      }),
    );
    this.root.append(joinRow, this.backButton());
  }

  private renderCharadesRound(): void {
    const game = this.state.charades;
    const role = this.state.localRole ?? "p1";
    this.root.append(el("h2", "title", `charades, round ${game?.round ?? "..."}`));
    this.root.append(
      el("p", "note", `match id: ${this.state.session?.id} | you are ${role} | ` +
        `expresser: ${game?.expresser ?? "?"}`),
    );
    if (!game) return void this.root.append(this.backButton());
    const controls = charadesControls(game, role);
    this.root.append(
      el("p", "score",
        `scores p1 ${game.scores.p1} : p2 ${game.scores.p2} | ` +
          `humans ${game.tally.human} vs computer ${game.tally.computer}`),
    );
    if (controls.canChoose) {
      this.root.append(el("p", "note", "pick an emotion to express (keep it secret):"));
      const row = el("div", "button-row");
      for (const emotion of emotionButtons(this.state)) {
        row.appendChild(
          this.chalkButton(emotion, () =>
            void this.action(async () => {
              const next = await this.client.choose(this.sessionId(), emotion);
              this.dispatch({ kind: "game-state", state: next });
            }),
          ),
        );
      }
      this.root.append(row);
    }
    if (controls.canPerform) {
      this.root.append(el("p", "note", "perform it (stream a clip):"));
      this.root.append(this.clipPicker("perform", (clipId) =>
        void this.action(() => this.streamPerformance(clipId))));
    }
    if (!controls.canChoose && !controls.canPerform && game.phase === "perform" && role === game.guesser) {
      this.root.append(el("p", "note", "watch the figure and guess:"), this.canvas());
      if (controls.canGuess) {
        const row = el("div", "button-row");
        for (const emotion of emotionButtons(this.state)) {
          row.appendChild(
            this.chalkButton(emotion, () =>
              void this.action(async () => {
                const next = await this.client.guess(this.sessionId(), emotion);
                this.dispatch({ kind: "game-state", state: next });
              }),
            ),
          );
        }
        this.root.append(row);
      } else {
        this.root.append(el("p", "note", "guess sent; waiting for the computer..."));
      }
    }
    if (game.phase === "judge") {
      this.root.append(
        el("p", "note",
          `computer guessed: ${game.computer_guess ?? "?"} | ` +
            `${game.guesser} guessed: ${game.guesser_guess ?? "?"}`),
      );
      if (controls.canJudge) {
        const computerBox = checkbox("computer was right");
        const guesserBox = checkbox(`${game.guesser} was right`);
        this.root.append(
          computerBox.wrap,
          guesserBox.wrap,
          this.chalkButton("confirm", () =>
            void this.action(async () => {
              const next = await this.client.judge(
                this.sessionId(),
                computerBox.input.checked,
                guesserBox.input.checked,
              );
              this.dispatch({ kind: "game-state", state: next });
            }),
          ),
        );
      } else {
        this.root.append(el("p", "note", "waiting for the expresser's verdict..."));
      }
    }
    this.root.append(this.backButton());
  }

  private renderScoreboard(): void {
    this.root.append(el("h2", "title", "scoreboard"));
    const body = this.state.committed.body;
    const charades = this.state.committed.charades;
    if (this.state.body?.phase === "done") {
      this.root.append(el("p", "score", `body emotion game: ${this.state.body.score} of 2 points`));
    } else if (body !== null) {
      this.root.append(el("p", "score", `body emotion game (last): ${body} of 2 points`));
    }
    if (charades) {
      this.root.append(
        el("p", "score", `charades: p1 ${charades.p1} : p2 ${charades.p2}`),
        el("p", "score", `humans ${charades.human} vs computer ${charades.computer}`),
      );
    }
    if (body === null && !charades) {
      this.root.append(el("p", "note", "no games finished yet"));
    }
    this.root.append(this.backButton());
  }

  private sessionId(): string {
    if (!this.state.session) throw new Error("no active session");
    return this.state.session.id;
  }
}

function el(tag: string, className = "", text = ""): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function checkbox(label: string): { wrap: HTMLElement; input: HTMLInputElement } {
  const wrap = el("label", "check", label);
  const input = el("input") as HTMLInputElement;
  input.type = "checkbox";
  wrap.prepend(input);
  return { wrap, input };
}
