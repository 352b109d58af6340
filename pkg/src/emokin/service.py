"""HTTP/JSON service: streaming classification sessions plus the two games.

Sessions are isolated; frame batches within a session are serialized by a
per-session lock and must carry strictly increasing timestamps.  Segments
close on kinetic-energy hysteresis and are classified synchronously, so a
prediction is visible to GET /result as soon as the closing batch returns.

Game wiring: a game session is also a streaming session; while the Body
Emotion Game is in its acting phase (or Emotional Charades in its perform
phase), the next classified segment feeds the game.  The charades judge
request carries `p2_correct`, meaning "the guessing player of this round was
right" (roles swap every round).
"""
from __future__ import annotations

import threading
import uuid
from typing import Optional

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .classify import OvoEcocModel, predict
from .errors import DataError, SchemaError
from .features import extract_all
from .representation import assemble
from .segmentation import HysteresisSegmenter, SegmenterParams, auto_params
from .skeleton import (
    DEFAULT_RATE,
    DEFAULT_SMOOTH_WINDOW,
    Dataset,
    EmotionLabel,
    SkeletonClip,
    frame_from_dict,
    load_dataset,
    parse_label,
    preprocess,
)

MODES = ("stream", "body-emotion-game", "charades")

DEFAULT_STREAM_PARAMS = SegmenterParams(
    tau_on=0.05, tau_off=0.025, hold=15, min_len=30, pad=5
)

MAX_ATTEMPTS = 3


class IllegalTransition(Exception):
    pass


class BodyEmotionGame:
    """Watch a clip, guess its emotion, then act it out (up to 3 attempts)."""

    def __init__(self, target: EmotionLabel, clip_id: str):
        self.target = target
        self.clip_id = clip_id
        self.phase = "watch"
        self.score = 0
        self.attempt = 1
        self.armed = False
        self.guessed: Optional[EmotionLabel] = None
        self.last_feedback: Optional[str] = None

    def watched(self) -> None:
        if self.phase != "watch":
            raise IllegalTransition(f"cannot finish watching in phase {self.phase!r}")
        self.phase = "guess"

    def guess(self, emotion: EmotionLabel) -> None:
        if self.phase != "guess":
            raise IllegalTransition(f"cannot guess in phase {self.phase!r}")
        self.guessed = emotion
        if emotion == self.target:
            self.score += 1
        self.phase = "act"
        self.armed = True

    def retry(self) -> None:
        if self.phase != "act" or self.armed:
            raise IllegalTransition("retry is only legal after a failed acting attempt")
        if self.attempt >= MAX_ATTEMPTS:
            raise IllegalTransition("all attempts used")
        self.attempt += 1
        self.armed = True

    def stop(self) -> None:
        if self.phase != "act" or self.armed:
            raise IllegalTransition("stop is only legal after a failed acting attempt")
        self.phase = "done"

    def on_prediction(self, label: EmotionLabel) -> None:
        if self.phase != "act" or not self.armed:
            return
        self.armed = False
        if label == self.target:
            self.score += 1
            self.last_feedback = "recognized"
            self.phase = "done"
        else:
            self.last_feedback = label.value
            if self.attempt >= MAX_ATTEMPTS:
                self.phase = "done"

    def state(self) -> dict:
        reveal = self.phase in ("act", "done")
        return {
            "mode": "body-emotion-game",
            "phase": self.phase,
            "clip_id": self.clip_id,
            "score": self.score,
            "attempt": self.attempt,
            "max_attempts": MAX_ATTEMPTS,
            "armed": self.armed,
            "guessed": self.guessed.value if self.guessed else None,
            "target": self.target.value if reveal else None,
            "last_feedback": self.last_feedback,
        }


class CharadesGame:
    """Two players alternate expressing a hidden emotion; the other player
    and the classifier compete to guess it, and the expresser judges."""

    def __init__(self):
        self.round = 1
        self.expresser = "p1"
        self.phase = "choose"
        self.chosen: Optional[EmotionLabel] = None
        self.computer_guess: Optional[EmotionLabel] = None
        self.guesser_guess: Optional[EmotionLabel] = None
        self.scores = {"p1": 0, "p2": 0}
        self.tally = {"human": 0, "computer": 0}

    @property
    def guesser(self) -> str:
        return "p2" if self.expresser == "p1" else "p1"

    def choose(self, emotion: EmotionLabel) -> None:
        if self.phase != "choose":
            raise IllegalTransition(f"cannot choose in phase {self.phase!r}")
        self.chosen = emotion
        self.phase = "perform"

    def guess(self, emotion: EmotionLabel) -> None:
        if self.phase != "perform":
            raise IllegalTransition(f"cannot guess in phase {self.phase!r}")
        if self.guesser_guess is not None:
            raise IllegalTransition("the guesser already answered this round")
        self.guesser_guess = emotion
        self._maybe_judge()

    def on_prediction(self, label: EmotionLabel) -> None:
        if self.phase != "perform" or self.computer_guess is not None:
            return
        self.computer_guess = label
        self._maybe_judge()

    def _maybe_judge(self) -> None:
        if self.computer_guess is not None and self.guesser_guess is not None:
            self.phase = "judge"

    def judge(self, computer_correct: bool, p2_correct: bool) -> None:
        if self.phase != "judge":
            raise IllegalTransition(f"cannot judge in phase {self.phase!r}")
        guesser_correct = p2_correct
        if computer_correct and guesser_correct:
            self.scores[self.expresser] += 2
            self.scores[self.guesser] += 1
        elif computer_correct:
            self.scores[self.expresser] += 1
        elif guesser_correct:
            self.scores[self.expresser] += 1
            self.scores[self.guesser] += 2
        else:
            self.scores[self.guesser] += 1
        if guesser_correct:
            self.tally["human"] += 1
        if computer_correct:
            self.tally["computer"] += 1
        self.round += 1
        self.expresser = self.guesser
        self.phase = "choose"
        self.chosen = None
        self.computer_guess = None
        self.guesser_guess = None

    def state(self) -> dict:
        reveal = self.phase == "judge"
        return {
            "mode": "charades",
            "phase": self.phase,
            "round": self.round,
            "expresser": self.expresser,
            "guesser": self.guesser,
            "scores": dict(self.scores),
            "tally": dict(self.tally),
            "computer_guess": self.computer_guess.value if reveal and self.computer_guess else None,
            "guesser_guess": self.guesser_guess.value if reveal and self.guesser_guess else None,
            "has_computer_guess": self.computer_guess is not None,
            "has_guesser_guess": self.guesser_guess is not None,
        }


class StreamSession:
    """Frame buffer + incremental segmenter + classified results."""

    def __init__(
        self,
        session_id: str,
        mode: str,
        classifier,
        params: SegmenterParams,
        rate: float,
        smooth_window: int,
        class_set,
    ):
        self.id = session_id
        self.mode = mode
        self.classifier = classifier
        self.params = params
        self.rate = rate
        self.smooth_window = smooth_window
        self.class_set = class_set
        self.lock = threading.Lock()
        self.times: list[float] = []
        self.positions: list[np.ndarray] = []
        self.machine = HysteresisSegmenter(params)
        self.energy_upto = 0  # frames whose energy has been fed to the machine
        self.results: list[dict] = []
        self.game: BodyEmotionGame | CharadesGame | None = None

    def add_frames(self, frames: list[tuple[float, np.ndarray]]) -> int:
        """Append validated frames; returns the number of segments closed."""
        last = self.times[-1] if self.times else -np.inf
        for t, _ in frames:
            if t <= last:
                raise SchemaError(f"non-monotone timestamp {t}")
            last = t
        for t, pos in frames:
            self.times.append(t)
            self.positions.append(pos)
        closed = 0
        n = len(self.times)
        # energy at frame i needs frames i-1 and i+1
        while self.energy_upto <= n - 2 and n >= 3:
            i = self.energy_upto
            if i == 0:
                v = (self.positions[1] - self.positions[0]) / max(
                    self.times[1] - self.times[0], 1e-9
                )
            else:
                v = (self.positions[i + 1] - self.positions[i - 1]) / max(
                    self.times[i + 1] - self.times[i - 1], 1e-9
                )
            energy = 0.5 * float(np.sum(v * v))
            core = self.machine.push(energy)
            self.energy_upto += 1
            if core is not None:
                closed += self._close_segment(core)
        return closed

    def _close_segment(self, core: tuple[int, int, float]) -> int:
        start, end, peak = core
        if end - start + 1 < self.params.min_len:
            return 0
        lo = max(0, start - self.params.pad)
        hi = min(len(self.times) - 1, end + self.params.pad)
        try:
            clip = SkeletonClip(
                times=np.array(self.times[lo : hi + 1]),
                positions=np.stack(self.positions[lo : hi + 1]),
                source="stream",
                nominal_rate=self.rate,
            )
            pre = preprocess(clip, self.rate, self.smooth_window)
            pred = self.classifier(pre)
        except DataError:
            return 0
        result = {
            "segment": {
                "start_t": float(self.times[lo]),
                "end_t": float(self.times[hi]),
                "n_frames": hi - lo + 1,
                "peak_energy": peak,
            },
            "label": pred.label.value,
            "losses": pred.losses_by_label(self.class_set),
        }
        self.results.append(result)
        if self.game is not None:
            self.game.on_prediction(pred.label)
        return 1

    @property
    def pending(self) -> bool:
        return self.machine._active


class CreateSessionBody(BaseModel):
    mode: str


class EmotionBody(BaseModel):
    emotion: str


class JudgeBody(BaseModel):
    computer_correct: bool
    p2_correct: bool


def create_app(
    model: OvoEcocModel,
    clips_dir: str | None = None,
    seg_params: SegmenterParams | None = None,
    rate: float = DEFAULT_RATE,
    smooth_window: int = DEFAULT_SMOOTH_WINDOW,
    seed: int = 0,
) -> FastAPI:
    if model.binning is None:
        raise DataError("service needs a model with an embedded binning spec")

    clips: dict[str, SkeletonClip] = {}
    if clips_dir:
        dataset = load_dataset(clips_dir)
        import json
        from pathlib import Path

        manifest_path = Path(clips_dir) / "manifest.json"
        if manifest_path.exists():
            entries = json.loads(manifest_path.read_text())
            for e, clip in zip(entries, dataset.clips):
                clips[Path(e["path"]).stem] = clip
        else:
            for k, clip in enumerate(dataset.clips):
                clips[f"clip{k:04d}"] = clip

    if seg_params is None:
        if clips:
            seg_params = auto_params(Dataset(list(clips.values())), rate=rate)
        else:
            seg_params = DEFAULT_STREAM_PARAMS

    rng = np.random.default_rng(seed)
    sessions: dict[str, StreamSession] = {}

    def classifier(pre_clip: SkeletonClip):
        fv = assemble(extract_all(pre_clip), model.binning)
        return predict(model, fv)

    app = FastAPI(title="emokin service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def get_session(session_id: str) -> StreamSession:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    def get_game(session_id: str):
        session = get_session(session_id)
        if session.game is None:
            raise HTTPException(status_code=404, detail="session has no game")
        return session, session.game

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "classes": [c.value for c in model.class_set],
            "clips": len(clips),
            "segmenter": {
                "tau_on": seg_params.tau_on,
                "tau_off": seg_params.tau_off,
                "hold": seg_params.hold,
                "min_len": seg_params.min_len,
                "pad": seg_params.pad,
            },
        }

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        if body.mode not in MODES:
            raise HTTPException(status_code=400, detail=f"unknown mode {body.mode!r}")
        session_id = uuid.uuid4().hex[:12]
        session = StreamSession(
            session_id, body.mode, classifier, seg_params, rate, smooth_window,
            model.class_set,
        )
        if body.mode == "body-emotion-game":
            labeled = [(cid, c) for cid, c in clips.items() if c.label is not None]
            if not labeled:
                raise HTTPException(
                    status_code=400, detail="no labeled clips available for the game"
                )
            cid, clip = labeled[int(rng.integers(len(labeled)))]
            session.game = BodyEmotionGame(clip.label, cid)
        elif body.mode == "charades":
            session.game = CharadesGame()
        sessions[session_id] = session
        return {"session_id": session_id, "mode": body.mode}

    @app.post("/sessions/{session_id}/frames")
    def post_frames(session_id: str, frames: list[dict]):
        session = get_session(session_id)
        parsed = []
        for k, obj in enumerate(frames):
            try:
                parsed.append(frame_from_dict(obj, where=f"frame[{k}]"))
            except SchemaError as exc:
                raise HTTPException(status_code=400, detail=str(exc)) from None
        with session.lock:
            try:
                closed = session.add_frames(parsed)
            except SchemaError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from None
        return {"accepted": len(parsed), "segments_closed": closed}

    @app.get("/sessions/{session_id}/result")
    def get_result(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return {"predictions": list(session.results), "pending": session.pending}

    @app.get("/clips")
    def list_clips():
        return {"clips": [{"id": cid} for cid in sorted(clips)]}

    @app.get("/clips/{clip_id}")
    def get_clip(clip_id: str):
        clip = clips.get(clip_id)
        if clip is None:
            raise HTTPException(status_code=404, detail="unknown clip")
        return {
            "id": clip_id,
            "rate": clip.nominal_rate,
            "frames": [clip.frame_dict(i) for i in range(clip.n_frames)],
        }

    def _parse_emotion(text: str) -> EmotionLabel:
        try:
            label = parse_label(text)
        except SchemaError:
            label = None
        if label is None or label not in set(model.class_set):
            raise HTTPException(status_code=400, detail=f"unknown emotion {text!r}")
        return label

    def _transition(session_id: str, action) -> dict:
        session, game = get_game(session_id)
        with session.lock:
            try:
                action(game)
            except IllegalTransition as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from None
            return game.state()

    @app.get("/game/{session_id}")
    def game_state(session_id: str):
        session, game = get_game(session_id)
        with session.lock:
            return game.state()

    @app.post("/game/{session_id}/watched")
    def game_watched(session_id: str):
        return _transition(session_id, lambda g: _only(g, BodyEmotionGame).watched())

    @app.post("/game/{session_id}/guess")
    def game_guess(session_id: str, body: EmotionBody):
        emotion = _parse_emotion(body.emotion)
        return _transition(session_id, lambda g: g.guess(emotion))

    @app.post("/game/{session_id}/retry")
    def game_retry(session_id: str):
        return _transition(session_id, lambda g: _only(g, BodyEmotionGame).retry())

    @app.post("/game/{session_id}/stop")
    def game_stop(session_id: str):
        return _transition(session_id, lambda g: _only(g, BodyEmotionGame).stop())

    @app.post("/game/{session_id}/choose")
    def game_choose(session_id: str, body: EmotionBody):
        emotion = _parse_emotion(body.emotion)
        return _transition(session_id, lambda g: _only(g, CharadesGame).choose(emotion))

    @app.post("/game/{session_id}/judge")
    def game_judge(session_id: str, body: JudgeBody):
        return _transition(
            session_id,
            lambda g: _only(g, CharadesGame).judge(body.computer_correct, body.p2_correct),
        )

    return app


def _only(game, cls):
    if not isinstance(game, cls):
        raise IllegalTransition(f"request not supported by {type(game).__name__}")
    return game
