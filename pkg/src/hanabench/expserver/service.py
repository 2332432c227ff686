"""FastAPI endpoints for the human-bot teaming experiment.

Every payload sent to the participant is redacted: the human's own cards
appear only as hint marks plus a candidate bitmask derived from information
the human can legitimately see (their hint history, the board, the discard
pile, and the bot's hand). The bot's knowledge is shown as raw hint marks
only -- a counted view of the bot's hand would be conditioned on the human's
hidden cards and leak them. Dominance labels of bot moves are likewise kept
out of session payloads (the participant must judge moves unaided); they are
recorded in the event log and surfaced by /export.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from ..agents import DEFAULT_POOL, AgentSpec
from ..cards import COLORS, action_id
from ..engine import EngineConfig, observe
from ..knowledge import apply_card_counting
from .store import (
    GAMES_PER_BLOCK,
    HUMAN_SEAT,
    PHASE_PLAYING,
    Session,
    SessionError,
    SessionStore,
    UnknownSessionError,
)


class CreateSessionRequest(BaseModel):
    participant: str = ""


class MoveRequest(BaseModel):
    action_id: int


class FlagRequest(BaseModel):
    game_index: int
    turn: int


class BlockSurveyRequest(BaseModel):
    block: int
    items: dict[str, int]


class FinalSurveyRequest(BaseModel):
    answers: dict = Field(default_factory=dict)


def _knowledge_marks(slot) -> dict:
    return {
        "color_hint": None if slot.color_hint is None else COLORS[slot.color_hint],
        "rank_hint": slot.rank_hint,
        "hinted": slot.hinted,
    }


def _move_row(record, *, redact_human_draw: bool = True) -> dict:
    drew = record.drew_card
    if redact_human_draw and record.seat == HUMAN_SEAT:
        drew = None
    return {
        "turn": record.turn,
        "seat": record.seat,
        "actor": "human" if record.seat == HUMAN_SEAT else "bot",
        "action_id": record.action_id,
        "description": record.description,
        "card": record.card,
        "touched": None if record.touched is None else list(record.touched),
        "drew": drew,
        "flagged": record.flagged,
    }


BLIND_BOT_LABELS = ("first", "second")


def session_payload(session: Session) -> dict:
    """The participant-facing view of a session; own cards never included.

    Partner identities are blinded: the participant sees only "first" and
    "second", never the pool labels behind them (those appear in /export).
    """
    game = session.current_game
    payload = {
        "session_id": session.session_id,
        "phase": session.phase,
        "game_index": game.game_index,
        "block": game.block,
        "test_game": game.test_game,
        "bot": BLIND_BOT_LABELS[game.block],
        "schedule": [
            {
                "game_index": g.game_index,
                "block": g.block,
                "bot": BLIND_BOT_LABELS[g.block],
                "test_game": g.test_game,
                "score": g.score,
                "termination": g.termination,
            }
            for g in session.games
        ],
        "games_per_block": GAMES_PER_BLOCK,
        "history": [_move_row(r) for r in game.moves],
        "observation": None,
    }
    if session.phase == PHASE_PLAYING and session.state is not None:
        state = session.state
        obs = observe(state, HUMAN_SEAT)
        counted = apply_card_counting(obs.own_knowledge, obs.public_view())
        legal = obs.legal if state.current_seat == HUMAN_SEAT else ()
        payload["observation"] = {
            "turn": state.turn_index,
            "to_move": "human" if state.current_seat == HUMAN_SEAT else "bot",
            "score": state.score(),
            "hint_tokens": obs.hint_tokens,
            "bombs_remaining": obs.bombs_remaining,
            "deck_size": obs.deck_size,
            "fireworks": {COLORS[c]: obs.fireworks[c] for c in range(len(COLORS))},
            "discards": [str(card) for card in obs.discards],
            "own_hand": [
                {**_knowledge_marks(slot), "candidates": slot.mask}
                for slot in counted.slots
            ],
            "partner_hand": [
                {"card": str(card), **_knowledge_marks(slot)}
                for card, slot in zip(obs.partner_hand, obs.partner_knowledge.slots)
            ],
            "legal_action_ids": [action_id(m) for m in legal],
        }
    return payload


def create_app(
    log_path: str | Path,
    pool: tuple[AgentSpec, ...] = DEFAULT_POOL,
    seed: int = 0,
    engine_config: EngineConfig = EngineConfig(),
) -> FastAPI:
    app = FastAPI(title="hanabench experiment service")
    store = SessionStore(log_path, pool=pool, seed=seed, engine_config=engine_config)
    app.state.store = store

    def _get_session(session_id: str) -> Session:
        try:
            return store.get(session_id)
        except UnknownSessionError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None

    @app.get("/healthz")
    def healthz():
        return {"status": "ok", "sessions": len(store.sessions)}

    @app.post("/sessions")
    def create_session(request: CreateSessionRequest):
        session = store.create_session(request.participant)
        return session_payload(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return session_payload(_get_session(session_id))

    @app.post("/sessions/{session_id}/move")
    def post_move(session_id: str, request: MoveRequest):
        session = _get_session(session_id)
        try:
            records = store.human_move(session_id, request.action_id)
        except SessionError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        payload = session_payload(session)
        payload["events"] = [_move_row(r) for r in records]
        return payload

    @app.post("/sessions/{session_id}/questionable")
    def post_questionable(session_id: str, request: FlagRequest):
        _get_session(session_id)
        try:
            store.flag_questionable(session_id, request.game_index, request.turn)
        except SessionError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        # The stored annotation carries the move's dominance label; keep it
        # out of the response so the participant stays blind to it.
        return {"ok": True, "game_index": request.game_index, "turn": request.turn}

    @app.post("/sessions/{session_id}/survey/block")
    def post_block_survey(session_id: str, request: BlockSurveyRequest):
        session = _get_session(session_id)
        try:
            store.submit_block_survey(session_id, request.block, request.items)
        except SessionError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return session_payload(session)

    @app.post("/sessions/{session_id}/survey/final")
    def post_final_survey(session_id: str, request: FinalSurveyRequest):
        session = _get_session(session_id)
        try:
            store.submit_final_survey(session_id, request.answers)
        except SessionError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return session_payload(session)

    @app.get("/export")
    def export():
        return store.export()

    return app
