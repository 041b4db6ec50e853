"""HTTP chat API: a thin adapter over the engine.

Every behavior reachable here is reachable through the Engine methods with
identical results; the handlers only translate transport concerns.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .engine import Engine, UnknownSessionError


class SessionCreated(BaseModel):
    session_id: str


class MessageIn(BaseModel):
    text: str


class OutcomeOut(BaseModel):
    kind: str
    fired_rule: str
    payload: dict = {}
    sub_outcomes: list["OutcomeOut"] = []


class ContextSnapshotOut(BaseModel):
    curr_prod: str | None
    curr_prod_indiv: str | None
    curr_inode: str | None
    curr_leaf: str | None
    message_index: int
    visited_nodes: list[str]
    used_edges: list[list[str]]


class MessageOut(BaseModel):
    answer: str
    outcome: OutcomeOut
    state: ContextSnapshotOut


class TurnOut(BaseModel):
    user: str
    answer: str
    outcome: OutcomeOut
    state: ContextSnapshotOut
    created_at: str


def _outcome_out(outcome) -> OutcomeOut:
    return OutcomeOut(
        kind=outcome.kind,
        fired_rule=outcome.fired_rule,
        payload=outcome.payload,
        sub_outcomes=[_outcome_out(s) for s in outcome.sub_outcomes],
    )


def create_app(engine: Engine, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="ontodm", version="0.1.0")

    @app.post("/api/sessions", response_model=SessionCreated, status_code=201)
    def create_session():
        return SessionCreated(session_id=engine.create_session())

    @app.post("/api/sessions/{session_id}/messages", response_model=MessageOut)
    def post_message(session_id: str, message: MessageIn):
        if not message.text.strip():
            raise HTTPException(status_code=400, detail="empty text")
        try:
            envelope = engine.post_message(session_id, message.text)
        except UnknownSessionError:
            raise HTTPException(status_code=404, detail="unknown session")
        return MessageOut(
            answer=envelope.text,
            outcome=_outcome_out(envelope.outcome),
            state=ContextSnapshotOut(**envelope.state),
        )

    @app.get("/api/sessions/{session_id}/state", response_model=ContextSnapshotOut)
    def get_state(session_id: str):
        try:
            return ContextSnapshotOut(**engine.session_state(session_id))
        except UnknownSessionError:
            raise HTTPException(status_code=404, detail="unknown session")

    @app.get("/api/sessions/{session_id}/transcript", response_model=list[TurnOut])
    def get_transcript(session_id: str):
        try:
            turns = engine.session_transcript(session_id)
        except UnknownSessionError:
            raise HTTPException(status_code=404, detail="unknown session")
        return [
            TurnOut(
                user=t["user"],
                answer=t["answer"],
                outcome=OutcomeOut(**t["outcome"]) if isinstance(t["outcome"], dict) else t["outcome"],
                state=ContextSnapshotOut(**t["state"]),
                created_at=t["created_at"],
            )
            for t in turns
        ]

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="webchat")

    return app
