"""HTTP API for human-in-the-loop curation.

All reads are side-effect free; mutations are serialized by the state lock
and acknowledged only after the event hits disk. Response bodies are the
JSON mirrors of the core types; errors use {code, message, details[]}.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .state import CurationState, StateError


class LabelBody(BaseModel):
    label: str


class HashtagSelectionBody(BaseModel):
    accepted: list[str]


class TopicSelectionBody(BaseModel):
    language: str
    accepted: list[int]
    min_share: float = Field(default=0.5, ge=0.0, le=1.0)


class AssemblePreviewBody(BaseModel):
    target_total: int = 10000
    min_words: int = 4


def _error_response(code: int, message: str, details: Optional[list] = None) -> JSONResponse:
    return JSONResponse(
        status_code=code,
        content={"code": code, "message": message, "details": details or []},
    )


def create_app(workspace: Path, ui_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="stance corpus curation", version="1.0")
    state = CurationState(workspace)
    app.state.curation = state

    @app.exception_handler(StateError)
    async def on_state_error(request: Request, exc: StateError):
        return _error_response(exc.code, exc.message, exc.details)

    @app.get("/api/state")
    def get_state():
        return state.state_summary()

    @app.get("/api/users")
    def get_users(limit: int = 20, offset: int = 0):
        return {"users": [card.to_json_dict() for card in state.user_queue(limit, offset)]}

    @app.post("/api/users/{author_id}/label")
    def post_user_label(author_id: str, body: LabelBody):
        return state.set_user_label(author_id, body.label)

    @app.get("/api/hashtags")
    def get_hashtags(min_freq: int = 1):
        return {"hashtags": state.hashtag_candidates(min_freq)}

    @app.post("/api/hashtags/selection")
    def post_hashtag_selection(body: HashtagSelectionBody):
        return state.set_hashtag_selection(body.accepted)

    @app.get("/api/topics")
    def get_topics():
        return {"topics": state.topics_view(), "preview": state.topic_preview()}

    @app.post("/api/topics/selection")
    def post_topic_selection(body: TopicSelectionBody):
        return state.set_topic_selection(body.language, body.accepted, body.min_share)

    @app.get("/api/distribution")
    def get_distribution():
        return state.distribution_projection()

    @app.post("/api/assemble/preview")
    def post_assemble_preview(body: AssemblePreviewBody):
        return state.assemble_preview(body.target_total, body.min_words)

    candidates = [ui_dir] if ui_dir is not None else [
        Path(__file__).resolve().parents[3] / "frontend" / "dist",
        Path.cwd() / "frontend" / "dist",
    ]
    for candidate in candidates:
        if candidate and candidate.is_dir():
            app.mount("/ui", StaticFiles(directory=candidate, html=True), name="ui")
            break

    return app
