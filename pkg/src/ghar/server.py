"""WebSocket session service.

One session per connection.  On connect the service sends the instruction
panel payload; afterwards every inbound message produces exactly one
outbound snapshot or error, and malformed input never closes the socket.
"""

from __future__ import annotations

import itertools
import json
import logging
import os

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .session import INSTRUCTIONS, Session, SessionEvent
from .tracking import PROFILES, LocalizationProfile

log = logging.getLogger(__name__)


def create_app(profile: LocalizationProfile | None = None, seed: int | None = None) -> FastAPI:
    if profile is None:
        profile = PROFILES["geospatial"]
    if seed is None:
        seed = int(os.environ.get("GHAR_SEED", "0"))

    app = FastAPI(title="ghar-engine")
    counter = itertools.count(1)

    @app.get("/healthz")
    def healthz():
        return {"ok": True, "profile": profile.name}

    @app.websocket("/session")
    async def session_socket(ws: WebSocket):
        await ws.accept()
        session = Session(profile, seed, session_id=f"s{seed:08d}-{next(counter)}")
        await ws.send_text(
            json.dumps(
                {
                    "type": "instructions",
                    "session_id": session.session_id,
                    "profile": profile.to_json_dict(),
                    "steps": INSTRUCTIONS,
                }
            )
        )
        try:
            while True:
                raw = await ws.receive_text()
                await ws.send_text(_handle_raw(session, raw))
        except WebSocketDisconnect:
            log.info("session %s disconnected", session.session_id)

    return app


def _handle_raw(session: Session, raw: str) -> str:
    try:
        msg = json.loads(raw)
    except json.JSONDecodeError as e:
        return json.dumps({"type": "error", "code": "ProtocolError", "message": f"bad JSON: {e.msg}"})
    if not isinstance(msg, dict) or msg.get("type") != "event":
        return json.dumps({"type": "error", "code": "ProtocolError", "message": "expected {\"type\": \"event\", ...}"})
    try:
        event = SessionEvent.from_json_dict(msg)
    except (KeyError, TypeError, ValueError) as e:
        return json.dumps({"type": "error", "code": "ProtocolError", "message": f"bad event: {e}"})
    return session.handle_event(event).to_json()


def serve(host: str = "127.0.0.1", port: int = 8787, profile=None, seed=None) -> None:
    import uvicorn

    uvicorn.run(create_app(profile, seed), host=host, port=port, log_level="warning")
