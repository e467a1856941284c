"""JSON service surface over a Platform.

Every response is wrapped in one envelope shape: schema_version, the caller's
request id (X-Request-Id header, or a served counter), and exactly one of
payload or error.
"""

from __future__ import annotations

import itertools
import json
from typing import Any

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse

from ..assist import Feedback, TriggerEvent
from ..errors import (AuthorizationError, ConflictError, ContractError,
                      CycleError, MillAssistError, NotFoundError,
                      OrderingError, RangeError, TrainingError,
                      ValidationError)
from ..knowledge import Malfunction, SolutionStep
from .platform import Platform

SCHEMA_VERSION = 1

_STATUS_BY_ERROR = [
    (NotFoundError, 404, "NOT_FOUND"),
    (AuthorizationError, 403, "FORBIDDEN"),
    (CycleError, 409, "CYCLE"),
    (ConflictError, 409, "CONFLICT"),
    (TrainingError, 409, "NOT_TRAINED"),
    (OrderingError, 400, "ORDERING"),
    (RangeError, 400, "RANGE"),
    (ContractError, 400, "CONTRACT"),
    (ValidationError, 400, "VALIDATION"),
]


def _error_parts(exc: MillAssistError) -> tuple[int, str]:
    for etype, status, code in _STATUS_BY_ERROR:
        if isinstance(exc, etype):
            return status, code
    return 500, "INTERNAL"


def create_app(platform: Platform) -> FastAPI:
    app = FastAPI(title="millassist gateway", docs_url=None, redoc_url=None)
    app.state.platform = platform
    counter = itertools.count(1)

    def request_id(request: Request) -> str:
        given = request.headers.get("x-request-id")
        return given if given else f"req-{next(counter):06d}"

    def ok(request: Request, payload: Any, status: int = 200) -> JSONResponse:
        return JSONResponse(status_code=status,
                            content={"schema_version": SCHEMA_VERSION,
                                     "request_id": request_id(request),
                                     "payload": payload})

    @app.exception_handler(MillAssistError)
    async def on_domain_error(request: Request, exc: MillAssistError):
        status, code = _error_parts(exc)
        return JSONResponse(status_code=status,
                            content={"schema_version": SCHEMA_VERSION,
                                     "request_id": request_id(request),
                                     "error": {"code": code,
                                               "message": str(exc)}})

    # --- health -----------------------------------------------------------

    @app.get("/api/health")
    async def health(request: Request):
        return ok(request, {"status": "ok"})

    # --- users ------------------------------------------------------------

    @app.post("/api/users")
    async def register_user(request: Request):
        body = await request.json()
        platform.kb.register_user(body["name"], body["role"])
        return ok(request, {"name": body["name"], "role": body["role"]},
                  status=201)

    # --- alarms -----------------------------------------------------------

    @app.get("/api/alarms/groups")
    async def alarm_groups(request: Request, limit: int = 0):
        units = [u.to_dict() for u in platform.alarm_units()]
        if limit > 0:
            units = units[:limit]
        return ok(request, {"units": units, "total": len(platform.alarm_units())})

    @app.post("/api/alarms/groups/{group_id}/ack")
    async def acknowledge(group_id: str, request: Request):
        body = await request.json()
        unit = platform.acknowledge(group_id, int(body["at"]))
        return ok(request, unit.to_dict())

    @app.get("/api/alarms/metrics")
    async def alarm_metrics(request: Request):
        return ok(request, platform.flood_metrics())

    # --- forecasts ---------------------------------------------------------

    @app.get("/api/forecasts/{reel_id}")
    async def forecasts(reel_id: str, request: Request):
        out = [f.to_dict() for f in platform.forecasts_for(reel_id)]
        return ok(request, {"reel_id": reel_id, "forecasts": out})

    @app.get("/api/forecasts/{reel_id}/{parameter}")
    async def forecast_one(reel_id: str, parameter: str, request: Request):
        return ok(request, platform.forecast(reel_id, parameter).to_dict())

    @app.get("/api/changepoints")
    async def change_points(request: Request, parameter: str | None = None):
        events = [e.to_dict() for e in platform.change_points(parameter)]
        return ok(request, {"events": events})

    # --- cards -------------------------------------------------------------

    @app.get("/api/cards")
    async def cards(request: Request, query: str | None = None,
                    situation: str | None = None):
        if query:
            scorer = platform.engine.scorer_for(situation) if situation else None
            versions = platform.kb.find_cards(query, scorer=scorer)
        else:
            versions = platform.kb.visible_cards()
        return ok(request, {"cards": [v.to_dict() for v in versions]})

    @app.get("/api/cards/{card_id}")
    async def card(card_id: str, request: Request):
        version = platform.kb.latest_approved(card_id)
        comments = [c.to_dict() for c in platform.kb.comments(card_id)]
        return ok(request, {"card": version.to_dict(), "comments": comments,
                            "status": platform.kb.card_status(card_id)})

    @app.get("/api/cards/{card_id}/versions/{number}")
    async def card_version(card_id: str, number: int, request: Request):
        return ok(request, platform.kb.get_version(card_id, number).to_dict())

    @app.post("/api/cards")
    async def create_card(request: Request):
        body = await request.json()
        card_id = platform.kb.create_card(
            Malfunction.from_dict(body["malfunction"]),
            [SolutionStep.from_dict(s) for s in body.get("solutions", [])],
            author=body["author"])
        return ok(request, {"card_id": card_id, "status": "draft"}, status=201)

    @app.post("/api/cards/{card_id}/approve")
    async def approve_card(card_id: str, request: Request):
        body = await request.json()
        version = platform.kb.approve_card(card_id, body["editor"],
                                           at=body.get("at"))
        return ok(request, version.to_dict())

    @app.post("/api/cards/{card_id}/propose")
    async def propose(card_id: str, request: Request):
        body = await request.json()
        proposal_id = platform.kb.propose_change(
            card_id, body["diff"], proposer=body["proposer"],
            note=body.get("note", ""))
        return ok(request, {"proposal_id": proposal_id, "state": "open"},
                  status=201)

    @app.get("/api/proposals")
    async def proposals(request: Request, card_id: str | None = None):
        out = [p.to_dict() for p in platform.kb.open_proposals(card_id)]
        return ok(request, {"proposals": out})

    @app.post("/api/proposals/{proposal_id}/approve")
    async def approve_proposal(proposal_id: str, request: Request):
        body = await request.json()
        version = platform.kb.approve(proposal_id, body["editor"],
                                      at=body.get("at"))
        return ok(request, version.to_dict())

    @app.post("/api/cards/{card_id}/comments")
    async def add_comment(card_id: str, request: Request):
        body = await request.json()
        comment = platform.kb.comment(card_id, body["author"], body["text"],
                                      at=body.get("at"))
        return ok(request, comment.to_dict(), status=201)

    # --- assist -------------------------------------------------------------

    @app.post("/api/assist/trigger")
    async def trigger(request: Request):
        body = await request.json()
        event = TriggerEvent.from_dict(body)
        rec = platform.engine.on_trigger(event)
        return ok(request, rec.to_dict(), status=201)

    @app.get("/api/assist/recommendations")
    async def recommendations(request: Request):
        out = [r.to_dict() for r in platform.engine.recommendations()]
        return ok(request, {"recommendations": out})

    @app.post("/api/feedback")
    async def feedback(request: Request):
        body = await request.json()
        fb = Feedback(recommendation_id=body["recommendation_id"],
                      card_id=body["card_id"], verdict=body["verdict"],
                      author=body["author"],
                      timestamp=int(body.get("timestamp", 0)),
                      text=body.get("text", ""))
        proposal_id = platform.engine.record_feedback(fb)
        key = (fb.card_id, platform.engine.recommendation(
            fb.recommendation_id).situation_label)
        confirms, rejects = platform.engine.stats().get(key, (0, 0))
        return ok(request, {"recorded": True, "proposal_id": proposal_id,
                            "card_id": fb.card_id,
                            "confirms": confirms, "rejects": rejects,
                            "score": platform.engine.score(*key)}, status=201)

    @app.get("/api/assist/stats")
    async def stats(request: Request, card_id: str | None = None,
                    situation: str | None = None):
        rows = []
        for (card, sit), (confirms, rejects) in sorted(
                platform.engine.stats().items()):
            if card_id and card != card_id:
                continue
            if situation and sit != situation:
                continue
            rows.append({"card_id": card, "situation": sit,
                         "confirms": confirms, "rejects": rejects,
                         "score": platform.engine.score(card, sit)})
        return ok(request, {"stats": rows})

    # --- stream -------------------------------------------------------------

    @app.websocket("/api/stream")
    async def stream(socket: WebSocket):
        await socket.accept()
        cursor = 0
        try:
            while True:
                entries = platform.journal(after_seq=cursor)
                for entry in entries:
                    await socket.send_text(json.dumps(entry, sort_keys=True,
                                                      separators=(",", ":")))
                    cursor = entry["seq"]
                # client drives pacing: any inbound text polls for more
                message = await socket.receive_text()
                if message == "close":
                    break
        except WebSocketDisconnect:
            return
        await socket.close()

    return app
