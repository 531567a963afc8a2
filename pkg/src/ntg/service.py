"""HTTP service hosting interactive generation sessions.

Sessions are in-memory actors: every mutation of one session is serialized
behind its lock while different sessions run fully in parallel. The push
channel replays the session's event log as server-sent events, one JSON
event per message, which is exactly the stream the sketch UI folds into
its canvas state.
"""

from __future__ import annotations

import asyncio
import itertools
import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import Response, StreamingResponse
from pydantic import BaseModel, Field

from .generate import (
    GenSession,
    Limits,
    STATUS_ACTIVE,
    STATUS_BUDGET,
    event_to_json,
    init_session,
    step,
)
from .graph import GraphError
from .graph_io import to_canonical_json, to_geojson
from .net import ModelParams
from .templates import match_template


class CreateSessionRequest(BaseModel):
    strokes: list[list[tuple[float, float]]]
    style: int | None = None
    seed: int = Field(..., description="rng seed; sessions are reproducible")
    temperature: float = 1.0
    region_margin: float = 500.0


@dataclass
class SessionBox:
    session: GenSession
    temperature: float
    lock: threading.Lock = field(default_factory=threading.Lock)


def create_app(
    params: ModelParams,
    limits: Limits,
    default_budget_nodes: int | None = 2000,
) -> FastAPI:
    app = FastAPI(title="road-layout studio service")
    boxes: dict[str, SessionBox] = {}
    ids = itertools.count(1)
    registry_lock = threading.Lock()

    def get_box(session_id: str) -> SessionBox:
        box = boxes.get(session_id)
        if box is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        return box

    @app.get("/v1/styles")
    def styles():
        cfg = params.config
        names = list(cfg.style_names) + [
            f"style-{i}" for i in range(len(cfg.style_names), cfg.n_styles)
        ]
        return [{"id": i, "name": names[i]} for i in range(cfg.n_styles)]

    @app.post("/v1/sessions")
    def create_session(req: CreateSessionRequest):
        if req.style is not None and not (0 <= req.style < params.config.n_styles):
            raise HTTPException(status_code=400, detail=f"unknown style {req.style}")
        try:
            seed = match_template(
                [list(map(tuple, stroke)) for stroke in req.strokes],
                max_edge=params.config.offset_range,
            )
            session = init_session(
                seed, req.style, limits, req.seed, region_margin=req.region_margin
            )
        except GraphError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        with registry_lock:
            session_id = f"s{next(ids)}"
            boxes[session_id] = SessionBox(session, req.temperature)
        return {
            "session_id": session_id,
            "status": session.status,
            "nodes": len(session.graph.nodes),
            "edges": session.graph.edge_count(),
            "event_count": len(session.events),
        }

    @app.post("/v1/sessions/{session_id}/step")
    def step_session(session_id: str, n: int = Query(default=1, ge=1, le=1000)):
        box = get_box(session_id)
        with box.lock:
            session = box.session
            ran = 0
            for _ in range(n):
                if session.status != STATUS_ACTIVE or session.pending() == 0:
                    break
                if (
                    default_budget_nodes is not None
                    and session.added_nodes >= default_budget_nodes
                ):
                    session.status = STATUS_BUDGET
                    break
                step(session, params, box.temperature)
                ran += 1
            return {
                "status": session.status,
                "steps_run": ran,
                "step_count": session.step_count,
                "nodes": len(session.graph.nodes),
                "edges": session.graph.edge_count(),
                "event_count": len(session.events),
            }

    @app.get("/v1/sessions/{session_id}/graph")
    def session_graph(session_id: str, format: str = "canonical"):
        box = get_box(session_id)
        with box.lock:
            if format == "geojson":
                return Response(
                    content=to_geojson(box.session.graph),
                    media_type="application/geo+json",
                )
            return Response(
                content=to_canonical_json(box.session.graph),
                media_type="application/json",
            )

    @app.get("/v1/sessions/{session_id}")
    def session_info(session_id: str):
        box = get_box(session_id)
        with box.lock:
            session = box.session
            return {
                "session_id": session_id,
                "status": session.status,
                "step_count": session.step_count,
                "style": session.style,
                "nodes": len(session.graph.nodes),
                "edges": session.graph.edge_count(),
                "event_count": len(session.events),
            }

    @app.delete("/v1/sessions/{session_id}")
    def delete_session(session_id: str):
        with registry_lock:
            if boxes.pop(session_id, None) is None:
                raise HTTPException(
                    status_code=404, detail=f"unknown session {session_id}"
                )
        return {"deleted": session_id}

    @app.get("/v1/sessions/{session_id}/events")
    async def session_events(
        request: Request,
        session_id: str,
        start: int = Query(default=0, ge=0),
        follow: bool = True,
    ):
        box = get_box(session_id)

        async def stream():
            index = start
            while True:
                session = box.session
                events = session.events
                while index < len(events):
                    yield f"data: {event_to_json(events[index])}\n\n"
                    index += 1
                if not follow:
                    break
                if session.status != STATUS_ACTIVE and index >= len(session.events):
                    break
                if await request.is_disconnected():
                    break
                await asyncio.sleep(0.05)

        return StreamingResponse(stream(), media_type="text/event-stream")

    return app


def run_service(
    params: ModelParams,
    limits: Limits,
    host: str = "127.0.0.1",
    port: int = 8000,
    budget_nodes: int | None = 2000,
) -> None:
    import uvicorn

    app = create_app(params, limits, default_budget_nodes=budget_nodes)
    uvicorn.run(app, host=host, port=port, log_level="info")
