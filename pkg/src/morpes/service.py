"""The HTTP proxy tying the pipeline together.

Explicit endpoints rather than transparent interception:

- ``GET /fetch``   run fetch -> segment -> score -> compose, serve shot 1,
- ``GET /shot``    serve a previously rendered shot or drain the next one,
- ``POST /event``  record a click/dwell event and persist the profile,
- ``GET /profile`` debug view of a stored profile,
- ``GET /healthz`` liveness.

Sessions are in-memory with a TTL; profiles are the only durable state and
are written through on every event. Segmentation results are cached in a
bounded LRU keyed by (url, content hash); scores never are, because the
profile may have changed between fetches.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import socket
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass, field, replace
from typing import Callable
from urllib.parse import urlparse

import yaml
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, JSONResponse, PlainTextResponse, Response

from .composer import (
    DEFAULT_TEMPLATES,
    ShotPlan,
    Template,
    compose_shots,
    next_shot,
    render_shot,
    select_template,
    sort_segments,
)
from .errors import (
    ContentTypeError,
    EmptyPageError,
    EventMismatchError,
    FetchError,
    NotFoundError,
    TemplateNotFoundError,
)
from .evaluator import DimensionWeights, PageScores, score_page
from .profile import (
    InteractionEvent,
    ProfileStore,
    UpdateParams,
    build_profile,
    update_profile,
)
from .segmenter import SegmentationParams, SegmentSet, fetch_page, segment_page

SESSION_HEADER = "X-Morpes-Session"
CONFIG_ENV_VAR = "MORPES_CONFIG"


@dataclass(frozen=True)
class ServiceConfig:
    listen_address: str = "127.0.0.1:8700"
    profile_dir: str = "./morpes-profiles"
    templates: tuple[Template, ...] = DEFAULT_TEMPLATES
    segmentation: SegmentationParams = field(default_factory=SegmentationParams)
    dimension_weights: DimensionWeights = field(default_factory=DimensionWeights)
    update_params: UpdateParams = field(default_factory=UpdateParams)
    fetch_timeout: float = 10.0
    session_ttl: float = 1800.0
    cache_capacity: int = 64
    client_dir: str | None = None

    @property
    def host(self) -> str:
        return self.listen_address.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        return int(self.listen_address.rsplit(":", 1)[1])


def load_config(path: str | None = None) -> ServiceConfig:
    """Read the YAML config document; every key is optional."""
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if path is None:
        return ServiceConfig()
    with open(path, encoding="utf-8") as handle:
        raw = yaml.safe_load(handle) or {}

    kwargs: dict = {}
    for key in ("listen_address", "profile_dir", "fetch_timeout", "session_ttl",
                "cache_capacity", "client_dir"):
        if key in raw:
            kwargs[key] = raw[key]
    if "templates" in raw:
        kwargs["templates"] = tuple(Template(**entry) for entry in raw["templates"])
    if "segmentation" in raw:
        kwargs["segmentation"] = SegmentationParams(**raw["segmentation"])
    if "dimension_weights" in raw:
        kwargs["dimension_weights"] = DimensionWeights(**raw["dimension_weights"])
    if "update_params" in raw:
        kwargs["update_params"] = UpdateParams(**raw["update_params"])
    return ServiceConfig(**kwargs)


@dataclass
class Session:
    session_id: str
    user_id: str
    page_url: str
    shot_plan: ShotPlan
    template_id: str
    created_at: float
    last_active: float
    segment_set: SegmentSet
    page_scores: PageScores
    total_shots: int
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class SessionStore:
    """Live sessions with lazy TTL expiry."""

    def __init__(self, ttl: float):
        self.ttl = ttl
        self._sessions: dict[str, Session] = {}
        self._guard = threading.Lock()

    def put(self, session: Session) -> None:
        with self._guard:
            self._sessions[session.session_id] = session

    def get(self, session_id: str, now: float) -> Session | None:
        with self._guard:
            session = self._sessions.get(session_id)
            if session is None:
                return None
            if now - session.last_active > self.ttl:
                del self._sessions[session_id]
                return None
            return session

    def reap(self, now: float) -> None:
        with self._guard:
            expired = [
                sid for sid, session in self._sessions.items()
                if now - session.last_active > self.ttl
            ]
            for sid in expired:
                del self._sessions[sid]


class SegmentCache:
    """Bounded LRU of segmentation results keyed by (url, content hash)."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self._entries: OrderedDict[tuple[str, str], SegmentSet] = OrderedDict()
        self._guard = threading.Lock()

    def get(self, key: tuple[str, str]) -> SegmentSet | None:
        if self.capacity <= 0:
            return None
        with self._guard:
            entry = self._entries.get(key)
            if entry is not None:
                self._entries.move_to_end(key)
            return entry

    def put(self, key: tuple[str, str], value: SegmentSet) -> None:
        if self.capacity <= 0:
            return
        with self._guard:
            self._entries[key] = value
            self._entries.move_to_end(key)
            while len(self._entries) > self.capacity:
                self._entries.popitem(last=False)


def _session_token(user_id: str, page_url: str, content_hash: str,
                   profile_fingerprint: str, template_id: str) -> str:
    material = "\x1f".join([user_id, page_url, content_hash, profile_fingerprint, template_id])
    return hashlib.sha256(material.encode("utf-8")).hexdigest()[:22]


def _profile_fingerprint(profile) -> str:
    body = json.dumps(
        sorted((name, term.weight) for name, term in profile.terms.items()),
        separators=(",", ":"),
    )
    return hashlib.sha256(body.encode("utf-8")).hexdigest()


def _is_absolute_http(url: str) -> bool:
    parsed = urlparse(url)
    return parsed.scheme in ("http", "https") and bool(parsed.netloc)


def _embed_scores(body: str, scores: PageScores) -> str:
    island = json.dumps(scores.to_dict(), separators=(",", ":"))
    return body.replace(
        "</body></html>",
        f'<script type="application/json" id="morpes-scores">{island}</script></body></html>',
    )


def create_app(config: ServiceConfig | None = None,
               clock: Callable[[], float] = time.time) -> FastAPI:
    """Build the proxy application around one config and one clock."""
    config = config or ServiceConfig()
    store = ProfileStore(config.profile_dir)
    sessions = SessionStore(config.session_ttl)
    cache = SegmentCache(config.cache_capacity)

    app = FastAPI(title="morpes proxy", version="0.1.0")
    app.state.config = config
    app.state.profile_store = store
    app.state.sessions = sessions
    app.state.segment_cache = cache

    def error(status: int, message: str) -> JSONResponse:
        return JSONResponse({"error": message}, status_code=status)

    @app.exception_handler(RequestValidationError)
    async def malformed_query(request: Request, exc: RequestValidationError):
        return error(400, str(exc))

    @app.get("/healthz")
    def healthz() -> PlainTextResponse:
        return PlainTextResponse("ok")

    @app.get("/fetch")
    def handle_fetch(user: str = "", url: str = "", template: str | None = None,
                     width: int | None = None, seed: str | None = None,
                     debug: int = 0) -> Response:
        now = clock()
        sessions.reap(now)
        if not user:
            return error(400, "missing user id")
        if not url or not _is_absolute_http(url):
            return error(400, f"url must be absolute http/https, got {url!r}")
        try:
            chosen = select_template(config.templates, template, width)
        except TemplateNotFoundError as exc:
            return error(400, str(exc))

        try:
            page = fetch_page(url, timeout=config.fetch_timeout, clock=clock)
        except TimeoutError as exc:
            return error(502, str(exc))
        except ContentTypeError as exc:
            return error(502, str(exc))
        except FetchError as exc:
            return error(502, exc.reason)
        except ValueError as exc:
            return error(400, str(exc))

        content_hash = hashlib.sha256(page.html.encode("utf-8")).hexdigest()
        cache_key = (page.url, content_hash)
        segments = cache.get(cache_key)
        if segments is None:
            try:
                segments = segment_page(page, config.segmentation)
            except EmptyPageError:
                return Response(status_code=204)
            cache.put(cache_key, segments)

        profile = store.load_or_create(user)
        if seed:
            seeded = build_profile(user, seed.split(","), at=now)
            merged = dict(profile.terms)
            merged.update(seeded.terms)
            profile = replace(profile, terms=merged)
            store.persist_profile(profile)

        scores = score_page(segments, profile, config.dimension_weights, now=page.fetched_at)
        ranking = sort_segments(scores)
        plan = compose_shots(ranking, chosen, page_url=page.url)
        total_shots = max(1, math.ceil(len(segments.segments) / chosen.capacity))

        token = _session_token(user, page.url, content_hash,
                               _profile_fingerprint(profile), chosen.id)
        session = Session(
            session_id=token,
            user_id=user,
            page_url=page.url,
            shot_plan=plan,
            template_id=chosen.id,
            created_at=now,
            last_active=now,
            segment_set=segments,
            page_scores=scores,
            total_shots=total_shots,
        )
        sessions.put(session)

        body = render_shot(plan.shots[0], segments, chosen, {
            "page_url": page.url,
            "shot_index": 1,
            "total_shots": total_shots,
            "session_id": token,
        })
        if debug:
            body = _embed_scores(body, scores)
        return HTMLResponse(body, headers={SESSION_HEADER: token})

    @app.get("/shot")
    def get_shot(session: str = "", i: int = 0, debug: int = 0) -> Response:
        now = clock()
        live = sessions.get(session, now)
        if live is None:
            return error(404, "unknown or expired session")
        if i < 1:
            return error(400, f"shot index must be >= 1, got {i}")

        chosen = select_template(config.templates, live.template_id)
        with live.lock:
            served = len(live.shot_plan.shots)
            if i <= served:
                shot = live.shot_plan.shots[i - 1]
            elif not live.shot_plan.buffer:
                return error(410, "segment buffer exhausted")
            elif i == served + 1:
                live.shot_plan, shot = next_shot(live.shot_plan, chosen)
            else:
                return error(400, f"next unserved shot is {served + 1}, got {i}")
            live.last_active = now

        body = render_shot(shot, live.segment_set, chosen, {
            "page_url": live.page_url,
            "shot_index": shot.index,
            "total_shots": live.total_shots,
            "session_id": live.session_id,
        })
        if debug:
            body = _embed_scores(body, live.page_scores)
        return HTMLResponse(body, headers={SESSION_HEADER: live.session_id})

    @app.post("/event")
    async def post_event(request: Request) -> Response:
        now = clock()
        try:
            payload = await request.json()
        except Exception:
            return error(400, "body must be JSON")
        if not isinstance(payload, dict):
            return error(400, "body must be a JSON object")
        try:
            event = InteractionEvent(
                user_id=str(payload["user_id"]),
                session_id=str(payload["session_id"]),
                page_url=str(payload["page_url"]),
                segment_id=str(payload["segment_id"]),
                kind=str(payload["kind"]),
                dwell_ms=int(payload["dwell_ms"]),
                at=float(payload["at"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            return error(400, f"malformed event: {exc}")

        live = sessions.get(event.session_id, now)
        if live is None:
            return error(404, "unknown or expired session")
        if event.user_id != live.user_id:
            return error(400, "event user does not match session user")
        segment = live.segment_set.by_id().get(event.segment_id)
        if segment is None:
            return error(404, f"segment {event.segment_id!r} not in session plan")

        profile = store.load_or_create(event.user_id)
        try:
            updated = update_profile(profile, event, segment, config.update_params)
        except EventMismatchError as exc:
            return error(404, str(exc))
        store.persist_profile(updated)
        with live.lock:
            live.last_active = now
        return Response(status_code=204)

    @app.get("/profile")
    def get_profile(user: str = "") -> Response:
        if not user:
            return error(400, "missing user id")
        try:
            profile = store.load_profile(user)
        except NotFoundError:
            return error(404, f"no stored profile for {user!r}")
        return JSONResponse({
            "user_id": profile.user_id,
            "terms": [
                {"term": t.term, "weight": t.weight, "updated_at": t.updated_at}
                for t in profile.terms.values()
            ],
        })

    _maybe_mount_client(app, config)
    return app


def _maybe_mount_client(app: FastAPI, config: ServiceConfig) -> None:
    """Serve the optional browsing client under /app when its build exists."""
    client_dir = config.client_dir
    if client_dir is None:
        candidate = os.path.join(os.getcwd(), "frontend", "dist")
        if os.path.isdir(candidate):
            client_dir = candidate
    if client_dir and os.path.isdir(client_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/app", StaticFiles(directory=client_dir, html=True), name="client")


def run_service(config: ServiceConfig) -> None:
    """Serve until interrupted. Raises RuntimeError when the port is taken."""
    import uvicorn

    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((config.host, config.port))
    except OSError as exc:
        raise RuntimeError(
            f"cannot listen on {config.listen_address}: {exc}"
        ) from exc
    finally:
        probe.close()

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
