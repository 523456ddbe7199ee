"""HTTP API over the rule engine, context acquisition, and game engine.

The service adds no adaptation logic of its own: GET /api/adaptation is
exactly evaluate_chain over the configured rule file and resolve_snapshot.
Profiles persist through a ProfileStore; sessions are in-memory and die with
the process (players log in again, progress survives).
"""

from __future__ import annotations

import os
import secrets
import threading
import time
import random
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Mapping

from fastapi import Depends, FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from . import game
from .context import (
    Clock,
    Orientation,
    UserPreferences,
    UserProfile,
    clock_from_env,
    new_profile,
    resolve_snapshot,
    verify_password,
    weather_client_from_env,
    WeatherClient,
)
from .dsl import RuleDocument, bundled_rules_text, parse
from .errors import NegativeAgeError, NotEligibleError
from .model import NULL, ActionSet, Color
from .store import ProfileStore, valid_username
from .tree import evaluate_chain

SESSION_TTL_S = 24 * 3600.0
REQUEST_CAP = 100_000


@dataclass
class ServiceConfig:
    data_dir: Path
    rules_source: str
    clock: Clock
    weather: WeatherClient
    weather_location: str = "local"
    static_dir: Path | None = None
    session_ttl_s: float = SESSION_TTL_S
    request_cap: int = REQUEST_CAP
    rng_seed: int | None = None


def config_from_env(env: Mapping[str, str] | None = None) -> ServiceConfig:
    env = os.environ if env is None else env
    rules_path = env.get("ADAPTREE_RULES")
    return ServiceConfig(
        data_dir=Path(env.get("ADAPTREE_DATA_DIR", "data")),
        rules_source=Path(rules_path).read_text(encoding="utf-8") if rules_path else bundled_rules_text(),
        clock=clock_from_env(env),
        weather=weather_client_from_env(env),
        weather_location=env.get("ADAPTREE_WEATHER_LOCATION", "local"),
        static_dir=Path(env["ADAPTREE_STATIC_DIR"]) if env.get("ADAPTREE_STATIC_DIR") else None,
    )


@dataclass
class ActiveQuestion:
    question: game.Question
    mode: str
    issued_monotonic: float
    issued_at: str


@dataclass
class Session:
    token: str
    username: str
    orientation: Orientation = Orientation.PORTRAIT
    active: ActiveQuestion | None = None
    last_used: float = field(default_factory=time.monotonic)
    requests: int = 0


def _json_value(value: object) -> object:
    if value is NULL:
        return None
    if isinstance(value, Color):
        return str(value)
    return value


def actions_to_json(actions: ActionSet) -> dict:
    return {feature: _json_value(value) for feature, value in sorted(actions.items())}


def preferences_to_json(preferences: UserPreferences) -> dict:
    return {
        "font_color": str(preferences.font_color),
        "background_color": str(preferences.background_color),
        "button_font_color": str(preferences.button_font_color),
        "button_background_color": str(preferences.button_background_color),
        "time_based_background": preferences.time_based_background,
    }


def _bad_request(detail: str) -> HTTPException:
    return HTTPException(status_code=400, detail=detail)


async def _read_body(request: Request) -> dict:
    try:
        data = await request.json()
    except Exception:
        raise _bad_request("request body must be JSON") from None
    if not isinstance(data, dict):
        raise _bad_request("request body must be a JSON object")
    return data


def _need_str(data: dict, key: str) -> str:
    value = data.get(key)
    if not isinstance(value, str):
        raise _bad_request(f"field {key!r} must be a string")
    return value


def _need_int(data: dict, key: str) -> int:
    value = data.get(key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise _bad_request(f"field {key!r} must be an integer")
    return value


def _need_bool(data: dict, key: str) -> bool:
    value = data.get(key)
    if not isinstance(value, bool):
        raise _bad_request(f"field {key!r} must be a boolean")
    return value


def _parse_color(data: dict, key: str) -> Color:
    text = _need_str(data, key)
    try:
        color = Color.parse(text)
    except ValueError:
        raise HTTPException(status_code=422, detail=f"{key} must be a #RRGGBB color") from None
    return color


def create_app(config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="adaptree", docs_url=None, redoc_url=None)
    store = ProfileStore(config.data_dir)
    document: RuleDocument = parse(config.rules_source)
    chain = document.chain()
    sessions: dict[str, Session] = {}
    sessions_guard = threading.Lock()
    rng = random.Random(config.rng_seed)

    def current_session(request: Request) -> Session:
        header = request.headers.get("authorization", "")
        token = header.removeprefix("Bearer ").strip() if header.startswith("Bearer ") else ""
        if not token:
            raise HTTPException(status_code=401, detail="missing bearer token")
        with sessions_guard:
            session = sessions.get(token)
            now = time.monotonic()
            if session is None or now - session.last_used > config.session_ttl_s:
                sessions.pop(token, None)
                raise HTTPException(status_code=401, detail="unknown or expired session")
            session.last_used = now
            session.requests += 1
            if session.requests > config.request_cap:
                raise HTTPException(status_code=429, detail="session request cap exceeded")
        return session

    def load_profile(session: Session) -> UserProfile:
        profile = store.load(session.username)
        if profile is None:
            raise HTTPException(status_code=401, detail="profile no longer exists")
        return profile

    def adaptation_actions(profile: UserProfile, orientation: Orientation) -> ActionSet:
        snapshot = resolve_snapshot(
            profile, config.clock, config.weather, orientation, config.weather_location)
        return evaluate_chain(chain, snapshot)

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/api/register", status_code=201)
    async def register(request: Request) -> dict:
        data = await _read_body(request)
        username = _need_str(data, "username")
        password = _need_str(data, "password")
        age = _need_int(data, "age")
        if not valid_username(username):
            raise HTTPException(
                status_code=422,
                detail="username must be 1-32 characters of letters, digits or underscores")
        if not password:
            raise HTTPException(status_code=422, detail="password must not be empty")
        with store.lock(username):
            if store.exists(username):
                raise HTTPException(status_code=409, detail="username already registered")
            try:
                profile = new_profile(username, password, age)
            except NegativeAgeError:
                raise HTTPException(status_code=422, detail="age cannot be negative") from None
            store.save(profile)
        return {"username": profile.username, "age": profile.age, "level": profile.current_level}

    @app.post("/api/login")
    async def login(request: Request) -> dict:
        data = await _read_body(request)
        username = _need_str(data, "username")
        password = _need_str(data, "password")
        profile = store.load(username) if valid_username(username) else None
        if profile is None or not verify_password(password, profile.password_hash):
            raise HTTPException(status_code=401, detail="unknown user or wrong password")
        token = secrets.token_hex(16)
        with sessions_guard:
            sessions[token] = Session(token=token, username=username)
        return {"token": token, "username": username, "level": profile.current_level}

    @app.get("/api/adaptation")
    def adaptation(
        session: Session = Depends(current_session),
        orientation: str = Query("portrait"),
    ) -> dict:
        try:
            parsed = Orientation(orientation)
        except ValueError:
            raise HTTPException(status_code=422, detail="orientation must be portrait or landscape") from None
        session.orientation = parsed
        profile = load_profile(session)
        actions = adaptation_actions(profile, parsed)
        return {
            "actions": actions_to_json(actions),
            "preferences": preferences_to_json(profile.preferences),
        }

    @app.get("/api/game/next")
    def next_question(
        session: Session = Depends(current_session),
        mode: str = Query("standard"),
    ) -> Response:
        if mode not in ("standard", "review"):
            raise HTTPException(status_code=422, detail="mode must be standard or review")
        profile = load_profile(session)
        if session.active is not None and session.active.mode != mode:
            raise HTTPException(status_code=409, detail="answer the active question first")
        if session.active is None:
            if mode == "review":
                question = game.next_review(profile)
                if question is None:
                    return Response(status_code=204)
            else:
                question = game.generate_question(profile.current_level, rng)
            session.active = ActiveQuestion(
                question=question,
                mode=mode,
                issued_monotonic=time.monotonic(),
                issued_at=datetime.now().astimezone().isoformat(timespec="seconds"),
            )
        active = session.active
        q = active.question
        return JSONResponse({
            "question": {
                "id": q.id,
                "level": q.level,
                "operator": q.operator.value,
                "left": q.left,
                "right": q.right,
                "text": q.text,
            },
            "mode": active.mode,
            "deadline_ms": game.QUESTION_TIME_LIMIT_MS,
            "issued_at": active.issued_at,
        })

    @app.post("/api/game/answer")
    async def answer(request: Request, session: Session = Depends(current_session)) -> dict:
        data = await _read_body(request)
        question_id = _need_str(data, "question_id")
        submitted = data.get("answer")
        if submitted is not None and (not isinstance(submitted, int) or isinstance(submitted, bool)):
            raise _bad_request("field 'answer' must be an integer or null")
        elapsed_ms = _need_int(data, "elapsed_ms")
        if elapsed_ms < 0:
            raise _bad_request("field 'elapsed_ms' must be non-negative")

        active = session.active
        if active is None or active.question.id != question_id:
            raise HTTPException(status_code=409, detail="no active question with that id")
        server_elapsed = int((time.monotonic() - active.issued_monotonic) * 1000)
        effective_elapsed = max(elapsed_ms, server_elapsed)
        outcome = game.check_answer(active.question, submitted, effective_elapsed)

        with store.lock(session.username):
            profile = load_profile(session)
            result: dict = {
                "outcome": outcome.value,
                "correct_answer": active.question.answer,
                "mode": active.mode,
            }
            if active.mode == "review":
                profile = game.resolve_review(profile, active.question, outcome)
            else:
                profile = game.append_result(profile, outcome)
                if outcome is not game.Outcome.CORRECT:
                    profile = game.record_mistake(profile, active.question)
                record = profile.performance[-1]
                unit = record.units[-1]
                result["unit"] = {
                    "unit_index": unit.unit_index,
                    "answered": len(unit.results),
                    "correct": unit.correct_count,
                }
                result["unit_complete"] = unit.complete
                if unit.complete:
                    result["unit_accuracy"] = unit.accuracy
                    result["level_up_eligible"] = game.level_up_eligible(record)
                    result["adaptation"] = actions_to_json(
                        adaptation_actions(profile, session.orientation))
            store.save(profile)
        session.active = None
        result["review_queue_size"] = len(profile.review_queue)
        return result

    @app.post("/api/level/choice")
    async def level_choice(request: Request, session: Session = Depends(current_session)) -> dict:
        data = await _read_body(request)
        accept = _need_bool(data, "accept")
        with store.lock(session.username):
            profile = load_profile(session)
            try:
                profile = game.apply_level_choice(profile, accept)
            except NotEligibleError:
                raise HTTPException(status_code=409, detail="no level-up is on offer") from None
            store.save(profile)
        return {"level": profile.current_level}

    @app.post("/api/settings")
    async def settings(request: Request, session: Session = Depends(current_session)) -> dict:
        data = await _read_body(request)
        preferences = UserPreferences(
            font_color=_parse_color(data, "font_color"),
            background_color=_parse_color(data, "background_color"),
            button_font_color=_parse_color(data, "button_font_color"),
            button_background_color=_parse_color(data, "button_background_color"),
            time_based_background=_need_bool(data, "time_based_background"),
        )
        with store.lock(session.username):
            profile = load_profile(session)
            store.save(profile.with_preferences(preferences))
        return {"preferences": preferences_to_json(preferences)}

    @app.get("/api/progress")
    def progress(session: Session = Depends(current_session)) -> dict:
        profile = load_profile(session)
        return {
            "username": profile.username,
            "age": profile.age,
            "current_level": profile.current_level,
            "first_time": profile.first_time,
            "last_unit_accuracy": profile.last_unit_accuracy,
            "levels": [
                {
                    "level": record.level,
                    "complete": record.complete,
                    "total_correct": record.total_correct,
                    "units": [
                        {
                            "unit_index": unit.unit_index,
                            "results": [r.value for r in unit.results],
                            "accuracy": unit.accuracy,
                            "complete": unit.complete,
                        }
                        for unit in record.units
                    ],
                }
                for record in profile.performance
            ],
            "accuracy_history": [u.accuracy for u in profile.completed_units()],
            "review_queue_size": len(profile.review_queue),
        }

    if config.static_dir is not None and config.static_dir.is_dir():
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app
