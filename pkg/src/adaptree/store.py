"""File-backed profile persistence: one JSON record per user, updated by
write-to-temp plus atomic rename so a crash never leaves a torn record."""

from __future__ import annotations

import json
import os
import re
import secrets
import threading
from pathlib import Path

from .context import UserPreferences, UserProfile
from .game import LevelRecord, Operator, Outcome, Question, UnitRecord
from .model import Color

_USERNAME_RE = re.compile(r"[A-Za-z0-9_]{1,32}")


def valid_username(username: str) -> bool:
    return bool(_USERNAME_RE.fullmatch(username))


def profile_to_dict(profile: UserProfile) -> dict:
    return {
        "username": profile.username,
        "password_hash": profile.password_hash,
        "age": profile.age,
        "current_level": profile.current_level,
        "preferences": {
            "font_color": str(profile.preferences.font_color),
            "background_color": str(profile.preferences.background_color),
            "button_font_color": str(profile.preferences.button_font_color),
            "button_background_color": str(profile.preferences.button_background_color),
            "time_based_background": profile.preferences.time_based_background,
        },
        "performance": [
            {
                "level": record.level,
                "units": [
                    {"unit_index": unit.unit_index, "results": [r.value for r in unit.results]}
                    for unit in record.units
                ],
            }
            for record in profile.performance
        ],
        "review_queue": [
            {
                "id": q.id,
                "level": q.level,
                "operator": q.operator.value,
                "left": q.left,
                "right": q.right,
                "answer": q.answer,
            }
            for q in profile.review_queue
        ],
    }


def profile_from_dict(data: dict) -> UserProfile:
    prefs = data["preferences"]
    return UserProfile(
        username=data["username"],
        password_hash=data["password_hash"],
        age=data["age"],
        current_level=data["current_level"],
        preferences=UserPreferences(
            font_color=Color.parse(prefs["font_color"]),
            background_color=Color.parse(prefs["background_color"]),
            button_font_color=Color.parse(prefs["button_font_color"]),
            button_background_color=Color.parse(prefs["button_background_color"]),
            time_based_background=prefs["time_based_background"],
        ),
        performance=tuple(
            LevelRecord(
                level=record["level"],
                units=tuple(
                    UnitRecord(
                        unit_index=unit["unit_index"],
                        results=tuple(Outcome(r) for r in unit["results"]),
                    )
                    for unit in record["units"]
                ),
            )
            for record in data["performance"]
        ),
        review_queue=tuple(
            Question(
                id=q["id"],
                level=q["level"],
                operator=Operator(q["operator"]),
                left=q["left"],
                right=q["right"],
                answer=q["answer"],
            )
            for q in data["review_queue"]
        ),
    )


class ProfileStore:
    """Directory of per-user JSON records with per-user write locks."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _path(self, username: str) -> Path:
        if not valid_username(username):
            raise ValueError(f"invalid username: {username!r}")
        return self.directory / f"{username}.json"

    def lock(self, username: str) -> threading.Lock:
        with self._locks_guard:
            if username not in self._locks:
                self._locks[username] = threading.Lock()
            return self._locks[username]

    def exists(self, username: str) -> bool:
        return self._path(username).exists()

    def load(self, username: str) -> UserProfile | None:
        path = self._path(username)
        if not path.exists():
            return None
        with open(path, encoding="utf-8") as fh:
            return profile_from_dict(json.load(fh))

    def save(self, profile: UserProfile) -> None:
        path = self._path(profile.username)
        payload = json.dumps(profile_to_dict(profile), indent=2)
        tmp = path.with_name(f".{path.name}.{os.getpid()}.{secrets.token_hex(4)}.tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)

    def usernames(self) -> list[str]:
        return sorted(p.stem for p in self.directory.glob("*.json"))
