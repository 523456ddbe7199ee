"""Context acquisition: physical (clock, weather, orientation) and logical
(profile, performance, preferences), assembled into snapshots for the engine.

Acquisition stays separate from use: the engine only ever sees a
ContextSnapshot, never a sensor or a profile store.
"""

from __future__ import annotations

import hashlib
import hmac
import os
import re
import secrets
from dataclasses import dataclass, field, replace
from datetime import datetime
from enum import Enum
from typing import TYPE_CHECKING, Callable, Iterator, Mapping, Protocol

import httpx

from .errors import NegativeAgeError, WeatherUnavailableError
from .model import UNAVAILABLE, Color, ContextSnapshot, ContextValue, parse_hhmm

if TYPE_CHECKING:
    from .game import LevelRecord, Question, UnitRecord


class TimePeriod(Enum):
    DAY = "day"
    SUNSET = "sunset"
    NIGHT = "night"


class WeatherKind(Enum):
    SUNNY = "sunny"
    CLOUDY = "cloudy"
    RAINY = "rainy"
    SNOWY = "snowy"


class Orientation(Enum):
    PORTRAIT = "portrait"
    LANDSCAPE = "landscape"


# Day runs 06:00-17:00 inclusive, sunset 17:01-19:00, night wraps through
# midnight to 05:59; expressed as half-open minute windows so the three
# periods partition all 1440 minutes.
_DAY_START = 6 * 60          # 06:00
_SUNSET_START = 17 * 60 + 1  # 17:01
_NIGHT_START = 19 * 60 + 1   # 19:01


def time_period(minutes: int) -> TimePeriod:
    """Map a minute of the day (0..1439) to its scenery period."""
    if not 0 <= minutes < 24 * 60:
        raise ValueError(f"minute of day out of range: {minutes}")
    if _DAY_START <= minutes < _SUNSET_START:
        return TimePeriod.DAY
    if _SUNSET_START <= minutes < _NIGHT_START:
        return TimePeriod.SUNSET
    return TimePeriod.NIGHT


def assign_level(age: int) -> int:
    """Starting game level for an age: [0,5] -> 1, [6,12] -> 2, >= 13 -> 3."""
    if age < 0:
        raise NegativeAgeError(f"age cannot be negative: {age}")
    if age <= 5:
        return 1
    if age <= 12:
        return 2
    return 3


# ---------------------------------------------------------------------------
# Weather
# ---------------------------------------------------------------------------

class WeatherClient(Protocol):
    def fetch(self, location: str) -> WeatherKind: ...


class FixtureWeatherClient:
    """Weather from a static location table (one `location=kind` per line)."""

    def __init__(self, table: Mapping[str, WeatherKind]):
        self._table = dict(table)

    @classmethod
    def from_file(cls, path: str) -> "FixtureWeatherClient":
        table: dict[str, WeatherKind] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected location=kind")
                location, _, kind = line.partition("=")
                table[location.strip()] = WeatherKind(kind.strip())
        return cls(table)

    def fetch(self, location: str) -> WeatherKind:
        try:
            return self._table[location]
        except KeyError:
            raise WeatherUnavailableError(f"no fixture entry for location {location!r}") from None


class HttpWeatherClient:
    """Weather from a URL template; the first known kind token in the
    response body wins."""

    def __init__(self, url_template: str, timeout: float = 2.0):
        self._url_template = url_template
        self._timeout = timeout

    def fetch(self, location: str) -> WeatherKind:
        url = self._url_template.format(location=location)
        try:
            response = httpx.get(url, timeout=self._timeout)
            response.raise_for_status()
            body = response.text
        except Exception as exc:
            raise WeatherUnavailableError(f"weather request failed: {exc}") from exc
        tokens = {k.value for k in WeatherKind}
        for word in re.findall(r"[a-z]+", body.lower()):
            if word in tokens:
                return WeatherKind(word)
        raise WeatherUnavailableError(f"no weather token in response from {url}")


class NullWeatherClient:
    """Always unavailable; the no-configuration default."""

    def fetch(self, location: str) -> WeatherKind:
        raise WeatherUnavailableError("no weather backend configured")


def weather_client_from_env(env: Mapping[str, str] | None = None) -> WeatherClient:
    env = os.environ if env is None else env
    url = env.get("ADAPTREE_WEATHER_URL")
    if url:
        return HttpWeatherClient(url)
    fixture = env.get("ADAPTREE_WEATHER_FIXTURE")
    if fixture:
        return FixtureWeatherClient.from_file(fixture)
    return NullWeatherClient()


def fetch_weather(client: WeatherClient, location: str) -> WeatherKind:
    """Ask the configured backend; raises WeatherUnavailableError on failure.

    Callers must degrade (absent weather means a null weather icon), never
    abort adaptation because a sensor is down.
    """
    return client.fetch(location)


# ---------------------------------------------------------------------------
# Clock
# ---------------------------------------------------------------------------

Clock = Callable[[], datetime]


def system_clock() -> datetime:
    return datetime.now().astimezone()


def fixed_clock(hh_mm: str) -> Clock:
    """A clock stuck at HH:MM today; used by tests and ADAPTREE_CLOCK."""
    minutes = parse_hhmm(hh_mm)

    def read() -> datetime:
        now = datetime.now().astimezone()
        return now.replace(hour=minutes // 60, minute=minutes % 60, second=0, microsecond=0)

    return read


def clock_from_env(env: Mapping[str, str] | None = None) -> Clock:
    env = os.environ if env is None else env
    spec = env.get("ADAPTREE_CLOCK", "")
    if spec.startswith("fixed:"):
        return fixed_clock(spec.removeprefix("fixed:"))
    return system_clock


def minute_of_day(moment: datetime) -> int:
    return moment.hour * 60 + moment.minute


# ---------------------------------------------------------------------------
# Passwords
# ---------------------------------------------------------------------------

_PBKDF2_ITERATIONS = 200_000


def hash_password(password: str, iterations: int = _PBKDF2_ITERATIONS) -> str:
    salt = secrets.token_bytes(16)
    digest = hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), salt, iterations)
    return f"pbkdf2_sha256${iterations}${salt.hex()}${digest.hex()}"


def verify_password(password: str, stored: str) -> bool:
    try:
        scheme, iterations, salt_hex, digest_hex = stored.split("$")
        if scheme != "pbkdf2_sha256":
            return False
        digest = hashlib.pbkdf2_hmac(
            "sha256", password.encode("utf-8"), bytes.fromhex(salt_hex), int(iterations))
        return hmac.compare_digest(digest.hex(), digest_hex)
    except (ValueError, TypeError):
        return False


# ---------------------------------------------------------------------------
# Profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UserPreferences:
    """Settings-screen choices; all four colors are concrete, never null."""

    font_color: Color = Color(0, 0, 0)
    background_color: Color = Color(255, 255, 255)
    button_font_color: Color = Color(0, 0, 0)
    button_background_color: Color = Color(255, 255, 255)
    time_based_background: bool = True

    @property
    def background_image_pref(self) -> str:
        return "time_based" if self.time_based_background else "color_style"


@dataclass(frozen=True)
class UserProfile:
    """One registered player: identity, progression history, review queue.

    first_time is derived: a player is first-time until their first standard
    unit completes, which is also exactly when last_unit_accuracy becomes
    meaningful.
    """

    username: str
    password_hash: str
    age: int
    current_level: int
    preferences: UserPreferences = field(default_factory=UserPreferences)
    performance: tuple["LevelRecord", ...] = ()
    review_queue: tuple["Question", ...] = ()

    def __post_init__(self):
        if self.age < 0:
            raise NegativeAgeError(f"age cannot be negative: {self.age}")
        if self.current_level not in (1, 2, 3):
            raise ValueError(f"level must be 1..3: {self.current_level}")

    def completed_units(self) -> Iterator["UnitRecord"]:
        for record in self.performance:
            for unit in record.units:
                if unit.complete:
                    yield unit

    @property
    def first_time(self) -> bool:
        return next(self.completed_units(), None) is None

    @property
    def last_unit_accuracy(self) -> int:
        latest = None
        for unit in self.completed_units():
            latest = unit
        return latest.accuracy if latest is not None else 0

    def with_preferences(self, preferences: UserPreferences) -> "UserProfile":
        return replace(self, preferences=preferences)


def new_profile(username: str, password: str, age: int) -> UserProfile:
    """Register a player; the starting level comes from the age bands."""
    return UserProfile(
        username=username,
        password_hash=hash_password(password),
        age=age,
        current_level=assign_level(age),
    )


# ---------------------------------------------------------------------------
# Snapshot assembly
# ---------------------------------------------------------------------------

def resolve_snapshot(
    profile: UserProfile,
    clock: Clock,
    weather: WeatherClient,
    orientation: Orientation,
    location: str = "local",
) -> ContextSnapshot:
    """Gather every context variable the bundled rule schema declares.

    Weather failure degrades to the unavailable marker (trees fall through to
    their default branch) instead of aborting. First-time players get
    last_unit_accuracy 0, which no theme rule can reach before first_time
    flips false.
    """
    try:
        local_weather: ContextValue = fetch_weather(weather, location).value
    except WeatherUnavailableError:
        local_weather = UNAVAILABLE
    values: dict[str, ContextValue] = {
        "first_time": profile.first_time,
        "last_unit_accuracy": profile.last_unit_accuracy,
        "device_orientation": orientation.value,
        "local_time": minute_of_day(clock()),
        "local_weather": local_weather,
        "time_based_background": profile.preferences.time_based_background,
    }
    return ContextSnapshot(values)
