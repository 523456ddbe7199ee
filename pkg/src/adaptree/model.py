"""Feature/action/context algebra: the value types every other module builds on.

UI features are an open identifier space (whatever rule files declare), action
sets assign at most one value per feature, and context variables carry typed,
finitely enumerable domains.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping, Union

from .errors import ConflictingAssignmentError, EmptyFeatureSetError

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
COLOR_RE = re.compile(r"#[0-9a-fA-F]{6}")

MINUTES_PER_DAY = 24 * 60


def parse_hhmm(text: str) -> int:
    """Parse "HH:MM" into minutes since midnight."""
    m = re.fullmatch(r"(\d{1,2}):(\d{2})", text)
    if not m:
        raise ValueError(f"not a HH:MM time: {text!r}")
    hour, minute = int(m.group(1)), int(m.group(2))
    if hour > 23 or minute > 59:
        raise ValueError(f"time out of range: {text!r}")
    return hour * 60 + minute


def format_minutes(minutes: int) -> str:
    return f"{minutes // 60:02d}:{minutes % 60:02d}"


class _Null:
    """Explicit "assigned null" action value, distinct from "not adapted".

    A feature absent from an action set was not adapted; a feature assigned
    NULL was adapted to nothing (icon hidden, image cleared).
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NULL"

    def __bool__(self) -> bool:
        return False


class _Unavailable:
    """Snapshot marker for context that could not be acquired.

    Matches no guard except a default branch, so trees degrade instead of
    erroring when e.g. the weather backend is down.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNAVAILABLE"

    def __bool__(self) -> bool:
        return False


NULL = _Null()
UNAVAILABLE = _Unavailable()


@dataclass(frozen=True, order=True)
class Color:
    """RGB color; "black" and "white" are aliases for #000000/#FFFFFF."""

    r: int
    g: int
    b: int

    NAMED = {"black": (0, 0, 0), "white": (255, 255, 255)}

    def __post_init__(self):
        for channel in (self.r, self.g, self.b):
            if not 0 <= channel <= 255:
                raise ValueError(f"color channel out of range: {channel}")

    @classmethod
    def parse(cls, text: str) -> "Color":
        """Accepts "#RRGGBB" or a named alias (black, white)."""
        if text in cls.NAMED:
            return cls(*cls.NAMED[text])
        if not COLOR_RE.fullmatch(text):
            raise ValueError(f"not a color: {text!r}")
        return cls(int(text[1:3], 16), int(text[3:5], 16), int(text[5:7], 16))

    def __str__(self) -> str:
        return f"#{self.r:02X}{self.g:02X}{self.b:02X}"


# A value assigned to a UI feature: color, enum token, integer, boolean,
# free text, or the explicit null marker.
ActionValue = Union[Color, str, int, bool, _Null]

# A concrete context value: bool, int (plain or minutes-of-day), enum token,
# or the unavailable marker.
ContextValue = Union[bool, int, str, _Unavailable]


def same_value(a: object, b: object) -> bool:
    """Equality that never conflates bools with ints (True != 1 here)."""
    if isinstance(a, bool) != isinstance(b, bool):
        return False
    return a == b


def format_action_value(value: object) -> str:
    """Render an action value the way the rule DSL spells it."""
    if value is NULL:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Color):
        return str(value)
    return str(value)


@dataclass(frozen=True, order=True)
class UIFeature:
    """Smallest atomic unit of adaptable UI content, named by identifier."""

    name: str

    def __post_init__(self):
        if not IDENT_RE.fullmatch(self.name):
            raise ValueError(f"feature name must be an identifier: {self.name!r}")


@dataclass(frozen=True)
class FeatureSet:
    """Non-empty set of UI features."""

    features: frozenset[UIFeature]

    def __post_init__(self):
        if not self.features:
            raise EmptyFeatureSetError("a feature set cannot be empty")

    @classmethod
    def of(cls, *names: str) -> "FeatureSet":
        return cls(frozenset(UIFeature(n) for n in names))

    @property
    def names(self) -> frozenset[str]:
        return frozenset(f.name for f in self.features)

    def __contains__(self, item: object) -> bool:
        if isinstance(item, str):
            return item in self.names
        return item in self.features

    def __iter__(self) -> Iterator[UIFeature]:
        return iter(sorted(self.features))

    def __len__(self) -> int:
        return len(self.features)


@dataclass(frozen=True)
class ActionSet:
    """Assignment of values to UI features; at most one value per feature."""

    assignments: Mapping[str, ActionValue] = field(default_factory=dict)

    def __post_init__(self):
        # freeze to a plain dict copy so callers cannot mutate us afterwards
        object.__setattr__(self, "assignments", dict(self.assignments))

    def get(self, feature: str, default: object = None) -> object:
        return self.assignments.get(feature, default)

    def items(self) -> Iterable[tuple[str, ActionValue]]:
        return self.assignments.items()

    def feature_names(self) -> frozenset[str]:
        return frozenset(self.assignments)

    def __contains__(self, feature: str) -> bool:
        return feature in self.assignments

    def __getitem__(self, feature: str) -> ActionValue:
        return self.assignments[feature]

    def __len__(self) -> int:
        return len(self.assignments)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ActionSet):
            return NotImplemented
        if self.feature_names() != other.feature_names():
            return False
        return all(same_value(v, other.assignments[k]) for k, v in self.assignments.items())

    def __hash__(self) -> int:
        return hash(frozenset(self.assignments))

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v!r}" for k, v in sorted(self.assignments.items()))
        return f"ActionSet({inner})"


EMPTY_ACTIONS = ActionSet({})


def union_actions(a: ActionSet, b: ActionSet) -> ActionSet:
    """Combine two action sets; the empty set is the identity.

    Raises ConflictingAssignmentError when the two sets assign different
    values to the same feature (equal re-assignment is tolerated).
    """
    merged: dict[str, ActionValue] = dict(a.assignments)
    for feature, value in b.items():
        if feature in merged and not same_value(merged[feature], value):
            raise ConflictingAssignmentError(feature, merged[feature], value)
        merged[feature] = value
    return ActionSet(merged)


def are_disjoint(sets: Iterable[FeatureSet]) -> bool:
    """True iff the feature sets are pairwise intersection-free."""
    seen: set[str] = set()
    for fs in sets:
        names = fs.names
        if seen & names:
            return False
        seen |= names
    return True


@dataclass(frozen=True)
class PartitionResult:
    """Outcome of a partition check; truthy iff the partition is valid."""

    ok: bool
    missing: frozenset[str] = frozenset()   # in whole, covered by no part
    extra: frozenset[str] = frozenset()     # in some part, not in whole
    shared: frozenset[str] = frozenset()    # in more than one part

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return "valid partition"
        parts = []
        if self.shared:
            parts.append(f"shared: {', '.join(sorted(self.shared))}")
        if self.missing:
            parts.append(f"uncovered: {', '.join(sorted(self.missing))}")
        if self.extra:
            parts.append(f"extra: {', '.join(sorted(self.extra))}")
        return "; ".join(parts)


def validate_partition(whole: FeatureSet, parts: list[FeatureSet]) -> PartitionResult:
    """Check that parts are pairwise disjoint and union exactly to whole."""
    if not parts:
        raise ValueError("a partition needs at least one part")
    counts: dict[str, int] = {}
    for fs in parts:
        for name in fs.names:
            counts[name] = counts.get(name, 0) + 1
    covered = frozenset(counts)
    shared = frozenset(n for n, c in counts.items() if c > 1)
    missing = whole.names - covered
    extra = covered - whole.names
    ok = not (shared or missing or extra)
    return PartitionResult(ok, frozenset(missing), frozenset(extra), shared)


# ---------------------------------------------------------------------------
# Context variables, domains, snapshots
# ---------------------------------------------------------------------------

class ContextCategory(Enum):
    PHYSICAL = "physical"
    LOGICAL = "logical"


@dataclass(frozen=True)
class BoolDomain:
    def contains(self, value: object) -> bool:
        return isinstance(value, bool)

    def values(self) -> Iterator[ContextValue]:
        yield False
        yield True

    def size(self) -> int:
        return 2

    def __str__(self) -> str:
        return "bool"


@dataclass(frozen=True)
class EnumDomain:
    tokens: tuple[str, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("enum domain needs at least one value")
        if len(set(self.tokens)) != len(self.tokens):
            raise ValueError("enum domain values must be unique")

    def contains(self, value: object) -> bool:
        return isinstance(value, str) and value in self.tokens

    def values(self) -> Iterator[ContextValue]:
        yield from self.tokens

    def size(self) -> int:
        return len(self.tokens)

    def __str__(self) -> str:
        return f"enum({', '.join(self.tokens)})"


@dataclass(frozen=True)
class IntRangeDomain:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"integer range has lo > hi: [{self.lo}, {self.hi}]")

    def contains(self, value: object) -> bool:
        return isinstance(value, int) and not isinstance(value, bool) and self.lo <= value <= self.hi

    def values(self) -> Iterator[ContextValue]:
        yield from range(self.lo, self.hi + 1)

    def size(self) -> int:
        return self.hi - self.lo + 1

    def __str__(self) -> str:
        return f"int[{self.lo}, {self.hi}]"


@dataclass(frozen=True)
class TimeDomain:
    """Time of day at minute granularity, values 0..1439."""

    def contains(self, value: object) -> bool:
        return isinstance(value, int) and not isinstance(value, bool) and 0 <= value < MINUTES_PER_DAY

    def values(self) -> Iterator[ContextValue]:
        yield from range(MINUTES_PER_DAY)

    def size(self) -> int:
        return MINUTES_PER_DAY

    def __str__(self) -> str:
        return "time"


Domain = Union[BoolDomain, EnumDomain, IntRangeDomain, TimeDomain]


@dataclass(frozen=True)
class ContextVariable:
    name: str
    domain: Domain
    category: ContextCategory = ContextCategory.LOGICAL

    def __post_init__(self):
        if not IDENT_RE.fullmatch(self.name):
            raise ValueError(f"context variable name must be an identifier: {self.name!r}")


@dataclass(frozen=True)
class ContextSchema:
    """Declared context variables, in declaration order."""

    variables: tuple[ContextVariable, ...]

    def __post_init__(self):
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("duplicate context variable names in schema")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def get(self, name: str) -> ContextVariable | None:
        for v in self.variables:
            if v.name == name:
                return v
        return None

    def __iter__(self) -> Iterator[ContextVariable]:
        return iter(self.variables)

    def __len__(self) -> int:
        return len(self.variables)

    def check(self, snapshot: "ContextSnapshot") -> list[str]:
        """Problems with a snapshot against this schema; empty means valid.

        The unavailable marker is accepted for any variable: it records that
        acquisition was attempted and failed, which is schema-conforming.
        """
        problems = []
        for var in self.variables:
            if var.name not in snapshot:
                problems.append(f"missing value for {var.name}")
                continue
            value = snapshot[var.name]
            if value is UNAVAILABLE:
                continue
            if not var.domain.contains(value):
                problems.append(f"value {value!r} outside domain {var.domain} of {var.name}")
        for name in snapshot.names() - set(self.names):
            problems.append(f"undeclared variable {name}")
        return problems


@dataclass(frozen=True)
class ContextSnapshot:
    """Concrete context values at one evaluation instant."""

    values: Mapping[str, ContextValue]

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))

    def get(self, name: str, default: object = None) -> object:
        return self.values.get(name, default)

    def names(self) -> set[str]:
        return set(self.values)

    def with_values(self, extra: Mapping[str, ContextValue]) -> "ContextSnapshot":
        merged = dict(self.values)
        merged.update(extra)
        return ContextSnapshot(merged)

    def __contains__(self, name: str) -> bool:
        return name in self.values

    def __getitem__(self, name: str) -> ContextValue:
        return self.values[name]

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v!r}" for k, v in sorted(self.values.items()))
        return f"ContextSnapshot({inner})"
