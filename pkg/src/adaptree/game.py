"""The arithmetic game: question generation, answer checking, unit/level
bookkeeping, accuracy grouping, level-up choices, and the review queue.

Everything here is a pure function over explicit state; the service layer
owns mutation and persistence.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from enum import Enum

from .context import UserProfile
from .errors import AccuracyRangeError, NotEligibleError

QUESTION_TIME_LIMIT_MS = 10_000
QUESTIONS_PER_UNIT = 10
UNITS_PER_LEVEL = 10
LEVEL_UP_CORRECT_THRESHOLD = 90
MAX_LEVEL = 3


class Operator(Enum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"

    @property
    def symbol(self) -> str:
        return {"add": "+", "sub": "-", "mul": "*", "div": "/"}[self.value]


class Outcome(Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"
    TIMEOUT = "timeout"


_OPERATORS_BY_LEVEL = {
    1: (Operator.ADD, Operator.SUB),
    2: (Operator.ADD, Operator.SUB, Operator.MUL, Operator.DIV),
    3: (Operator.ADD, Operator.SUB, Operator.MUL, Operator.DIV),
}


@dataclass(frozen=True)
class Question:
    id: str
    level: int
    operator: Operator
    left: int
    right: int
    answer: int

    @property
    def text(self) -> str:
        right = f"({self.right})" if self.right < 0 else str(self.right)
        return f"{self.left} {self.operator.symbol} {right}"


def generate_question(level: int, rng: random.Random, operator: Operator | None = None) -> Question:
    """Draw a random question for the level.

    The operator is uniform over those available at the level (level 1 has no
    multiplication or division). Division never draws operands and rejects:
    it picks divisor and quotient, then forms the dividend, so the quotient
    is an integer by construction and the dividend stays inside the level's
    operand range.
    """
    available = _OPERATORS_BY_LEVEL.get(level)
    if available is None:
        raise ValueError(f"level must be 1..3: {level}")
    op = operator if operator is not None else rng.choice(available)
    if op not in available:
        raise ValueError(f"operator {op.value} not available at level {level}")

    if op is Operator.ADD:
        bound = {1: 10, 2: 50, 3: 100}[level]
        lo = -bound if level == 3 else 0
        left, right = rng.randint(lo, bound), rng.randint(lo, bound)
        answer = left + right
    elif op is Operator.SUB:
        bound = {1: 10, 2: 50, 3: 100}[level]
        if level == 3:
            left, right = rng.randint(-100, 100), rng.randint(-100, 100)
        else:
            # minuend strictly greater than subtrahend
            left = rng.randint(1, bound)
            right = rng.randint(0, left - 1)
        answer = left - right
    elif op is Operator.MUL:
        lo, hi = (0, 10) if level == 2 else (-10, 10)
        left, right = rng.randint(lo, hi), rng.randint(lo, hi)
        answer = left * right
    else:
        if level == 2:
            right = rng.randint(1, 10)
            answer = rng.randint(0, 10 // right)
        else:
            right = 0
            while right == 0:
                right = rng.randint(-100, 100)
            magnitude = 100 // abs(right)
            answer = rng.randint(-magnitude, magnitude)
        left = right * answer

    return Question(
        id=f"q{rng.getrandbits(64):016x}",
        level=level,
        operator=op,
        left=left,
        right=right,
        answer=answer,
    )


def check_answer(question: Question, submitted: int | None, elapsed_ms: int) -> Outcome:
    """Timeout beats everything: over 10 s (or no answer at all) is a miss."""
    if elapsed_ms > QUESTION_TIME_LIMIT_MS or submitted is None:
        return Outcome.TIMEOUT
    return Outcome.CORRECT if submitted == question.answer else Outcome.INCORRECT


# ---------------------------------------------------------------------------
# Units and levels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnitRecord:
    """Ten questions of one unit; accuracy is 10 points per correct answer."""

    unit_index: int
    results: tuple[Outcome, ...] = ()

    def __post_init__(self):
        if not 1 <= self.unit_index <= UNITS_PER_LEVEL:
            raise ValueError(f"unit index must be 1..{UNITS_PER_LEVEL}: {self.unit_index}")
        if len(self.results) > QUESTIONS_PER_UNIT:
            raise ValueError("a unit has at most 10 results")

    @property
    def complete(self) -> bool:
        return len(self.results) == QUESTIONS_PER_UNIT

    @property
    def correct_count(self) -> int:
        return sum(1 for r in self.results if r is Outcome.CORRECT)

    @property
    def accuracy(self) -> int:
        return 10 * self.correct_count


@dataclass(frozen=True)
class LevelRecord:
    """One pass through a level: up to ten units."""

    level: int
    units: tuple[UnitRecord, ...] = ()

    def __post_init__(self):
        if len(self.units) > UNITS_PER_LEVEL:
            raise ValueError("a level pass has at most 10 units")

    @property
    def complete(self) -> bool:
        return len(self.units) == UNITS_PER_LEVEL and all(u.complete for u in self.units)

    @property
    def total_correct(self) -> int:
        return sum(u.correct_count for u in self.units)

    def last_completed_unit(self) -> UnitRecord | None:
        for unit in reversed(self.units):
            if unit.complete:
                return unit
        return None


def accuracy_group(pct: int) -> str:
    """Theme group for a unit accuracy: the game-side twin of the theme tree.

    [0, 60] -> default, (60, 90) -> preferred_color, [90, 100] -> weather_time.
    """
    if not 0 <= pct <= 100:
        raise AccuracyRangeError(f"accuracy must be in [0, 100]: {pct}")
    if pct <= 60:
        return "default"
    if pct < 90:
        return "preferred_color"
    return "weather_time"


def level_up_eligible(record: LevelRecord) -> bool:
    """All-correct last unit, or at least 90 correct across a finished level."""
    last = record.last_completed_unit()
    if last is not None and last.correct_count == QUESTIONS_PER_UNIT:
        return True
    return record.complete and record.total_correct >= LEVEL_UP_CORRECT_THRESHOLD


def append_result(profile: UserProfile, outcome: Outcome) -> UserProfile:
    """Record one standard-mode outcome, opening units/level passes as needed."""
    performance = list(profile.performance)
    if (
        not performance
        or performance[-1].complete
        or performance[-1].level != profile.current_level
    ):
        performance.append(LevelRecord(level=profile.current_level))
    record = performance[-1]
    units = list(record.units)
    if not units or units[-1].complete:
        units.append(UnitRecord(unit_index=len(units) + 1))
    units[-1] = replace(units[-1], results=units[-1].results + (outcome,))
    performance[-1] = replace(record, units=tuple(units))
    return replace(profile, performance=tuple(performance))


def apply_level_choice(profile: UserProfile, accept: bool) -> UserProfile:
    """Resolve an offered level-up; only valid while eligibility holds.

    Accepting starts a fresh level pass one level up (level 3 is a ceiling);
    declining keeps the level, and the next question simply starts the next
    unit (or a fresh pass when the current one is complete).
    """
    record = profile.performance[-1] if profile.performance else LevelRecord(profile.current_level)
    if not level_up_eligible(record):
        raise NotEligibleError("no level-up is on offer")
    if accept:
        new_level = min(profile.current_level + 1, MAX_LEVEL)
        return replace(
            profile,
            current_level=new_level,
            performance=profile.performance + (LevelRecord(level=new_level),),
        )
    if record.complete:
        return replace(
            profile,
            performance=profile.performance + (LevelRecord(level=profile.current_level),),
        )
    return profile


# ---------------------------------------------------------------------------
# Review queue
# ---------------------------------------------------------------------------

def record_mistake(profile: UserProfile, question: Question) -> UserProfile:
    """Queue a missed standard-mode question for review; one entry per id."""
    if any(q.id == question.id for q in profile.review_queue):
        return profile
    return replace(profile, review_queue=profile.review_queue + (question,))


def next_review(profile: UserProfile) -> Question | None:
    """Oldest queued question, or None when the queue is exhausted."""
    return profile.review_queue[0] if profile.review_queue else None


def resolve_review(profile: UserProfile, question: Question, outcome: Outcome) -> UserProfile:
    """Correct answers retire the question; misses rotate it to the back."""
    queue = tuple(q for q in profile.review_queue if q.id != question.id)
    if outcome is not Outcome.CORRECT:
        queue = queue + (question,)
    return replace(profile, review_queue=queue)
