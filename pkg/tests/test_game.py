"""Question generation, answer checking, progression, and review mode."""

import random

import pytest

from adaptree import AccuracyRangeError, ContextSnapshot, NotEligibleError, evaluate
from adaptree.context import new_profile
from adaptree.game import (
    LevelRecord,
    Operator,
    Outcome,
    Question,
    UnitRecord,
    accuracy_group,
    append_result,
    apply_level_choice,
    check_answer,
    generate_question,
    level_up_eligible,
    next_review,
    record_mistake,
    resolve_review,
)


def table1_violations(q: Question) -> list[str]:
    """Independent constraint checker, re-coded straight from the level table."""
    problems = []
    ranges = {
        (1, Operator.ADD): (0, 10), (1, Operator.SUB): (0, 10),
        (2, Operator.ADD): (0, 50), (2, Operator.SUB): (0, 50),
        (2, Operator.MUL): (0, 10), (2, Operator.DIV): (0, 10),
        (3, Operator.ADD): (-100, 100), (3, Operator.SUB): (-100, 100),
        (3, Operator.MUL): (-10, 10), (3, Operator.DIV): (-100, 100),
    }
    if (q.level, q.operator) not in ranges:
        return [f"operator {q.operator.value} not available at level {q.level}"]
    lo, hi = ranges[(q.level, q.operator)]
    if not (lo <= q.left <= hi and lo <= q.right <= hi):
        problems.append(f"operands outside [{lo}, {hi}]: {q.left}, {q.right}")
    if q.operator is Operator.SUB and q.level in (1, 2) and not q.left > q.right:
        problems.append("minuend must exceed subtrahend")
    if q.operator is Operator.DIV:
        if q.right == 0:
            problems.append("division by zero")
        elif q.left % q.right != 0:
            problems.append("quotient is not an integer")
        if q.level == 2 and not 1 <= q.right <= 10:
            problems.append("level-2 divisor outside [1, 10]")
    expected = {
        Operator.ADD: q.left + q.right,
        Operator.SUB: q.left - q.right,
        Operator.MUL: q.left * q.right,
        Operator.DIV: q.left // q.right if q.right else 0,
    }[q.operator]
    if q.answer != expected:
        problems.append(f"answer {q.answer} != {expected}")
    return problems


class TestGeneration:
    def test_level_one_never_multiplies_or_divides(self):
        rng = random.Random(42)
        for _ in range(2000):
            q = generate_question(1, rng)
            assert q.operator in (Operator.ADD, Operator.SUB)
            assert table1_violations(q) == []

    @pytest.mark.parametrize("level,operator", [
        (1, Operator.ADD), (1, Operator.SUB),
        (2, Operator.ADD), (2, Operator.SUB), (2, Operator.MUL), (2, Operator.DIV),
        (3, Operator.ADD), (3, Operator.SUB), (3, Operator.MUL), (3, Operator.DIV),
    ])
    def test_constraints_hold_per_operator(self, level, operator):
        rng = random.Random(7)
        for _ in range(1000):
            assert table1_violations(generate_question(level, rng, operator)) == []

    def test_unavailable_operator_rejected(self):
        with pytest.raises(ValueError):
            generate_question(1, random.Random(0), Operator.DIV)
        with pytest.raises(ValueError):
            generate_question(4, random.Random(0))

    def test_seeded_generation_is_reproducible(self):
        a = [generate_question(3, random.Random(5)) for _ in range(1)][0]
        b = [generate_question(3, random.Random(5)) for _ in range(1)][0]
        assert a == b

    def test_question_text(self):
        q = Question("q1", 3, Operator.SUB, 5, -3, 8)
        assert q.text == "5 - (-3)"


class TestCheckAnswer:
    def test_correct(self):
        q = Question("q", 1, Operator.ADD, 3, 4, 7)
        assert check_answer(q, 7, 5000) is Outcome.CORRECT

    def test_incorrect(self):
        q = Question("q", 1, Operator.ADD, 3, 4, 7)
        assert check_answer(q, 8, 5000) is Outcome.INCORRECT

    def test_timeout_beats_correct_answer(self):
        q = Question("q", 1, Operator.ADD, 3, 4, 7)
        assert check_answer(q, 7, 10001) is Outcome.TIMEOUT

    def test_exactly_ten_seconds_still_counts(self):
        q = Question("q", 1, Operator.ADD, 3, 4, 7)
        assert check_answer(q, 7, 10000) is Outcome.CORRECT

    def test_absent_answer_is_timeout(self):
        q = Question("q", 1, Operator.ADD, 3, 4, 7)
        assert check_answer(q, None, 100) is Outcome.TIMEOUT


class TestAccuracyGroups:
    @pytest.mark.parametrize("pct,group", [
        (0, "default"), (60, "default"),
        (70, "preferred_color"), (80, "preferred_color"),
        (90, "weather_time"), (100, "weather_time"),
    ])
    def test_boundaries(self, pct, group):
        assert accuracy_group(pct) == group

    def test_out_of_range(self):
        with pytest.raises(AccuracyRangeError):
            accuracy_group(101)
        with pytest.raises(AccuracyRangeError):
            accuracy_group(-10)

    def test_agrees_with_theme_tree(self, theme_doc):
        tree = theme_doc.tree("theme")
        for pct in range(0, 101, 10):
            actions = evaluate(tree, ContextSnapshot(
                {"first_time": False, "last_unit_accuracy": pct}))
            assert actions["theme"] == accuracy_group(pct), f"disagreement at {pct}"


def unit(*outcomes: Outcome, index: int = 1) -> UnitRecord:
    return UnitRecord(index, tuple(outcomes))


def perfect_unit(index: int = 1) -> UnitRecord:
    return unit(*[Outcome.CORRECT] * 10, index=index)


def unit_with_correct(n: int, index: int = 1) -> UnitRecord:
    results = [Outcome.CORRECT] * n + [Outcome.INCORRECT] * (10 - n)
    return unit(*results, index=index)


class TestLevelUp:
    def test_perfect_last_unit_is_enough(self):
        record = LevelRecord(2, (unit_with_correct(5, 1), perfect_unit(2)))
        assert record.total_correct == 15
        assert level_up_eligible(record)

    def test_ninety_across_the_level(self):
        units = tuple(unit_with_correct(9, i) for i in range(1, 11))
        record = LevelRecord(2, units)
        assert record.total_correct == 90
        assert record.units[-1].correct_count == 9
        assert level_up_eligible(record)

    def test_89_of_100_with_imperfect_last_unit_stays(self):
        units = tuple(unit_with_correct(9, i) for i in range(1, 10)) + (unit_with_correct(8, 10),)
        record = LevelRecord(2, units)
        assert record.total_correct == 89
        assert not level_up_eligible(record)

    def test_accept_moves_up_one_level(self):
        profile = new_profile("p", "pw", 8)  # level 2
        profile = append_results(profile, [Outcome.CORRECT] * 10)
        assert level_up_eligible(profile.performance[-1])
        leveled = apply_level_choice(profile, accept=True)
        assert leveled.current_level == 3
        assert leveled.performance[-1].level == 3
        assert leveled.performance[-1].units == ()

    def test_decline_keeps_level(self):
        profile = new_profile("p", "pw", 8)
        profile = append_results(profile, [Outcome.CORRECT] * 10)
        declined = apply_level_choice(profile, accept=False)
        assert declined.current_level == 2
        follow_up = append_result(declined, Outcome.CORRECT)
        assert follow_up.performance[-1].units[-1].unit_index == 2

    def test_level_three_is_a_ceiling(self):
        profile = new_profile("p", "pw", 40)  # level 3
        profile = append_results(profile, [Outcome.CORRECT] * 10)
        assert apply_level_choice(profile, accept=True).current_level == 3

    def test_not_eligible_raises(self):
        profile = new_profile("p", "pw", 8)
        profile = append_results(profile, [Outcome.CORRECT] * 9 + [Outcome.INCORRECT])
        with pytest.raises(NotEligibleError):
            apply_level_choice(profile, accept=True)


def append_results(profile, outcomes):
    for outcome in outcomes:
        profile = append_result(profile, outcome)
    return profile


class TestProgression:
    def test_units_fill_then_roll_over(self):
        profile = new_profile("p", "pw", 8)
        profile = append_results(profile, [Outcome.CORRECT] * 25)
        record = profile.performance[-1]
        assert [u.unit_index for u in record.units] == [1, 2, 3]
        assert record.units[0].complete and record.units[1].complete
        assert len(record.units[2].results) == 5

    def test_completed_level_starts_a_new_pass(self):
        profile = new_profile("p", "pw", 8)
        profile = append_results(profile, [Outcome.INCORRECT] * 100)
        assert profile.performance[-1].complete
        profile = append_result(profile, Outcome.CORRECT)
        assert len(profile.performance) == 2
        assert profile.performance[-1].level == 2

    def test_accuracy_is_multiples_of_ten(self):
        profile = new_profile("p", "pw", 8)
        rng = random.Random(3)
        for _ in range(40):
            profile = append_result(
                profile, Outcome.CORRECT if rng.random() < 0.7 else Outcome.TIMEOUT)
        for u in profile.completed_units():
            assert u.accuracy % 10 == 0


class TestReviewQueue:
    def q(self, ident):
        return Question(ident, 1, Operator.ADD, 1, 2, 3)

    def test_miss_enqueues_and_correct_review_dequeues(self):
        profile = new_profile("p", "pw", 8)
        profile = record_mistake(profile, self.q("a"))
        assert next_review(profile).id == "a"
        profile = resolve_review(profile, self.q("a"), Outcome.CORRECT)
        assert next_review(profile) is None

    def test_empty_queue(self):
        assert next_review(new_profile("p", "pw", 8)) is None

    def test_double_miss_enqueues_once(self):
        profile = new_profile("p", "pw", 8)
        profile = record_mistake(profile, self.q("a"))
        profile = record_mistake(profile, self.q("a"))
        assert len(profile.review_queue) == 1

    def test_failed_review_rotates_to_the_back(self):
        profile = new_profile("p", "pw", 8)
        profile = record_mistake(profile, self.q("a"))
        profile = record_mistake(profile, self.q("b"))
        profile = resolve_review(profile, self.q("a"), Outcome.INCORRECT)
        assert [q.id for q in profile.review_queue] == ["b", "a"]

    def test_queue_never_holds_reviewed_correct_questions(self):
        profile = new_profile("p", "pw", 8)
        rng = random.Random(9)
        live = set()
        for i in range(60):
            ident = f"q{rng.randint(0, 9)}"
            if rng.random() < 0.5:
                profile = record_mistake(profile, self.q(ident))
                live.add(ident)
            elif ident in live and rng.random() < 0.7:
                profile = resolve_review(profile, self.q(ident), Outcome.CORRECT)
                live.discard(ident)
        assert {q.id for q in profile.review_queue} == live
