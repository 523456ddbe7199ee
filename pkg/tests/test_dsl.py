"""Parser, diagnostics, and the canonical serializer."""

import random

import pytest
from hypothesis import given, settings, strategies as st

from adaptree import (
    Color,
    RuleParseError,
    Severity,
    bundled_rules_text,
    parse,
    serialize,
    try_parse,
)
from adaptree.tree import EqualsGuard, TimeWindowGuard

from conftest import random_document

BUNDLED = [
    "arith_game.atree",
    "theme.atree",
    "battery_full.atree",
    "battery_parts_a.atree",
    "battery_parts_b.atree",
    "battery_parts_c.atree",
]


def errors_of(source):
    doc, diagnostics = try_parse(source)
    assert doc is None
    return [d for d in diagnostics if d.severity is Severity.ERROR]


class TestParse:
    def test_bundled_theme_file(self):
        doc = parse(bundled_rules_text("theme.atree"))
        assert [(t.name, t.priority) for t in doc.trees] == [
            ("theme", 1), ("background_image", 2)]
        assert doc.trees[1].guard is not None
        assert doc.trees[1].guard.feature == "theme"
        assert doc.trees[1].guard.value == "weather_time"

    def test_empty_source(self):
        errors = errors_of("")
        assert any("expected declaration" in e.message for e in errors)

    def test_whitespace_and_comments_only(self):
        errors = errors_of("# nothing here\n\n   \n")
        assert any("expected declaration" in e.message for e in errors)

    def test_undeclared_variable_reference(self):
        source = (
            "feature theme\n"
            "tree t priority 1 {\n"
            "  cond last_unit_accuracy {\n"
            "    case [0, 50] -> action { theme = a }\n"
            "    default -> action { theme = b }\n"
            "  }\n"
            "}\n"
        )
        errors = errors_of(source)
        undeclared = [e for e in errors if e.code == "undeclared-identifier"]
        assert len(undeclared) == 1
        assert undeclared[0].line == 3
        assert undeclared[0].column == source.splitlines()[2].index("last_unit_accuracy") + 1

    def test_undeclared_feature_in_action(self):
        source = "context c: bool\ntree t priority 1 { cond c { case true -> action { x = 1 } default -> action { x = 2 } } }\n"
        assert any(e.code == "undeclared-identifier" for e in errors_of(source))

    def test_duplicate_names(self):
        assert any(e.code == "duplicate-name" for e in errors_of("feature f\nfeature f\n"))
        assert any(e.code == "duplicate-name"
                   for e in errors_of("context c: bool\ncontext c: time\n"))

    def test_guard_type_mismatches(self):
        source = (
            "context flag: bool\n"
            "context kind: enum(a, b)\n"
            "context pct: int[0, 100]\n"
            "feature f\n"
            "tree t1 priority 1 { cond flag { case [0, 1] -> action { f = 1 } default -> action { f = 2 } } }\n"
            "tree t2 priority 2 { cond kind { case c -> action { f = 1 } default -> action { f = 2 } } }\n"
            "tree t3 priority 3 { cond pct { case 5 -> action { f = 1 } default -> action { f = 2 } } }\n"
            "tree t4 priority 4 { cond pct { case 06:00..07:00 -> action { f = 1 } default -> action { f = 2 } } }\n"
        )
        errors = errors_of(source)
        assert sum(1 for e in errors if e.code == "type-mismatch") == 4

    def test_single_branch_condition_rejected(self):
        source = "context c: bool\nfeature f\ntree t priority 1 { cond c { case true -> action { f = 1 } } }\n"
        assert any(e.code == "structure-error" for e in errors_of(source))

    def test_case_after_default_rejected(self):
        source = (
            "context c: enum(a, b)\nfeature f\n"
            "tree t priority 1 { cond c {\n"
            "  default -> action { f = 1 }\n"
            "  case a -> action { f = 2 }\n"
            "} }\n"
        )
        assert errors_of(source)

    def test_duplicate_assignment_in_action(self):
        source = (
            "context c: bool\nfeature f\n"
            "tree t priority 1 { cond c { case true -> action { f = 1, f = 2 } "
            "default -> action { f = 3 } } }\n"
        )
        assert any(e.code == "duplicate-name" for e in errors_of(source))

    def test_reserved_enum_value_rejected(self):
        assert errors_of("context c: enum(a, true)\n")

    def test_multiple_errors_reported_in_one_pass(self):
        source = "context c: bool\nbogus junk\nfeature f\nfeature f\n"
        errors = errors_of(source)
        assert len(errors) >= 2

    def test_unknown_when_feature(self):
        source = (
            "context c: bool\nfeature f\n"
            "tree t priority 1 when ghost = on { cond c { case true -> action { f = 1 } "
            "default -> action { f = 2 } } }\n"
        )
        assert any(e.code == "undeclared-identifier" for e in errors_of(source))

    def test_time_out_of_range_is_lexical(self):
        source = "context t: time\nfeature f\ntree x priority 1 { cond t { case 25:00..26:00 -> action { f = 1 } default -> action { f = 2 } } }\n"
        assert any(e.code == "lexical-error" for e in errors_of(source))

    def test_color_values_and_aliases(self):
        source = (
            "context c: bool\nfeature f\n"
            "tree t priority 1 { cond c { case true -> action { f = #1A2b3C } "
            "default -> action { f = black } } }\n"
        )
        doc = parse(source)
        leaves = doc.trees[0].root.branches
        assert leaves[0].child.action["f"] == Color(0x1A, 0x2B, 0x3C)
        assert leaves[1].child.action["f"] == Color(0, 0, 0)

    def test_comment_versus_color(self):
        source = "context c: bool # a comment, not a color\nfeature f\n"
        doc = parse(source)
        assert doc.contexts[0].name == "c"

    def test_whole_day_window(self):
        source = (
            "context t: time\nfeature f\n"
            "tree x priority 1 { cond t { case 06:00..06:00 -> action { f = 1 } "
            "default -> action { f = 2 } } }\n"
        )
        doc = parse(source)
        guard = doc.trees[0].root.branches[0].guard
        assert isinstance(guard, TimeWindowGuard)
        assert all(guard.matches(m) for m in (0, 359, 360, 1439))

    def test_negative_interval_bounds(self):
        source = (
            "context n: int[-100, 100]\nfeature f\n"
            "tree x priority 1 { cond n { case [-100, 0) -> action { f = low } "
            "default -> action { f = high } } }\n"
        )
        doc = parse(source)
        guard = doc.trees[0].root.branches[0].guard
        assert guard.lo == -100 and guard.hi == 0 and not guard.hi_inclusive

    def test_contextual_keywords_stay_usable(self):
        source = (
            "context kind: enum(default, special)\nfeature f\n"
            "tree t priority 1 { cond kind { case default -> action { f = default } "
            "default -> action { f = other } } }\n"
        )
        doc = parse(source)
        first = doc.trees[0].root.branches[0]
        assert first.guard == EqualsGuard("default")
        assert first.child.action["f"] == "default"


class TestSerialize:
    @pytest.mark.parametrize("name", BUNDLED)
    def test_bundled_round_trip(self, name):
        doc = parse(bundled_rules_text(name))
        text = serialize(doc)
        assert parse(text) == doc
        assert serialize(parse(text)) == text  # idempotent

    def test_single_leaf_tree_serializes_to_one_conclusion(self):
        doc = parse("feature f\ntree t priority 1 { action { f = 1 } }\n")
        text = serialize(doc)
        assert text.count("action") == 1
        assert parse(text) == doc

    def test_canonical_shape(self):
        text = serialize(parse(bundled_rules_text("arith_game.atree")))
        assert text.endswith("\n")
        assert not any(line != line.rstrip() for line in text.splitlines())

    def test_generated_documents_round_trip(self):
        rng = random.Random(7)
        for case in range(25):
            doc = random_document(rng)
            text = serialize(doc)
            assert parse(text) == doc, f"case {case} failed:\n{text}"


class TestRobustness:
    @given(st.text(max_size=120))
    @settings(max_examples=400, deadline=None)
    def test_fuzzed_text_never_crashes(self, source):
        doc, diagnostics = try_parse(source)
        if doc is None:
            assert any(d.severity is Severity.ERROR for d in diagnostics)
        lines = source.split("\n")
        for diag in diagnostics:
            assert 1 <= diag.line <= max(len(lines), 1)
            line = lines[diag.line - 1] if diag.line - 1 < len(lines) else ""
            assert 1 <= diag.column <= len(line) + 1

    @given(st.binary(max_size=80))
    @settings(max_examples=300, deadline=None)
    def test_fuzzed_bytes_never_crash(self, payload):
        doc, diagnostics = try_parse(payload.decode("latin-1"))
        assert doc is not None or diagnostics

    def test_parse_raises_with_diagnostics(self):
        with pytest.raises(RuleParseError) as exc:
            parse("tree broken priority {")
        assert exc.value.diagnostics
