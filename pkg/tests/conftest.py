"""Shared fixtures plus the random tree/document generators used by the
equivalence and round-trip suites."""

from __future__ import annotations

import itertools
import random
import time
from contextlib import contextmanager

import pytest

from adaptree import (
    ActionSet,
    AdaptionTree,
    BoolDomain,
    Branch,
    ConclusionNode,
    ConditionNode,
    ContextVariable,
    EnumDomain,
    EqualsGuard,
    IntervalGuard,
    IntRangeDomain,
    TimeDomain,
    TimeWindowGuard,
    DEFAULT,
    load_bundled,
)


@pytest.fixture(scope="session")
def bundled():
    return load_bundled("arith_game.atree")


@pytest.fixture(scope="session")
def theme_doc():
    return load_bundled("theme.atree")


@pytest.fixture
def timed():
    @contextmanager
    def _timed(limit_s: float, label: str = "block"):
        start = time.perf_counter()
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < limit_s, f"{label} took {elapsed:.2f}s, limit is {limit_s}s"

    return _timed


# ---------------------------------------------------------------------------
# Random structures for fuzzed equivalence / round-trip checks
# ---------------------------------------------------------------------------

def random_schema(rng: random.Random, max_vars: int = 3, with_time: bool = False) -> list[ContextVariable]:
    kinds = ["bool", "enum", "int"] + (["time"] if with_time else [])
    variables = []
    for i in range(rng.randint(2, max_vars)):
        kind = rng.choice(kinds)
        if kind == "bool":
            domain = BoolDomain()
        elif kind == "enum":
            domain = EnumDomain(tuple(f"v{j}" for j in range(rng.randint(2, 4))))
        elif kind == "int":
            lo = rng.randint(-5, 5)
            domain = IntRangeDomain(lo, lo + rng.randint(1, 9))
        else:
            domain = TimeDomain()
        variables.append(ContextVariable(f"x{i}", domain))
    return variables


def _branch_guards(rng: random.Random, domain) -> list:
    """Disjoint guards covering the domain (sometimes via a default)."""
    if isinstance(domain, BoolDomain):
        guards = [EqualsGuard(False), EqualsGuard(True)]
        if rng.random() < 0.3:
            guards[rng.randrange(2)] = DEFAULT
            guards.sort(key=lambda g: g is DEFAULT)
        return guards
    if isinstance(domain, EnumDomain):
        guards = [EqualsGuard(token) for token in domain.tokens]
        if rng.random() < 0.4 and len(guards) > 1:
            cut = rng.randint(1, len(guards) - 1)
            guards = guards[:cut] + [DEFAULT]
        return guards
    if isinstance(domain, TimeDomain):
        cuts = sorted(rng.sample(range(1440), rng.randint(2, 4)))
        rotated = cuts[1:] + [cuts[0]]
        return [TimeWindowGuard(a, b) for a, b in zip(cuts, rotated)]
    lo, hi = domain.lo, domain.hi
    n_cuts = rng.randint(0, min(2, hi - lo))
    cuts = sorted(rng.sample(range(lo, hi), n_cuts)) if n_cuts else []
    guards = []
    start = lo
    for cut in cuts:
        if rng.random() < 0.5:
            guards.append(IntervalGuard(start, cut, True, True))
        else:
            guards.append(IntervalGuard(start, cut + 1, True, False))
        start = cut + 1
    if guards and rng.random() < 0.3:
        guards.append(DEFAULT)
    elif rng.random() < 0.5:
        guards.append(IntervalGuard(start, hi, True, True))
    else:
        guards.append(IntervalGuard(start - 1, hi, False, True))
    if len(guards) == 1:
        # a lone interval is not a legal condition node; add a default
        guards.append(DEFAULT)
    return guards


def random_tree(
    rng: random.Random,
    schema: list[ContextVariable],
    feature: str = "out",
    max_depth: int = 3,
    name: str = "fuzzed",
) -> AdaptionTree:
    """A structurally valid tree whose condition nodes partition each domain."""
    counter = itertools.count()

    def leaf() -> ConclusionNode:
        return ConclusionNode(ActionSet({feature: f"leaf{next(counter)}"}))

    def build(depth: int, available: list[ContextVariable]):
        if depth >= max_depth or not available or rng.random() < 0.25:
            return leaf()
        variable = rng.choice(available)
        remaining = [v for v in available if v.name != variable.name]
        branches = tuple(
            Branch(guard, build(depth + 1, remaining))
            for guard in _branch_guards(rng, variable.domain)
        )
        return ConditionNode(variable.name, branches)

    root = build(0, schema)
    if isinstance(root, ConclusionNode):
        # ensure at least one condition node so the tree tests something
        variable = rng.choice(schema)
        branches = tuple(
            Branch(guard, leaf()) for guard in _branch_guards(rng, variable.domain)
        )
        root = ConditionNode(variable.name, branches)
    return AdaptionTree(name=name, priority=1, root=root)


def random_document(rng: random.Random):
    """A random but valid RuleDocument (DSL-expressible by construction)."""
    from adaptree import RuleDocument, TreeGuard, UIFeature

    schema = random_schema(rng, max_vars=4, with_time=True)
    features = [UIFeature(f"f{i}") for i in range(rng.randint(1, 3))]
    trees = []
    for i, feature in enumerate(features):
        tree = random_tree(rng, schema, feature=feature.name, max_depth=2, name=f"t{i}")
        guard = None
        if i > 0 and rng.random() < 0.4:
            guard = TreeGuard(features[0].name, f"leaf{rng.randint(0, 3)}")
        trees.append(AdaptionTree(tree.name, priority=i + 1, root=tree.root, guard=guard))
    return RuleDocument(tuple(schema), tuple(features), tuple(trees))


# ---------------------------------------------------------------------------
# Acceptance summary
# ---------------------------------------------------------------------------

def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results: list[tuple[str, str]] = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py::" not in nodeid:
                continue
            if getattr(report, "when", "call") not in ("call", "setup"):
                continue
            if outcome != "passed" or report.when == "call":
                name = nodeid.split("::")[-1].removeprefix("test_").replace("_", "-")
                results.append((name, "PASS" if outcome == "passed" else "FAIL"))
    if results:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, verdict in sorted(results):
            terminalreporter.write_line(f"ACCEPTANCE {name}: {verdict}")
