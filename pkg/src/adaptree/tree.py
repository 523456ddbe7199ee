"""Adaption trees: condition/conclusion node graphs and their semantics.

An adaption tree maps a context snapshot to an action set by walking condition
nodes from the root; every root-to-leaf path is one adaption rule. This module
owns evaluation, rule extraction, structural/semantic validation, expansion to
an exhaustive decision table, priority-chained evaluation across trees, and
the distributive-law check for partitioned feature sets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Sequence, Union

from .errors import (
    DomainTooLargeError,
    InvalidPartitionError,
    MissingContextError,
    NoMatchingBranchError,
    NoMatchingRowError,
)
from .model import (
    MINUTES_PER_DAY,
    UNAVAILABLE,
    ActionSet,
    ActionValue,
    BoolDomain,
    ContextSchema,
    ContextSnapshot,
    ContextVariable,
    ContextValue,
    EnumDomain,
    FeatureSet,
    IntRangeDomain,
    TimeDomain,
    format_action_value,
    format_minutes,
    same_value,
    union_actions,
    validate_partition,
    EMPTY_ACTIONS,
)


@dataclass(frozen=True)
class Loc:
    """Position in a rule source file (1-based line/column)."""

    line: int
    column: int
    length: int = 1


# ---------------------------------------------------------------------------
# Branch guards
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EqualsGuard:
    """Matches one discrete value; for boolean and enum domains."""

    value: ContextValue

    def matches(self, value: object) -> bool:
        return value is not UNAVAILABLE and same_value(value, self.value)

    def describe(self) -> str:
        if isinstance(self.value, bool):
            return "true" if self.value else "false"
        return str(self.value)


@dataclass(frozen=True)
class IntervalGuard:
    """Numeric interval with explicit endpoint inclusivity."""

    lo: int
    hi: int
    lo_inclusive: bool = True
    hi_inclusive: bool = True

    def matches(self, value: object) -> bool:
        if not isinstance(value, int) or isinstance(value, bool):
            return False
        above = value > self.lo or (self.lo_inclusive and value == self.lo)
        below = value < self.hi or (self.hi_inclusive and value == self.hi)
        return above and below

    def describe(self) -> str:
        open_b = "[" if self.lo_inclusive else "("
        close_b = "]" if self.hi_inclusive else ")"
        return f"{open_b}{self.lo}, {self.hi}{close_b}"


@dataclass(frozen=True)
class TimeWindowGuard:
    """Half-open minute window [start, end); wraps midnight when start >= end.

    Equal endpoints cover the whole day (the wrap goes all the way around).
    """

    start: int
    end: int

    def matches(self, value: object) -> bool:
        if not isinstance(value, int) or isinstance(value, bool):
            return False
        if self.start < self.end:
            return self.start <= value < self.end
        return value >= self.start or value < self.end

    def describe(self) -> str:
        return f"{format_minutes(self.start)}..{format_minutes(self.end)}"


@dataclass(frozen=True)
class DefaultGuard:
    """Catch-all branch; also the only guard an unavailable value matches."""

    def matches(self, value: object) -> bool:
        return True

    def describe(self) -> str:
        return "default"


DEFAULT = DefaultGuard()

Guard = Union[EqualsGuard, IntervalGuard, TimeWindowGuard, DefaultGuard]


@dataclass(frozen=True)
class ComplementGuard:
    """Rule-space form of a default branch: none of the siblings matched.

    Only produced by extract_rules, so that the extracted rules' condition
    regions partition the domain instead of overlapping the explicit cases.
    """

    siblings: tuple[Guard, ...]

    def matches(self, value: object) -> bool:
        return not any(g.matches(value) for g in self.siblings)

    def describe(self) -> str:
        return "otherwise"


RuleGuard = Union[EqualsGuard, IntervalGuard, TimeWindowGuard, ComplementGuard]


# ---------------------------------------------------------------------------
# Nodes and trees
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConclusionNode:
    """Leaf: the UI action applied when this path's conditions hold."""

    action: ActionSet
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Branch:
    guard: Guard
    child: "Node"
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ConditionNode:
    """Internal node: tests one context variable, one branch per outcome."""

    variable: str
    branches: tuple[Branch, ...]
    loc: Loc | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.branches) < 2:
            raise ValueError(
                f"condition node on {self.variable!r} needs at least two branches "
                "(a default branch counts)"
            )
        defaults = [i for i, b in enumerate(self.branches) if isinstance(b.guard, DefaultGuard)]
        if len(defaults) > 1:
            raise ValueError(f"condition node on {self.variable!r} has multiple default branches")
        if defaults and defaults[0] != len(self.branches) - 1:
            raise ValueError(f"default branch of {self.variable!r} must be last")


Node = Union[ConditionNode, ConclusionNode]


@dataclass(frozen=True)
class TreeGuard:
    """Activation condition over previously produced actions (chain only)."""

    feature: str
    value: ActionValue

    def satisfied_by(self, actions: ActionSet) -> bool:
        return self.feature in actions and same_value(actions[self.feature], self.value)


@dataclass(frozen=True)
class AdaptionTree:
    """A named tree with an evaluation priority (lower runs earlier).

    Acyclicity and leaf termination hold by construction: nodes are immutable
    and built bottom-up, so no cycle can be expressed.
    """

    name: str
    priority: int
    root: Node
    guard: TreeGuard | None = None
    loc: Loc | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Rule:
    """One root-to-leaf path: a conjunction of guards and the leaf action."""

    conditions: tuple[tuple[str, RuleGuard], ...]
    action: ActionSet

    def matches(self, snapshot: ContextSnapshot) -> bool:
        for variable, guard in self.conditions:
            if variable not in snapshot:
                raise MissingContextError(variable)
            if not guard.matches(snapshot[variable]):
                return False
        return True

    def describe(self) -> str:
        if not self.conditions:
            cond = "always"
        else:
            cond = " AND ".join(
                f"{var} = {g.describe()}" if isinstance(g, EqualsGuard)
                else f"{var} {g.describe()}" if isinstance(g, ComplementGuard)
                else f"{var} in {g.describe()}"
                for var, g in self.conditions
            )
        actions = ", ".join(f"{k}={format_action_value(v)}" for k, v in sorted(self.action.items()))
        return f"IF {cond} THEN {actions}"


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def evaluate(tree: AdaptionTree, snapshot: ContextSnapshot) -> ActionSet:
    """Walk the tree, taking at each node the first branch whose guard matches.

    Raises MissingContextError when a tested variable is absent from the
    snapshot and NoMatchingBranchError when no guard (and no default) matches.
    """
    node: Node = tree.root
    while isinstance(node, ConditionNode):
        if node.variable not in snapshot:
            raise MissingContextError(node.variable)
        value = snapshot[node.variable]
        for branch in node.branches:
            if branch.guard.matches(value):
                node = branch.child
                break
        else:
            raise NoMatchingBranchError(node.variable, value)
    return node.action


def extract_rules(tree: AdaptionTree) -> list[Rule]:
    """One rule per leaf, in left-to-right leaf order.

    Default branches become complement guards so that exactly one extracted
    rule matches any in-domain snapshot.
    """
    rules: list[Rule] = []

    def walk(node: Node, conditions: tuple[tuple[str, RuleGuard], ...]) -> None:
        if isinstance(node, ConclusionNode):
            rules.append(Rule(conditions, node.action))
            return
        non_default = tuple(b.guard for b in node.branches if not isinstance(b.guard, DefaultGuard))
        for branch in node.branches:
            guard: RuleGuard
            if isinstance(branch.guard, DefaultGuard):
                guard = ComplementGuard(non_default)
            else:
                guard = branch.guard
            walk(branch.child, conditions + ((node.variable, guard),))

    walk(tree.root, ())
    return rules


def assigned_features(tree: AdaptionTree) -> frozenset[str]:
    """All features assigned by any conclusion node of the tree."""
    names: set[str] = set()

    def walk(node: Node) -> None:
        if isinstance(node, ConclusionNode):
            names.update(node.action.feature_names())
        else:
            for branch in node.branches:
                walk(branch.child)

    walk(tree.root)
    return frozenset(names)


def tested_variables(tree: AdaptionTree) -> frozenset[str]:
    """All context variables tested by any condition node of the tree."""
    names: set[str] = set()

    def walk(node: Node) -> None:
        if isinstance(node, ConditionNode):
            names.add(node.variable)
            for branch in node.branches:
                walk(branch.child)

    walk(tree.root)
    return frozenset(names)


@dataclass(frozen=True)
class AdaptionFunction:
    """A(C, F): context variables in, action set over the feature set out."""

    context: tuple[ContextVariable, ...]
    features: FeatureSet
    body: AdaptionTree

    def __post_init__(self):
        stray = assigned_features(self.body) - self.features.names
        if stray:
            raise ValueError(
                f"tree {self.body.name!r} assigns features outside its feature set: "
                f"{', '.join(sorted(stray))}"
            )


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class TreeDiagnostic:
    severity: Severity
    code: str
    message: str
    path: str
    loc: Loc | None = field(default=None, compare=False)

    def __str__(self) -> str:
        return f"{self.severity.value}: {self.path}: {self.message}"


# Closed integer segments (a, b) with a <= b; the common currency for
# overlap/coverage arithmetic over int and time domains.
_Segments = list[tuple[int, int]]


def _merge_segments(segs: _Segments) -> _Segments:
    merged: _Segments = []
    for a, b in sorted(segs):
        if merged and a <= merged[-1][1] + 1:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b))
        else:
            merged.append((a, b))
    return merged


def _intersect_segments(xs: _Segments, ys: _Segments) -> _Segments:
    out: _Segments = []
    for a, b in xs:
        for c, d in ys:
            lo, hi = max(a, c), min(b, d)
            if lo <= hi:
                out.append((lo, hi))
    return _merge_segments(out)


def _subtract_segments(xs: _Segments, ys: _Segments) -> _Segments:
    out: _Segments = []
    for a, b in xs:
        pieces = [(a, b)]
        for c, d in ys:
            nxt: _Segments = []
            for p, q in pieces:
                if d < p or c > q:
                    nxt.append((p, q))
                    continue
                if p < c:
                    nxt.append((p, c - 1))
                if d < q:
                    nxt.append((d + 1, q))
            pieces = nxt
        out.extend(pieces)
    return _merge_segments(out)


def _guard_segments(guard: Guard, domain: IntRangeDomain | TimeDomain) -> _Segments:
    """Effective closed segments of a guard, clipped to the domain."""
    if isinstance(domain, TimeDomain):
        dlo, dhi = 0, MINUTES_PER_DAY - 1
    else:
        dlo, dhi = domain.lo, domain.hi
    if isinstance(guard, IntervalGuard):
        lo = guard.lo if guard.lo_inclusive else guard.lo + 1
        hi = guard.hi if guard.hi_inclusive else guard.hi - 1
        lo, hi = max(lo, dlo), min(hi, dhi)
        return [(lo, hi)] if lo <= hi else []
    if isinstance(guard, TimeWindowGuard):
        if guard.start < guard.end:
            return [(guard.start, guard.end - 1)]
        segs = [(guard.start, MINUTES_PER_DAY - 1)]
        if guard.end > 0:
            segs.append((0, guard.end - 1))
        return _merge_segments(segs)
    raise TypeError(f"guard {guard!r} has no segment form")


def _describe_segments(segs: _Segments, is_time: bool) -> str:
    def fmt(v: int) -> str:
        return format_minutes(v) if is_time else str(v)

    return ", ".join(f"{fmt(a)}" if a == b else f"{fmt(a)}..{fmt(b)}" for a, b in segs)


def validate_tree(tree: AdaptionTree, schema: Sequence[ContextVariable] | ContextSchema) -> list[TreeDiagnostic]:
    """Semantic checks for every condition node.

    Empty result means: guards are pairwise disjoint over the variable's
    domain, guards plus an optional default cover the domain, no branch is
    unreachable, and every tested variable is declared with a domain its
    guards are compatible with. A default branch after exhaustive guards is
    not unreachable: the unavailable-context marker always reaches it.
    """
    variables = {v.name: v for v in schema}
    diagnostics: list[TreeDiagnostic] = []

    def check_node(node: Node, path: str) -> None:
        if isinstance(node, ConclusionNode):
            return
        node_path = f"{path}/{node.variable}" if path else node.variable
        var = variables.get(node.variable)
        if var is None:
            diagnostics.append(TreeDiagnostic(
                Severity.ERROR, "unknown-variable",
                f"variable {node.variable!r} is not declared in the schema",
                node_path, node.loc))
        else:
            _check_branches(node, var, node_path)
        for branch in node.branches:
            check_node(branch.child, f"{node_path}[{branch.guard.describe()}]")

    def _check_branches(node: ConditionNode, var: ContextVariable, node_path: str) -> None:
        domain = var.domain
        non_default = [b for b in node.branches if not isinstance(b.guard, DefaultGuard)]
        has_default = len(non_default) != len(node.branches)

        def bad_guard(branch: Branch, why: str) -> None:
            diagnostics.append(TreeDiagnostic(
                Severity.ERROR, "incompatible-guard",
                f"guard {branch.guard.describe()} {why} (domain of {var.name} is {domain})",
                node_path, branch.loc))

        if isinstance(domain, (BoolDomain, EnumDomain)):
            full = set(domain.values())
            covered: set = set()
            for branch in non_default:
                guard = branch.guard
                if not isinstance(guard, EqualsGuard):
                    bad_guard(branch, "is not an equality test")
                    continue
                if not domain.contains(guard.value):
                    bad_guard(branch, "tests a value outside the domain")
                    continue
                if guard.value in covered:
                    diagnostics.append(TreeDiagnostic(
                        Severity.ERROR, "overlapping-branches",
                        f"value {guard.describe()} is already matched by an earlier branch",
                        node_path, branch.loc))
                    continue
                covered.add(guard.value)
            gap = full - covered
            if gap and not has_default:
                listing = ", ".join(sorted(EqualsGuard(v).describe() for v in gap))
                diagnostics.append(TreeDiagnostic(
                    Severity.ERROR, "incomplete-branches",
                    f"values not covered by any branch: {listing}",
                    node_path, node.loc))
        else:
            is_time = isinstance(domain, TimeDomain)
            if is_time:
                domain_segs: _Segments = [(0, MINUTES_PER_DAY - 1)]
            else:
                domain_segs = [(domain.lo, domain.hi)]
            covered_segs: _Segments = []
            for branch in non_default:
                guard = branch.guard
                if isinstance(guard, EqualsGuard) or (isinstance(guard, TimeWindowGuard) and not is_time):
                    bad_guard(branch, "does not fit the domain")
                    continue
                segs = _guard_segments(guard, domain)
                if not segs:
                    diagnostics.append(TreeDiagnostic(
                        Severity.WARNING, "unreachable-branch",
                        f"guard {guard.describe()} matches no value of the domain",
                        node_path, branch.loc))
                    continue
                overlap = _intersect_segments(segs, covered_segs)
                if overlap:
                    diagnostics.append(TreeDiagnostic(
                        Severity.ERROR, "overlapping-branches",
                        f"guard {guard.describe()} overlaps earlier branches at "
                        f"{_describe_segments(overlap, is_time)}",
                        node_path, branch.loc))
                if not _subtract_segments(segs, covered_segs):
                    diagnostics.append(TreeDiagnostic(
                        Severity.WARNING, "unreachable-branch",
                        f"guard {guard.describe()} is fully shadowed by earlier branches",
                        node_path, branch.loc))
                covered_segs = _merge_segments(covered_segs + segs)
            gaps = _subtract_segments(domain_segs, covered_segs)
            if gaps and not has_default:
                diagnostics.append(TreeDiagnostic(
                    Severity.ERROR, "incomplete-branches",
                    f"values not covered by any branch: {_describe_segments(gaps, is_time)}",
                    node_path, node.loc))

    check_node(tree.root, "")
    return diagnostics


# ---------------------------------------------------------------------------
# Decision tables
# ---------------------------------------------------------------------------

UNREACHABLE = "unreachable"

DEFAULT_ROW_LIMIT = 1_000_000


@dataclass(frozen=True)
class TableRow:
    values: tuple[ContextValue, ...]
    action: ActionSet | None  # None marks an unreachable combination


@dataclass(frozen=True)
class DecisionTable:
    """Exhaustive enumeration of a tree over finite domains.

    Rows cover the cross product of the schema domains; every combination of
    domain values matches exactly one row.
    """

    schema: tuple[ContextVariable, ...]
    rows: tuple[TableRow, ...]

    def row_for(self, values: tuple[ContextValue, ...]) -> TableRow | None:
        index = self._index()
        return index.get(tuple(values))

    def _index(self) -> dict[tuple, TableRow]:
        cached = getattr(self, "_row_index", None)
        if cached is None:
            cached = {row.values: row for row in self.rows}
            object.__setattr__(self, "_row_index", cached)
        return cached


def domain_size(schema: Sequence[ContextVariable]) -> int:
    size = 1
    for var in schema:
        size *= var.domain.size()
    return size


def enumerate_snapshots(schema: Sequence[ContextVariable]) -> Iterator[ContextSnapshot]:
    """All snapshots over the schema cross product, in domain order."""
    names = [v.name for v in schema]
    for combo in itertools.product(*(v.domain.values() for v in schema)):
        yield ContextSnapshot(dict(zip(names, combo)))


def to_decision_table(
    tree: AdaptionTree,
    schema: Sequence[ContextVariable],
    max_rows: int = DEFAULT_ROW_LIMIT,
) -> DecisionTable:
    """Expand the tree into one row per combination of schema domain values.

    Combinations the tree cannot classify (no matching branch) are kept as
    unreachable rows so the table stays total over the cross product.
    """
    size = domain_size(schema)
    if size > max_rows:
        raise DomainTooLargeError(size, max_rows)
    names = [v.name for v in schema]
    rows = []
    for combo in itertools.product(*(v.domain.values() for v in schema)):
        snapshot = ContextSnapshot(dict(zip(names, combo)))
        try:
            action: ActionSet | None = evaluate(tree, snapshot)
        except NoMatchingBranchError:
            action = None
        rows.append(TableRow(tuple(combo), action))
    return DecisionTable(tuple(schema), tuple(rows))


def evaluate_table(table: DecisionTable, snapshot: ContextSnapshot) -> ActionSet:
    """Look up the unique row matching a complete snapshot."""
    key = []
    for var in table.schema:
        if var.name not in snapshot:
            raise MissingContextError(var.name)
        key.append(snapshot[var.name])
    row = table.row_for(tuple(key))
    if row is None or row.action is None:
        raise NoMatchingRowError(f"no row for {tuple(key)!r}")
    return row.action


# ---------------------------------------------------------------------------
# Priority chains
# ---------------------------------------------------------------------------

def evaluate_chain(trees: Sequence[AdaptionTree], snapshot: ContextSnapshot) -> ActionSet:
    """Evaluate trees in ascending priority, accumulating their actions.

    After each tree runs, its assignments become synthetic context values
    (visible to later condition nodes) and are visible to later tree guards.
    A tree whose guard is unsatisfied contributes nothing.
    """
    ordered = sorted(trees, key=lambda t: t.priority)
    produced = EMPTY_ACTIONS
    working = snapshot
    for tree in ordered:
        if tree.guard is not None and not tree.guard.satisfied_by(produced):
            continue
        actions = evaluate(tree, working)
        produced = union_actions(produced, actions)
        working = working.with_values(dict(actions.items()))
    return produced


# ---------------------------------------------------------------------------
# Distributive rule
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Counterexample:
    """Snapshot where the partitioned functions disagree with the full one.

    Falsy, so `if check_distributive(...)` reads as "if the law holds".
    """

    snapshot: ContextSnapshot
    full_actions: ActionSet
    parts_actions: ActionSet

    def __bool__(self) -> bool:
        return False


def check_distributive(
    full: AdaptionFunction,
    parts: Sequence[AdaptionFunction],
    schema: Sequence[ContextVariable],
    max_rows: int = DEFAULT_ROW_LIMIT,
) -> bool | Counterexample:
    """Brute-force A(C, F) = A(C, f1) ∪ ... ∪ A(C, fn) over the whole domain.

    The parts' feature sets must partition the full feature set. Returns True
    on equality for every snapshot, else the first counterexample found.
    """
    partition = validate_partition(full.features, [p.features for p in parts])
    if not partition:
        raise InvalidPartitionError(partition.describe())
    size = domain_size(schema)
    if size > max_rows:
        raise DomainTooLargeError(size, max_rows)
    for snapshot in enumerate_snapshots(schema):
        expected = evaluate(full.body, snapshot)
        combined = EMPTY_ACTIONS
        for part in parts:
            combined = union_actions(combined, evaluate(part.body, snapshot))
        if expected != combined:
            return Counterexample(snapshot, expected, combined)
    return True
