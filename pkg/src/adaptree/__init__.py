"""Context-aware UI adaptation rule engine with a decision-tree DSL, plus the
adaptive arithmetic game that exercises it end to end."""

from .errors import (
    AdaptreeError,
    AccuracyRangeError,
    ConflictingAssignmentError,
    DomainTooLargeError,
    EmptyFeatureSetError,
    InvalidPartitionError,
    MissingContextError,
    NegativeAgeError,
    NoMatchingBranchError,
    NoMatchingRowError,
    NotEligibleError,
    WeatherUnavailableError,
)
from .model import (
    NULL,
    UNAVAILABLE,
    ActionSet,
    BoolDomain,
    Color,
    ContextSchema,
    ContextSnapshot,
    ContextVariable,
    EnumDomain,
    FeatureSet,
    IntRangeDomain,
    TimeDomain,
    UIFeature,
    are_disjoint,
    format_minutes,
    parse_hhmm,
    union_actions,
    validate_partition,
)
from .tree import (
    AdaptionFunction,
    AdaptionTree,
    Branch,
    ComplementGuard,
    ConclusionNode,
    ConditionNode,
    Counterexample,
    DecisionTable,
    DEFAULT,
    DefaultGuard,
    EqualsGuard,
    IntervalGuard,
    Rule,
    Severity,
    TimeWindowGuard,
    TreeDiagnostic,
    TreeGuard,
    assigned_features,
    check_distributive,
    enumerate_snapshots,
    evaluate,
    evaluate_chain,
    evaluate_table,
    extract_rules,
    tested_variables,
    to_decision_table,
    validate_tree,
)
from .dsl import (
    Diagnostic,
    RuleDocument,
    RuleParseError,
    bundled_rules_text,
    load_bundled,
    load_document,
    parse,
    serialize,
    try_parse,
)

__version__ = "0.1.0"
