"""Exception types shared across the engine, game, and service layers."""


class AdaptreeError(Exception):
    """Base class for all errors raised by this package."""


class EmptyFeatureSetError(AdaptreeError):
    """A feature set must contain at least one feature."""


class ConflictingAssignmentError(AdaptreeError):
    """Two action sets assign different values to the same feature."""

    def __init__(self, feature: str, first: object, second: object):
        super().__init__(f"feature {feature!r} assigned both {first!r} and {second!r}")
        self.feature = feature
        self.first = first
        self.second = second


class MissingContextError(AdaptreeError):
    """A tree tested a variable the snapshot does not supply."""

    def __init__(self, variable: str):
        super().__init__(f"snapshot has no value for context variable {variable!r}")
        self.variable = variable


class NoMatchingBranchError(AdaptreeError):
    """No branch guard matched the snapshot value and no default exists."""

    def __init__(self, variable: str, value: object):
        super().__init__(f"no branch of {variable!r} matches value {value!r}")
        self.variable = variable
        self.value = value


class NoMatchingRowError(AdaptreeError):
    """A decision table had no row (or an unreachable row) for a snapshot.

    Cannot occur for tables expanded from a validated tree.
    """


class DomainTooLargeError(AdaptreeError):
    """The schema cross-product exceeds the configured enumeration limit."""

    def __init__(self, size: int, limit: int):
        super().__init__(f"domain cross-product has {size} combinations, limit is {limit}")
        self.size = size
        self.limit = limit


class InvalidPartitionError(AdaptreeError):
    """The feature sets of the parts do not partition the full feature set."""


class WeatherUnavailableError(AdaptreeError):
    """The weather backend could not produce a value for the location."""


class NegativeAgeError(AdaptreeError):
    """Ages are whole years and cannot be negative."""


class AccuracyRangeError(AdaptreeError):
    """Accuracy percentages live in [0, 100]."""


class NotEligibleError(AdaptreeError):
    """A level-up choice was applied without level-up eligibility."""
