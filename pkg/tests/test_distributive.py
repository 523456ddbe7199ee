"""Distributive-rule checking: A(C, F) against partitioned feature sets."""

import pytest

from adaptree import (
    ActionSet,
    AdaptionFunction,
    AdaptionTree,
    Branch,
    ConclusionNode,
    ConditionNode,
    Counterexample,
    DomainTooLargeError,
    EqualsGuard,
    FeatureSet,
    InvalidPartitionError,
    IntRangeDomain,
    ContextVariable,
    assigned_features,
    check_distributive,
    enumerate_snapshots,
    evaluate,
    load_bundled,
    union_actions,
)


def function_for(tree, schema) -> AdaptionFunction:
    return AdaptionFunction(
        context=tuple(schema),
        features=FeatureSet.of(*assigned_features(tree)),
        body=tree,
    )


@pytest.fixture(scope="module")
def battery_full():
    return load_bundled("battery_full.atree")


def battery_parts(name):
    return load_bundled(f"battery_parts_{name}.atree")


class TestBatteryExample:
    @pytest.mark.parametrize("partition", ["a", "b", "c"])
    def test_all_three_partitions_distribute(self, battery_full, partition):
        parts_doc = battery_parts(partition)
        schema = list(battery_full.contexts)
        full = function_for(battery_full.trees[0], schema)
        parts = [function_for(t, schema) for t in parts_doc.trees]
        assert check_distributive(full, parts, schema) is True

    def test_identity_partition(self, battery_full):
        schema = list(battery_full.contexts)
        tree = battery_full.trees[0]
        full = function_for(tree, schema)
        assert check_distributive(full, [full], schema) is True

    def test_mutated_leaf_is_caught(self, battery_full):
        schema = list(battery_full.contexts)
        full = function_for(battery_full.trees[0], schema)
        parts_doc = battery_parts("a")
        broken_video = AdaptionTree("video", 1, ConditionNode("battery_low", (
            Branch(EqualsGuard(True), ConclusionNode(ActionSet({"video": "on"}))),
            Branch(EqualsGuard(False), ConclusionNode(ActionSet({"video": "on"}))),
        )))
        parts = [function_for(broken_video, schema),
                 function_for(parts_doc.tree("sound_and_brightness"), schema)]

        # independent oracle: brute-force both sides over the two snapshots
        disagreements = []
        for snapshot in enumerate_snapshots(schema):
            combined = ActionSet({})
            for part in parts:
                combined = union_actions(combined, evaluate(part.body, snapshot))
            if combined != evaluate(full.body, snapshot):
                disagreements.append(snapshot)
        assert [s["battery_low"] for s in disagreements] == [True]

        result = check_distributive(full, parts, schema)
        assert isinstance(result, Counterexample)
        assert not result  # counterexamples are falsy
        assert result.snapshot["battery_low"] is True
        assert result.full_actions["video"] == "off"
        assert result.parts_actions["video"] == "on"

    def test_invalid_partition_rejected(self, battery_full):
        schema = list(battery_full.contexts)
        full = function_for(battery_full.trees[0], schema)
        video_only = function_for(battery_parts("a").tree("video"), schema)
        with pytest.raises(InvalidPartitionError):
            check_distributive(full, [video_only], schema)

    def test_domain_too_large(self, battery_full):
        schema = [ContextVariable("huge", IntRangeDomain(0, 2_000_000))]
        tree = AdaptionTree("t", 1, ConclusionNode(ActionSet({"f": 1})))
        full = function_for(tree, schema)
        with pytest.raises(DomainTooLargeError):
            check_distributive(full, [full], schema)


class TestAdaptionFunction:
    def test_stray_feature_rejected(self, battery_full):
        tree = battery_full.trees[0]
        with pytest.raises(ValueError):
            AdaptionFunction(context=(), features=FeatureSet.of("video"), body=tree)
