"""Profile persistence round-trips and atomic-replace hygiene."""

import pytest

from adaptree.context import UserPreferences, new_profile
from adaptree.game import Operator, Outcome, Question, LevelRecord, UnitRecord
from adaptree.model import Color
from adaptree.store import ProfileStore, profile_from_dict, profile_to_dict, valid_username

from dataclasses import replace


def rich_profile():
    profile = new_profile("alice_7", "s3cret", 9)
    unit = UnitRecord(1, (Outcome.CORRECT, Outcome.TIMEOUT, Outcome.INCORRECT))
    question = Question("qdeadbeef", 2, Operator.DIV, 8, 4, 2)
    return replace(
        profile,
        preferences=UserPreferences(
            font_color=Color.parse("#123456"),
            time_based_background=False,
        ),
        performance=(LevelRecord(2, (unit,)),),
        review_queue=(question,),
    )


def test_dict_round_trip():
    profile = rich_profile()
    assert profile_from_dict(profile_to_dict(profile)) == profile


def test_store_round_trip(tmp_path):
    store = ProfileStore(tmp_path)
    profile = rich_profile()
    store.save(profile)
    assert store.load("alice_7") == profile
    assert store.exists("alice_7")
    assert store.usernames() == ["alice_7"]


def test_missing_profile(tmp_path):
    assert ProfileStore(tmp_path).load("nobody") is None


def test_no_temp_files_left_behind(tmp_path):
    store = ProfileStore(tmp_path)
    for _ in range(5):
        store.save(rich_profile())
    leftovers = [p for p in tmp_path.iterdir() if p.suffix != ".json"]
    assert leftovers == []


def test_update_replaces_content(tmp_path):
    store = ProfileStore(tmp_path)
    profile = rich_profile()
    store.save(profile)
    store.save(replace(profile, current_level=3))
    assert store.load("alice_7").current_level == 3


def test_username_hygiene(tmp_path):
    store = ProfileStore(tmp_path)
    assert valid_username("ok_name_9")
    assert not valid_username("../escape")
    assert not valid_username("")
    with pytest.raises(ValueError):
        store.save(replace(rich_profile(), username="bad/name"))


def test_locks_are_per_user(tmp_path):
    store = ProfileStore(tmp_path)
    assert store.lock("a") is store.lock("a")
    assert store.lock("a") is not store.lock("b")
