from fractions import Fraction
from itertools import product

import pytest

from boolconv.badset import (
    ConstructionError,
    build_stages,
    escape_invariant,
    size_recursion_holds,
    stage_escape,
    verify_conditions,
    window_flip_intersection,
)
from boolconv.dyadic import ClopenSet


def naive_stages(depth_limit):
    """String-based construction for target 1/2, independent of the bitset code."""
    words = {"000", "111"}
    hamming3 = ["000", "111"]
    depth, out = 3, [(3, set(words))]
    while depth + 3 <= depth_limit:
        new = set()
        for s in ("".join(p) for p in product("01", repeat=depth)):
            tails = ["".join(p) for p in product("01", repeat=3)] if s in words else hamming3
            new.update(s + t for t in tails)
        words, depth = new, depth + 3
        out.append((depth, set(words)))
    return out


@pytest.fixture(scope="module")
def half():
    return build_stages(Fraction(1, 2))


def test_stage_depths_and_measures(half):
    assert half.depths == [3, 6, 21]
    assert [s.bad.measure() for s in half.stages] == [Fraction(3, 4), Fraction(9, 16), Fraction(135, 256)]
    assert half.stages[0].words() == ["000", "111"]
    assert not half.complete or half.requested is None
    assert "limit" in half.stop_reason


def test_matches_string_oracle_first_two_stages(half):
    (d0, w0), (d1, w1) = naive_stages(6)
    assert half.stages[0].depth == d0 and set(half.stages[0].words()) == w0
    assert half.stages[1].depth == d1 and set(half.stages[1].words()) == w1
    assert len(w1) == 28


def test_conditions(half):
    report = verify_conditions(half)
    assert all(v["ok"] for v in report.values()), report
    assert size_recursion_holds(half)
    assert all(escape_invariant(half).values())


def test_escape_witness_coordinates(half):
    ok, wit = stage_escape(half, 0)
    assert ok
    lo, hi = half.stages[0].depth, half.stages[1].depth
    assert set(wit[wit >= 0].tolist()) <= set(range(lo, hi))


def test_target_three_quarters():
    con = build_stages(Fraction(3, 4))
    assert con.depths == [7, 14]
    assert [s.bad.measure() for s in con.stages] == [Fraction(7, 8), Fraction(49, 64)]
    assert all(v["ok"] for v in verify_conditions(con).values())


def test_num_stages_and_incomplete():
    con = build_stages(Fraction(1, 2), num_stages=1)
    assert con.depths == [3, 6] and con.complete
    con = build_stages(Fraction(1, 2), num_stages=3)
    assert not con.complete and con.stop_reason
    assert con.to_json()["complete"] is False


def test_depth_limit():
    assert build_stages(Fraction(1, 2), depth_limit=12).depths == [3, 6]
    with pytest.raises(ConstructionError):
        build_stages(Fraction(1, 2), depth_limit=2)


def test_bad_target():
    with pytest.raises(ConstructionError):
        build_stages(Fraction(3, 2))


def test_flip_meets(half):
    # tails starting before the second-to-last stage depth escape completely
    assert window_flip_intersection(half, 0) == 0
    assert window_flip_intersection(half, 1, start=5) == 0
    # the last block alone does not: codeword tails over B_{last-1} are fixed points
    last = window_flip_intersection(half, 1)
    assert last == half.stages[1].bad.measure().to_fraction() / 16
    assert last == Fraction(9, 256)


def test_flip_meet_counted_directly():
    con = build_stages(Fraction(1, 2), num_stages=1)
    bad = con.bad_set()
    meet = ClopenSet.full(6)
    for m in range(3, 6):
        meet = meet & bad.flip(m)
    assert meet.measure() == window_flip_intersection(con, 0) == Fraction(3, 16)
    assert window_flip_intersection(con, 0, start=2) == 0


def test_json(half):
    data = half.to_json()
    assert [r["measureExact"] for r in data["stages"]] == ["3/4", "9/16", "135/256"]
    assert data["stages"][2]["blockLength"] == 15
