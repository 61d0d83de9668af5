from fractions import Fraction

import pytest
from hypothesis import given

from boolconv.convergence import (
    ClassifyConfig,
    InvariantViolation,
    ModeResult,
    Window,
    atom_coupling,
    badset_probe,
    borel_schedule,
    borel_singleton_probe,
    borel_verdict,
    check_implications,
    classify,
    designated_probes,
    pointwise_distance,
    pushforward,
    sandwich_holds,
    trend,
    uniform_distance,
    uniform_distance_bruteforce,
    variation_distance,
    window_liminf,
    window_limsup,
)
from boolconv.dyadic import ClopenSet, DepthError, Dyadic
from boolconv.homomorphism import (
    HomFamily,
    PointMap,
    PointSpec,
    constant,
    identity,
    make_agree_flip,
    make_flip,
    example_families,
)

from .strategies import map_pairs


def test_window():
    w = Window(2, 5)
    assert list(w) == [2, 3, 4] and len(w) == 3
    with pytest.raises(ValueError):
        Window(3, 3)


class TestDistances:
    def test_pointwise(self):
        x3 = ClopenSet.coordinate(3, 0, 5)
        assert pointwise_distance(make_flip(3, 5), identity(5), x3) == 1
        assert pointwise_distance(make_flip(3, 5), identity(5), ClopenSet.cylinder("01", 5)) == 0
        with pytest.raises(DepthError):
            pointwise_distance(identity(2), identity(3), ClopenSet.full(0))

    def test_coupling_marginals(self):
        c = atom_coupling(make_flip(0, 2), identity(2))
        assert c.total() == 1
        left, right = c.marginals()
        assert all(v == Fraction(1, 4) for v in left.values())
        assert c.weight(1, 0) == Fraction(1, 4) and c.weight(0, 0) == 0

    def test_uniform_flip0_depth1(self):
        res = uniform_distance(identity(1), make_flip(0, 1))
        assert res.value == 1 and res.exact
        assert res.witness in (ClopenSet.cylinder("0"), ClopenSet.cylinder("1"))

    def test_uniform_self(self):
        res = uniform_distance(make_agree_flip("1", 4), make_agree_flip("1", 4))
        assert res.value == 0 and res.exact

    @pytest.mark.parametrize("word", ["", "0", "10", "011"])
    def test_uniform_agree_flip_bound(self, word):
        res = uniform_distance(make_agree_flip(word, 5), identity(5))
        assert res.value <= Fraction(1, 2 ** len(word))
        assert res.value == Fraction(1, 2 ** len(word))

    @given(map_pairs())
    def test_uniform_matches_bruteforce(self, pair):
        phi, psi = pair
        res = uniform_distance(phi, psi)
        assert res.value == uniform_distance_bruteforce(phi, psi)
        assert pointwise_distance(phi, psi, res.witness) == res.value
        assert res.value <= res.upper

    @given(map_pairs())
    def test_two_lipschitz(self, pair):
        phi, psi = pair
        assert variation_distance(pushforward(phi), pushforward(psi)) <= 2 * uniform_distance(phi, psi).value

    def test_local_search_path(self, rng):
        phi = PointMap(10, 6, rng.integers(0, 64, 1024))
        psi = PointMap(10, 6, rng.integers(0, 64, 1024))
        res = uniform_distance(phi, psi)
        assert not res.exact
        assert pointwise_distance(phi, psi, res.witness) == res.value
        for a in (ClopenSet.cylinder("0", 6), ClopenSet.coordinate(3, 1, 6)):
            assert pointwise_distance(phi, psi, a) <= res.upper
        assert uniform_distance(phi, psi, seed=5).value > 0

    def test_greedy_finds_flip_witness(self):
        res = uniform_distance(identity(12), make_flip(7, 12))
        assert res.value == 1 and res.exact
        assert pointwise_distance(identity(12), make_flip(7, 12), res.witness) == 1

    def test_bruteforce_cap(self):
        with pytest.raises(DepthError):
            uniform_distance_bruteforce(identity(4), identity(4))


class TestPushforward:
    def test_identity_uniform(self):
        p = pushforward(identity(3))
        assert p.as_vector() == [Dyadic(1, 3)] * 8

    def test_constant_point_mass(self):
        p = pushforward(constant(3, 2, 2))
        assert p.masses == {2: 1}

    def test_flip_uniform(self):
        assert pushforward(make_flip(1, 3)) == pushforward(identity(3))

    def test_variation(self):
        a, b = pushforward(constant(2, 2, 0)), pushforward(constant(2, 2, 3))
        assert variation_distance(a, a) == 0
        assert variation_distance(a, b) == 2
        with pytest.raises(ValueError, match="length mismatch"):
            variation_distance(a, pushforward(identity(3)))


class TestWindows:
    def test_constant_family(self):
        fam = HomFamily("Constant", {}, 4)
        a = ClopenSet.cylinder("01", 4)
        assert window_liminf(fam, a, Window(0, 6)) == a == window_limsup(fam, a, Window(0, 6))

    def test_agree_flip_liminf_empty(self):
        fam = HomFamily("AgreeFlip", {}, 6)
        a = ClopenSet.coordinate(0, 0, 1)
        w = Window(0, 31)  # every word of length <= 4
        assert window_liminf(fam, a, w).is_empty()
        assert window_limsup(fam, a, w) == ClopenSet.full(0)

    def test_flip_badset_liminf_empty(self):
        fam = HomFamily("Flip", {}, 12)
        probe = badset_probe(12)
        assert probe.set.measure() == Fraction(9, 16) and probe.horizon == 3
        assert window_liminf(fam, probe.set, Window(0, 12)).is_empty()

    def test_liminf_below_limsup(self):
        fam = HomFamily("Flip", {}, 6)
        a = ClopenSet.cylinder("0110")
        assert window_liminf(fam, a, Window(1, 9)) <= window_limsup(fam, a, Window(1, 9))

    def test_sandwich(self):
        for fam in example_families(6).values():
            for a in (ClopenSet.cylinder("01"), ClopenSet.coordinate(2, 1, 3)):
                assert sandwich_holds(fam, a, Window(0, 12))


class TestTrend:
    def test_holds_on_zero_tail(self):
        vals = [(k, Dyadic(1) if k < 2 else Dyadic(0)) for k in range(12)]
        assert trend(vals).verdict == "holds"

    def test_holds_on_decay(self):
        vals = [(k, Dyadic(1, k)) for k in range(12)]
        assert trend(vals).verdict == "holds"

    def test_fails_with_witness(self):
        vals = [(k, Dyadic(1, 1)) for k in range(12)]
        r = trend(vals)
        assert r.verdict == "fails" and r.value == Fraction(1, 2) and r.witness["index"] == 6

    def test_slow_decay_holds_plateau_fails(self):
        decay = [Dyadic(1)] * 8 + [Dyadic(1, 3)] * 8 + [Dyadic(1, 4)] * 16
        assert trend(list(enumerate(decay))).verdict == "holds"
        plateau = [Dyadic(1)] * 8 + [Dyadic(1, 1)] * 24
        r = trend(list(enumerate(plateau)))
        assert r.verdict == "fails" and r.value == Fraction(1, 2)

    def test_inconclusive(self):
        assert trend([(0, Dyadic(1))]).verdict == "inconclusive"
        vals = [(k, Dyadic(k % 2)) for k in range(12)]
        assert trend(vals).verdict == "inconclusive"


class TestBorel:
    def test_point_eval_stabilizes_at_one(self):
        fam = HomFamily("PointEval", {"point": ""}, 8)
        w = Window(0, 8)
        table = borel_singleton_probe(fam, PointSpec(""), borel_schedule(fam, w), w)
        assert table.status[5] == ("stable", Dyadic(1))
        assert borel_verdict(table).verdict == "fails"

    def test_constant_family_zero(self):
        fam = HomFamily("Constant", {"point": "01"}, 8)
        w = Window(0, 8)
        table = borel_singleton_probe(fam, PointSpec("01"), borel_schedule(fam, w), w)
        assert all(v == 0 for vs in table.values.values() for v in vs)
        assert borel_verdict(table).verdict == "holds"

    def test_flip_vanishing(self):
        fam = HomFamily("Flip", {}, 10)
        w = Window(0, 10)
        table = borel_singleton_probe(fam, PointSpec(""), borel_schedule(fam, w), w)
        for n in range(10):
            for d, v in zip(table.schedule, table.values[n]):
                assert v <= Fraction(2, 2 ** d)


@pytest.fixture(scope="module")
def reports():
    cfg = ClassifyConfig(depth=12, window=(0, 48))
    return {k: classify(f, cfg, k) for k, f in example_families(12).items()}


class TestClassify:
    def test_point_eval(self, reports):
        r = reports["pointEval"]
        assert r.verdicts() == {"pointwiseMetric": "holds", "uniform": "fails",
                                "algebraic": "holds", "borelProbe": "fails"}
        assert r.modes["borelProbe"].value == 1
        assert r.modes["uniform"].value == 1

    def test_agree_flip(self, reports):
        r = reports["agreeFlip"]
        assert r.verdicts() == {"pointwiseMetric": "holds", "uniform": "holds",
                                "algebraic": "fails", "borelProbe": "holds"}
        w = r.modes["algebraic"].witness
        assert w["probe"] == "{x: x(0)=0}" and w["windowLiminfEmpty"]

    def test_pair_is_conjunction(self, reports):
        for mode, verdict in reports["pair"].verdicts().items():
            parts = (reports["pointEval"].modes[mode].verdict, reports["agreeFlip"].modes[mode].verdict)
            want = "fails" if "fails" in parts else "holds" if parts == ("holds", "holds") else "inconclusive"
            assert verdict == want

    def test_flip(self, reports):
        r = reports["flip"]
        assert r.verdicts() == {"pointwiseMetric": "holds", "uniform": "fails",
                                "algebraic": "fails", "borelProbe": "holds"}
        assert r.modes["uniform"].value == 1
        assert r.modes["algebraic"].witness["probe"].startswith("B_")
        assert r.modes["algebraic"].value >= Fraction(1, 2)

    def test_restriction(self, reports):
        r = reports["restriction"]
        assert r.modes["algebraic"].verdict == "holds"
        assert r.modes["uniform"].verdict == "fails"

    def test_fails_carry_nonzero_witness(self, reports):
        for r in reports.values():
            for m in r.modes.values():
                if m.verdict == "fails":
                    assert m.value is not None and m.value > 0

    def test_json_schema(self, reports):
        data = reports["flip"].to_json()
        assert data["depth"] == 12 and data["window"] == [0, 48]
        assert set(data["modes"]) == {"pointwiseMetric", "uniform", "algebraic", "borelProbe"}
        assert data["modes"]["uniform"]["value"] == {"num": 1, "exp": 0}

    def test_csv_rows(self, reports):
        rows = reports["pointEval"].csv_rows()
        assert rows and all(len(r) == 5 for r in rows)

    def test_weak_star_auxiliary(self, reports):
        assert all(r.auxiliary["weakStar"].verdict == "holds" for r in reports.values())

    def test_parallel_same_result(self, reports):
        cfg = ClassifyConfig(depth=12, window=(0, 48), parallel=True)
        r = classify(example_families(12)["flip"], cfg, "flip")
        assert r.to_json() == reports["flip"].to_json()

    def test_constant_family_all_hold(self):
        r = classify(HomFamily("Constant", {}, 6), ClassifyConfig(6, (0, 16)))
        assert set(r.verdicts().values()) == {"holds"}

    def test_implication_guard(self):
        modes = {m: ModeResult("holds") for m in ("pointwiseMetric", "uniform", "algebraic", "borelProbe")}
        modes["borelProbe"] = ModeResult("fails", Dyadic(1))
        with pytest.raises(InvariantViolation):
            check_implications(modes)


def test_designated_probes():
    names = [p.name for p in designated_probes(HomFamily("Flip", {}, 12))]
    assert names[:4] == ["X_0", "X_1", "X_2", "X_3"] and names[-1] == "B_1"
    assert [p.name for p in designated_probes(HomFamily("AgreeFlip", {}, 6))][0] == "{x: x(0)=0}"


@pytest.mark.parametrize("depth,window", [(6, (0, 16)), (8, (0, 32)), (10, (4, 40))])
def test_no_implication_violations_across_scales(depth, window):
    for name, fam in example_families(depth).items():
        r = classify(fam, ClassifyConfig(depth, window), name)
        for m in r.modes.values():
            if m.verdict == "fails":
                assert m.value > 0
