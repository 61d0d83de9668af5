from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from boolconv.dyadic import (
    ClopenSet,
    DepthError,
    Dyadic,
    atom_to_word,
    depth_cap,
    fn_distance,
    refine,
    word_to_atom,
)

from .strategies import clopen_triples, clopens


class TestDyadic:
    def test_canonical_form(self):
        assert Dyadic(4, 3) == Dyadic(1, 1)
        assert (Dyadic(4, 3).num, Dyadic(4, 3).exp) == (1, 1)
        assert Dyadic(0, 7).exp == 0

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            Dyadic(-1, 0)

    def test_arithmetic_exact(self):
        assert Dyadic(3, 2) + Dyadic(1, 3) == Fraction(7, 8)
        assert Dyadic(3, 2) - Dyadic(1, 2) == Fraction(1, 2)
        assert Dyadic(3, 2) * Dyadic(1, 1) == Fraction(3, 8)
        assert 2 * Dyadic(1, 2) == Dyadic(1, 1)
        assert Dyadic(1).half(3) == Fraction(1, 8)

    def test_ordering_mixes_types(self):
        assert Dyadic(1, 2) < Fraction(1, 3) < Dyadic(1, 1)
        assert Dyadic(2, 1) == 1
        assert max(Dyadic(3, 4), Dyadic(1, 2)) == Dyadic(1, 2)

    def test_from_fraction(self):
        assert Dyadic.from_fraction(Fraction(5, 16)) == Dyadic(5, 4)
        with pytest.raises(ValueError):
            Dyadic.from_fraction(Fraction(1, 3))

    def test_json(self):
        assert Dyadic(6, 4).to_json() == {"num": 3, "exp": 3}
        assert Dyadic.from_json({"num": 3, "exp": 3}) == Fraction(3, 8)
        assert str(Dyadic(3, 3)) == "3/8"

    @given(st.integers(0, 10**6), st.integers(0, 40), st.integers(0, 10**6), st.integers(0, 40))
    def test_matches_fraction(self, a, e, b, f):
        x, y = Dyadic(a, e), Dyadic(b, f)
        fx, fy = Fraction(a, 2**e), Fraction(b, 2**f)
        assert (x + y).to_fraction() == fx + fy
        assert (x * y).to_fraction() == fx * fy
        assert (x < y) == (fx < fy)
        assert (hash(x) == hash(y)) or x != y


class TestWords:
    def test_roundtrip(self):
        assert word_to_atom("011") == 0b110
        assert atom_to_word(0b110, 3) == "011"
        assert word_to_atom((1, 0)) == 1

    def test_bad_word(self):
        with pytest.raises(ValueError):
            word_to_atom("012")


class TestClopenSet:
    def test_empty_full(self):
        assert ClopenSet.empty(3).measure() == 0
        assert ClopenSet.full(3).measure() == 1
        assert ClopenSet.full(0) == ClopenSet.full(5)

    def test_cylinder(self):
        c = ClopenSet.cylinder("01")
        assert c.depth == 2 and c.measure() == Fraction(1, 4)
        assert c.refine(5).measure() == Fraction(1, 4)
        assert ClopenSet.cylinder("") == ClopenSet.full(0)

    def test_coordinate(self):
        x2 = ClopenSet.coordinate(2, 0, 4)
        assert x2.measure() == Fraction(1, 2)
        assert all(((a >> 2) & 1) == 0 for a in x2.atoms())
        with pytest.raises(DepthError):
            ClopenSet.coordinate(4, 0, 4)

    def test_refine_preserves_measure_and_membership(self):
        a = ClopenSet(2, 0b0110)
        r = a.refine(4)
        assert r.measure() == a.measure()
        assert all((atom & 3) in (1, 2) for atom in r.atoms())
        with pytest.raises(DepthError, match="cannot coarsen"):
            r.refine(2)
        assert refine(a, 4) == r

    def test_operations_align_depths(self):
        a = ClopenSet.cylinder("0")
        b = ClopenSet.cylinder("01")
        assert (a & b) == b
        assert (a | b) == a
        assert b <= a and not a <= b
        assert (a - b).measure() == Fraction(1, 4)
        assert (a ^ ~a) == ClopenSet.full(0)

    def test_equality_and_hash_across_depths(self):
        a = ClopenSet.cylinder("1")
        assert a == a.refine(6)
        assert hash(a) == hash(a.refine(6))
        assert len({a, a.refine(3), a.refine(6)}) == 1

    def test_flip(self):
        a = ClopenSet.cylinder("01")
        assert a.flip(1) == ClopenSet.cylinder("00")
        assert a.flip(5) == a  # coordinate not read

    def test_depth_cap(self, monkeypatch):
        assert depth_cap() == 24
        with pytest.raises(DepthError):
            ClopenSet.empty(25)
        monkeypatch.setenv("BOOLCONV_DEPTH_CAP", "8")
        assert depth_cap() == 8
        with pytest.raises(DepthError):
            ClopenSet.empty(9)
        monkeypatch.setenv("BOOLCONV_DEPTH_CAP", "40")
        assert depth_cap() == 24  # only lowers

    def test_array_roundtrip(self):
        a = ClopenSet(4, 0b1010_0000_1100_0011)
        assert ClopenSet.from_array(4, a.to_array()) == a
        assert ClopenSet.from_atoms(4, a.atoms()) == a

    @given(clopens())
    def test_json_roundtrip(self, a):
        b = ClopenSet.from_json(a.to_json())
        assert b == a and b.depth == a.depth

    @given(clopen_triples())
    def test_modularity(self, abc):
        a, b, _ = abc
        assert (a | b).measure() + (a & b).measure() == a.measure() + b.measure()

    @given(clopen_triples())
    def test_triangle(self, abc):
        a, b, c = abc
        assert fn_distance(a, c) <= fn_distance(a, b) + fn_distance(b, c)

    @given(clopen_triples())
    def test_boolean_laws(self, abc):
        a, b, c = abc
        assert ~(a | b) == (~a & ~b)
        assert a & (b | c) == (a & b) | (a & c)
        assert (a ^ b).measure() == fn_distance(a, b)

    @given(clopen_triples(), st.integers(0, 7))
    def test_flip_is_isometric_involution(self, abc, n):
        a, b, _ = abc
        assert a.flip(n).flip(n) == a
        assert fn_distance(a.flip(n), b.flip(n)) == fn_distance(a, b)
        assert a.flip(n).measure() == a.measure()

    @given(clopens(max_depth=4), st.integers(0, 3))
    def test_refine_commutes_with_operations(self, a, extra):
        d = min(a.depth + extra, 8)
        assert (~a).refine(d) == ~a.refine(d)
        assert a.refine(d).measure() == a.measure()
