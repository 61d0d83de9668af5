"""Exact finite-depth clopen algebra of Cantor space.

A depth-``n`` clopen set is stored as a Python integer used as a bit-vector
of length ``2**n``.  Bit ``i`` is set when the cylinder spelled by the binary
digits of ``i`` belongs to the set, least significant bit = coordinate 0.
So the word ``s = s(0) s(1) ... s(n-1)`` is atom ``sum(s(j) << j)``.

All measures are exact dyadic rationals.
"""
from __future__ import annotations

import os
from fractions import Fraction
from functools import total_ordering

import numpy as np

DEFAULT_DEPTH_CAP = 24


class DepthError(ValueError):
    """Raised when a depth request is invalid or exceeds the cap."""


def depth_cap() -> int:
    """Global depth cap; ``BOOLCONV_DEPTH_CAP`` may only lower it."""
    raw = os.environ.get("BOOLCONV_DEPTH_CAP")
    if raw is None:
        return DEFAULT_DEPTH_CAP
    try:
        value = int(raw)
    except ValueError:
        raise DepthError(f"BOOLCONV_DEPTH_CAP must be an integer, got {raw!r}")
    if value < 0:
        raise DepthError("BOOLCONV_DEPTH_CAP must be non-negative")
    return min(value, DEFAULT_DEPTH_CAP)


def check_depth(depth: int) -> int:
    depth = int(depth)
    if depth < 0:
        raise DepthError(f"negative depth {depth}")
    cap = depth_cap()
    if depth > cap:
        raise DepthError(f"depth {depth} exceeds cap {cap}")
    return depth


@total_ordering
class Dyadic:
    """Non-negative exact number ``num / 2**exp`` in canonical form."""

    __slots__ = ("num", "exp")

    def __init__(self, num: int, exp: int = 0):
        num, exp = int(num), int(exp)
        if num < 0 or exp < 0:
            raise ValueError(f"Dyadic needs num >= 0 and exp >= 0, got {num}, {exp}")
        if num == 0:
            exp = 0
        elif exp:
            tz = min((num & -num).bit_length() - 1, exp)
            num >>= tz
            exp -= tz
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    @classmethod
    def from_fraction(cls, value) -> "Dyadic":
        value = Fraction(value)
        den = value.denominator
        if den & (den - 1):
            raise ValueError(f"{value} is not dyadic")
        return cls(value.numerator, den.bit_length() - 1)

    @classmethod
    def coerce(cls, value) -> "Dyadic":
        return value if isinstance(value, Dyadic) else cls.from_fraction(value)

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    def _align(self, other: "Dyadic"):
        e = max(self.exp, other.exp)
        return self.num << (e - self.exp), other.num << (e - other.exp), e

    def __add__(self, other):
        if not isinstance(other, (Dyadic, int)):
            return NotImplemented
        a, b, e = self._align(Dyadic.coerce(other))
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, (Dyadic, int)):
            return NotImplemented
        a, b, e = self._align(Dyadic.coerce(other))
        return Dyadic(a - b, e)

    def __mul__(self, other):
        if isinstance(other, int):
            return Dyadic(self.num * other, self.exp)
        if isinstance(other, Dyadic):
            return Dyadic(self.num * other.num, self.exp + other.exp)
        return NotImplemented

    __rmul__ = __mul__

    def half(self, times: int = 1) -> "Dyadic":
        return Dyadic(self.num, self.exp + times)

    def __eq__(self, other):
        if isinstance(other, Dyadic):
            return self.num == other.num and self.exp == other.exp
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() == other
        return NotImplemented

    def __lt__(self, other):
        if isinstance(other, Dyadic):
            a, b, _ = self._align(other)
            return a < b
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() < other
        return NotImplemented

    def __hash__(self):
        return hash(self.to_fraction())

    def __bool__(self):
        return self.num != 0

    def __float__(self):
        return self.num / (1 << self.exp) if self.exp < 1000 else float(self.to_fraction())

    def __repr__(self):
        return f"Dyadic({self})"

    def __str__(self):
        return str(self.num) if self.exp == 0 else f"{self.num}/{1 << self.exp}"

    def to_json(self) -> dict:
        return {"num": self.num, "exp": self.exp}

    @classmethod
    def from_json(cls, data: dict) -> "Dyadic":
        return cls(data["num"], data["exp"])


ZERO = Dyadic(0)
ONE = Dyadic(1)


def _repeat(bits: int, period: int, times_log2: int) -> int:
    # tile a period-length bit pattern 2**times_log2 times
    for _ in range(times_log2):
        bits |= bits << period
        period <<= 1
    return bits


def word_to_atom(word) -> int:
    """``"011"`` or ``(0, 1, 1)`` -> atom index with coordinate 0 as the low bit."""
    atom = 0
    for j, ch in enumerate(word):
        bit = int(ch)
        if bit not in (0, 1):
            raise ValueError(f"not a binary word: {word!r}")
        atom |= bit << j
    return atom


def atom_to_word(atom: int, depth: int) -> str:
    return "".join(str((atom >> j) & 1) for j in range(depth))


class ClopenSet:
    """Immutable depth-``n`` clopen subset of Cantor space."""

    __slots__ = ("depth", "bits")

    def __init__(self, depth: int, bits: int = 0):
        depth = check_depth(depth)
        bits = int(bits)
        if bits < 0 or bits >> (1 << depth):
            raise ValueError(f"bit-vector does not fit depth {depth}")
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "bits", bits)

    def __setattr__(self, name, value):
        raise AttributeError("ClopenSet is immutable")

    # construction

    @classmethod
    def empty(cls, depth: int) -> "ClopenSet":
        return cls(depth, 0)

    @classmethod
    def full(cls, depth: int) -> "ClopenSet":
        depth = check_depth(depth)
        return cls(depth, (1 << (1 << depth)) - 1)

    @classmethod
    def cylinder(cls, word, depth: int | None = None) -> "ClopenSet":
        """The set ``[s]`` of points extending the finite word ``s``."""
        k = len(word)
        base = cls(k, 1 << word_to_atom(word))
        return base if depth is None else base.refine(depth)

    @classmethod
    def coordinate(cls, n: int, value: int, depth: int) -> "ClopenSet":
        """``{x : x(n) = value}`` at the given depth (``n < depth``)."""
        if not 0 <= n < depth:
            raise DepthError(f"coordinate {n} not below depth {depth}")
        period = 1 << n
        block = ((1 << period) - 1) << (period if value else 0)
        return cls(depth, _repeat(block, 2 * period, depth - n - 1))

    @classmethod
    def from_atoms(cls, depth: int, atoms) -> "ClopenSet":
        bits = 0
        for a in atoms:
            bits |= 1 << int(a)
        return cls(depth, bits)

    @classmethod
    def from_array(cls, depth: int, mask) -> "ClopenSet":
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (1 << depth,):
            raise ValueError(f"mask length {mask.shape} does not match depth {depth}")
        packed = np.packbits(mask, bitorder="little")
        return cls(depth, int.from_bytes(packed.tobytes(), "little"))

    def to_array(self) -> np.ndarray:
        size = 1 << self.depth
        raw = self.bits.to_bytes((size + 7) // 8, "little")
        return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:size].astype(bool)

    # measure

    def count(self) -> int:
        return self.bits.bit_count()

    def measure(self) -> Dyadic:
        return Dyadic(self.count(), self.depth)

    def is_empty(self) -> bool:
        return self.bits == 0

    def atoms(self) -> list[int]:
        return np.flatnonzero(self.to_array()).tolist()

    def __contains__(self, atom: int) -> bool:
        return bool((self.bits >> atom) & 1)

    # resolution

    def refine(self, depth: int) -> "ClopenSet":
        depth = check_depth(depth)
        if depth < self.depth:
            raise DepthError(f"cannot coarsen from depth {self.depth} to {depth}")
        if depth == self.depth:
            return self
        return ClopenSet(depth, _repeat(self.bits, 1 << self.depth, depth - self.depth))

    def _common(self, other: "ClopenSet"):
        d = max(self.depth, other.depth)
        return self.refine(d).bits, other.refine(d).bits, d

    # Boolean algebra

    def meet(self, other: "ClopenSet") -> "ClopenSet":
        a, b, d = self._common(other)
        return ClopenSet(d, a & b)

    def join(self, other: "ClopenSet") -> "ClopenSet":
        a, b, d = self._common(other)
        return ClopenSet(d, a | b)

    def symdiff(self, other: "ClopenSet") -> "ClopenSet":
        a, b, d = self._common(other)
        return ClopenSet(d, a ^ b)

    def difference(self, other: "ClopenSet") -> "ClopenSet":
        a, b, d = self._common(other)
        return ClopenSet(d, a & ~b)

    def complement(self) -> "ClopenSet":
        return ClopenSet(self.depth, self.bits ^ ((1 << (1 << self.depth)) - 1))

    __and__ = meet
    __or__ = join
    __xor__ = symdiff
    __sub__ = difference
    __invert__ = complement

    def issubset(self, other: "ClopenSet") -> bool:
        a, b, _ = self._common(other)
        return a & ~b == 0

    __le__ = issubset

    def flip(self, n: int) -> "ClopenSet":
        """Image under the map flipping coordinate ``n`` (identity if ``n >= depth``)."""
        if n >= self.depth:
            return self
        arr = self.to_array().reshape(-1, 2, 1 << n)[:, ::-1, :].reshape(-1)
        return ClopenSet.from_array(self.depth, arr)

    def __eq__(self, other):
        if not isinstance(other, ClopenSet):
            return NotImplemented
        a, b, _ = self._common(other)
        return a == b

    def __hash__(self):
        # equal sets at different depths must hash alike: hash the coarsest form
        c = self.coarsest()
        return hash((c.depth, c.bits))

    def coarsest(self) -> "ClopenSet":
        s = self
        while s.depth > 0:
            half = 1 << (s.depth - 1)
            low = s.bits & ((1 << half) - 1)
            if s.bits >> half != low:
                break
            s = ClopenSet(s.depth - 1, low)
        return s

    def __repr__(self):
        return f"ClopenSet(depth={self.depth}, measure={self.measure()})"

    # serialization

    def to_json(self) -> dict:
        width = max(1, (1 << self.depth) // 4)
        return {"depth": self.depth, "atoms_hex": format(self.bits, "x").zfill(width)}

    @classmethod
    def from_json(cls, data: dict) -> "ClopenSet":
        return cls(data["depth"], int(data["atoms_hex"], 16))


def measure(a: ClopenSet) -> Dyadic:
    return a.measure()


def fn_distance(a: ClopenSet, b: ClopenSet) -> Dyadic:
    """Frechet-Nikodym distance: measure of the symmetric difference."""
    return a.symdiff(b).measure()


def refine(a: ClopenSet, depth: int) -> ClopenSet:
    return a.refine(depth)
