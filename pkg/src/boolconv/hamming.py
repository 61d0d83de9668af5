"""Radius-1 covering codes and perfect Hamming codes.

Words of length ``n`` are unsigned integers; bit ``i`` holds coordinate ``i``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

EXHAUSTIVE_MAX_N = 15


class CodeError(ValueError):
    pass


@dataclass(frozen=True)
class ParityCheck:
    """Parity-check matrix with all nonzero columns of length ``m``.

    Columns are stored as integers (bit ``k`` = row ``k``).  Non-unit columns
    come first in increasing order, the ``m`` unit vectors last.
    """

    m: int
    columns: tuple[int, ...]

    @classmethod
    def hamming(cls, m: int) -> "ParityCheck":
        n = (1 << m) - 1
        units = [1 << k for k in range(m)]
        others = [c for c in range(1, n + 1) if c & (c - 1)]
        return cls(m, tuple(others + units))

    @property
    def n(self) -> int:
        return len(self.columns)

    def matrix(self) -> np.ndarray:
        return np.array([[(c >> k) & 1 for c in self.columns] for k in range(self.m)], dtype=np.uint8)

    def syndrome(self, word: int) -> int:
        s = 0
        for i, col in enumerate(self.columns):
            if (word >> i) & 1:
                s ^= col
        return s

    def columns_ok(self) -> bool:
        return 0 not in self.columns and len(set(self.columns)) == len(self.columns)


class KernelWords:
    """Lazy view of ``{v : Hv = 0}``; used when the code is too big to list."""

    def __init__(self, check: ParityCheck):
        self.check = check
        self.data_len = check.n - check.m

    def __len__(self):
        return 1 << self.data_len

    def __contains__(self, word):
        return 0 <= word < (1 << self.check.n) and self.check.syndrome(word) == 0

    def __iter__(self):
        for d in range(len(self)):
            yield _encode(self.check, d)


def _encode(check: ParityCheck, data: int) -> int:
    # the unit columns sit at the back, so the parity bits equal the data syndrome
    k = check.n - check.m
    return data | (check.syndrome(data) << k)


@dataclass(frozen=True)
class Code:
    n: int
    words: tuple[int, ...] | KernelWords
    parity_check: ParityCheck | None = None

    def __len__(self):
        return len(self.words)

    @classmethod
    def from_words(cls, n: int, words) -> "Code":
        ws = sorted(set(_as_word(w, n) for w in words))
        return cls(n, tuple(ws))

    def ratio(self) -> Fraction:
        return Fraction(len(self), 1 << self.n)

    def to_json(self) -> dict:
        out = {"n": self.n, "size": len(self)}
        if isinstance(self.words, tuple):
            out["words"] = [format(w, f"0{self.n}b")[::-1] for w in self.words]
        return out


def _as_word(w, n: int) -> int:
    if isinstance(w, str):
        if len(w) != n:
            raise CodeError(f"word {w!r} is not of length {n}")
        return sum(int(ch) << i for i, ch in enumerate(w))
    w = int(w)
    if not 0 <= w < (1 << n):
        raise CodeError(f"word {w} out of range for length {n}")
    return w


def perfect_code(m: int) -> Code:
    """Kernel of the Hamming parity-check matrix, length ``2**m - 1``."""
    if m < 2:
        raise CodeError(f"perfect codes need m >= 2, got {m}")
    if m > 5:
        raise CodeError(f"m = {m} too large (at most 5)")
    check = ParityCheck.hamming(m)
    if check.n <= EXHAUSTIVE_MAX_N:
        words = tuple(sorted(_encode(check, d) for d in range(1 << (check.n - m))))
    else:
        words = KernelWords(check)
    return Code(check.n, words, check)


def _membership(code: Code) -> np.ndarray:
    member = np.zeros(1 << code.n, dtype=np.uint8)
    member[np.fromiter(code.words, dtype=np.int64, count=len(code))] = 1
    return member


def ball_counts(code: Code) -> np.ndarray:
    """For every word, how many codewords lie within Hamming distance 1."""
    member = _membership(code)
    words = np.arange(1 << code.n)
    counts = member.astype(np.int64)
    for i in range(code.n):
        counts += member[words ^ (1 << i)]
    return counts


def verify_perfect(code: Code) -> dict:
    """Check that the radius-1 balls around codewords are disjoint and cover."""
    if code.n <= EXHAUSTIVE_MAX_N:
        counts = ball_counts(code)
        return {
            "disjoint": bool(counts.max(initial=0) <= 1),
            "covering": bool(counts.min() >= 1),
            "mode": "exhaustive",
        }
    return _verify_structural(code)


def _verify_structural(code: Code) -> dict:
    if code.parity_check is not None:
        # linear code: minimum distance >= 3 iff H has distinct nonzero columns
        disjoint = code.parity_check.columns_ok()
    else:
        disjoint = min_distance(code) >= 3
    covering = disjoint and len(code) * (code.n + 1) == 1 << code.n
    return {"disjoint": disjoint, "covering": covering, "mode": "structural"}


def verify_structural(code: Code) -> dict:
    return _verify_structural(code)


def min_distance(code: Code) -> int:
    ws = list(code.words)
    if len(ws) < 2:
        return code.n + 1
    return min((a ^ b).bit_count() for a, b in combinations(ws, 2))


def is_code(code: Code) -> bool:
    """Radius-1 covering property (exhaustive)."""
    return bool(ball_counts(code).min() >= 1)


def extend_code(code: Code) -> Code:
    """Append one free coordinate: ``{x0, x1 : x in code}``."""
    top = 1 << code.n
    words = []
    for w in code.words:
        words += [w, w | top]
    return Code.from_words(code.n + 1, words)


def minimal_code(n: int) -> tuple[int, Code]:
    """Smallest radius-1 covering code in ``{0,1}^n`` by exhaustive search."""
    if n > 4:
        raise CodeError("exhaustive minimal-code search is capped at n = 4")
    if n < 1:
        raise CodeError("n must be positive")
    size = 1 << n
    balls = [sum(1 << (w ^ (1 << i)) for i in range(n)) | (1 << w) for w in range(size)]
    everything = (1 << size) - 1
    for k in range(1, size + 1):
        for combo in combinations(range(size), k):
            cover = 0
            for w in combo:
                cover |= balls[w]
            if cover == everything:
                return k, Code.from_words(n, combo)
    raise AssertionError("unreachable: the whole cube is a code")


def code_ratio_table(max_m: int) -> list[dict]:
    """Upper bounds on ``a_n = c_n / 2**n`` for ``n < 2**max_m``.

    At ``n = 2**m - 1`` the bound comes from the perfect code.  In between,
    ``extend_code`` keeps the ratio, so the bound from the last perfect length
    carries forward.  Small ``n`` use the exhaustive minimum where it is sharper.
    """
    if not 2 <= max_m <= 5:
        raise CodeError("max_m must be in [2, 5]")
    rows = []
    # the one-word code of length 1 extended n-1 times
    bound, source = Fraction(1, 2), "extended"
    for n in range(1, 1 << max_m):
        if n >= 3 and n & (n + 1) == 0:
            bound, source = min(bound, Fraction(1, n + 1)), "perfect"
        elif source == "perfect":
            source = "extended"
        exact = Fraction(minimal_code(n)[0], 1 << n) if n <= 4 else None
        row_bound, row_source = bound, source
        if exact is not None and exact < row_bound:
            row_bound, row_source = exact, "exhaustive"
        rows.append({"n": n, "bound": row_bound, "source": row_source, "exact": exact})
    return rows
