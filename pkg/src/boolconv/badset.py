"""Staged construction of a large closed set that every point leaves under flips.

Stage ``n`` has a depth ``d_n`` and a set ``C_n`` of words of length ``d_n``,
stored as the clopen set ``U_n = union of [c]``.  ``B_n`` is the complement of
``U_n``.  Each step appends ``k = 2**m - 1`` coordinates: words already in
``C_n`` keep every extension, the remaining words are extended by a perfect
code of length ``k``.  Every word left outside ``C_{n+1}`` then sits at Hamming
distance one, inside the new block of coordinates, from a word in ``C_{n+1}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .dyadic import ClopenSet, Dyadic, atom_to_word, depth_cap
from .hamming import Code, perfect_code


class ConstructionError(ValueError):
    pass


@dataclass(frozen=True)
class Stage:
    depth: int
    covered: ClopenSet          # union of [c] for c in C_n
    block_code: Code | None = None  # code used to extend into this stage

    @property
    def size(self) -> int:
        return self.covered.count()

    @property
    def bad(self) -> ClopenSet:
        return self.covered.complement()

    def words(self) -> list[str]:
        return [atom_to_word(a, self.depth) for a in self.covered.atoms()]


@dataclass
class BadSetConstruction:
    target: Fraction
    stages: list[Stage] = field(default_factory=list)
    requested: int | None = None
    stop_reason: str | None = None

    @property
    def depths(self) -> list[int]:
        return [s.depth for s in self.stages]

    @property
    def complete(self) -> bool:
        return self.requested is None or len(self.stages) - 1 >= self.requested

    def bad_set(self, n: int = -1) -> ClopenSet:
        return self.stages[n].bad

    def to_json(self) -> dict:
        rows = []
        for i, s in enumerate(self.stages):
            m = s.bad.measure()
            rows.append({
                "stage": i,
                "depth": s.depth,
                "codeSize": s.size,
                "blockLength": s.block_code.n if s.block_code else None,
                "measure": m.to_json(),
                "measureExact": str(m),
                "measureFloat": float(m),
            })
        return {
            "target": str(self.target),
            "stages": rows,
            "complete": self.complete,
            "requestedStages": self.requested,
            "stopReason": self.stop_reason,
        }


def _smallest_perfect_length(bound: Fraction) -> int:
    """Smallest m >= 2 with 1 / 2**m < bound, i.e. 1/(k+1) < bound for k = 2**m - 1."""
    if bound <= 0:
        raise ConstructionError("no code ratio below a non-positive bound")
    m = 2
    while Fraction(1, 1 << m) >= bound:
        m += 1
    return m


def _block_set(code: Code, low_depth: int) -> ClopenSet:
    """``{t + c : t any word of length low_depth, c in code}`` at depth low_depth + code.n."""
    depth = low_depth + code.n
    high = np.arange(1 << depth) >> low_depth
    mask = np.isin(high, np.fromiter(code.words, dtype=np.int64, count=len(code)))
    return ClopenSet.from_array(depth, mask)


def build_stages(target=Fraction(1, 2), num_stages: int | None = None, depth_limit: int | None = None) -> BadSetConstruction:
    """Build stages ``0..num_stages`` (or as many as fit under the depth limit).

    ``B_n`` has measure strictly above ``target`` at every stage.  When the
    limit stops the build early the construction is returned with
    ``complete == False`` and ``stop_reason`` set.
    """
    target = Fraction(target)
    if not 0 < target < 1:
        raise ConstructionError(f"target must lie in (0, 1), got {target}")
    limit = depth_cap() if depth_limit is None else min(depth_limit, depth_cap())
    free = 1 - target

    m0 = _smallest_perfect_length(free)
    seed = perfect_code(m0)
    if seed.n > limit:
        raise ConstructionError(f"seed depth {seed.n} exceeds depth limit {limit}")
    con = BadSetConstruction(target, requested=num_stages)
    con.stages.append(Stage(seed.n, ClopenSet.from_atoms(seed.n, seed.words), seed))

    while num_stages is None or len(con.stages) - 1 < num_stages:
        cur = con.stages[-1]
        total = 1 << cur.depth
        alpha = (free * total - cur.size) / (total - cur.size)
        m = _smallest_perfect_length(alpha)
        k = (1 << m) - 1
        if cur.depth + k > limit:
            con.stop_reason = (
                f"next stage needs depth {cur.depth + k} > limit {limit} (alpha = {alpha})"
            )
            break
        if m > 5:
            con.stop_reason = f"block code length {k} beyond supported perfect codes"
            break
        code = perfect_code(m)
        covered = cur.covered.refine(cur.depth + k) | _block_set(code, cur.depth)
        con.stages.append(Stage(cur.depth + k, covered, code))
    return con


def stage_escape(con: BadSetConstruction, n: int) -> tuple[bool, np.ndarray]:
    """Escape check between stages n and n+1, with a witness coordinate per word.

    ``witness[s]`` is the least ``m`` in ``[d_n, d_{n+1})`` with
    ``flip_m(s) in C_{n+1}``; ``-1`` for words already in ``C_{n+1}``, and
    ``-2`` for an excluded word with no such ``m`` (a violation).
    """
    if not 0 <= n < len(con.stages) - 1:
        raise IndexError(f"stage {n} has no successor")
    lo, nxt = con.stages[n].depth, con.stages[n + 1]
    inside = nxt.covered.to_array()
    witness = np.where(inside, -1, -2).astype(np.int64)
    for m in range(lo, nxt.depth):
        moved = nxt.covered.flip(m).to_array()  # s with flip_m(s) in C_{n+1}
        witness[(witness == -2) & moved] = m
    return bool((witness != -2).all()), witness


def verify_conditions(con: BadSetConstruction) -> dict:
    """Exhaustive check of the four stage conditions; each entry has ``ok`` and a witness.

    ``"1"`` depths strictly increase, ``"2"`` ``|C_n| < (1 - target) 2**d_n``,
    ``"3"`` every extension of a word in ``C_n`` is in ``C_{n+1}``, ``"4"``
    every word outside ``C_{n+1}`` moves into it by one flip in ``[d_n, d_{n+1})``.
    """
    report = {}
    stages = con.stages
    free = 1 - con.target

    bad_depth = next(
        (i for i in range(1, len(stages)) if stages[i].depth <= stages[i - 1].depth), None
    )
    report["1"] = {"ok": bad_depth is None, "witness": bad_depth}

    over = next((i for i, s in enumerate(stages) if not s.size < free * (1 << s.depth)), None)
    report["2"] = {"ok": over is None, "witness": over}

    ext = None
    for i in range(len(stages) - 1):
        lost = stages[i].covered.refine(stages[i + 1].depth) - stages[i + 1].covered
        if not lost.is_empty():
            a = lost.atoms()[0]
            ext = {"stage": i, "word": atom_to_word(a, stages[i + 1].depth)}
            break
    report["3"] = {"ok": ext is None, "witness": ext}

    esc = None
    for i in range(len(stages) - 1):
        ok, witness = stage_escape(con, i)
        if not ok:
            a = int(np.flatnonzero(witness == -2)[0])
            esc = {"stage": i, "word": atom_to_word(a, stages[i + 1].depth)}
            break
    report["4"] = {"ok": esc is None, "witness": esc}
    return report


def window_flip_intersection(con: BadSetConstruction, j: int, start: int | None = None) -> Dyadic:
    """Measure of the meet of ``flip_m[B_last]`` over ``m`` in ``[d_j, d_last)``.

    ``start`` overrides the lower end of the coordinate range.
    """
    if not 0 <= j < len(con.stages) - 1:
        raise IndexError(f"stage {j} has no successor")
    last = con.stages[-1]
    lo = con.stages[j].depth if start is None else start
    bad = last.bad
    meet = ClopenSet.full(last.depth)
    for m in range(lo, last.depth):
        meet = meet & bad.flip(m)
    return meet.measure()


def escape_invariant(con: BadSetConstruction) -> dict:
    """Every atom of ``B_last`` leaves ``B_{j+1}`` under some flip inside stage ``j``."""
    last = con.stages[-1]
    bad = last.bad
    out = {}
    for j in range(len(con.stages) - 1):
        lo, hi = con.stages[j].depth, con.stages[j + 1].depth
        nxt = con.stages[j + 1].covered.refine(last.depth)
        escaped = ClopenSet.empty(last.depth)
        for m in range(lo, hi):
            escaped = escaped | nxt.flip(m)
        out[j] = bad.issubset(escaped)
    return out


def size_recursion_holds(con: BadSetConstruction) -> bool:
    """``|C_{n+1}| = 2**k |C_n| + (2**d_n - |C_n|) |C|`` with ``|C| = 2**k / (k+1)``."""
    for cur, nxt in zip(con.stages, con.stages[1:]):
        k = nxt.depth - cur.depth
        code_size = (1 << k) // (k + 1)
        if len(nxt.block_code) != code_size:
            return False
        expected = (cur.size << k) + ((1 << cur.depth) - cur.size) * code_size
        if nxt.size != expected:
            return False
    return True
