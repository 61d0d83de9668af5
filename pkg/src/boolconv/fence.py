"""Fence painting: heavy item sets whose two colour images are disjoint.

Each item carries a positive rational weight and two colours ``f`` and ``g``.
A set ``L`` is feasible when no colour used by ``f`` on ``L`` is also used by
``g`` on ``L``.  Any instance with ``f != g`` on every item has a feasible set
carrying at least a quarter of the total weight; :func:`solve_guarantee`
finds one deterministically.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction

import numpy as np

from .dyadic import ClopenSet, Dyadic, fn_distance
from .homomorphism import PointMap

EXACT_COLOR_CAP = 24
ORACLE_ITEM_CAP = 20


class FenceError(ValueError):
    pass


@dataclass(frozen=True)
class FenceItem:
    weight: Fraction
    f: int
    g: int


@dataclass(frozen=True)
class FenceInstance:
    items: tuple[FenceItem, ...]

    @classmethod
    def from_triples(cls, triples) -> "FenceInstance":
        items = []
        for w, f, g in triples:
            w = Fraction(w)
            if w <= 0:
                raise FenceError(f"item weight must be positive, got {w}")
            items.append(FenceItem(w, int(f), int(g)))
        return cls(tuple(items))

    def __len__(self):
        return len(self.items)

    @cached_property
    def scaled(self) -> tuple[int, list[int]]:
        """Common denominator and integer numerators of the weights."""
        den = math.lcm(*(it.weight.denominator for it in self.items)) if self.items else 1
        return den, [it.weight.numerator * (den // it.weight.denominator) for it in self.items]

    @property
    def total(self) -> Fraction:
        den, ws = self.scaled
        return Fraction(sum(ws), den)

    def common_colors(self) -> list[int]:
        return sorted({it.f for it in self.items} & {it.g for it in self.items})

    def to_json(self) -> list[dict]:
        return [{"w": str(it.weight), "f": it.f, "g": it.g} for it in self.items]

    @classmethod
    def from_json(cls, data) -> "FenceInstance":
        return cls.from_triples((d["w"], d["f"], d["g"]) for d in data)


@dataclass(frozen=True)
class FenceSolution:
    items: tuple[int, ...]  # indices into the instance
    value: Fraction
    colors: frozenset | None = None  # f-side colours among the common ones
    method: str = ""

    def to_json(self) -> dict:
        out = {"method": self.method, "value": str(self.value), "items": list(self.items)}
        if self.colors is not None:
            out["colors"] = sorted(self.colors)
        return out


def is_feasible(inst: FenceInstance, chosen) -> bool:
    fs = {inst.items[i].f for i in chosen}
    gs = {inst.items[i].g for i in chosen}
    return not fs & gs


def _scaled_weights(inst: FenceInstance) -> tuple[int, list[int]]:
    return inst.scaled


def _select(inst: FenceInstance, f_side: set, common: set) -> tuple[int, ...]:
    """Items whose f colour may sit on the f side and whose g colour does not."""
    return tuple(
        i for i, it in enumerate(inst.items)
        if (it.f in f_side or it.f not in common) and it.g not in f_side and it.f != it.g
    )


def _solution(inst, chosen, colors, method) -> FenceSolution:
    den, ws = inst.scaled
    value = Fraction(sum(ws[i] for i in chosen), den)
    return FenceSolution(tuple(chosen), value, frozenset(colors), method)


def solve_exact(inst: FenceInstance, color_cap: int = EXACT_COLOR_CAP) -> FenceSolution:
    """Maximum-weight feasible set, by enumerating f-side subsets of the common colours.

    Colours used only by ``f`` can always go on the f side and colours used
    only by ``g`` never need to, so only the common colours are searched.
    Ties go to the subset with the smallest bitmask (colour ``j`` = bit ``j``
    in sorted order).
    """
    common = inst.common_colors()
    h = len(common)
    if h > color_cap:
        raise FenceError(f"{h} common colours exceed the exact cap {color_cap}; use solve_guarantee")
    if not inst.items:
        return FenceSolution((), Fraction(0), frozenset(), "exact")
    index = {c: j for j, c in enumerate(common)}
    den, ws = _scaled_weights(inst)
    big = sum(ws) >= 1 << 62
    # class weights: rows = f colour (h = outside the common set), cols = g colour
    W = np.zeros((h + 1, h + 1), dtype=object if big else np.int64)
    for it, w in zip(inst.items, ws):
        if it.f != it.g:
            W[index.get(it.f, h), index.get(it.g, h)] += w

    best_val, best_mask = -1, 0
    chunk = 1 << min(h, 16)
    bit_idx = np.arange(h)
    for start in range(0, 1 << h, chunk):
        masks = np.arange(start, min(start + chunk, 1 << h), dtype=np.int64)
        Z = ((masks[:, None] >> bit_idx) & 1).astype(W.dtype)
        ones = np.ones((len(masks), 1), dtype=W.dtype)
        f_ok = np.hstack([Z, ones])
        g_ok = np.hstack([1 - Z, ones])
        vals = ((f_ok @ W) * g_ok).sum(axis=1)
        j = int(np.argmax(vals))
        if vals[j] > best_val:
            best_val, best_mask = vals[j], int(masks[j])
    f_side = {common[j] for j in range(h) if (best_mask >> j) & 1}
    return _solution(inst, _select(inst, f_side, set(common)), f_side, "exact")


def brute_force_oracle(inst: FenceInstance, max_items: int = ORACLE_ITEM_CAP) -> FenceSolution:
    """Exhaustive search over item subsets with a direct feasibility test."""
    n = len(inst.items)
    if n > max_items:
        raise FenceError(f"{n} items exceed the oracle cap {max_items}")
    if n == 0:
        return FenceSolution((), Fraction(0), None, "oracle")
    colors = sorted({it.f for it in inst.items} | {it.g for it in inst.items})
    if len(colors) > 62:
        raise FenceError("oracle supports at most 62 distinct colours")
    cid = {c: j for j, c in enumerate(colors)}
    _, ws = _scaled_weights(inst)
    dtype = object if sum(ws) >= 1 << 62 else np.int64
    fm = np.zeros(1, dtype=np.int64)
    gm = np.zeros(1, dtype=np.int64)
    val = np.zeros(1, dtype=dtype)
    for i, it in enumerate(inst.items):
        # subsets containing item i are the previous block with bit i added
        fm = np.concatenate([fm, fm | (1 << cid[it.f])])
        gm = np.concatenate([gm, gm | (1 << cid[it.g])])
        val = np.concatenate([val, val + ws[i]])
    feasible = (fm & gm) == 0
    val = np.where(feasible, val, -1)
    best = int(np.argmax(val))
    chosen = tuple(i for i in range(n) if (best >> i) & 1)
    den, ws = inst.scaled
    value = Fraction(sum(ws[i] for i in chosen), den)
    return FenceSolution(chosen, value, None, "oracle")


def solve_guarantee(inst: FenceInstance) -> FenceSolution:
    """Feasible set of weight at least a quarter of the total, no randomness.

    Colours shared by both sides are fixed one at a time (heaviest incident
    weight first, ties by colour id) so that the expected weight of pairs
    split by ``N`` never drops below half of the shared-pair weight.  The
    orientation ``N -> N^c`` or ``N^c -> N`` is then chosen on the full value,
    which also counts every item whose other colour is private to one side.
    """
    for it in inst.items:
        if it.f == it.g:
            raise FenceError("not a.e. distinct: an item has equal f and g colours")
    common = inst.common_colors()
    common_set = set(common)
    _, ws = _scaled_weights(inst)

    pair = defaultdict(int)  # (a, b) -> weight, unordered, a < b
    incident = defaultdict(int)
    for it, w in zip(inst.items, ws):
        if it.f in common_set and it.g in common_set:
            pair[min(it.f, it.g), max(it.f, it.g)] += w
            incident[it.f] += w
            incident[it.g] += w
    nbrs = defaultdict(list)
    for (a, b), w in pair.items():
        nbrs[a].append((b, w))
        nbrs[b].append((a, w))

    side: dict[int, bool] = {}
    for c in sorted(common, key=lambda c: (-incident[c], c)):
        to_in = sum(w for b, w in nbrs[c] if side.get(b) is True)
        to_out = sum(w for b, w in nbrs[c] if side.get(b) is False)
        # joining N splits the edges to colours already outside N
        side[c] = to_out >= to_in
    n_set = {c for c, s in side.items() if s}
    co_set = common_set - n_set

    forward = _select(inst, n_set, common_set)
    backward = _select(inst, co_set, common_set)
    val_f = sum(ws[i] for i in forward)
    val_b = sum(ws[i] for i in backward)
    if val_f >= val_b:
        return _solution(inst, forward, n_set, "guarantee")
    return _solution(inst, backward, co_set, "guarantee")


def tight_instance(n: int) -> FenceInstance:
    """One item per ordered pair of distinct colours in ``1..n``, uniform weights."""
    if n < 2 or n % 2:
        raise FenceError(f"tight instances need an even n >= 2, got {n}")
    w = Fraction(1, n * (n - 1))
    return FenceInstance.from_triples(
        (w, a, b) for a in range(1, n + 1) for b in range(1, n + 1) if a != b
    )


def tight_optimum_formula(n: int) -> Fraction:
    return max(Fraction(k * (n - k), n * (n - 1)) for k in range(n + 1))


def tight_report(n: int, use_oracle: bool | None = None) -> dict:
    """Exact optimum of the tight instance against the closed form and the stated bound.

    The stated bound ``1/4 + 1/(16n-4)`` does not match the closed form
    ``n / (4(n-1)) = 1/4 + 1/(4n-4)``; the report flags any optimum above it.
    """
    inst = tight_instance(n)
    exact = solve_exact(inst)
    formula = tight_optimum_formula(n)
    stated = Fraction(1, 4) + Fraction(1, 16 * n - 4)
    out = {
        "n": n,
        "items": len(inst),
        "optimum": str(exact.value),
        "closedForm": str(formula),
        "correctedBound": str(Fraction(1, 4) + Fraction(1, 4 * n - 4)),
        "statedBound": str(stated),
        "statedBoundViolated": exact.value > stated,
        "matchesClosedForm": exact.value == formula,
    }
    if use_oracle is None:
        use_oracle = len(inst) <= 12
    if use_oracle:
        out["oracle"] = str(brute_force_oracle(inst).value)
    if out["statedBoundViolated"]:
        out["note"] = (
            f"optimum {exact.value} exceeds 1/4 + 1/(16n-4) = {stated}; "
            f"the exact value is n/(4(n-1)) = 1/4 + 1/(4n-4)"
        )
    return out


# distinguishing two homomorphisms

@dataclass(frozen=True)
class Distinction:
    clopen: ClopenSet         # C, on the target side
    separated: Dyadic         # measure of phi(C) sym-diff psi(C)
    agreement_weight: Dyadic  # measure of source atoms where the tables agree
    chosen: ClopenSet         # L, source atoms carried by the fence solution
    method: str

    def to_json(self) -> dict:
        return {
            "C": self.clopen.to_json(),
            "separated": self.separated.to_json(),
            "separatedExact": str(self.separated),
            "agreementWeight": self.agreement_weight.to_json(),
            "L": self.chosen.to_json(),
            "method": self.method,
        }


def distinguish(phi: PointMap, psi: PointMap, exact_colors: int = 10) -> Distinction:
    """A clopen ``C`` on which ``phi`` and ``psi`` differ on at least ``(1 - delta)/4``.

    Source atoms where the tables agree are dropped (their measure is
    ``delta``); the rest become fence items coloured by their two images.
    """
    if phi.source_depth != psi.source_depth or phi.target_depth != psi.target_depth:
        raise FenceError("distinguish needs equal source and target depths")
    n = phi.source_depth
    differ = phi.table != psi.table
    if not differ.any():
        raise FenceError("homomorphisms equal at this depth")
    agreement = Dyadic(int((~differ).sum()), n)

    classes = defaultdict(list)  # (f, g) -> source atoms
    for i in np.flatnonzero(differ).tolist():
        classes[int(phi.table[i]), int(psi.table[i])].append(i)
    keys = sorted(classes)
    inst = FenceInstance.from_triples((Fraction(len(classes[k]), 1 << n), k[0], k[1]) for k in keys)
    if len(inst.common_colors()) <= exact_colors:
        sol, method = solve_exact(inst), "exact"
    else:
        sol, method = solve_guarantee(inst), "guarantee"

    atoms = [a for j in sol.items for a in classes[keys[j]]]
    chosen = ClopenSet.from_atoms(n, atoms)
    c = ClopenSet.from_atoms(phi.target_depth, {keys[j][0] for j in sol.items})
    separated = fn_distance(phi.apply(c), psi.apply(c))
    return Distinction(c, separated, agreement, chosen, method)
