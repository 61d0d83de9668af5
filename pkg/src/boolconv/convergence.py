"""Finite-scale convergence verdicts for sequences of homomorphisms.

Four modes are evaluated on a window ``[lo, hi)`` of family indices:

``pointwiseMetric``  distance of ``phi_k(A)`` to ``phi(A)`` on designated clopen probes;
``uniform``          sup over the whole depth-``d`` algebra of that distance;
``algebraic``        tail meets/joins of ``phi_k(A)`` against ``phi(A)``;
``borelProbe``       preimages of shrinking cylinders around a point.

Every verdict is a statement at the chosen depth and window.  ``fails`` always
carries an exact nonzero witness; ``holds`` means no obstruction was found at
that scale.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .badset import build_stages
from .dyadic import ZERO, ClopenSet, DepthError, Dyadic, fn_distance
from .homomorphism import HomFamily, PairMap, PointMap, PointSpec, enumerate_word

EXACT_ATOM_CAP = 20
LOCAL_SEARCH_STARTS = 32
MODES = ("pointwiseMetric", "uniform", "algebraic", "borelProbe")


class InvariantViolation(AssertionError):
    """A report would contradict a proved implication between modes."""


@dataclass(frozen=True)
class Window:
    lo: int
    hi: int

    def __post_init__(self):
        if not 0 <= self.lo < self.hi:
            raise ValueError(f"empty or negative window [{self.lo}, {self.hi})")

    def __iter__(self):
        return iter(range(self.lo, self.hi))

    def __len__(self):
        return self.hi - self.lo


# distances

@dataclass(frozen=True)
class AtomCoupling:
    """Joint law of (f_phi, f_psi) on target atoms, as counts over source atoms."""

    source_depth: int
    target_depth: int
    counts: dict

    def weight(self, a: int, b: int) -> Dyadic:
        return Dyadic(self.counts.get((a, b), 0), self.source_depth)

    def total(self) -> Dyadic:
        return Dyadic(sum(self.counts.values()), self.source_depth)

    def marginals(self) -> tuple[dict, dict]:
        left, right = {}, {}
        for (a, b), c in self.counts.items():
            left[a] = left.get(a, 0) + c
            right[b] = right.get(b, 0) + c
        to_d = lambda m: {k: Dyadic(v, self.source_depth) for k, v in m.items()}
        return to_d(left), to_d(right)


def _check_compatible(phi: PointMap, psi: PointMap):
    if phi.source_depth != psi.source_depth or phi.target_depth != psi.target_depth:
        raise DepthError(
            f"depth mismatch: {phi.source_depth}->{phi.target_depth} vs "
            f"{psi.source_depth}->{psi.target_depth}"
        )


def atom_coupling(phi: PointMap, psi: PointMap) -> AtomCoupling:
    _check_compatible(phi, psi)
    pairs, counts = np.unique(np.stack([phi.table, psi.table]), axis=1, return_counts=True)
    data = {(int(a), int(b)): int(c) for (a, b), c in zip(pairs.T, counts)}
    return AtomCoupling(phi.source_depth, phi.target_depth, data)


def pointwise_distance(phi, psi, a: ClopenSet) -> Dyadic:
    """``d(phi(A), psi(A))``; pairs use the max of the component distances."""
    if isinstance(phi, PairMap):
        return max(pointwise_distance(phi.first, psi.first, a),
                   pointwise_distance(phi.second, psi.second, a))
    if phi.source_depth != psi.source_depth:
        raise DepthError("pointwise distance needs equal source depths")
    return fn_distance(phi.apply(a), psi.apply(a))


@dataclass(frozen=True)
class UniformDistance:
    value: Dyadic             # attained at the witness; exact when ``exact``
    witness: ClopenSet | None
    exact: bool
    upper: Dyadic             # off-diagonal coupling mass, always an upper bound


def _cut_graph(phi: PointMap, psi: PointMap):
    differ = phi.table != psi.table
    a, b = phi.table[differ], psi.table[differ]
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    edges, weights = np.unique(np.stack([lo, hi]), axis=1, return_counts=True)
    vertices, inv = np.unique(edges.reshape(-1), return_inverse=True)
    inv = inv.reshape(2, -1)
    return vertices, inv[0], inv[1], weights.astype(np.int64)


def _cut_exact(k: int, u, v, w) -> tuple[int, int]:
    # vertex k-1 stays outside; cut(S) = cut(complement of S)
    masks = np.arange(1 << max(k - 1, 0), dtype=np.int64)
    cut = np.zeros(masks.size, dtype=np.int64)
    for uu, vv, ww in zip(u.tolist(), v.tolist(), w.tolist()):
        cut += ww * (((masks >> uu) ^ (masks >> vv)) & 1)
    j = int(np.argmax(cut))
    return int(cut[j]), int(masks[j])


def _cut_value(side, u, v, w) -> int:
    return int(w[side[u] != side[v]].sum())


def _greedy_cut(k, u, v, w) -> np.ndarray:
    # place vertices in index order opposite the heavier already-placed neighbourhood
    order = np.argsort(np.concatenate([u, v]), kind="stable")
    ends = np.concatenate([v, u])[order]
    ws = np.concatenate([w, w])[order]
    starts = np.searchsorted(np.concatenate([u, v])[order], np.arange(k + 1))
    side = np.zeros(k, dtype=np.int8)
    placed = np.zeros(k, dtype=bool)
    for x in range(k):
        nb, nw = ends[starts[x]:starts[x + 1]], ws[starts[x]:starts[x + 1]]
        mask = placed[nb]
        to_in = int(nw[mask & (side[nb] == 1)].sum())
        to_out = int(nw[mask & (side[nb] == 0)].sum())
        side[x] = 1 if to_out >= to_in else 0
        placed[x] = True
    return side


def _local_search(side, u, v, w, rng) -> np.ndarray:
    """Single-vertex moves until none improves the cut.

    Improving vertices that are pairwise non-adjacent are moved together; their
    gains do not interact, so this is a sequence of improving single moves.
    """
    side = side.copy()
    k = side.size
    while True:
        same = side[u] == side[v]
        signed = np.where(same, w, -w)
        gain = np.bincount(u, signed, minlength=k) + np.bincount(v, signed, minlength=k)
        cand = gain > 0
        if not cand.any():
            return side
        prio = rng.permutation(k)
        both = cand[u] & cand[v]
        loser = np.where(prio[u] < prio[v], u, v)[both]
        cand[loser] = False
        side[cand] ^= 1


def uniform_distance(phi: PointMap, psi: PointMap, exact_cap: int = EXACT_ATOM_CAP,
                     seed: int = 0, starts: int = LOCAL_SEARCH_STARTS) -> UniformDistance:
    """``sup_A d(phi(A), psi(A))`` over the depth-``m`` target algebra.

    The objective depends on ``A`` only through which target atoms it
    contains, so this is a weighted max-cut on the atoms touched by
    disagreeing source atoms.  Up to ``exact_cap`` such atoms the cut is
    enumerated exhaustively; beyond it a greedy cut improved by local search
    from ``starts`` random restarts gives a lower bound (``exact=False``
    unless it meets the trivial upper bound).
    """
    _check_compatible(phi, psi)
    n = phi.source_depth
    vertices, u, v, w = _cut_graph(phi, psi)
    upper = Dyadic(int(w.sum()), n)
    k = vertices.size
    if k == 0:
        return UniformDistance(ZERO, ClopenSet.empty(phi.target_depth), True, ZERO)
    if k <= exact_cap:
        best, mask = _cut_exact(k, u, v, w)
        chosen = [int(vertices[i]) for i in range(k) if (mask >> i) & 1]
        exact = True
    else:
        side = _greedy_cut(k, u, v, w)
        best = _cut_value(side, u, v, w)
        rng = np.random.default_rng(seed)
        if best < int(w.sum()):
            for _ in range(starts):
                trial = _local_search(rng.integers(0, 2, k).astype(np.int8), u, v, w, rng)
                val = _cut_value(trial, u, v, w)
                if val > best:
                    best, side = val, trial
        chosen = vertices[side == 1].tolist()
        exact = best == int(w.sum())
    witness = ClopenSet.from_atoms(phi.target_depth, chosen)
    return UniformDistance(Dyadic(best, n), witness, exact, upper)


def uniform_distance_bruteforce(phi: PointMap, psi: PointMap) -> Dyadic:
    """Maximum over every clopen of the target algebra; target depth <= 3."""
    _check_compatible(phi, psi)
    if phi.target_depth > 3:
        raise DepthError("brute force over all clopens is limited to target depth 3")
    m = phi.target_depth
    return max(fn_distance(phi.apply(ClopenSet(m, bits)), psi.apply(ClopenSet(m, bits)))
               for bits in range(1 << (1 << m)))


# push-forward measures

@dataclass(frozen=True)
class AtomMeasure:
    depth: int
    masses: dict  # atom -> Dyadic, zero masses omitted

    def total(self) -> Dyadic:
        return sum(self.masses.values(), ZERO)

    def as_vector(self) -> list[Dyadic]:
        out = [ZERO] * (1 << self.depth)
        for a, m in self.masses.items():
            out[a] = m
        return out


def pushforward(phi: PointMap) -> AtomMeasure:
    atoms, counts = np.unique(phi.table, return_counts=True)
    return AtomMeasure(phi.target_depth,
                       {int(a): Dyadic(int(c), phi.source_depth) for a, c in zip(atoms, counts)})


def variation_distance(p: AtomMeasure, q: AtomMeasure) -> Dyadic:
    """``sum_a |p(a) - q(a)|``, the sup over disjoint clopen pairs of ``p-q`` on one minus the other."""
    if p.depth != q.depth:
        raise ValueError("length mismatch: measures live on different depths")
    total = Fraction(0)
    for a in set(p.masses) | set(q.masses):
        total += abs(p.masses.get(a, ZERO).to_fraction() - q.masses.get(a, ZERO).to_fraction())
    return Dyadic.from_fraction(total)


# windows

def _apply(m, a: ClopenSet):
    return m.apply(a)


def _meet(x, y):
    return tuple(p & q for p, q in zip(x, y)) if isinstance(x, tuple) else x & y


def _join(x, y):
    return tuple(p | q for p, q in zip(x, y)) if isinstance(x, tuple) else x | y


def _gap(lo, hi) -> Dyadic:
    if isinstance(lo, tuple):
        return max(fn_distance(p, q) for p, q in zip(lo, hi))
    return fn_distance(lo, hi)


def _fold(family: HomFamily, a: ClopenSet, window: Window, op):
    acc = None
    for k in window:
        img = _apply(family.materialize(k), a)
        acc = img if acc is None else op(acc, img)
    return acc


def window_liminf(family: HomFamily, a: ClopenSet, window: Window):
    """Meet of ``phi_k(A)`` over the window."""
    return _fold(family, a, window, _meet)


def window_limsup(family: HomFamily, a: ClopenSet, window: Window):
    """Join of ``phi_k(A)`` over the window."""
    return _fold(family, a, window, _join)


def sandwich_holds(family: HomFamily, a: ClopenSet, window: Window) -> bool:
    """If ``phi(A)`` lies between the window liminf and limsup, every term is
    within ``lambda(limsup - liminf)`` of it."""
    lo, hi = window_liminf(family, a, window), window_limsup(family, a, window)
    target = _apply(family.limit(), a)
    pairs = zip(lo, target, hi) if isinstance(lo, tuple) else [(lo, target, hi)]
    if not all(l <= t <= h for l, t, h in pairs):
        return True  # hypothesis not met
    bound = _gap(lo, hi)
    return all(pointwise_distance(family.materialize(k), family.limit(), a) <= bound for k in window)


# probes

@dataclass(frozen=True)
class Probe:
    name: str
    set: ClopenSet
    # for finite stand-ins of non-clopen sets: tails must start below this index
    horizon: int | None = None
    kind: str = "clopen"

    def to_json(self) -> dict:
        out = {"name": self.name, "kind": self.kind, "set": self.set.to_json(),
               "measure": self.set.measure().to_json()}
        if self.horizon is not None:
            out["horizon"] = self.horizon
        return out


def badset_probe(depth: int, target=Fraction(1, 2)) -> Probe | None:
    """The deepest bad set that fits, standing in for its infinite-depth limit.

    The meet of ``flip_m[B_last]`` over a tail of coordinates is empty exactly
    when the tail starts below the second-to-last stage depth, which becomes
    the probe's horizon.
    """
    con = build_stages(target, depth_limit=depth)
    if len(con.stages) < 2:
        return None
    return Probe(f"B_{len(con.stages) - 1}", con.bad_set(), con.stages[-2].depth, "badset")


def designated_probes(family: HomFamily) -> list[Probe]:
    d = family.working_depth
    kind = family.kind
    probes: list[Probe] = []
    if kind == "PointEval" or (kind == "Constant" and "point" in family.params):
        x = family.point.prefix.ljust(d, "0")
        for k in range(1, min(4, d) + 1):
            probes.append(Probe(f"[{x[:k]}]", ClopenSet.cylinder(x[:k])))
            other = x[:k - 1] + ("1" if x[k - 1] == "0" else "0")
            probes.append(Probe(f"[{other}]", ClopenSet.cylinder(other)))
    elif kind == "AgreeFlip":
        probes.append(Probe("{x: x(0)=0}", ClopenSet.coordinate(0, 0, 1)))
        if d > 1:
            probes.append(Probe("{x: x(1)=0}", ClopenSet.coordinate(1, 0, 2)))
    elif kind in ("Flip", "Restriction", "Constant"):
        for j in range(min(4, d)):
            probes.append(Probe(f"X_{j}", ClopenSet.coordinate(j, 0, j + 1)))
        if kind == "Restriction":
            for word in ("01", "110"):
                if len(word) <= d:
                    probes.append(Probe(f"[{word}]", ClopenSet.cylinder(word)))
        if kind == "Flip":
            bad = badset_probe(d)
            if bad is not None:
                probes.append(bad)
    return probes


def borel_point(family: HomFamily) -> PointSpec:
    if family.kind in ("PointEval", "Constant"):
        return family.point
    return PointSpec("")


def borel_schedule(family: HomFamily, window: Window) -> list[int]:
    if family.kind == "PointEval" or (family.kind == "Constant" and "point" in family.params):
        # source depth 0: no tables, so resolve every index in the window
        return list(range(1, window.hi + 4))
    return list(range(1, family.working_depth + 1))


# verdict helpers

@dataclass
class ModeResult:
    verdict: str
    value: Dyadic | None = None
    witness: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"verdict": self.verdict}
        if self.value is not None:
            out["value"] = self.value.to_json()
            out["valueExact"] = str(self.value)
        out["witness"] = self.witness
        return out


def trend(values: list[tuple[int, Dyadic]], upper: list[Dyadic] | None = None) -> ModeResult:
    """Finite-scale limit test on an index-ordered list of distances.

    ``holds`` when the last quarter is identically zero, or when the quarter
    maxima never increase and the last is strictly below the second (still
    decaying late in the window; judged on ``upper`` if given).  ``fails``
    when every value in the second half is positive and there is no such
    decay; the witness is the smallest of those values.
    """
    if len(values) < 4:
        return ModeResult("inconclusive", None, {"reason": "fewer than 4 indices"})
    idx = [k for k, _ in values]
    lower = [v for _, v in values]
    top = lower if upper is None else upper
    quarters = [q for q in np.array_split(np.arange(len(values)), 4)]
    qmax = [max(top[i] for i in q) for q in quarters]
    if qmax[3] == 0 or (all(qmax[i] >= qmax[i + 1] for i in range(3)) and qmax[3] < qmax[1]):
        return ModeResult("holds", qmax[3], {"quarterMaxima": [str(q) for q in qmax]})
    second = range(len(values) // 2, len(values))
    if all(lower[i] > 0 for i in second):
        i = min(second, key=lambda i: (lower[i], idx[i]))
        return ModeResult("fails", lower[i], {"index": idx[i], "value": str(lower[i])})
    return ModeResult("inconclusive", None, {"quarterMaxima": [str(q) for q in qmax]})


def _combine(results: dict[str, ModeResult]) -> ModeResult:
    """All parts hold -> holds; any part fails -> fails with that part's witness."""
    for name, r in results.items():
        if r.verdict == "fails":
            return ModeResult("fails", r.value, {"part": name, **r.witness})
    if all(r.verdict == "holds" for r in results.values()):
        vals = [r.value for r in results.values() if r.value is not None]
        return ModeResult("holds", max(vals) if vals else None,
                          {"parts": {k: r.to_json() for k, r in results.items()}})
    return ModeResult("inconclusive", None, {"parts": {k: r.verdict for k, r in results.items()}})


def _indices(family: HomFamily, window: Window, resolved_only: bool) -> list[int]:
    d = family.working_depth
    out = []
    for k in window:
        if family.kind == "AgreeFlip" and len(enumerate_word(k)) + 1 > d:
            continue  # not a point map at this depth
        if resolved_only and not family.resolved(k, d):
            continue
        out.append(k)
    return out


# the four modes

def metric_verdict(family: HomFamily, probes: list[Probe], window: Window, rows=None) -> ModeResult:
    limit = family.limit()
    per_probe = {}
    for p in probes:
        target = limit.apply(p.set)
        values = []
        for k in _indices(family, window, resolved_only=False):
            v = fn_distance(family.materialize(k).apply(p.set), target)
            values.append((k, v))
            if rows is not None:
                rows.append(("pointwiseMetric", p.name, k, v))
        per_probe[p.name] = trend(values)
    return _combine(per_probe)


def uniform_verdict(family: HomFamily, window: Window, exact_cap: int = EXACT_ATOM_CAP,
                    seed: int = 0, rows=None) -> ModeResult:
    limit = family.limit()
    lower, upper, best = [], [], {}
    for k in _indices(family, window, resolved_only=True):
        res = uniform_distance(family.materialize(k), limit, exact_cap=exact_cap, seed=seed)
        lower.append((k, res.value))
        upper.append(res.upper)
        best[k] = res
        if rows is not None:
            rows.append(("uniform", "sup", k, res.value))
    out = trend(lower, upper)
    if out.verdict == "fails":
        res = best[out.witness["index"]]
        out.witness.update({"set": res.witness.to_json(), "exact": res.exact})
    return out


def algebraic_probe(family: HomFamily, probe: Probe, window: Window) -> ModeResult:
    """Tail test for one probe.

    Tails ``[s, hi)`` with ``s`` in the first half of the window (and below the
    probe's horizon, if any) are examined.  The probe passes when some tail is
    constant and equal to ``phi(A)``; otherwise the smallest tail gap (or the
    mismatch with ``phi(A)``) is the witness.
    """
    limit_img = _apply(family.limit(), probe.set)
    ks = _indices(family, window, resolved_only=False)
    if not ks:
        return ModeResult("inconclusive", None, {"reason": "no materializable index"})
    imgs = [_apply(family.materialize(k), probe.set) for k in ks]
    # suffix meets and joins
    meets, joins = [None] * len(ks), [None] * len(ks)
    for i in range(len(ks) - 1, -1, -1):
        meets[i] = imgs[i] if i == len(ks) - 1 else _meet(imgs[i], meets[i + 1])
        joins[i] = imgs[i] if i == len(ks) - 1 else _join(imgs[i], joins[i + 1])
    last_start = ks[0] + (window.hi - ks[0]) // 2
    if probe.horizon is not None:
        last_start = min(last_start, probe.horizon - 1)
    starts = [i for i, k in enumerate(ks) if k <= last_start]
    if not starts:
        return ModeResult("inconclusive", None, {"reason": "no admissible tail"})

    witness = {
        "probe": probe.name,
        "windowLiminfMeasure": str(_measure(meets[0])),
        "windowLimsupMeasure": str(_measure(joins[0])),
        "windowLiminfEmpty": _is_empty(meets[0]),
        "windowGap": str(_gap(meets[0], joins[0])),
    }
    for i in starts:
        if _gap(meets[i], joins[i]) == 0 and _gap(meets[i], limit_img) == 0:
            witness["constantFrom"] = ks[i]
            return ModeResult("holds", ZERO, witness)
    i = starts[-1]
    gap = _gap(meets[i], joins[i])
    mismatch = _gap(meets[i], limit_img)
    witness.update({"tailStart": ks[i], "tailGap": str(gap), "tailMismatch": str(mismatch)})
    return ModeResult("fails", gap if gap > 0 else mismatch, witness)


def _measure(x):
    return max(s.measure() for s in x) if isinstance(x, tuple) else x.measure()


def _is_empty(x):
    return all(s.is_empty() for s in x) if isinstance(x, tuple) else x.is_empty()


def algebraic_verdict(family: HomFamily, probes: list[Probe], window: Window) -> ModeResult:
    return _combine({p.name: algebraic_probe(family, p, window) for p in probes})


@dataclass
class BorelTable:
    point: str
    schedule: list[int]
    values: dict  # n -> list of Dyadic | None, aligned with schedule
    status: dict  # n -> ("stable", value) | ("vanishing", last) | ("undecided", None)


def borel_singleton_probe(family: HomFamily, x: PointSpec, schedule: list[int], window: Window) -> BorelTable:
    """Measure of ``f_n^-1[Cyl_d(x)]`` sym-diff ``f^-1[Cyl_d(x)]`` for each n and depth d."""
    values = {n: [] for n in window}
    for d in schedule:
        lim = family.limit(d)
        b = x.atom(d)
        lim_hits = lim.table == b
        for n in window:
            if family.kind == "AgreeFlip" and len(enumerate_word(n)) + 1 > d:
                values[n].append(None)
                continue
            m = family.materialize(n, d)
            diff = int(np.count_nonzero((m.table == b) ^ lim_hits))
            values[n].append(Dyadic(diff, m.source_depth))
    status = {}
    for n, vs in values.items():
        tail = [v for v in vs if v is not None][-3:]
        if len(tail) < 3:
            status[n] = ("undecided", None)
        elif tail[0] == tail[1] == tail[2]:
            status[n] = ("stable", tail[2])
        elif tail[0] > tail[1] > tail[2]:
            status[n] = ("vanishing", tail[2])
        else:
            status[n] = ("undecided", None)
    return BorelTable(x.prefix, list(schedule), values, status)


def borel_verdict(table: BorelTable, rows=None) -> ModeResult:
    """Fails when the stabilized per-index value stays positive over the second half."""
    decided = [n for n in sorted(table.status) if table.status[n][0] != "undecided"]
    if rows is not None:
        for n in sorted(table.values):
            last = [v for v in table.values[n] if v is not None]
            if last:
                rows.append(("borelProbe", f"{{x}} x={table.point or '0'}...", n, last[-1]))
    if len(decided) < 2:
        return ModeResult("inconclusive", None, {"reason": "too few stabilized indices"})
    second = decided[len(decided) // 2:]
    st = [table.status[n] for n in second]
    witness = {"point": table.point, "maxDepth": table.schedule[-1],
               "decided": len(decided), "secondHalf": [second[0], second[-1]]}
    if all(s == "stable" and v > 0 for s, v in st):
        n, (_, v) = min(zip(second, st), key=lambda t: (t[1][1], t[0]))
        witness.update({"index": n, "value": str(v)})
        return ModeResult("fails", v, witness)
    if all((s == "stable" and v == 0) or s == "vanishing" for s, v in st):
        return ModeResult("holds", max(v for _, v in st), witness)
    return ModeResult("inconclusive", None, witness)


def weak_star_verdict(family: HomFamily, probes: list[Probe], window: Window) -> ModeResult:
    """Push-forward measures tested on clopen sets: ``lambda(phi_k(A)) -> lambda(phi(A))``."""
    limit = family.limit()
    per_probe = {}
    for p in probes:
        if p.kind != "clopen":
            continue
        target = _measure(_apply(limit, p.set))
        values = []
        for k in _indices(family, window, resolved_only=False):
            got = _measure(_apply(family.materialize(k), p.set))
            values.append((k, Dyadic.from_fraction(abs(got.to_fraction() - target.to_fraction()))))
        per_probe[p.name] = trend(values)
    return _combine(per_probe)


# classification

@dataclass
class ClassifyConfig:
    depth: int = 12
    window: tuple[int, int] = (0, 48)
    exact_cap: int = EXACT_ATOM_CAP
    seed: int = 0
    parallel: bool = False


@dataclass
class ConvergenceReport:
    name: str
    family: dict
    depth: int
    window: tuple[int, int]
    modes: dict
    probes: list = field(default_factory=list)
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    auxiliary: dict = field(default_factory=dict)

    def verdicts(self) -> dict[str, str]:
        return {m: r.verdict for m, r in self.modes.items()}

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "family": self.family,
            "depth": self.depth,
            "window": list(self.window),
            "modes": {m: self.modes[m].to_json() for m in MODES},
            "auxiliary": {k: v.to_json() for k, v in self.auxiliary.items()},
            "probes": self.probes,
            "notes": self.notes,
        }

    def csv_rows(self) -> list[list[str]]:
        return [[self.name, mode, probe, str(n), str(v)] for mode, probe, n, v in self.rows]


IMPLICATIONS = (
    ("uniform", "borelProbe"),
    ("borelProbe", "pointwiseMetric"),
    ("uniform", "pointwiseMetric"),
    ("algebraic", "pointwiseMetric"),
)

FOOTNOTES = [
    "pointwise metric => pointwise Borel metric holds for algebras with the positive Grothendieck property",
    "pointwise algebraic => uniform holds for algebras with Seever's interpolation property",
    "all verdicts are finite-scale: fixed depth and index window",
]


def check_implications(modes: dict[str, ModeResult]):
    for a, b in IMPLICATIONS:
        if modes[a].verdict == "holds" and modes[b].verdict == "fails":
            raise InvariantViolation(f"{a} holds but {b} fails")


def _classify_single(family: HomFamily, config: ClassifyConfig, rows: list, extra=()):
    window = Window(*config.window)
    probes = designated_probes(family) + list(extra)
    clopen = [p for p in probes if p.kind == "clopen"]
    tasks = {
        "pointwiseMetric": lambda r: metric_verdict(family, probes, window, r),
        "uniform": lambda r: uniform_verdict(family, window, config.exact_cap, config.seed, r),
        "algebraic": lambda r: algebraic_verdict(family, probes, window),
        "borelProbe": lambda r: borel_verdict(
            borel_singleton_probe(family, borel_point(family), borel_schedule(family, window), window), r),
    }
    if family.kind == "Restriction":
        tasks["algebraic"] = lambda r: algebraic_verdict(family, clopen, window)
    part_rows = {m: [] for m in MODES}
    if config.parallel:
        with ThreadPoolExecutor() as pool:
            futures = {m: pool.submit(tasks[m], part_rows[m]) for m in MODES}
            modes = {m: futures[m].result() for m in MODES}
    else:
        modes = {m: tasks[m](part_rows[m]) for m in MODES}
    for m in MODES:
        rows.extend(part_rows[m])
    modes["weakStar"] = weak_star_verdict(family, probes, window)
    return modes, probes


def classify(family: HomFamily, config: ClassifyConfig | None = None, name: str = "",
             extra_probes=()) -> ConvergenceReport:
    """Run all four modes and check the proved implications between them.

    ``extra_probes`` are added to the designated probes of every component.
    """
    config = config or ClassifyConfig(depth=family.working_depth)
    if family.working_depth != config.depth:
        family = HomFamily.from_json({**family.to_json(), "workingDepth": config.depth})
    rows: list = []
    if family.kind == "Pair":
        first, second = family.components
        m1, p1 = _classify_single(first, config, rows, extra_probes)
        m2, p2 = _classify_single(second, config, rows, extra_probes)
        modes = {m: _combine({"first": m1[m], "second": m2[m]}) for m in (*MODES, "weakStar")}
        probes = [{"component": "first", **p.to_json()} for p in p1]
        probes += [{"component": "second", **p.to_json()} for p in p2]
    else:
        modes, plist = _classify_single(family, config, rows, extra_probes)
        probes = [p.to_json() for p in plist]
    auxiliary = {"weakStar": modes.pop("weakStar")}
    check_implications(modes)
    return ConvergenceReport(name or family.kind, family.to_json(), config.depth,
                             tuple(config.window), modes, probes, rows, list(FOOTNOTES), auxiliary)
