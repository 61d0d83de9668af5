"""Homomorphisms between finite-depth Cantor algebras via their dual point maps.

A :class:`PointMap` with ``source_depth = n`` and ``target_depth = m`` is a
table sending each of the ``2**n`` source atoms to one of the ``2**m`` target
atoms.  The homomorphism it induces sends a clopen ``A`` of the target side to
its preimage, a clopen of depth ``n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .dyadic import ClopenSet, DepthError, Dyadic, check_depth, fn_distance, word_to_atom

MAX_TARGET_DEPTH = 62


class PointMap:
    """Dual map of a homomorphism, as an immutable atom table."""

    __slots__ = ("source_depth", "target_depth", "table")

    def __init__(self, source_depth: int, target_depth: int, table):
        source_depth = check_depth(source_depth)
        if not 0 <= target_depth <= MAX_TARGET_DEPTH:
            raise DepthError(f"target depth {target_depth} outside [0, {MAX_TARGET_DEPTH}]")
        table = np.array(table, dtype=np.int64).reshape(-1)
        if table.shape != (1 << source_depth,):
            raise ValueError(f"table has {table.size} entries, expected {1 << source_depth}")
        if table.size and (table.min() < 0 or int(table.max()) >> target_depth):
            raise ValueError("table entry out of target range")
        table.setflags(write=False)
        object.__setattr__(self, "source_depth", source_depth)
        object.__setattr__(self, "target_depth", int(target_depth))
        object.__setattr__(self, "table", table)

    def __setattr__(self, name, value):
        raise AttributeError("PointMap is immutable")

    def apply(self, a: ClopenSet) -> ClopenSet:
        """Preimage of ``a``; the result lives at ``source_depth``."""
        if a.depth > self.target_depth:
            raise DepthError("target resolution exceeded")
        # reading the low a.depth coordinates of each image atom is the same
        # as refining a up to target_depth first
        mask = a.to_array()[self.table & ((1 << a.depth) - 1)]
        return ClopenSet.from_array(self.source_depth, mask)

    __call__ = apply

    def preimage_count(self, atom: int) -> int:
        """Number of source atoms sent to ``atom``."""
        return int(np.count_nonzero(self.table == atom))

    def __eq__(self, other):
        if not isinstance(other, PointMap):
            return NotImplemented
        return (
            self.source_depth == other.source_depth
            and self.target_depth == other.target_depth
            and np.array_equal(self.table, other.table)
        )

    def __hash__(self):
        return hash((self.source_depth, self.target_depth, self.table.tobytes()))

    def __repr__(self):
        return f"PointMap({self.source_depth} -> {self.target_depth})"

    def to_json(self) -> dict:
        return {"sourceDepth": self.source_depth, "targetDepth": self.target_depth,
                "table": self.table.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "PointMap":
        return cls(int(data["sourceDepth"]), int(data["targetDepth"]), data["table"])


def apply(phi: PointMap, a: ClopenSet) -> ClopenSet:
    return phi.apply(a)


def identity(depth: int) -> PointMap:
    return PointMap(depth, depth, np.arange(1 << check_depth(depth)))


def constant(source_depth: int, target_depth: int, atom: int) -> PointMap:
    return PointMap(source_depth, target_depth, np.full(1 << source_depth, atom))


def make_flip(n: int, depth: int) -> PointMap:
    """Dual of the map flipping coordinate ``n``."""
    if not 0 <= n < depth:
        raise DepthError(f"flip coordinate {n} needs depth > {n}, got {depth}")
    return PointMap(depth, depth, np.arange(1 << check_depth(depth)) ^ (1 << n))


def make_agree_flip(word: str, depth: int) -> PointMap:
    """Flip coordinate 0 exactly on points whose coordinates 1..|word| spell ``word``."""
    k = len(word)
    if depth < k + 1:
        raise DepthError(f"agree-flip for a word of length {k} needs depth >= {k + 1}")
    atoms = np.arange(1 << check_depth(depth))
    agrees = ((atoms >> 1) & ((1 << k) - 1)) == word_to_atom(word)
    return PointMap(depth, depth, np.where(agrees, atoms ^ 1, atoms))


@dataclass(frozen=True)
class PointSpec:
    """A point of Cantor space: a finite prefix followed by zeros."""

    prefix: str = ""

    def __post_init__(self):
        if set(self.prefix) - {"0", "1"}:
            raise ValueError(f"point prefix must be binary, got {self.prefix!r}")

    def atom(self, depth: int) -> int:
        return word_to_atom(self.prefix[:depth])

    def flipped(self, n: int) -> "PointSpec":
        bits = list(self.prefix.ljust(n + 1, "0"))
        bits[n] = "1" if bits[n] == "0" else "0"
        return PointSpec("".join(bits).rstrip("0"))

    def cylinder(self, depth: int) -> ClopenSet:
        return ClopenSet(depth, 1 << self.atom(depth))


def make_point_eval(x: PointSpec | str, target_depth: int) -> PointMap:
    """The two-valued homomorphism ``A -> [x in A]`` (source depth 0)."""
    if isinstance(x, str):
        x = PointSpec(x)
    return PointMap(0, target_depth, [x.atom(target_depth)])


def compose(phi: PointMap, psi: PointMap) -> PointMap:
    """Point map ``f_psi o f_phi``; it induces the homomorphism ``A -> phi(psi(A))``."""
    if phi.target_depth != psi.source_depth:
        raise DepthError(
            f"cannot compose: target depth {phi.target_depth} != source depth {psi.source_depth}"
        )
    return PointMap(phi.source_depth, psi.target_depth, psi.table[phi.table])


@dataclass(frozen=True)
class PairMap:
    """``A -> (phi(A), psi(A))`` into a product algebra, with the max metric."""

    first: PointMap
    second: PointMap

    def __post_init__(self):
        if self.first.target_depth != self.second.target_depth:
            raise DepthError("pair components need equal target depth")

    @property
    def target_depth(self) -> int:
        return self.first.target_depth

    def apply(self, a: ClopenSet) -> tuple[ClopenSet, ClopenSet]:
        return self.first.apply(a), self.second.apply(a)

    __call__ = apply


def make_pair(phi: PointMap, psi: PointMap) -> PairMap:
    return PairMap(phi, psi)


def pair_distance(u: tuple[ClopenSet, ClopenSet], v: tuple[ClopenSet, ClopenSet]) -> Dyadic:
    return max(fn_distance(u[0], v[0]), fn_distance(u[1], v[1]))


# families

def enumerate_word(k: int) -> str:
    """k-th finite binary word in length-lexicographic order ('' first)."""
    if k < 0:
        raise ValueError("negative index")
    length = (k + 1).bit_length() - 1
    j = k - ((1 << length) - 1)
    return format(j, f"0{length}b") if length else ""


FAMILY_KINDS = ("PointEval", "AgreeFlip", "Flip", "Pair", "Restriction", "Constant")


@dataclass(frozen=True)
class HomFamily:
    """An indexed sequence of homomorphisms together with its intended limit.

    ``PointEval``  evaluation at ``x`` with coordinate ``k`` flipped, converging to ``x``.
    ``AgreeFlip``  flip coordinate 0 on points agreeing with the ``k``-th word.
    ``Flip`` / ``Restriction``  flip coordinate ``k``; the two differ only in the
    probes the convergence module applies.
    ``Constant``   every term equals the limit (a point evaluation or the identity).
    ``Pair``       component-wise pair of two families.
    """

    kind: str
    params: dict = field(default_factory=dict, hash=False)
    working_depth: int = 12

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.kind == "Pair":
            for key in ("first", "second"):
                if key not in self.params:
                    raise ValueError(f"Pair family needs params[{key!r}]")

    @property
    def point(self) -> PointSpec:
        return PointSpec(self.params.get("point", ""))

    @property
    def components(self) -> tuple["HomFamily", "HomFamily"]:
        first, second = self.params["first"], self.params["second"]
        if not isinstance(first, HomFamily):
            first = HomFamily.from_json(first)
        if not isinstance(second, HomFamily):
            second = HomFamily.from_json(second)
        return first, second

    def materialize(self, k: int, depth: int | None = None):
        depth = self.working_depth if depth is None else depth
        return _materialize(self, k, depth)

    def limit(self, depth: int | None = None):
        depth = self.working_depth if depth is None else depth
        if self.kind == "Pair":
            a, b = self.components
            return PairMap(a.limit(depth), b.limit(depth))
        if self.kind == "PointEval" or (self.kind == "Constant" and "point" in self.params):
            return make_point_eval(self.point, depth)
        return identity(depth)

    def resolved(self, k: int, depth: int | None = None) -> bool:
        """Whether term ``k`` is faithfully represented at ``depth``.

        Unresolved terms are still exact on the depth-``depth`` subalgebra
        (where that restriction is a point map), but they cannot witness
        behaviour that needs finer resolution.
        """
        depth = self.working_depth if depth is None else depth
        if self.kind in ("Flip", "Restriction", "PointEval"):
            return k < depth
        if self.kind == "AgreeFlip":
            return len(enumerate_word(k)) + 1 <= depth
        if self.kind == "Pair":
            a, b = self.components
            return a.resolved(k, depth) and b.resolved(k, depth)
        return True

    def to_json(self) -> dict:
        params = dict(self.params)
        for key in ("first", "second"):
            if isinstance(params.get(key), HomFamily):
                params[key] = params[key].to_json()
        return {"kind": self.kind, "params": params, "workingDepth": self.working_depth}

    @classmethod
    def from_json(cls, data: dict) -> "HomFamily":
        depth = int(data.get("workingDepth", 12))
        params = dict(data.get("params", {}))
        for key in ("first", "second"):
            if isinstance(params.get(key), dict):
                sub = dict(params[key])
                sub.setdefault("workingDepth", depth)
                params[key] = cls.from_json(sub)
        return cls(data["kind"], params, depth)


def _materialize(family: HomFamily, k: int, depth: int):
    if k < 0:
        raise ValueError("negative family index")
    kind = family.kind
    if kind == "Pair":
        a, b = family.components
        return PairMap(a.materialize(k, depth), b.materialize(k, depth))
    point = family.params.get("point", "")
    if depth > 16:
        # big tables are not worth keeping around
        return _build_term(kind, point, k, depth)
    return _build_term_cached(kind, point, k, depth)


def _build_term(kind: str, point: str, k: int, depth: int) -> PointMap:
    if kind == "PointEval":
        return make_point_eval(PointSpec(point).flipped(k), depth)
    if kind == "AgreeFlip":
        return make_agree_flip(enumerate_word(k), depth)
    if kind in ("Flip", "Restriction"):
        # coordinates beyond the depth act trivially on the depth-d subalgebra
        return make_flip(k, depth) if k < depth else identity(depth)
    if point:
        return make_point_eval(PointSpec(point), depth)
    return identity(depth)


_build_term_cached = lru_cache(maxsize=2048)(_build_term)


def example_families(depth: int = 12) -> dict[str, HomFamily]:
    """The five example families at the given working depth, by name."""
    point_eval = HomFamily("PointEval", {"point": ""}, depth)
    agree_flip = HomFamily("AgreeFlip", {}, depth)
    return {
        "pointEval": point_eval,
        "agreeFlip": agree_flip,
        "pair": HomFamily("Pair", {"first": point_eval, "second": agree_flip}, depth),
        "flip": HomFamily("Flip", {}, depth),
        "restriction": HomFamily("Restriction", {}, depth),
    }
