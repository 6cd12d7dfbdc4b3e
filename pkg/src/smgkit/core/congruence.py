"""Partitions of point sets and the minimal injective congruence."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from scipy.cluster.hierarchy import DisjointSet
from sympy.utilities.iterables import multiset_partitions


@dataclass(frozen=True)
class PointPartition:
    """An equivalence relation on ``{0..n-1}`` stored as sorted blocks."""

    n: int
    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "PointPartition":
        bs = tuple(sorted(tuple(sorted(b)) for b in blocks if b))
        seen = [p for b in bs for p in b]
        if sorted(seen) != list(range(n)):
            raise ValueError("blocks must partition the point set")
        return cls(n, bs)

    @classmethod
    def discrete(cls, n: int) -> "PointPartition":
        return cls(n, tuple((i,) for i in range(n)))

    def class_of(self) -> list[int]:
        out = [0] * self.n
        for k, b in enumerate(self.blocks):
            for p in b:
                out[p] = k
        return out

    def related(self, p: int, q: int) -> bool:
        c = self.class_of()
        return c[p] == c[q]

    def refines(self, other: "PointPartition") -> bool:
        c = other.class_of()
        return all(len({c[p] for p in b}) == 1 for b in self.blocks)

    def is_discrete(self) -> bool:
        return len(self.blocks) == self.n


def is_congruence(part: PointPartition, maps: Sequence[tuple]) -> bool:
    c = part.class_of()
    for m in maps:
        for b in part.blocks:
            imgs = {c[m[p]] for p in b if m[p] >= 0}
            if len(imgs) > 1:
                return False
    return True


def is_injective_congruence(part: PointPartition, maps: Sequence[tuple]) -> bool:
    if not is_congruence(part, maps):
        return False
    c = part.class_of()
    for m in maps:
        pre: dict[int, int] = {}
        for p, q in enumerate(m):
            if q < 0:
                continue
            k = pre.setdefault(c[q], c[p])
            if k != c[p]:
                return False
    return True


def minimal_injective_congruence(n: int, maps: Sequence[tuple]) -> PointPartition:
    """Least injective congruence of a transformation semigroup on ``n`` points.

    ``maps`` are partial maps (tuples with -1 for undefined).  Starting from
    equality, classes are merged until both rules hold: related points have
    related images, and points with related images are related.  Both
    rules are forced in every injective congruence, so the fixed point is
    the minimum.
    """
    ds = DisjointSet(range(n))
    changed = True
    while changed:
        changed = False
        for m in maps:
            img_of: dict = {}
            pre_of: dict = {}
            for p, q in enumerate(m):
                if q < 0:
                    continue
                rp, rq = ds[p], ds[q]
                first = img_of.setdefault(rp, q)
                if not ds.connected(first, q):
                    ds.merge(first, q)
                    changed = True
                rq = ds[q]
                other = pre_of.setdefault(rq, p)
                if not ds.connected(other, p):
                    ds.merge(other, p)
                    changed = True
    return PointPartition.from_blocks(n, ds.subsets())


def all_partitions(n: int):
    for blocks in multiset_partitions(list(range(n))):
        yield PointPartition.from_blocks(n, blocks)


def injective_congruences(n: int, maps: Sequence[tuple]):
    """Every injective congruence, by restricted growth strings with pruning.

    A partial assignment is abandoned as soon as a rule fails on points that
    are all assigned; such a failure persists in every completion, so the
    search visits exactly the injective congruences among all partitions.
    """
    pairs = [(p, q, m[p], m[q]) for m in maps for p in range(n) for q in range(p) if m[p] >= 0 and m[q] >= 0]
    # check a pair once its largest point is assigned
    due: list[list] = [[] for _ in range(n)]
    for p, q, a, b in pairs:
        due[max(p, q, a, b)].append((p, q, a, b))
    cls = [0] * n

    def ok(k: int) -> bool:
        for p, q, a, b in due[k]:
            if (cls[p] == cls[q]) != (cls[a] == cls[b]):
                return False
        return True

    def rec(k: int, top: int):
        if k == n:
            yield PointPartition.from_blocks(n, _blocks(cls))
            return
        for c in range(top + 2):
            cls[k] = c
            if ok(k):
                yield from rec(k + 1, max(top, c))

    if n == 0:
        return
    cls[0] = 0
    if ok(0):
        yield from rec(1, 0)


def _blocks(cls: list[int]) -> list[list[int]]:
    out: dict = {}
    for p, c in enumerate(cls):
        out.setdefault(c, []).append(p)
    return list(out.values())


def brute_force_minimal_injective_congruence(n: int, maps: Sequence[tuple]) -> PointPartition:
    """The least injective congruence found by exhaustive search over partitions."""
    found = list(injective_congruences(n, maps))
    least = [p for p in found if all(p.refines(q) for q in found)]
    assert len(least) == 1
    return least[0]
