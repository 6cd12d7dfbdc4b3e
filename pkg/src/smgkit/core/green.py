"""Green's relations from the left and right Cayley graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from smgkit.core.semigroup import EnumeratedSemigroup, SemigroupError


class NoZeroError(SemigroupError):
    pass


class IdealNotUniqueError(SemigroupError):
    pass


def _scc(n: int, rows: list[list[int]]) -> np.ndarray:
    src = np.repeat(np.arange(n), [len(r) for r in rows])
    dst = np.fromiter((j for r in rows for j in r), dtype=np.int64, count=len(src))
    graph = csr_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    _, labels = connected_components(graph, directed=True, connection="strong")
    return labels


def _relabel(labels) -> tuple[list[int], list[list[int]]]:
    # class ids in order of first appearance, so ids follow element order
    ids: dict = {}
    out = []
    classes: list[list[int]] = []
    for i, lab in enumerate(labels):
        k = ids.get(lab)
        if k is None:
            k = ids[lab] = len(classes)
            classes.append([])
        classes[k].append(i)
        out.append(k)
    return out, classes


@dataclass
class GreenData:
    r_of: list[int]
    l_of: list[int]
    h_of: list[int]
    j_of: list[int]
    r_classes: list[list[int]]
    l_classes: list[list[int]]
    h_classes: list[list[int]]
    j_classes: list[list[int]]
    j_below: list[frozenset]  # strictly below, transitive
    idempotents: frozenset
    regular: list[bool]
    group_h: dict = field(default_factory=dict)  # h id -> idempotent index

    def j_covers(self) -> list[tuple[int, int]]:
        """Hasse diagram of the J-order as (upper, lower) pairs."""
        out = []
        for a, below in enumerate(self.j_below):
            for b in below:
                if not any(b in self.j_below[c] for c in below if c != b):
                    out.append((a, b))
        return sorted(out)

    def j_leq(self, a: int, b: int) -> bool:
        return a == b or a in self.j_below[b]

    def is_group_h(self, h: int) -> bool:
        return h in self.group_h

    def schutzenberger_order(self, j: int) -> int:
        """Order of the Schutzenberger group of J-class ``j`` (size of any of its H-classes)."""
        return len(self.h_classes[self.h_of[self.j_classes[j][0]]])

    def chain_order(self) -> list[int]:
        """J-classes in a top-down topological order."""
        return sorted(range(len(self.j_classes)), key=lambda j: (-len(self.j_below[j]), self.j_classes[j][0]))


def green_data(S: EnumeratedSemigroup) -> GreenData:
    n = len(S)
    right, left = S.right, S.left
    r_of, r_classes = _relabel(_scc(n, right))
    l_of, l_classes = _relabel(_scc(n, left))
    both = [right[i] + left[i] for i in range(n)]
    j_of, j_classes = _relabel(_scc(n, both))
    h_of, h_classes = _relabel([(r_of[i], l_of[i]) for i in range(n)])

    # order the J-classes top first so that the chain reads naturally
    nj = len(j_classes)
    succ: list[set] = [set() for _ in range(nj)]
    for i in range(n):
        a = j_of[i]
        for k in both[i]:
            b = j_of[k]
            if b != a:
                succ[a].add(b)
    below: list[Optional[frozenset]] = [None] * nj

    def visit(a: int) -> frozenset:
        stack = [(a, False)]
        while stack:
            x, done = stack.pop()
            if below[x] is not None:
                continue
            if done:
                acc = set()
                for y in succ[x]:
                    acc.add(y)
                    acc |= below[y]
                below[x] = frozenset(acc)
            else:
                stack.append((x, True))
                stack.extend((y, False) for y in succ[x] if below[y] is None)
        return below[a]

    for a in range(nj):
        visit(a)
    for a in range(nj):
        if a in below[a]:
            raise SemigroupError("J-order has a cycle")

    idem = frozenset(S.idempotents())
    regular = [any(i in idem for i in cls) for cls in j_classes]
    group_h = {}
    for e in sorted(idem):
        group_h[h_of[e]] = e
    return GreenData(r_of, l_of, h_of, j_of, r_classes, l_classes, h_classes, j_classes,
                     list(below), idem, regular, group_h)


def is_aperiodic(S: EnumeratedSemigroup, green: Optional[GreenData] = None) -> bool:
    """True iff every H-class is trivial."""
    green = green or green_data(S)
    return all(len(h) == 1 for h in green.h_classes)


def is_aperiodic_by_powers(S: EnumeratedSemigroup) -> bool:
    """Independent check: every element satisfies ``s^k = s^(k+1)`` for some k."""
    for e in S.elements:
        seen = {e: 0}
        x = e
        k = 0
        while True:
            y = S.compose(x, e)
            k += 1
            if y in seen:
                if y != x:
                    return False
                break
            seen[y] = k
            x = y
    return True


@dataclass
class ZeroMinimalIdeal:
    zero: int
    j_class: int
    members: list[int]  # includes the zero
    zero_simple: bool


def zero_minimal_ideal(S: EnumeratedSemigroup, green: Optional[GreenData] = None) -> ZeroMinimalIdeal:
    """The unique 0-minimal ideal and whether it is 0-simple.

    Raises NoZeroError without a two-sided zero and IdealNotUniqueError when
    more than one nonzero J-class sits directly above zero.
    """
    z = S.zero
    if z is None:
        raise NoZeroError("semigroup has no zero element")
    green = green or green_data(S)
    jz = green.j_of[z]
    minimal = [j for j in range(len(green.j_classes)) if j != jz and green.j_below[j] <= {jz}]
    if not minimal:
        raise IdealNotUniqueError("semigroup is {0}; no 0-minimal ideal")
    if len(minimal) > 1:
        raise IdealNotUniqueError(f"{len(minimal)} incomparable 0-minimal ideals")
    j = minimal[0]
    members = sorted(green.j_classes[j] + [z])
    return ZeroMinimalIdeal(z, j, members, green.regular[j])


def group_of_units(S: EnumeratedSemigroup, green: Optional[GreenData] = None) -> list[int]:
    one = S.identity
    if one is None:
        return []
    green = green or green_data(S)
    return list(green.h_classes[green.h_of[one]])
