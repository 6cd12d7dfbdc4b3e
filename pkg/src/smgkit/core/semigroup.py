"""Breadth-first enumeration of semigroups of G-labeled partial functions."""

from __future__ import annotations

import os
from collections import deque
from typing import Iterable, Optional, Sequence

import numpy as np

from smgkit.core.group import Group
from smgkit.core.rowmonomial import RowMonomial, compose_codes, identity_codes

DEFAULT_MAX_ELEMENTS = int(os.environ.get("SMGKIT_MAX_ELEMENTS", "200000"))


class SemigroupError(Exception):
    pass


class CapExceeded(SemigroupError):
    def __init__(self, what: str, count: int, cap: int):
        super().__init__(f"{what}: cap {cap} exceeded (reached {count})")
        self.count = count
        self.cap = cap


class _Closure:
    """Right-multiplication closure that accepts generators incrementally."""

    def __init__(self, group: Group, size: int, cap: int):
        self.group = group
        self.size = size
        self.table = group.table
        self.cap = cap
        self.gens: list[tuple] = []
        self.elements: list[tuple] = []
        self.words: list[tuple[int, ...]] = []
        self.index: dict[tuple, int] = {}
        self.right: list[list[int]] = []

    def _add(self, codes: tuple, word: tuple[int, ...]) -> int:
        idx = self.index.get(codes)
        if idx is not None:
            return idx
        if len(self.elements) >= self.cap:
            raise CapExceeded("semigroup enumeration", len(self.elements) + 1, self.cap)
        idx = len(self.elements)
        self.elements.append(codes)
        self.words.append(word)
        self.index[codes] = idx
        self.right.append([])
        return idx

    def add_generator(self, codes: tuple) -> None:
        k = len(self.gens)
        self.gens.append(codes)
        size, table = self.size, self.table
        old = len(self.elements)
        self._add(codes, (k,))
        # old elements only lack the product with the new generator
        for i in range(old):
            self.right[i].append(self._add(compose_codes(self.elements[i], codes, size, table), self.words[i] + (k,)))
        i = old
        while i < len(self.elements):
            row = self.right[i]
            e = self.elements[i]
            for kk in range(len(row), len(self.gens)):
                row.append(self._add(compose_codes(e, self.gens[kk], size, table), self.words[i] + (kk,)))
            i += 1

    def close_all(self) -> None:
        # breadth-first: elements are processed in discovery order
        size, table = self.size, self.table
        queue = deque(range(len(self.elements)))
        while queue:
            i = queue.popleft()
            row = self.right[i]
            e = self.elements[i]
            while len(row) < len(self.gens):
                kk = len(row)
                before = len(self.elements)
                j = self._add(compose_codes(e, self.gens[kk], size, table), self.words[i] + (kk,))
                row.append(j)
                if j >= before:
                    queue.append(j)


class EnumeratedSemigroup:
    """A fully enumerated semigroup of row-monomial elements.

    ``elements[i]`` holds codes, ``words[i]`` a shortest-found generator word,
    and ``right[i][k]`` the index of ``elements[i] * generators[k]``.
    """

    def __init__(self, group: Group, size: int, generators: Sequence[tuple], generator_names: Sequence[str],
                 elements: list[tuple], words: list[tuple[int, ...]], right: list[list[int]],
                 base_names: Optional[Sequence[str]] = None):
        self.group = group
        self.size = size
        self.generators = list(generators)
        self.generator_names = list(generator_names)
        self.elements = elements
        self.words = words
        self.right = right
        self.index = {e: i for i, e in enumerate(elements)}
        self.base_names = list(base_names) if base_names is not None else [str(i) for i in range(size)]
        self._left = None
        self._identity = False
        self._zero = False
        self._table = None
        self._point_maps = None

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"EnumeratedSemigroup(|S|={len(self)}, gens={len(self.generators)}, |B|={self.size})"

    def element(self, i: int) -> RowMonomial:
        return RowMonomial(self.group, self.size, self.elements[i])

    def find(self, x) -> Optional[int]:
        codes = x.codes if isinstance(x, RowMonomial) else tuple(x)
        return self.index.get(codes)

    def word(self, i: int, sep: str = ".") -> str:
        return sep.join(self.generator_names[k] for k in self.words[i])

    def compose(self, a: tuple, b: tuple) -> tuple:
        return compose_codes(a, b, self.size, self.group.table)

    def mul(self, i: int, j: int) -> int:
        prod = self.compose(self.elements[i], self.elements[j])
        try:
            return self.index[prod]
        except KeyError:
            raise SemigroupError("product not in semigroup; enumeration is not closed") from None

    @property
    def left(self) -> list[list[int]]:
        """``left[i][k]`` is the index of ``generators[k] * elements[i]``."""
        if self._left is None:
            idx = self.index
            self._left = [[idx[self.compose(g, e)] for g in self.generators] for e in self.elements]
        return self._left

    @property
    def identity(self) -> Optional[int]:
        if self._identity is False:
            self._identity = None
            ident = identity_codes(self.size, self.group)
            i = self.index.get(ident)
            if i is not None:
                self._identity = i
            else:
                for i, e in enumerate(self.elements):
                    if all(self.compose(e, g) == g and self.compose(g, e) == g for g in self.generators):
                        self._identity = i
                        break
        return self._identity

    @property
    def is_monoid(self) -> bool:
        return self.identity is not None

    @property
    def zero(self) -> Optional[int]:
        if self._zero is False:
            self._zero = None
            for i, e in enumerate(self.elements):
                if all(r == i for r in self.right[i]) and all(self.compose(g, e) == e for g in self.generators):
                    self._zero = i
                    break
        return self._zero

    def idempotents(self) -> list[int]:
        return [i for i, e in enumerate(self.elements) if self.compose(e, e) == e]

    def point_maps(self) -> list[tuple]:
        """Each element as a partial map on the points ``g * size + b``."""
        if self._point_maps is None:
            from smgkit.core.rowmonomial import point_map
            self._point_maps = [point_map(e, self.size, self.group) for e in self.elements]
        return self._point_maps

    def right_ideal(self, seeds: Iterable[int]) -> set[int]:
        """``seeds * S^1`` by reachability in the right Cayley graph."""
        seen = set(seeds)
        stack = list(seen)
        while stack:
            i = stack.pop()
            for j in self.right[i]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return seen

    def left_ideal(self, seeds: Iterable[int]) -> set[int]:
        left = self.left
        seen = set(seeds)
        stack = list(seen)
        while stack:
            i = stack.pop()
            for j in left[i]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return seen

    def ideal(self, seeds: Iterable[int]) -> set[int]:
        """Two-sided ideal ``S^1 seeds S^1``."""
        return self.left_ideal(self.right_ideal(seeds))

    def array(self) -> np.ndarray:
        return np.array(self.elements, dtype=np.int64).reshape(len(self.elements), self.size)

    def mul_table(self) -> np.ndarray:
        """Full multiplication table as an int array (vectorized, cached)."""
        if self._table is not None:
            return self._table
        n, m = len(self.elements), self.size
        E = self.array()
        T = np.array(self.group.table, dtype=np.int64)
        rng = np.random.default_rng(12345)
        W = rng.integers(1, 2**62, size=m, dtype=np.uint64)
        keys = ((E + 1).astype(np.uint64) * W).sum(axis=1)
        order = np.argsort(keys)
        sorted_keys = keys[order]
        defined = E >= 0
        lab = np.where(defined, E // m, 0)
        tgt = np.where(defined, E % m, 0)
        out = np.empty((n, n), dtype=np.int64)
        for j in range(n):
            b = E[j]
            d = b[tgt]
            ok = defined & (d >= 0)
            dd = np.where(ok, d, 0)
            res = np.where(ok, T[lab, dd // m] * m + dd % m, -1)
            rk = ((res + 1).astype(np.uint64) * W).sum(axis=1)
            pos = np.searchsorted(sorted_keys, rk)
            pos = np.minimum(pos, n - 1)
            idx = order[pos]
            if not np.array_equal(E[idx], res):
                raise SemigroupError("product not in semigroup; enumeration is not closed")
            out[:, j] = idx
        self._table = out
        return out


def _make(cl: _Closure, names: Sequence[str], base_names=None) -> EnumeratedSemigroup:
    return EnumeratedSemigroup(cl.group, cl.size, cl.gens, names, cl.elements, cl.words, cl.right, base_names)


def enumerate_semigroup(generators: Sequence[RowMonomial], names: Optional[Sequence[str]] = None,
                        cap: int = DEFAULT_MAX_ELEMENTS, base_names=None) -> EnumeratedSemigroup:
    """Enumerate the semigroup generated by ``generators``.

    Elements are ordered by discovery in a breadth-first search that scans
    generators in order, so stored words are shortlex-minimal.  Raises
    CapExceeded carrying the count reached when more than ``cap`` elements
    appear.
    """
    if not generators:
        raise SemigroupError("need at least one generator")
    group, size = generators[0].group, generators[0].size
    for g in generators:
        if g.size != size or g.group != group:
            raise SemigroupError("generators over different base sets")
    if names is None:
        names = [f"x{k}" for k in range(len(generators))]
    if len(names) != len(generators):
        raise SemigroupError("one name per generator required")
    cl = _Closure(group, size, cap)
    cl.gens = [g.codes for g in generators]
    for k, g in enumerate(generators):
        cl._add(g.codes, (k,))
    cl.close_all()
    return _make(cl, names, base_names)


def subsemigroup(S: EnumeratedSemigroup, members: Iterable[int], cap: int = DEFAULT_MAX_ELEMENTS,
                 name_prefix: str = "s") -> EnumeratedSemigroup:
    """Subsemigroup of ``S`` generated by ``members``.

    A generating set is chosen greedily in index order: a member becomes a
    generator only if it is not already generated.  Generator names are the
    words of the chosen elements in ``S``.
    """
    cl = _Closure(S.group, S.size, cap)
    names = []
    for i in sorted(set(members)):
        codes = S.elements[i]
        if codes in cl.index:
            continue
        cl.add_generator(codes)
        names.append(S.word(i) or f"{name_prefix}{i}")
    if not cl.gens:
        raise SemigroupError("empty generating set")
    return _make(cl, names, S.base_names)


def induced_subsemigroup(S: EnumeratedSemigroup, members: Iterable[int], cap: int = DEFAULT_MAX_ELEMENTS):
    """Like :func:`subsemigroup` but checks that ``members`` is already closed."""
    members = set(members)
    T = subsemigroup(S, members, cap)
    if len(T) != len(members):
        raise SemigroupError(f"subset of size {len(members)} is not closed (generates {len(T)})")
    return T
