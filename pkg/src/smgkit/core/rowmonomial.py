"""G-labeled partial functions (row-monomial matrices over G with zero).

An element on the index set ``{0..size-1}`` is a tuple of codes, one per
source index: ``-1`` when the source is outside the domain, otherwise
``label * size + target``.  The element acts on the right of ``G x B``
by ``(g, b) -> (g * label, target)``.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Optional

from smgkit.core.group import Group

UNDEF = -1


class BaseSetMismatch(ValueError):
    pass


def compose_codes(a: tuple, b: tuple, size: int, table) -> tuple:
    """Codes of ``ab`` (first ``a``, then ``b``)."""
    out = []
    for c in a:
        if c < 0:
            out.append(UNDEF)
            continue
        g, j = divmod(c, size)
        d = b[j]
        if d < 0:
            out.append(UNDEF)
        else:
            h, k = divmod(d, size)
            out.append(table[g][h] * size + k)
    return tuple(out)


def act_point(point: int, codes: tuple, size: int, table) -> int:
    """Right action on the point ``g * size + b``; returns -1 when undefined."""
    g, b = divmod(point, size)
    c = codes[b]
    if c < 0:
        return UNDEF
    h, k = divmod(c, size)
    return table[g][h] * size + k


def point_map(codes: tuple, size: int, group: Group) -> tuple:
    """The element as a partial map on the ``|G| * size`` points."""
    return tuple(act_point(p, codes, size, group.table) for p in range(group.order * size))


def identity_codes(size: int, group: Group) -> tuple:
    return tuple(group.identity * size + i for i in range(size))


class RowMonomial:
    __slots__ = ("group", "size", "codes")

    def __init__(self, group: Group, size: int, codes: Iterable[int]):
        self.group = group
        self.size = size
        self.codes = tuple(codes)
        if len(self.codes) != size:
            raise ValueError(f"expected {size} codes, got {len(self.codes)}")
        limit = group.order * size
        for c in self.codes:
            if not -1 <= c < limit:
                raise ValueError(f"code {c} out of range")

    @classmethod
    def from_edges(cls, group: Group, size: int, edges: Mapping[int, tuple[int, int]]) -> "RowMonomial":
        """Build from ``{source: (label, target)}``; at most one edge per source by construction."""
        codes = [UNDEF] * size
        for i, (g, j) in edges.items():
            if not (0 <= i < size and 0 <= j < size and 0 <= g < group.order):
                raise ValueError(f"edge {i} -> {g}.{j} out of range")
            codes[i] = g * size + j
        return cls(group, size, codes)

    @classmethod
    def identity(cls, group: Group, size: int) -> "RowMonomial":
        return cls(group, size, identity_codes(size, group))

    @classmethod
    def empty(cls, group: Group, size: int) -> "RowMonomial":
        return cls(group, size, [UNDEF] * size)

    def edges(self) -> dict[int, tuple[int, int]]:
        return {i: divmod(c, self.size) for i, c in enumerate(self.codes) if c >= 0}

    def domain(self) -> list[int]:
        return [i for i, c in enumerate(self.codes) if c >= 0]

    def image(self) -> list[int]:
        return sorted({c % self.size for c in self.codes if c >= 0})

    def label(self, i: int) -> Optional[int]:
        c = self.codes[i]
        return None if c < 0 else c // self.size

    def target(self, i: int) -> Optional[int]:
        c = self.codes[i]
        return None if c < 0 else c % self.size

    def rank(self) -> int:
        """Rank as a partial map on ``G x B``."""
        return len(self.domain()) * self.group.order

    def compose(self, other: "RowMonomial") -> "RowMonomial":
        if self.size != other.size or self.group != other.group:
            raise BaseSetMismatch("row-monomial elements over different base sets")
        return RowMonomial(self.group, self.size, compose_codes(self.codes, other.codes, self.size, self.group.table))

    __mul__ = compose

    def act(self, point: tuple[int, int]) -> Optional[tuple[int, int]]:
        g, b = point
        c = self.codes[b]
        if c < 0:
            return None
        h, k = divmod(c, self.size)
        return (self.group.mul(g, h), k)

    def point_map(self) -> tuple:
        return point_map(self.codes, self.size, self.group)

    def is_identity(self) -> bool:
        return self.codes == identity_codes(self.size, self.group)

    def is_empty(self) -> bool:
        return all(c < 0 for c in self.codes)

    def __eq__(self, other) -> bool:
        return isinstance(other, RowMonomial) and self.size == other.size and self.codes == other.codes

    def __hash__(self) -> int:
        return hash((self.size, self.codes))

    def format(self, base_names=None) -> str:
        names = base_names or [str(i) for i in range(self.size)]
        parts = []
        for i, (g, j) in self.edges().items():
            lab = self.group.name(g)
            parts.append(f"{names[i]}->{'' if g == self.group.identity else lab + '.'}{names[j]}")
        return "{" + ", ".join(parts) + "}"

    def __repr__(self) -> str:
        return f"RowMonomial({self.format()})"
