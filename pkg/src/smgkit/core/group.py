"""Finite groups stored as Cayley tables with named elements."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence


class GroupError(ValueError):
    pass


def _cyclic_names(n: int) -> list[str]:
    if n == 1:
        return ["1"]
    if n == 2:
        return ["1", "-1"]
    return ["1", "g"] + [f"g^{k}" for k in range(2, n)]


@dataclass(frozen=True)
class Group:
    names: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]
    identity: int = 0
    inverse: tuple[int, ...] = field(default=())

    @classmethod
    def cyclic(cls, n: int) -> "Group":
        if n < 1:
            raise GroupError(f"cyclic group order must be positive, got {n}")
        table = [[(i + j) % n for j in range(n)] for i in range(n)]
        return cls.from_table(_cyclic_names(n), table)

    @classmethod
    def trivial(cls) -> "Group":
        return cls.cyclic(1)

    @classmethod
    def from_table(cls, names: Sequence[str], table: Sequence[Sequence[int]]) -> "Group":
        """Validate a Cayley table and return the group it defines.

        Raises GroupError naming the first failing triple or element.
        """
        n = len(names)
        if n == 0:
            raise GroupError("empty group")
        if len(set(names)) != n:
            raise GroupError("duplicate element names")
        if len(table) != n or any(len(row) != n for row in table):
            raise GroupError(f"table must be {n}x{n}")
        for row in table:
            for v in row:
                if not 0 <= v < n:
                    raise GroupError(f"table entry {v} out of range")
        for a, b, c in product(range(n), repeat=3):
            if table[table[a][b]][c] != table[a][table[b][c]]:
                raise GroupError(
                    f"not associative: ({names[a]}*{names[b]})*{names[c]} != "
                    f"{names[a]}*({names[b]}*{names[c]})"
                )
        ident = None
        for e in range(n):
            if all(table[e][x] == x and table[x][e] == x for x in range(n)):
                ident = e
                break
        if ident is None:
            raise GroupError("no two-sided identity")
        inv = []
        for x in range(n):
            ys = [y for y in range(n) if table[y][x] == ident and table[x][y] == ident]
            if not ys:
                raise GroupError(f"element {names[x]} has no inverse")
            inv.append(ys[0])
        return cls(tuple(names), tuple(tuple(r) for r in table), ident, tuple(inv))

    @property
    def order(self) -> int:
        return len(self.names)

    def __len__(self) -> int:
        return len(self.names)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise GroupError(f"unknown group element {name!r}") from None

    def name(self, a: int) -> str:
        return self.names[a]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    def is_cyclic(self) -> bool:
        return any(self.element_order(a) == self.order for a in range(self.order))
