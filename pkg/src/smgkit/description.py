"""JSON semigroup descriptions: a Rees matrix ideal plus extra generators."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from smgkit.core.group import Group, GroupError
from smgkit.core.rowmonomial import RowMonomial


class DescriptionError(ValueError):
    pass


@dataclass
class SemigroupDescription:
    group: Group
    group_spec: dict
    A: list[str]
    B: list[str]
    C_T: list[list[str]]
    generators: dict[str, dict[str, list[str]]]
    include_ideal_generators: bool = True
    monoid: bool = False
    name: str = ""
    notes: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)  # unrecognised keys, kept for round trips

    @property
    def size(self) -> int:
        return len(self.B)

    def c_entry(self, a: int, b: int) -> Optional[int]:
        """Structure matrix entry C(b, a) as a group index, None for zero."""
        v = self.C_T[a][b]
        return None if v == "0" else self.group.index(v)

    def rees_element(self, a: int, g: int, b: int) -> RowMonomial:
        edges = {}
        for i in range(self.size):
            c = self.c_entry(a, i)
            if c is not None:
                edges[i] = (self.group.mul(c, g), b)
        return RowMonomial.from_edges(self.group, self.size, edges)

    def generator_list(self) -> tuple[list[RowMonomial], list[str]]:
        gens, names = [], []
        if self.monoid:
            gens.append(RowMonomial.identity(self.group, self.size))
            names.append("1")
        if self.include_ideal_generators:
            for a in range(len(self.A)):
                for g in range(self.group.order):
                    for b in range(self.size):
                        gens.append(self.rees_element(a, g, b))
                        names.append(f"({self.A[a]},{self.group.name(g)},{self.B[b]})")
        for name, edges in self.generators.items():
            gens.append(self.edge_map_element(name, edges))
            names.append(name)
        if not gens:
            raise DescriptionError("description defines no generators")
        return gens, names

    def edge_map_element(self, name: str, edges: dict[str, list[str]]) -> RowMonomial:
        bidx = {b: i for i, b in enumerate(self.B)}
        out = {}
        for src, val in edges.items():
            if src not in bidx:
                raise DescriptionError(f"generators.{name}: unknown source point {src!r}")
            if not (isinstance(val, list) and len(val) == 2):
                raise DescriptionError(f"generators.{name}.{src}: edge must be [label, target]")
            lab, tgt = val
            try:
                g = self.group.index(lab)
            except GroupError:
                raise DescriptionError(f"generators.{name}.{src}: unknown group element {lab!r}") from None
            if tgt not in bidx:
                raise DescriptionError(f"generators.{name}.{src}: unknown target point {tgt!r}")
            out[bidx[src]] = (g, bidx[tgt])
        return RowMonomial.from_edges(self.group, self.size, out)

    def to_dict(self) -> dict:
        d: dict[str, Any] = {}
        if self.name:
            d["name"] = self.name
        d["group"] = self.group_spec
        d["A"] = list(self.A)
        d["B"] = list(self.B)
        d["C_T"] = [list(r) for r in self.C_T]
        d["generators"] = {k: {s: list(v) for s, v in e.items()} for k, e in self.generators.items()}
        d["include_ideal_generators"] = self.include_ideal_generators
        d["monoid"] = self.monoid
        if self.notes:
            d["notes"] = self.notes
        d.update(self.extra)
        return d


def group_from_spec(spec: Any) -> Group:
    if not isinstance(spec, dict):
        raise DescriptionError("group: expected an object")
    if "cyclic" in spec:
        n = spec["cyclic"]
        if not isinstance(n, int) or n < 1:
            raise DescriptionError("group.cyclic: expected a positive integer")
        return Group.cyclic(n)
    if "elements" in spec and "table" in spec:
        names = spec["elements"]
        pos = {x: i for i, x in enumerate(names)}
        try:
            table = [[pos[v] for v in row] for row in spec["table"]]
        except KeyError as exc:
            raise DescriptionError(f"group.table: unknown element {exc.args[0]!r}") from None
        try:
            return Group.from_table(names, table)
        except GroupError as exc:
            raise DescriptionError(f"group.table: {exc}") from None
    raise DescriptionError("group: expected {'cyclic': n} or {'elements': [...], 'table': [[...]]}")


_KNOWN = {"name", "group", "A", "B", "C_T", "generators", "include_ideal_generators", "monoid", "notes"}


def description_from_dict(d: Any) -> SemigroupDescription:
    if not isinstance(d, dict):
        raise DescriptionError("top level: expected an object")
    for key in ("group", "B"):
        if key not in d:
            raise DescriptionError(f"missing field {key!r}")
    group = group_from_spec(d["group"])
    A = d.get("A", [])
    B = d["B"]
    if not (isinstance(B, list) and B and all(isinstance(b, str) for b in B)):
        raise DescriptionError("B: expected a nonempty list of strings")
    if len(set(B)) != len(B):
        raise DescriptionError("B: duplicate names")
    if not (isinstance(A, list) and all(isinstance(a, str) for a in A)):
        raise DescriptionError("A: expected a list of strings")
    C_T = d.get("C_T", [])
    if len(C_T) != len(A):
        raise DescriptionError(f"C_T: expected {len(A)} rows, got {len(C_T)}")
    for r, row in enumerate(C_T):
        if len(row) != len(B):
            raise DescriptionError(f"C_T[{r}]: expected {len(B)} entries, got {len(row)}")
        for c, v in enumerate(row):
            if v != "0" and v not in group.names:
                raise DescriptionError(f"C_T[{r}][{c}]: unknown group element {v!r}")
    gens = d.get("generators", {})
    if not isinstance(gens, dict):
        raise DescriptionError("generators: expected an object")
    desc = SemigroupDescription(
        group=group, group_spec=d["group"], A=list(A), B=list(B), C_T=[list(r) for r in C_T],
        generators={k: dict(v) for k, v in gens.items()},
        include_ideal_generators=bool(d.get("include_ideal_generators", True)),
        monoid=bool(d.get("monoid", False)), name=d.get("name", ""), notes=d.get("notes", {}),
        extra={k: v for k, v in d.items() if k not in _KNOWN},
    )
    for name, edges in desc.generators.items():
        if not isinstance(edges, dict):
            raise DescriptionError(f"generators.{name}: expected an edge map")
        desc.edge_map_element(name, edges)
    return desc


def parse_description(path) -> SemigroupDescription:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DescriptionError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return description_from_dict(data)


def dump_description(desc: SemigroupDescription) -> str:
    return json.dumps(desc.to_dict(), indent=2, ensure_ascii=False) + "\n"


def build_semigroup(desc: SemigroupDescription, cap: Optional[int] = None):
    """Enumerate the transformation semigroup generated by a description."""
    from smgkit.core.semigroup import DEFAULT_MAX_ELEMENTS, enumerate_semigroup
    gens, names = desc.generator_list()
    return enumerate_semigroup(gens, names, cap=cap or DEFAULT_MAX_ELEMENTS, base_names=desc.B)


def bundled(name: str) -> Path:
    """Path of a bundled example description (``mtf``, ``toy2``, ...)."""
    return Path(__file__).parent / "data" / f"{name}.json"
