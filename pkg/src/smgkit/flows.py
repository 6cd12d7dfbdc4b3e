"""Set-partition and Rhodes lattice elements, flow verification and the S^Ev lift."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from smgkit.core.green import green_data, is_aperiodic, is_aperiodic_by_powers
from smgkit.core.group import Group
from smgkit.core.rowmonomial import RowMonomial
from smgkit.core.semigroup import EnumeratedSemigroup, enumerate_semigroup


class FlowError(ValueError):
    pass


# --- SP(G x B) ------------------------------------------------------------------------

@dataclass(frozen=True)
class SPElement:
    """A subset ``Y`` of the points ``g*|B| + b`` with a partition of ``Y``."""

    Y: frozenset
    blocks: frozenset  # of frozensets

    @classmethod
    def make(cls, blocks) -> "SPElement":
        bs = frozenset(frozenset(b) for b in blocks if b)
        Y = frozenset().union(*bs) if bs else frozenset()
        if sum(len(b) for b in bs) != len(Y):
            raise FlowError("blocks overlap")
        return cls(Y, bs)

    @classmethod
    def bottom(cls) -> "SPElement":
        return cls(frozenset(), frozenset())

    def block_of(self) -> dict[int, frozenset]:
        return {p: b for b in self.blocks for p in b}


def sp_leq(p: SPElement, q: SPElement) -> bool:
    if not p.Y <= q.Y:
        return False
    owner = q.block_of()
    return all(len({owner[x] for x in b}) == 1 for b in p.blocks)


def sp_meet(p: SPElement, q: SPElement) -> SPElement:
    """Greatest lower bound: ``Y`` meet ``Z`` with the common refinement of the partitions."""
    return SPElement.make(a & b for a in p.blocks for b in q.blocks)


def sp_join(p: SPElement, q: SPElement) -> SPElement:
    """Least upper bound: union of the sets, partitions merged along shared points."""
    from scipy.cluster.hierarchy import DisjointSet
    ds = DisjointSet(sorted(p.Y | q.Y))
    for b in list(p.blocks) + list(q.blocks):
        first = next(iter(b))
        for x in b:
            ds.merge(first, x)
    return SPElement.make(ds.subsets())


def all_sp_elements(npts: int) -> list[SPElement]:
    """Every element of ``SP`` on ``npts`` points (Bell(npts + 1) of them)."""
    from smgkit.core.congruence import all_partitions
    out = [SPElement.bottom()]
    # a partition of the points plus a marker block: the marker's block is the complement of Y
    for part in all_partitions(npts + 1):
        blocks = [set(b) for b in part.blocks if npts not in b]
        out.append(SPElement.make(blocks))
    return list(dict.fromkeys(out))


def is_cross_section(p: SPElement, size: int) -> bool:
    """At most one group label over each base point."""
    bs = [x % size for x in p.Y]
    return len(bs) == len(set(bs))


# --- Rh_B(G) ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RhodesElement:
    """``(X, Pi, [f])``: ``f`` is stored normalized to 1 at the least point of each block."""

    X: frozenset
    blocks: tuple  # sorted tuples of base points
    f: tuple  # (b, g) pairs sorted by b

    @classmethod
    def make(cls, G: Group, blocks, f: dict[int, int]) -> "RhodesElement":
        bs = tuple(sorted(tuple(sorted(b)) for b in blocks if b))
        X = frozenset(x for b in bs for x in b)
        if sum(len(b) for b in bs) != len(X):
            raise FlowError("blocks overlap")
        if set(f) != set(X):
            raise FlowError("cross-section must be defined exactly on X")
        norm = {}
        for b in bs:
            lead = G.inv(f[b[0]])
            for x in b:
                norm[x] = G.mul(lead, f[x])
        return cls(X, bs, tuple(sorted(norm.items())))

    @classmethod
    def bottom(cls) -> "RhodesElement":
        return cls(frozenset(), (), ())

    def value(self) -> dict[int, int]:
        return dict(self.f)


def rh_embed(r: RhodesElement, size: int) -> SPElement:
    """The representative cross-section ``{(f(b), b)}`` with blocks carried over pointwise."""
    f = r.value()
    return SPElement.make({f[b] * size + b for b in blk} for blk in r.blocks)


def rh_saturate(r: RhodesElement, G: Group, size: int) -> SPElement:
    """The G-invariant element: ``G x X`` with classes ``{(g f(b), b) : b in block}``."""
    f = r.value()
    return SPElement.make({G.mul(g, f[b]) * size + b for b in blk} for blk in r.blocks for g in range(G.order))


def rh_from_sp(p: SPElement, G: Group, size: int) -> RhodesElement:
    """Inverse of :func:`rh_embed` on representative cross-sections."""
    blocks, f = [], {}
    for blk in p.blocks:
        bs = []
        for x in blk:
            g, b = divmod(x, size)
            if b in f:
                raise FlowError("not a cross-section")
            f[b] = g
            bs.append(b)
        blocks.append(bs)
    return RhodesElement.make(G, blocks, f)


# --- automata ----------------------------------------------------------------------------

@dataclass
class FlowAutomaton:
    states: list[str]
    letters: list[str]
    delta: dict[tuple[int, int], int]  # (state, letter) -> state; missing means the sink

    def step(self, q: Optional[int], a: int) -> Optional[int]:
        return None if q is None else self.delta.get((q, a))

    def run(self, q: Optional[int], word: Sequence[int]) -> Optional[int]:
        for a in word:
            q = self.step(q, a)
        return q

    def letter(self, name: str) -> int:
        try:
            return self.letters.index(name)
        except ValueError:
            raise FlowError(f"unknown letter {name!r}") from None

    def without(self, q: int, a: int) -> "FlowAutomaton":
        d = dict(self.delta)
        d.pop((q, a), None)
        return FlowAutomaton(list(self.states), list(self.letters), d)

    def transformation_semigroup(self) -> EnumeratedSemigroup:
        """Letters as partial maps on Q (undefined means the sink)."""
        triv = Group.trivial()
        n = len(self.states)
        gens = [RowMonomial(triv, n, [self.delta.get((q, a), -1) for q in range(n)]) for a in range(len(self.letters))]
        return enumerate_semigroup(gens, self.letters)


@dataclass
class Flow:
    automaton: FlowAutomaton
    target: str  # "Rh" or "SP"
    assignment: list  # per state: RhodesElement or SPElement
    covering: dict[str, list[str]]  # generator of S -> word over the automaton letters
    base_size: int

    def with_value(self, q: int, value) -> "Flow":
        a = list(self.assignment)
        a[q] = value
        return Flow(self.automaton, self.target, a, dict(self.covering), self.base_size)


@dataclass
class FlowReport:
    failures: list[dict] = field(default_factory=list)
    aperiodic: Optional[bool] = None
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, condition: str, **witness) -> None:
        self.failures.append({"condition": condition, **witness})


def _generator_maps(S: EnumeratedSemigroup) -> dict[str, tuple]:
    return {nm: codes for nm, codes in zip(S.generator_names, S.generators)}


def verify_flow(S: EnumeratedSemigroup, flow: Flow, check_aperiodic: bool = True) -> FlowReport:
    """Check the four flow conditions on the completed automaton.

    Each generator ``x`` of S acts through the word ``covering[x]``; a
    missing transition goes to the sink, whose value is the bottom.  For
    Rh targets the conditions are read on the G-invariant element: images of
    a block must land in one block, the label offset must be constant on the
    block, distinct blocks must land in distinct blocks.
    """
    G, m = S.group, S.size
    aut = flow.automaton
    if flow.base_size != m:
        raise FlowError(f"flow is over {flow.base_size} base points, semigroup over {m}")
    gens = _generator_maps(S)
    missing = set(gens) - set(flow.covering)
    if missing:
        raise FlowError(f"no covering word for generators {sorted(missing)}")
    words = {}
    for x, w in flow.covering.items():
        if x not in gens:
            raise FlowError(f"covering names unknown generator {x!r}")
        words[x] = [aut.letter(a) for a in w]
    rep = FlowReport()
    names = S.base_names or [str(b) for b in range(m)]

    def pname(p):
        g, b = divmod(p, m)
        return f"({G.name(g)},{names[b]})"

    # condition 1: coverage over the original states
    if flow.target == "Rh":
        covered = {g * m + b for v in flow.assignment for b in v.X for g in range(G.order)}
    else:
        covered = set().union(*(v.Y for v in flow.assignment)) if flow.assignment else set()
    for p in range(G.order * m):
        if p not in covered:
            rep.fail("coverage", point=pname(p))
            break
    # condition 4
    for q, v in enumerate(flow.assignment):
        if flow.target == "SP" and not is_cross_section(v, m):
            rep.fail("cross_section", state=aut.states[q])
    for q, v in enumerate(flow.assignment):
        for x, codes in gens.items():
            rep.checked += 1
            q2 = aut.run(q, words[x])
            w = flow.assignment[q2] if q2 is not None else (RhodesElement.bottom() if flow.target == "Rh" else SPElement.bottom())
            tgt = aut.states[q2] if q2 is not None else "sink"
            if flow.target == "Rh":
                _check_rh_step(rep, G, m, v, w, codes, aut.states[q], x, tgt, names)
            else:
                _check_sp_step(rep, G, m, v, w, codes, aut.states[q], x, tgt, pname)
    if check_aperiodic:
        T = aut.transformation_semigroup()
        ap = is_aperiodic(T, green_data(T))
        if ap != is_aperiodic_by_powers(T):
            raise FlowError("aperiodicity checks disagree")
        rep.aperiodic = ap
    return rep


def _check_sp_step(rep, G, m, v: SPElement, w: SPElement, codes, q, x, tgt, pname):
    from smgkit.core.rowmonomial import act_point
    img = {}
    for p in v.Y:
        r = act_point(p, codes, m, G.table)
        if r >= 0:
            img[p] = r
            if r not in w.Y:
                rep.fail("containment", state=q, letter=x, target=tgt, point=pname(p), image=pname(r))
                return
    src = v.block_of()
    dst = w.block_of()
    pts = sorted(img)
    for i, y in enumerate(pts):
        for y2 in pts[:i]:
            if (src[y] == src[y2]) != (dst[img[y]] == dst[img[y2]]):
                rep.fail("injectivity", state=q, letter=x, target=tgt, pair=[pname(y2), pname(y)])
                return


def _check_rh_step(rep, G, m, v: RhodesElement, w: RhodesElement, codes, q, x, tgt, names):
    f, k = v.value(), w.value()
    wblock = {b: i for i, blk in enumerate(w.blocks) for b in blk}
    seen: dict = {}
    for blk in v.blocks:
        land = None
        offset = None
        for b in blk:
            c = codes[b]
            if c < 0:
                continue
            lab, b2 = divmod(c, m)
            if b2 not in w.X:
                rep.fail("containment", state=q, letter=x, target=tgt, point=names[b], image=names[b2])
                return
            o = G.mul(G.mul(f[b], lab), G.inv(k[b2]))
            if land is None:
                land, offset = wblock[b2], o
            elif wblock[b2] != land:
                rep.fail("injectivity", state=q, letter=x, target=tgt, detail="block split", block=[names[c] for c in blk])
                return
            elif o != offset:
                rep.fail("cross_section", state=q, letter=x, target=tgt, detail="cross-section not carried", block=[names[c] for c in blk])
                return
        if land is not None:
            if land in seen:
                rep.fail("injectivity", state=q, letter=x, target=tgt, detail="blocks merged",
                         blocks=[[names[c] for c in seen[land]], [names[c] for c in blk]])
                return
            seen[land] = blk


def saturated_sp_flow(flow: Flow, G: Group) -> Flow:
    return Flow(flow.automaton, "SP-saturated", [rh_saturate(v, G, flow.base_size) for v in flow.assignment],
                dict(flow.covering), flow.base_size)


def verify_saturated(S: EnumeratedSemigroup, flow: Flow) -> FlowReport:
    """Independent route for Rh flows: literal conditions 1-3 on the G-invariant SP elements,
    with condition 4 read per class (each class is a cross-section by construction)."""
    sat = saturated_sp_flow(flow, S.group)
    sat.target = "SP"
    rep = verify_flow(S, sat, check_aperiodic=False)
    rep.failures = [f for f in rep.failures if f["condition"] != "cross_section"]
    m = S.size
    for v in sat.assignment:
        if not all(len({p % m for p in blk}) == len(blk) for blk in v.blocks):
            rep.fail("cross_section", detail="class with two labels over one point")
    return rep


# --- lifting to S^Ev ------------------------------------------------------------------

def lift_rhodes(r: RhodesElement, G: Group, ix) -> RhodesElement:
    """``(X, Pi, [f])^Ev``: orbits of the base points, values constant along each orbit."""
    f = r.value()
    n = ix.n
    blocks = [[ix.point(b + 1, j) for b in blk for j in range(n + 1)] for blk in r.blocks]
    vals = {ix.point(b + 1, j): f[b] for b in r.X for j in range(n + 1)}
    return RhodesElement.make(G, blocks, vals)


def lift_flow_ev(flow: Flow, gen, S: EnumeratedSemigroup, SEv: EnumeratedSemigroup,
                 identity_letter: str = "id") -> Flow:
    """``qF^Ev = (qF)^Ev`` on the automaton with an identity letter added.

    ``t`` is covered by the identity letter and ``h_x`` by the word covering
    ``x`` (the covering words of the letters of the shortlex word of x).
    """
    if flow.target != "Rh":
        raise FlowError("lifting needs a flow to the Rhodes lattice")
    rep = verify_flow(S, flow, check_aperiodic=False)
    if not rep.ok:
        raise FlowError(f"flow does not verify: {rep.failures[0]}")
    aut = flow.automaton
    letters = list(aut.letters)
    delta = dict(aut.delta)
    if identity_letter not in letters:
        letters.append(identity_letter)
        a = len(letters) - 1
        for q in range(len(aut.states)):
            delta[(q, a)] = q
    aut2 = FlowAutomaton(list(aut.states), letters, delta)
    covering = {"t": [identity_letter]}
    src = gen.source
    for x in gen.h:
        word = [w for k in src.words[x] for w in flow.covering[src.generator_names[k]]]
        covering[f"h[{src.word(x) or x}]"] = word or [identity_letter]
    if set(covering) != set(SEv.generator_names):
        raise FlowError("generator names of S^Ev do not match the construction")
    values = [lift_rhodes(v, S.group, gen.index) for v in flow.assignment]
    return Flow(aut2, "Rh", values, covering, gen.index.size)


def relabel_flow(flow: Flow, G: Group, d) -> Flow:
    """Transport a flow along the relabeling ``(g, b) -> (g d_b, b)`` of the points."""
    if flow.target != "Rh":
        raise FlowError("only Rhodes-lattice flows can be relabeled")
    values = [RhodesElement.make(G, v.blocks, {b: G.mul(g, d[b]) for b, g in v.f}) for v in flow.assignment]
    return Flow(flow.automaton, flow.target, values, flow.covering, flow.base_size)


# --- files ------------------------------------------------------------------------------

def flow_from_dict(d: dict, S: EnumeratedSemigroup) -> Flow:
    G, m = S.group, S.size
    names = list(S.base_names) if S.base_names else [str(b) for b in range(m)]
    bpos = {b: i for i, b in enumerate(names)}
    try:
        autd = d["automaton"]
        states = list(autd["states"])
        trans = autd.get("transitions", {})
        assignment = d["assignment"]
    except (KeyError, TypeError) as exc:
        raise FlowError(f"flow file: missing field {exc}") from None
    target = d.get("target", "Rh")
    if target not in ("Rh", "SP"):
        raise FlowError("target: expected 'Rh' or 'SP'")
    letters = list(autd.get("letters") or S.generator_names)
    spos = {s: i for i, s in enumerate(states)}
    delta = {}
    for s, row in trans.items():
        if s not in spos:
            raise FlowError(f"transitions: unknown state {s!r}")
        for a, s2 in row.items():
            if a not in letters:
                raise FlowError(f"transitions.{s}: unknown letter {a!r}")
            if s2 not in spos:
                raise FlowError(f"transitions.{s}.{a}: unknown state {s2!r}")
            delta[(spos[s], letters.index(a))] = spos[s2]
    aut = FlowAutomaton(states, letters, delta)

    def bp(b):
        if b not in bpos:
            raise FlowError(f"unknown base point {b!r}")
        return bpos[b]

    values = []
    for s in states:
        v = assignment.get(s)
        if v is None:
            raise FlowError(f"assignment: no value for state {s!r}")
        if target == "Rh":
            f = {bp(b): G.index(g) for b, g in v.get("f", {}).items()}
            values.append(RhodesElement.make(G, [[bp(b) for b in blk] for blk in v.get("partition", [])], f))
        else:
            values.append(SPElement.make({G.index(g) * m + bp(b) for g, b in blk} for blk in v.get("partition", [])))
    covering = d.get("covering") or {x: [x] for x in S.generator_names}
    covering = {k: ([w] if isinstance(w, str) else list(w)) for k, w in covering.items()}
    return Flow(aut, target, values, covering, m)


def flow_to_dict(flow: Flow, G: Group, base_names: Sequence[str]) -> dict:
    aut = flow.automaton
    trans: dict = {}
    for (q, a), q2 in sorted(aut.delta.items()):
        trans.setdefault(aut.states[q], {})[aut.letters[a]] = aut.states[q2]
    assignment = {}
    m = flow.base_size
    for s, v in zip(aut.states, flow.assignment):
        if flow.target == "Rh":
            assignment[s] = {"X": [base_names[b] for b in sorted(v.X)],
                             "partition": [[base_names[b] for b in blk] for blk in v.blocks],
                             "f": {base_names[b]: G.name(g) for b, g in v.f}}
        else:
            assignment[s] = {"partition": [[[G.name(p // m), base_names[p % m]] for p in sorted(blk)]
                                           for blk in sorted(v.blocks, key=min)]}
    return {"automaton": {"states": list(aut.states), "letters": list(aut.letters), "transitions": trans},
            "assignment": assignment, "target": flow.target, "covering": dict(flow.covering)}


def load_flow(path, S: EnumeratedSemigroup) -> Flow:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FlowError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return flow_from_dict(d, S)


def rees_point_flow(S: EnumeratedSemigroup, coord) -> Flow:
    """One state per base point, each carrying ``({b}, {{b}}, [1])``.

    A generator in the 0-minimal ideal with coordinates ``(a', g, b')`` sends
    every state ``b`` with ``C(b, a') != 0`` to ``b'``; anything else goes to the
    sink.  Only valid when all generators lie in the ideal.
    """
    G, m = S.group, S.size
    R = coord.rees
    names = list(S.base_names) if S.base_names else [str(b) for b in range(m)]
    delta = {}
    for a, codes in enumerate(S.generators):
        i = S.index[codes]
        if i == coord.zero:
            continue
        if i not in coord.coords:
            raise FlowError(f"generator {S.generator_names[a]} is outside the 0-minimal ideal")
        ap, _, b2 = coord.coords[i]
        for b in range(m):
            if R.C(b, ap) is not None:
                delta[(b, a)] = R.B[b2]
    aut = FlowAutomaton([f"q{names[b]}" for b in range(m)], list(S.generator_names), delta)
    values = [RhodesElement.make(G, [[b]], {b: G.identity}) for b in range(m)]
    return Flow(aut, "Rh", values, {x: [x] for x in S.generator_names}, m)
