"""The S^Ev construction: a clock ``t`` plus one map ``h_x`` per element of S."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from smgkit.core.green import GreenData, green_data, group_of_units, zero_minimal_ideal
from smgkit.core.group import Group
from smgkit.core.rowmonomial import RowMonomial, act_point, compose_codes, identity_codes
from smgkit.core.semigroup import DEFAULT_MAX_ELEMENTS, EnumeratedSemigroup, SemigroupError, enumerate_semigroup
from smgkit.rees import (
    Coordinatization,
    classify_monoid,
    default_column,
    ideal_powers,
    is_gm,
    normalize_structure_matrix,
    relabel,
)


class EvError(SemigroupError):
    pass


@dataclass(frozen=True)
class EvIndex:
    """Base points ``(i, j)`` of ``B x {0..n}``; ``i`` is 1-based as a B-index.

    Points are numbered in block order: block ``B_k = {(i, i+k)}`` occupies
    ``k*n .. k*n+n-1`` and is ordered by ``i``.
    """

    n: int

    @property
    def size(self) -> int:
        return self.n * (self.n + 1)

    def point(self, i: int, j: int) -> int:
        k = (j - i) % (self.n + 1)
        return k * self.n + (i - 1)

    def pair(self, p: int) -> tuple[int, int]:
        k, i0 = divmod(p, self.n)
        return i0 + 1, (i0 + 1 + k) % (self.n + 1)

    def block_B(self, k: int) -> list[int]:
        k %= self.n + 1
        return list(range(k * self.n, (k + 1) * self.n))

    def block_R(self, l: int) -> list[int]:
        return [self.point(i, l % (self.n + 1)) for i in range(1, self.n + 1)]

    def block_of(self, p: int) -> int:
        return p // self.n

    def names(self) -> list[str]:
        return [f"({i},{j})" for i, j in map(self.pair, range(self.size))]


def prepare_gm(S: EnumeratedSemigroup, column: Optional[int] = None, strict: bool = True):
    """Check GM, normalize the structure matrix and relabel the action to match.

    Returns ``(S', coordinatization)`` where ``S'`` is isomorphic to ``S``
    (same generator words, relabeled by ``(g, b) -> (g d_b, b)``) and its
    coordinatization has ``C(1,a) = 1`` and ``C(i,a)`` in ``{0, 1}``.  With
    ``strict=False`` a failure of faithfulness on I(S) is tolerated; the
    construction itself only uses the action on ``G x B``.
    """
    cert = is_gm(S)
    if cert.coordinatization is None or (strict and (cert.left_witness or cert.right_witness)):
        raise EvError("input is not GGM: " + "; ".join(cert.reasons))
    R = cert.rees
    a = default_column(R) if column is None else column
    N = normalize_structure_matrix(R, a)
    if all(d == S.group.identity for d in N.row_scaling):
        cert.coordinatization.rees.a = a
        return S, cert.coordinatization
    gens = [RowMonomial(S.group, S.size, relabel(g, S.size, S.group, N.row_scaling)) for g in S.generators]
    S2 = enumerate_semigroup(gens, S.generator_names, base_names=S.base_names)
    if len(S2) != len(S):
        raise EvError("relabeling changed the semigroup size")
    cert2 = is_gm(S2)
    R2 = cert2.rees
    R2.a = a
    R2.row_scaling = list(N.row_scaling)
    if not R2.is_normalized():
        raise EvError("relabeled action does not give a normalized structure matrix")
    return S2, cert2.coordinatization


@dataclass
class EvGenerators:
    source: EnumeratedSemigroup
    coord: Coordinatization
    index: EvIndex
    t: RowMonomial
    h: dict[int, RowMonomial]  # element of S -> h_x

    @property
    def group(self) -> Group:
        return self.source.group

    @property
    def n(self) -> int:
        return self.index.n

    def generator_list(self) -> tuple[list[RowMonomial], list[str]]:
        gens = [self.t] + [self.h[x] for x in sorted(self.h)]
        names = ["t"] + [f"h[{self.source.word(x) or x}]" for x in sorted(self.h)]
        return gens, names


def build_ev_generators(S: EnumeratedSemigroup, coord: Coordinatization,
                        elements: Optional[Sequence[int]] = None) -> EvGenerators:
    """Clock ``t: (i,j) -> (i,j+1)`` and ``h_x: (i,i) -> g_{i,x} (ix, 0)``.

    ``h_x`` is built for every element of ``S`` unless ``elements`` restricts
    the set (for instance to the generators).
    """
    R = coord.rees
    if not R.is_normalized():
        raise EvError("structure matrix is not normalized (need C(1,a) = 1 and C(i,a) in {0,1})")
    G, n = S.group, S.size
    ix = EvIndex(n)
    e = G.identity
    t = RowMonomial.from_edges(G, ix.size, {
        ix.point(i, j): (e, ix.point(i, (j + 1) % (n + 1))) for i in range(1, n + 1) for j in range(n + 1)})
    h = {}
    for x in (range(len(S)) if elements is None else elements):
        edges = {}
        for i0, c in enumerate(S.elements[x]):
            if c >= 0:
                g, j0 = divmod(c, n)
                edges[ix.point(i0 + 1, i0 + 1)] = (g, ix.point(j0 + 1, 0))
        h[x] = RowMonomial.from_edges(G, ix.size, edges)
    return EvGenerators(S, coord, ix, t, h)


def build_sev(gen: EvGenerators, cap: int = DEFAULT_MAX_ELEMENTS) -> EnumeratedSemigroup:
    gens, names = gen.generator_list()
    return enumerate_semigroup(gens, names, cap=cap, base_names=gen.index.names())


# --- property checks --------------------------------------------------------------

@dataclass
class Check:
    name: str
    ok: bool
    witness: object = None


@dataclass
class EvReport:
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, ok: bool, witness=None) -> None:
        self.checks.append(Check(name, bool(ok), None if ok else witness))

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failed(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]


def _points(codes: tuple, size: int, G: Group, which: str) -> set[int]:
    # as points of G x B^Ev, numbered g*size + b
    out = set()
    for b, c in enumerate(codes):
        if c < 0:
            continue
        for g in range(G.order):
            if which == "dom":
                out.add(g * size + b)
            else:
                out.add(G.mul(g, c // size) * size + c % size)
    return out


def _orbits(maps: Sequence[tuple], npts: int) -> list[set[int]]:
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components
    src, dst = [], []
    for m in maps:
        for p, q in enumerate(m):
            if q >= 0:
                src.append(p)
                dst.append(q)
    graph = csr_matrix(([1] * len(src), (src, dst)), shape=(npts, npts))
    k, labels = connected_components(graph, directed=True, connection="strong")
    out = [set() for _ in range(k)]
    for p, lab in enumerate(labels):
        out[lab].add(p)
    return out


def _t_power(gen: EvGenerators, k: int) -> tuple:
    codes = identity_codes(gen.index.size, gen.group)
    for _ in range(k % (gen.n + 1)):
        codes = compose_codes(codes, gen.t.codes, gen.index.size, gen.group.table)
    return codes


def verify_ev_properties(SEv: EnumeratedSemigroup, gen: EvGenerators, green: Optional[GreenData] = None) -> EvReport:
    G, ix, n = gen.group, gen.index, gen.n
    m = ix.size
    green = green or green_data(SEv)
    rep = EvReport()
    S = gen.source

    # (1) units are <t> and its orbits are {g} x O_i
    units = group_of_units(SEv, green)
    tpows = {SEv.index[_t_power(gen, k)] for k in range(n + 1)}
    rep.add("units_generated_by_t", set(units) == tpows and len(tpows) == n + 1,
            {"units": len(units), "t_powers": len(tpows)})
    tmap = gen.t.point_map()
    orbits = sorted(map(sorted, _orbits([tmap], G.order * m)))
    expected = sorted(sorted(g * m + ix.point(i, j) for j in range(n + 1))
                      for g in range(G.order) for i in range(1, n + 1))
    rep.add("unit_orbits", orbits == expected)

    # (2)-(4) per h_x
    B0 = set(ix.block_B(0))
    R0 = set(ix.block_R(0))
    bad2 = bad3 = bad4 = None
    for x, hx in gen.h.items():
        dom_x = {i0 for i0, c in enumerate(S.elements[x]) if c >= 0}
        dpts = _points(hx.codes, m, G, "dom")
        for g in range(G.order):
            for i in range(1, n + 1):
                orbit = {g * m + ix.point(i, j) for j in range(n + 1)}
                hit = orbit & dpts
                want = {g * m + ix.point(i, i)} if (i - 1) in dom_x else set()
                if hit != want and bad2 is None:
                    bad2 = (S.word(x), g, i)
        if dpts & _points(hx.codes, m, G, "im") and bad3 is None:
            bad3 = S.word(x)
        if not (set(hx.domain()) <= B0 and set(hx.image()) <= R0) and bad4 is None:
            bad4 = S.word(x)
    rep.add("h_one_point_per_orbit", bad2 is None, bad2)
    rep.add("dom_im_disjoint", bad3 is None, bad3)
    rep.add("dom_in_B0_im_in_R0", bad4 is None, bad4)

    # (5), (6) blocks shift under t and form block systems
    shift_ok = all({tmap[p] for p in ix.block_B(k)} == set(ix.block_B(k + 1)) and
                   {tmap[p] for p in ix.block_R(k)} == set(ix.block_R(k + 1)) for k in range(n + 1))
    rep.add("blocks_shift_by_t", shift_ok)
    from smgkit.core.congruence import PointPartition, is_congruence
    full_t = gen.t.point_map()
    bparts = PointPartition.from_blocks(G.order * m, [
        [g * m + p for g in range(G.order) for p in ix.block_B(k)] for k in range(n + 1)])
    rparts = PointPartition.from_blocks(G.order * m, [
        [g * m + p for g in range(G.order) for p in ix.block_R(l)] for l in range(n + 1)])
    rep.add("block_systems", is_congruence(bparts, [full_t]) and is_congruence(rparts, [full_t]))

    maps = [RowMonomial(G, m, c).point_map() for c in SEv.generators]
    rep.add("transitive", len(_orbits(maps, G.order * m)) == 1)

    ideal = zero_minimal_ideal(SEv, green)
    unit_set = set(units)
    powers = ideal_powers(SEv, set(range(len(SEv))) - unit_set, unit_set)
    square = powers[1] if len(powers) > 1 else powers[0]
    rep.add("I_squared_is_minimal_ideal", square == set(ideal.members), [len(p) for p in powers])
    cls = classify_monoid(SEv, green)
    # a small monoid is the smallish case with nothing strictly between units and I(M)
    rep.add("smallish", cls.kind in ("small", "smallish"), cls.kind)

    members = set(ideal.members)
    hnames = {k for k, nm in enumerate(SEv.generator_names) if nm.startswith("h[")}
    two_h = [i for i in range(len(SEv)) if sum(1 for k in SEv.words[i] if k in hnames) >= 2]
    out = [SEv.word(i) for i in two_h if i not in members]
    rep.add("two_h_letters_in_ideal", not out, out[:3])

    # item-1 elements t^k h_x t^l with x outside I(S) have rank > |G| and lie outside I(S^Ev)
    src_ideal = set(gen.coord.coords) | {gen.coord.zero}
    bad = None
    for x, hx in gen.h.items():
        if x in src_ideal:
            continue
        for k in range(n + 1):
            for l in range(n + 1):
                codes = compose_codes(compose_codes(_t_power(gen, k), hx.codes, m, G.table), _t_power(gen, l), m, G.table)
                i = SEv.index.get(codes)
                rk = sum(1 for c in codes if c >= 0) * G.order
                if i is None or rk <= G.order or i in members:
                    bad = (S.word(x), k, l)
                    break
            if bad:
                break
        if bad:
            break
    rep.add("non_ideal_item1_rank", bad is None, bad)

    # g -> h_{(a,g,1)} t is an isomorphism onto an H-class of I(S^Ev)
    back = {v: k for k, v in gen.coord.coords.items()}
    a = gen.coord.rees.a
    img = []
    for g in range(G.order):
        x = back[(a, g, 0)]
        img.append(SEv.index.get(compose_codes(gen.h[x].codes, gen.t.codes, m, G.table)) if x in gen.h else None)
    ok = None not in img and len({green.h_of[i] for i in img}) == 1 and len(set(img)) == G.order
    ok = ok and len(green.h_classes[green.h_of[img[0]]]) == G.order and all(
        SEv.mul(img[g], img[g2]) == img[G.mul(g, g2)] for g in range(G.order) for g2 in range(G.order))
    rep.add("maximal_subgroup_is_G", ok)
    return rep


# --- cross-sections and the structure matrix ------------------------------------

@dataclass(frozen=True)
class EvCrossSection:
    """A fiber ``(1,p) s^-1`` as a partial function ``B^Ev -> G``, scaled to 1 at its least point."""

    domain: tuple[int, ...]
    values: tuple[int, ...]

    @property
    def key(self) -> tuple:
        return (self.domain, self.values)

    def value(self, p: int) -> Optional[int]:
        try:
            return self.values[self.domain.index(p)]
        except ValueError:
            return None


def canonical_cross_section(G: Group, fiber: dict[int, int]) -> EvCrossSection:
    dom = tuple(sorted(fiber))
    lead = G.inv(fiber[dom[0]])
    return EvCrossSection(dom, tuple(G.mul(lead, fiber[p]) for p in dom))


def fiber_of_labels(G: Group, labels: dict[int, int]) -> dict[int, int]:
    # an element sending p to lambda_p * q has fiber (1,q) s^-1 = {(lambda_p^-1, p)}
    return {p: G.inv(lab) for p, lab in labels.items()}


def element_cross_section(codes: tuple, size: int, G: Group) -> Optional[EvCrossSection]:
    labels = {p: c // size for p, c in enumerate(codes) if c >= 0}
    if not labels:
        return None
    if len({c % size for c in codes if c >= 0}) != 1:
        raise EvError("element does not have a single image point")
    return canonical_cross_section(G, fiber_of_labels(G, labels))


@dataclass
class CrossSectionData:
    sections: list[EvCrossSection]  # A^Ev, sorted by (domain, values)
    item1: set
    item2: set
    green_count: int

    def block(self, cs: EvCrossSection, ix: EvIndex) -> int:
        return ix.block_of(cs.domain[0])


def formula_cross_sections(gen: EvGenerators) -> tuple[set, set]:
    """Cross-sections predicted by the item-1 and item-2 formulas."""
    S, G, ix, n = gen.source, gen.group, gen.index, gen.n
    R = gen.coord.rees
    item1 = set()
    for ap in range(len(R.A)):
        for k in range(n + 1):
            labels = {ix.point(i0 + 1, i0 + 1 - k): R.C(i0, ap) for i0 in range(n) if R.C(i0, ap) is not None}
            if labels:
                item1.add(canonical_cross_section(G, fiber_of_labels(G, labels)).key)
    # item 2: t^k h_x t^l h_y is nonempty iff l is hit by x and l lies in Dom(y)
    tails = {(l0, c // n) for y in gen.h for l0, c in enumerate(S.elements[y]) if c >= 0}
    item2 = set()
    for x in gen.h:
        codes = S.elements[x]
        for l0, gy in tails:
            pre = {i0: c // n for i0, c in enumerate(codes) if c >= 0 and c % n == l0}
            if not pre:
                continue
            for k in range(n + 1):
                labels = {ix.point(i0 + 1, i0 + 1 - k): G.mul(gx, gy) for i0, gx in pre.items()}
                item2.add(canonical_cross_section(G, fiber_of_labels(G, labels)).key)
    return item1, item2


def ev_cross_sections(SEv: EnumeratedSemigroup, gen: EvGenerators, green: Optional[GreenData] = None) -> CrossSectionData:
    """Canonical cross-sections of the R-classes of I(S^Ev), cross-checked two ways.

    Every R-class of the 0-minimal ideal must carry one cross-section, distinct
    R-classes distinct ones, and the set must equal the union of the formula
    predictions.
    """
    green = green or green_data(SEv)
    ideal = zero_minimal_ideal(SEv, green)
    G, m = gen.group, gen.index.size
    by_r: dict[int, tuple] = {}
    for i in ideal.members:
        if i == ideal.zero:
            continue
        cs = element_cross_section(SEv.elements[i], m, G)
        r = green.r_of[i]
        if by_r.setdefault(r, cs.key) != cs.key:
            raise EvError(f"R-class of {SEv.word(i)} carries two cross-sections")
    found = set(by_r.values())
    if len(found) != len(by_r):
        raise EvError("two R-classes share a cross-section")
    item1, item2 = formula_cross_sections(gen)
    if found != item1 | item2:
        raise EvError(f"formula cross-sections ({len(item1 | item2)}) differ from R-classes ({len(found)})")
    sections = [EvCrossSection(d, v) for d, v in sorted(found)]
    return CrossSectionData(sections, item1, item2, len(by_r))


def shift_cross_section(cs: EvCrossSection, k: int, ix: EvIndex) -> EvCrossSection:
    """Domain moved by ``t^k`` (the R-class of ``t^-k s``)."""
    moved = {}
    for p, v in zip(cs.domain, cs.values):
        i, j = ix.pair(p)
        moved[ix.point(i, (j + k) % (ix.n + 1))] = v
    dom = tuple(sorted(moved))
    return EvCrossSection(dom, tuple(moved[p] for p in dom))


@dataclass
class StructureMatrix:
    A0: list[EvCrossSection]
    C0: list[list[Optional[int]]]  # rows B_0 (ordered by i), columns A_0
    columns: list[EvCrossSection]  # A^Ev as A_0, A_1, ... (shifts of A_0)
    C: list[list[Optional[int]]]  # rows B^Ev in block order, columns as above
    source_columns: dict[int, int]  # column a' of C(S) -> column of C0

    def format(self, G: Group, M=None) -> list[list[str]]:
        return [["0" if v is None else G.name(v) for v in row] for row in (self.C0 if M is None else M)]


def _act(codes: tuple, p: int, size: int, G: Group) -> Optional[tuple[int, int]]:
    q = act_point(p, codes, size, G.table)
    return None if q < 0 else divmod(q, size)


def row_representative(gen: EvGenerators, i: int, l: int = 0) -> tuple:
    """``h_{b_i} t^(i+l)`` with ``b_i = (a, 1, i)``: the L-class representative at ``(i, i+l)``."""
    back = {v: k for k, v in gen.coord.coords.items()}
    x = back[(gen.coord.rees.a, gen.group.identity, i - 1)]
    hx = gen.h.get(x)
    if hx is None:
        raise EvError("h_x of the distinguished element was not built")
    return compose_codes(hx.codes, _t_power(gen, i + l), gen.index.size, gen.group.table)


def column_representative(gen: EvGenerators, cs: EvCrossSection) -> tuple:
    """Sends ``p`` to ``f(p)^-1 (1,1)`` over the domain of ``cs``."""
    G, ix = gen.group, gen.index
    target = ix.point(1, 1)
    edges = {p: (G.inv(v), target) for p, v in zip(cs.domain, cs.values)}
    return RowMonomial.from_edges(G, ix.size, edges).codes


def ev_structure_matrix(SEv: EnumeratedSemigroup, gen: EvGenerators, data: CrossSectionData,
                        green: Optional[GreenData] = None) -> StructureMatrix:
    """``C_0`` from the Rees recipe and the assembled ``C^Ev``, with consistency checks.

    ``C_0((i,i), a) = g`` where ``(1,(1,1)) h_{b_i} t^i r_a = (g,(1,1))``.  The
    full matrix is computed entry by entry from ``h_{b_i} t^(i+l) t^-k r_a``
    and must equal the block diagonal sum of copies of ``C_0``; its nonzero
    pattern must match the group H-classes found from idempotents.
    """
    green = green or green_data(SEv)
    G, ix, n = gen.group, gen.index, gen.n
    m = ix.size
    one = ix.point(1, 1)
    A0 = [cs for cs in data.sections if ix.block_of(cs.domain[0]) == 0]
    col_reps = [column_representative(gen, cs) for cs in A0]
    for cs, r in zip(A0, col_reps):
        if r not in SEv.index:
            raise EvError("R-class representative is not an element of S^Ev")

    def entry(row_codes, col_codes):
        got = _act(compose_codes(row_codes, col_codes, m, G.table), one, m, G)
        if got is None:
            return None
        g, p = got
        if p != one:
            raise EvError("representative product left the distinguished point")
        return g

    rows0 = [row_representative(gen, i) for i in range(1, n + 1)]
    C0 = [[entry(r, c) for c in col_reps] for r in rows0]
    for i, row in enumerate(C0):
        for a, v in enumerate(row):
            if (v is None) != (A0[a].value(i) is None):
                raise EvError("C_0 zero pattern differs from cross-section domains")

    columns = [shift_cross_section(cs, k, ix) for k in range(n + 1) for cs in A0]
    if sorted(c.key for c in columns) != sorted(c.key for c in data.sections):
        raise EvError("A^Ev is not the union of the shifts of A_0")
    tk = [_t_power(gen, (n + 1 - k) % (n + 1)) for k in range(n + 1)]
    C = []
    for l in range(n + 1):
        for i in range(1, n + 1):
            r = row_representative(gen, i, l)
            C.append([entry(compose_codes(r, tk[k], m, G.table), c)
                      for k in range(n + 1) for c in col_reps])
    na = len(A0)
    for l in range(n + 1):
        for i in range(n):
            for k in range(n + 1):
                for a in range(na):
                    want = C0[i][a] if k == l else None
                    if C[l * n + i][k * na + a] != want:
                        raise EvError(f"C^Ev is not block diagonal at row ({i + 1},{l}) column {k}:{a}")

    # group H-classes from idempotents: (cross-section, image point)
    ideal = zero_minimal_ideal(SEv, green)
    idem = set()
    for e in green.idempotents:
        if e in ideal.members and e != ideal.zero:
            codes = SEv.elements[e]
            img = next(c % m for c in codes if c >= 0)
            idem.add((element_cross_section(codes, m, G).key, img))
    pattern = {(columns[a].key, p) for p in range(m) for a in range(len(columns)) if C[p][a] is not None}
    if idem != pattern:
        raise EvError("nonzero pattern of C^Ev differs from the group H-classes")

    # columns of C(S) reappear as columns of C_0
    R = gen.coord.rees
    src = {}
    for ap in range(len(R.A)):
        labels = {ix.point(i0 + 1, i0 + 1): R.C(i0, ap) for i0 in range(n) if R.C(i0, ap) is not None}
        key = canonical_cross_section(G, fiber_of_labels(G, labels)).key
        a = next(k for k, cs in enumerate(A0) if cs.key == key)
        if [C0[i0][a] for i0 in range(n)] != [R.C(i0, ap) for i0 in range(n)]:
            raise EvError(f"column {ap} of C is not reproduced in C_0")
        src[ap] = a
    return StructureMatrix(A0, C0, columns, C, src)


# --- output ---------------------------------------------------------------------

def _edge_map(r: RowMonomial, names: list[str]) -> dict:
    return {names[i]: [r.group.name(g), names[j]] for i, (g, j) in sorted(r.edges().items())}


def sev_description(gen: EvGenerators, source_name: str = "", source: Optional[dict] = None):
    """S^Ev as a description that the loader reads back (generators ``t`` and ``h[...]``).

    ``source`` (the input description as a dict) is carried along so that the
    construction can be repeated from the file alone.
    """
    from smgkit.description import SemigroupDescription
    S, G = gen.source, gen.group
    names = gen.index.names()
    gens, gnames = gen.generator_list()
    spec = {"cyclic": G.order} if G.names == Group.cyclic(G.order).names and G.table == Group.cyclic(G.order).table \
        else {"elements": list(G.names), "table": [[G.names[v] for v in row] for row in G.table]}
    return SemigroupDescription(
        group=G, group_spec=spec, A=[], B=names, C_T=[],
        generators={nm: _edge_map(r, names) for nm, r in zip(gnames, gens)},
        include_ideal_generators=False, monoid=False, name=f"{source_name or 'S'}^Ev",
        extra={"ev_source": {"name": source_name, "n": gen.n, "h_elements": len(gen.h),
                             "base": list(S.base_names) if S.base_names else None,
                             "column": gen.coord.rees.a, "description": source}},
    )


def structure_report(gen: EvGenerators, sm: StructureMatrix) -> dict:
    """Block layout of ``C^Ev``: ``C_0`` once, plus the B^Ev order and the A_0 columns."""
    G, ix = gen.group, gen.index
    names = ix.names()

    def cs_json(cs):
        return {names[p]: G.name(v) for p, v in zip(cs.domain, cs.values)}

    return {
        "n": gen.n,
        "B_order": names,
        "blocks": [[names[p] for p in ix.block_B(k)] for k in range(gen.n + 1)],
        "A0": [cs_json(cs) for cs in sm.A0],
        "C0": sm.format(G),
        "C_columns_in_C0": {str(gen.coord.rees.A[a]): c for a, c in sm.source_columns.items()},
        "block_diagonal": True,
        "copies": gen.n + 1,
    }
