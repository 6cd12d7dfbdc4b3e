"""Rees matrix coordinates, GM recognition, small/smallish monoids and RLM."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from smgkit.core.green import GreenData, ZeroMinimalIdeal, green_data, group_of_units, zero_minimal_ideal
from smgkit.core.group import Group
from smgkit.core.rowmonomial import RowMonomial
from smgkit.core.semigroup import EnumeratedSemigroup, SemigroupError, enumerate_semigroup


class ReesError(SemigroupError):
    pass


class ClassificationInconsistent(SemigroupError):
    pass


@dataclass
class ReesStructure:
    """``M0(G, A, B, C)`` with ``C`` stored transposed: ``C_T[a][b]`` is ``C(b, a)``.

    ``A`` holds one label per R-class (here the canonical domain/label key of
    the row), ``B`` the base indices used as L-class indices.  Zero entries
    are ``None``.
    """

    group: Group
    A: list
    B: list[int]
    C_T: list[list[Optional[int]]]
    a: Optional[int] = None
    row_scaling: Optional[list[int]] = None

    def C(self, b: int, a: int) -> Optional[int]:
        return self.C_T[a][b]

    def is_regular(self) -> bool:
        rows_ok = all(any(v is not None for v in row) for row in self.C_T)
        cols_ok = all(any(row[b] is not None for row in self.C_T) for b in range(len(self.B)))
        return rows_ok and cols_ok

    def is_normalized(self, a: Optional[int] = None) -> bool:
        a = self.a if a is None else a
        if a is None:
            return False
        e = self.group.identity
        col = self.C_T[a]
        return col[0] == e and all(v is None or v == e for v in col)

    def format(self, base_names=None) -> list[list[str]]:
        return [["0" if v is None else self.group.name(v) for v in row] for row in self.C_T]


def rees_product(x, y, R: ReesStructure):
    """Product in ``M0(G, A, B, C)``; ``None`` is the zero."""
    if x is None or y is None:
        return None
    a, g, b = x
    a2, g2, b2 = y
    for idx, bound in ((a, len(R.A)), (a2, len(R.A)), (b, len(R.B)), (b2, len(R.B))):
        if not 0 <= idx < bound:
            raise ReesError(f"Rees coordinate {idx} out of range")
    c = R.C(b, a2)
    if c is None:
        return None
    G = R.group
    return (a, G.mul(G.mul(g, c), g2), b2)


def _row_key(codes: tuple, size: int, G: Group):
    """(domain, labels normalized to 1 at the least domain point, leading label, image point)."""
    dom = [i for i, c in enumerate(codes) if c >= 0]
    targets = {codes[i] % size for i in dom}
    if len(targets) != 1:
        return None
    labels = [codes[i] // size for i in dom]
    lead_inv = G.inv(labels[0])
    norm = tuple(G.mul(lab, lead_inv) for lab in labels)
    return (tuple(dom), norm), labels[0], targets.pop()


@dataclass
class Coordinatization:
    rees: ReesStructure
    coords: dict[int, tuple[int, int, int]]  # element index -> (a, g, b)
    zero: int
    round_trip: str  # "exhaustive" or "sampled(n)"


def rees_coordinatize(S: EnumeratedSemigroup, ideal: ZeroMinimalIdeal, verify_pairs: int = 200_000) -> Coordinatization:
    """Rees coordinates of the 0-minimal ideal read off the action on ``G x B``.

    Each nonzero ideal element has image ``G x {b}``; its R-class is the
    class of its label vector under right multiplication by G.  The row
    representative takes label 1 at the least domain point, which fixes
    ``C`` and the group coordinate.  The round trip against composition is
    exhaustive when ``|I|^2 <= verify_pairs`` and seeded-sampled otherwise.
    """
    if not ideal.zero_simple:
        raise ReesError("0-minimal ideal is null, not 0-simple")
    G, m = S.group, S.size
    keys: dict = {}
    A: list = []
    coords = {}
    images = set()
    for i in ideal.members:
        if i == ideal.zero:
            continue
        rk = _row_key(S.elements[i], m, G)
        if rk is None:
            raise ReesError(f"ideal element {S.word(i)} does not have a single image point")
        key, lead, b = rk
        if key not in keys:
            keys[key] = len(A)
            A.append(key)
        coords[i] = (keys[key], lead, b)
        images.add(b)
    B = sorted(images)
    bpos = {b: k for k, b in enumerate(B)}
    coords = {i: (a, g, bpos[b]) for i, (a, g, b) in coords.items()}
    C_T = []
    for dom, norm in A:
        row = [None] * len(B)
        for i, lab in zip(dom, norm):
            if i not in bpos:
                raise ReesError(f"domain point {S.base_names[i]} is not an L-class index")
            row[bpos[i]] = lab
        C_T.append(row)
    expected = len(A) * G.order * len(B)
    if len(coords) != expected:
        raise ReesError(f"ideal has {len(coords)} nonzero elements, expected |A||G||B| = {expected}")
    R = ReesStructure(G, A, B, C_T)
    nonzero = sorted(coords)
    back = {v: k for k, v in coords.items()}
    pairs = len(nonzero) ** 2
    if pairs <= verify_pairs:
        it = ((x, y) for x in nonzero for y in nonzero)
        mode = "exhaustive"
    else:
        rng = np.random.default_rng(0)
        xs = rng.choice(nonzero, size=verify_pairs)
        ys = rng.choice(nonzero, size=verify_pairs)
        it = zip(xs.tolist(), ys.tolist())
        mode = f"sampled({verify_pairs})"
    for x, y in it:
        xy = S.mul(x, y)
        p = rees_product(coords[x], coords[y], R)
        got = ideal.zero if p is None else back[p]
        if got != xy:
            raise ReesError(f"Rees product mismatch for {S.word(x)} * {S.word(y)}")
    return Coordinatization(R, coords, ideal.zero, mode)


def normalize_structure_matrix(R: ReesStructure, a: int) -> ReesStructure:
    """Scale rows of ``C`` so that ``C(1,a) = 1`` and ``C(i,a)`` is 0 or 1.

    Row ``b`` of ``C`` is left-multiplied by ``d_b^-1`` where ``d_b = C(b,a)``
    (or 1 where that entry is zero); the scaling ``d`` is recorded.
    """
    G = R.group
    col = R.C_T[a]
    if col[0] is None:
        raise ReesError("C(1, a) = 0; choose a column with a nonzero first entry")
    d = [G.identity if v is None else v for v in col]
    C_T = [[None if v is None else G.mul(G.inv(d[b]), v) for b, v in enumerate(row)] for row in R.C_T]
    return ReesStructure(G, list(R.A), list(R.B), C_T, a=a, row_scaling=d)


def default_column(R: ReesStructure) -> int:
    for a, row in enumerate(R.C_T):
        if row[0] is not None:
            return a
    raise ReesError("no column of C is nonzero at the first L-class index")


def relabel(codes: tuple, size: int, G: Group, d: Sequence[int]) -> tuple:
    """Change of coordinates ``(g, b) -> (g d_b, b)``: label ``h`` on ``i -> j`` becomes ``d_i^-1 h d_j``."""
    out = []
    for i, c in enumerate(codes):
        if c < 0:
            out.append(-1)
            continue
        h, j = divmod(c, size)
        out.append(G.mul(G.mul(G.inv(d[i]), h), d[j]) * size + j)
    return tuple(out)


# --- faithfulness -------------------------------------------------------------

def _hash_rows(arr: np.ndarray, W: np.ndarray) -> np.ndarray:
    return ((arr + 1).astype(np.uint64) * W).sum(axis=1)


def _batch_compose(X: np.ndarray, Y: np.ndarray, m: int, T: np.ndarray) -> np.ndarray:
    """Row-wise composition ``X[k] * Y[k]`` (broadcasting over the first axis)."""
    defined = X >= 0
    lab = np.where(defined, X // m, 0)
    tgt = np.where(defined, X % m, 0)
    d = np.take_along_axis(np.broadcast_to(Y, X.shape), tgt, axis=1)
    ok = defined & (d >= 0)
    dd = np.where(ok, d, 0)
    return np.where(ok, T[lab, dd // m] * m + dd % m, -1)


def _faithful_witness(S: EnumeratedSemigroup, members: list[int], side: str):
    m = S.size
    T = np.array(S.group.table, dtype=np.int64)
    U = np.array([S.elements[i] for i in members], dtype=np.int64).reshape(len(members), m)
    rng = np.random.default_rng(7)
    W = rng.integers(1, 2**62, size=m, dtype=np.uint64)
    W2 = rng.integers(1, 2**62, size=len(members), dtype=np.uint64)
    sigs: dict = {}
    for s, codes in enumerate(S.elements):
        x = np.array(codes, dtype=np.int64)[None, :]
        prod = _batch_compose(U, x, m, T) if side == "right" else _batch_compose(np.broadcast_to(x, U.shape), U, m, T)
        key = int((_hash_rows(prod, W) * W2).sum())
        other = sigs.setdefault(key, (s, prod))
        if other[0] != s and np.array_equal(other[1], prod):
            return (other[0], s)
    return None


@dataclass
class GMCertificate:
    ideal: ZeroMinimalIdeal
    coordinatization: Optional[Coordinatization]
    nontrivial_group: bool
    left_witness: Optional[tuple[int, int]] = None
    right_witness: Optional[tuple[int, int]] = None
    reasons: list[str] = field(default_factory=list)

    @property
    def is_ggm(self) -> bool:
        return self.coordinatization is not None and self.left_witness is None and self.right_witness is None

    @property
    def is_gm(self) -> bool:
        return self.is_ggm and self.nontrivial_group

    @property
    def rees(self) -> ReesStructure:
        return self.coordinatization.rees


def is_gm(S: EnumeratedSemigroup, green: Optional[GreenData] = None) -> GMCertificate:
    """Check the GM conditions on ``(G x B, S)``.

    On failure the certificate carries the reason: a pair of elements acting
    identically on one side of ``I(S)``, a null ideal, an ideal whose image
    points miss part of ``B``, or a trivial maximal subgroup (GGM only).
    """
    green = green or green_data(S)
    ideal = zero_minimal_ideal(S, green)
    if not ideal.zero_simple:
        return GMCertificate(ideal, None, False, reasons=["0-minimal ideal is null"])
    coord = rees_coordinatize(S, ideal)
    cert = GMCertificate(ideal, coord, S.group.order > 1 and green.schutzenberger_order(ideal.j_class) > 1)
    if len(coord.rees.B) != S.size:
        cert.reasons.append("ideal image points do not cover B")
        cert.coordinatization = None
        return cert
    members = [i for i in ideal.members if i != ideal.zero]
    cert.right_witness = _faithful_witness(S, members, "right")
    cert.left_witness = _faithful_witness(S, members, "left")
    if cert.right_witness:
        cert.reasons.append("not faithful on the right of I(S)")
    if cert.left_witness:
        cert.reasons.append("not faithful on the left of I(S)")
    if not cert.nontrivial_group:
        cert.reasons.append("maximal subgroup of I(S) is trivial (GGM at most)")
    return cert


# --- small and smallish monoids ----------------------------------------------

@dataclass
class Classification:
    kind: str  # "group-only" | "small" | "smallish" | "neither"
    units: list[int]
    ideal: Optional[ZeroMinimalIdeal]
    powers: list[int]  # sizes of I, I^2, ... until stable
    nilpotent_test: bool
    census_test: bool
    regular_nonzero_j: list[int]
    evidence: dict = field(default_factory=dict)


def ideal_powers(S: EnumeratedSemigroup, nonunits: set[int], unit_set: set[int]) -> list[set[int]]:
    # a word for a non-unit has a first non-unit letter y, so I^k * I = (I^k * Y) S^1
    Y = [k for k, g in enumerate(S.generators) if S.index[g] not in unit_set]
    powers = [set(nonunits)]
    while True:
        cur = powers[-1]
        seeds = {S.right[x][k] for x in cur for k in Y}
        nxt = S.right_ideal(seeds)
        if nxt == cur:
            return powers
        powers.append(nxt)


def classify_monoid(M: EnumeratedSemigroup, green: Optional[GreenData] = None) -> Classification:
    """Decide group-only / small / smallish / neither for a monoid with zero.

    Two independent characterizations are run: (i) some power of the ideal
    of non-units is the unique 0-minimal ideal and is 0-simple, and (ii) the
    0-minimal ideal is unique and regular and the only nonzero regular
    J-classes are the units and that ideal.  They must agree.
    """
    if M.identity is None:
        raise SemigroupError("classify_monoid needs a monoid")
    if M.zero is None:
        raise SemigroupError("classify_monoid needs a zero")
    green = green or green_data(M)
    units = group_of_units(M, green)
    unit_set = set(units)
    nonunits = set(range(len(M))) - unit_set
    jz = green.j_of[M.zero]
    ju = green.j_of[M.identity]
    regular_nonzero = [j for j in range(len(green.j_classes)) if green.regular[j] and j != jz]
    if nonunits <= {M.zero}:
        return Classification("group-only", units, None, [len(nonunits)], False, False, regular_nonzero)
    try:
        ideal = zero_minimal_ideal(M, green)
    except SemigroupError:
        ideal = None

    powers = ideal_powers(M, nonunits, unit_set)
    target = set(ideal.members) if ideal is not None else None
    nil = ideal is not None and ideal.zero_simple and any(p == target for p in powers)
    # fast path: the stable power is the ideal generated by the idempotents of I
    idem_ideal = M.ideal(e for e in green.idempotents if e in nonunits)
    fast_agrees = idem_ideal == powers[-1]

    census = (ideal is not None and ideal.zero_simple
              and sorted(regular_nonzero) == sorted({ju, ideal.j_class}))
    if nil != census:
        raise ClassificationInconsistent(
            f"nilpotent-ideal test says {nil}, regular J-class census says {census}")
    if not nil:
        kind = "neither"
    elif unit_set | target == set(range(len(M))):
        kind = "small"
    else:
        kind = "smallish"
    return Classification(kind, units, ideal, [len(p) for p in powers], nil, census, regular_nonzero,
                          {"stable_power_equals_IEI": fast_agrees, "nilpotency_index": len(powers)})


def small_submonoid(M: EnumeratedSemigroup, cls: Classification) -> EnumeratedSemigroup:
    """``U(M) u I(M)`` as an enumerated monoid."""
    from smgkit.core.semigroup import induced_subsemigroup
    if cls.ideal is None:
        raise SemigroupError("no 0-minimal ideal")
    return induced_subsemigroup(M, set(cls.units) | set(cls.ideal.members))


# --- RLM ------------------------------------------------------------------------

@dataclass
class RLMResult:
    semigroup: EnumeratedSemigroup  # over the trivial group on B
    quotient: list[int]  # element of S -> element of RLM(S)


def forget_labels(codes: tuple, size: int, trivial: Group) -> tuple:
    return tuple(-1 if c < 0 else c % size for c in codes)


def rlm(S: EnumeratedSemigroup) -> RLMResult:
    """Faithful image of ``S`` acting on ``B`` with group labels forgotten."""
    triv = Group.trivial()
    gens = [RowMonomial(triv, S.size, forget_labels(g, S.size, triv)) for g in S.generators]
    R = enumerate_semigroup(gens, S.generator_names, base_names=S.base_names)
    quotient = [R.index[forget_labels(e, S.size, triv)] for e in S.elements]
    return RLMResult(R, quotient)
