"""Type II elements, the Tilson congruence and the two-J-class complexity test."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from smgkit.core.congruence import PointPartition, minimal_injective_congruence
from smgkit.core.green import GreenData, _scc, green_data, is_aperiodic, zero_minimal_ideal
from smgkit.core.semigroup import CapExceeded, EnumeratedSemigroup, SemigroupError
from smgkit.rees import classify_monoid, is_gm, rlm, small_submonoid


class ComplexityError(SemigroupError):
    pass


TYPE_II_MAX = 4000  # mul_table is |S|^2


@dataclass
class TypeIICertificate:
    members: frozenset
    log: dict  # element -> ("idempotent",) | ("product", a, b) | ("weak-conjugate", x, y, s)
    rounds: int

    def __contains__(self, i: int) -> bool:
        return i in self.members

    def __len__(self) -> int:
        return len(self.members)


def type_ii(S: EnumeratedSemigroup, seed: Optional[int] = None, table: Optional[np.ndarray] = None) -> TypeIICertificate:
    """Least subsemigroup containing E(S) and closed under weak conjugation.

    Alternates product closure with a sweep over pairs ``xyx = x``, adding
    ``x S_II y`` and ``y S_II x``.  With ``seed`` set, pairs and members are
    swept in a shuffled order; the fixed point does not depend on it.
    """
    n = len(S)
    if n > TYPE_II_MAX:
        raise CapExceeded("type_ii multiplication table", n, TYPE_II_MAX)
    T = S.mul_table() if table is None else table
    rng = np.random.default_rng(seed) if seed is not None else None
    ar = np.arange(n)
    pairs = []
    for x in range(n):
        ys = np.nonzero(T[T[x], x] == x)[0]
        pairs.extend((x, int(y)) for y in ys)
    if rng is not None:
        rng.shuffle(pairs)
    mask = np.zeros(n, dtype=bool)
    log: dict = {}
    idem = np.nonzero(T[ar, ar] == ar)[0]
    mask[idem] = True
    for e in idem.tolist():
        log[e] = ("idempotent",)
    rounds = 0
    while True:
        rounds += 1
        before = int(mask.sum())
        # product closure
        while True:
            idx = np.nonzero(mask)[0]
            if rng is not None:
                idx = rng.permutation(idx)
            prod = T[np.ix_(idx, idx)]
            new = ~mask[prod]
            if not new.any():
                break
            for r, c in zip(*np.nonzero(new)):
                p = int(prod[r, c])
                if not mask[p]:
                    mask[p] = True
                    log[p] = ("product", int(idx[r]), int(idx[c]))
        idx = np.nonzero(mask)[0]
        for x, y in pairs:
            for a, b in ((x, y), (y, x)):
                out = T[T[a, idx], b]
                fresh = ~mask[out]
                if fresh.any():
                    for k in np.nonzero(fresh)[0]:
                        p = int(out[k])
                        if not mask[p]:
                            mask[p] = True
                            log[p] = ("weak-conjugate", a, b, int(idx[k]))
        if int(mask.sum()) == before:
            break
    return TypeIICertificate(frozenset(np.nonzero(mask)[0].tolist()), log, rounds)


def check_type_ii(S: EnumeratedSemigroup, cert: TypeIICertificate, table: Optional[np.ndarray] = None) -> bool:
    """Closure properties of a claimed S_II (idempotents, products, weak conjugation)."""
    T = S.mul_table() if table is None else table
    n = len(S)
    m = np.zeros(n, dtype=bool)
    m[list(cert.members)] = True
    ar = np.arange(n)
    if not m[T[ar, ar] == ar].all():
        return False
    idx = np.nonzero(m)[0]
    if not m[T[np.ix_(idx, idx)]].all():
        return False
    for x in range(n):
        for y in np.nonzero(T[T[x], x] == x)[0]:
            if not (m[T[T[x, idx], y]].all() and m[T[T[y, idx], x]].all()):
                return False
    return True


def _reach_partition(S: EnumeratedSemigroup, elements) -> PointPartition:
    npts = S.group.order * S.size
    maps = S.point_maps()
    rows = [[] for _ in range(npts)]
    for s in elements:
        for p, q in enumerate(maps[s]):
            if q >= 0:
                rows[p].append(q)
    labels = _scc(npts, rows)
    blocks: dict = {}
    for p, lab in enumerate(labels):
        blocks.setdefault(lab, []).append(p)
    return PointPartition.from_blocks(npts, blocks.values())


@dataclass
class TilsonResult:
    partition: PointPartition
    restricted: PointPartition
    type_ii: TypeIICertificate


def tilson_congruence(S: EnumeratedSemigroup, cert: Optional[TypeIICertificate] = None,
                      green: Optional[GreenData] = None) -> TilsonResult:
    """Mutual reachability on ``G x B`` under S_II, and again under S_II meet I(S).

    Points are numbered ``g*|B| + b``.  The two partitions must coincide.
    """
    cert = cert or type_ii(S)
    green = green or green_data(S)
    ideal = set(zero_minimal_ideal(S, green).members)
    full = _reach_partition(S, cert.members)
    restricted = _reach_partition(S, cert.members & ideal)
    if full != restricted:
        raise ComplexityError("Tilson congruence differs when restricted to the 0-minimal ideal")
    return TilsonResult(full, restricted, cert)


def point_partition_oracle(S: EnumeratedSemigroup) -> PointPartition:
    """Least injective congruence of ``(G x B, S)`` from the generators' point maps."""
    maps = S.point_maps()
    return minimal_injective_congruence(S.group.order * S.size, [maps[S.index[g]] for g in S.generators])


def idempotent_generated(S: EnumeratedSemigroup, members=None) -> set[int]:
    """Elements of ``<E>`` where ``E`` is the idempotents of ``S`` (or of ``members``)."""
    E = [e for e in S.idempotents() if members is None or e in members]
    out = set(E)
    frontier = list(E)
    while frontier:
        nxt = []
        for x in frontier:
            for e in E:
                p = S.mul(x, e)
                if p not in out:
                    out.add(p)
                    nxt.append(p)
        frontier = nxt
    return out


def _nontrivial_h(S: EnumeratedSemigroup, members: set[int]):
    """A non-aperiodic witness ``(x, period)`` inside ``members``, or None."""
    for x in sorted(members):
        seen = [x]
        y = x
        while True:
            y = S.mul(y, x)
            if y in seen:
                period = len(seen) - seen.index(y)
                if period > 1:
                    return x, period
                break
            seen.append(y)
    return None


@dataclass
class OrbitMonoid:
    orbit: tuple[int, ...]  # L-class indices (base points) of I(M)
    members: frozenset
    E_generated: frozenset
    aperiodic: bool
    witness: Optional[tuple] = None


def _small_gm(M: EnumeratedSemigroup, green: GreenData):
    cls = classify_monoid(M, green)
    if cls.kind != "small":
        raise ComplexityError(f"monoid is {cls.kind}, not small")
    cert = is_gm(M, green)
    if not cert.is_ggm:
        raise ComplexityError("monoid is not GM: " + "; ".join(cert.reasons))
    return cls, cert


def orbit_monoids(M: EnumeratedSemigroup, green: Optional[GreenData] = None) -> list[OrbitMonoid]:
    """One submonoid ``U u (A x G x B_i) u {0}`` per orbit ``B_i`` of the units on L-classes."""
    green = green or green_data(M)
    cls, cert = _small_gm(M, green)
    coord = cert.coordinatization
    units = cls.units
    m = M.size
    B = coord.rees.B
    pos = {b: k for k, b in enumerate(B)}
    rows = [[] for _ in B]
    for u in units:
        for b, c in enumerate(M.elements[u]):
            if c >= 0 and b in pos:
                rows[pos[b]].append(pos[c % m])
    labels = _scc(len(B), rows)
    orbits: dict = {}
    for k, lab in enumerate(labels):
        orbits.setdefault(lab, []).append(k)
    out = []
    for orb in sorted(orbits.values()):
        members = set(units) | {coord.zero} | {x for x, (_, _, b) in coord.coords.items() if b in orb}
        for x in members:
            for y in members:
                if M.mul(x, y) not in members:
                    raise ComplexityError("orbit monoid is not closed")
        E = idempotent_generated(M, members)
        w = _nontrivial_h(M, E)
        out.append(OrbitMonoid(tuple(B[k] for k in orb), frozenset(members), frozenset(E), w is None, w))
    return out


@dataclass
class TwoJResult:
    value: int
    orbits: list[OrbitMonoid]

    def evidence(self, M: EnumeratedSemigroup) -> list[dict]:
        names = M.base_names
        out = []
        for om in self.orbits:
            d = {"orbit": [names[b] if names else b for b in om.orbit], "orbit_monoid_size": len(om.members),
                 "E_generated_size": len(om.E_generated), "aperiodic": om.aperiodic}
            if om.witness:
                d["witness"] = {"element": M.word(om.witness[0]), "period": om.witness[1]}
            out.append(d)
        return out


def tilson_2j(M: EnumeratedSemigroup, green: Optional[GreenData] = None) -> TwoJResult:
    """Complexity of a small GM monoid: 1 iff every orbit monoid has aperiodic ``<E>``, else 2."""
    if M.group.order == 1:
        raise ComplexityError("trivial group: decide complexity 0 by aperiodicity instead")
    green = green or green_data(M)
    oms = orbit_monoids(M, green)
    return TwoJResult(1 if all(om.aperiodic for om in oms) else 2, oms)


# --- report ------------------------------------------------------------------------

@dataclass
class ComplexityReport:
    bounds: list[dict] = field(default_factory=list)
    evidence: list[dict] = field(default_factory=list)
    recursion_trace: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"bounds": self.bounds, "evidence": self.evidence, "recursion_trace": self.recursion_trace}

    def value(self) -> Optional[int]:
        for b in self.bounds:
            if b["kind"] == "exact":
                return b["value"]
        return None

    def interval(self) -> tuple[int, Optional[int]]:
        lo, hi = 0, None
        for b in self.bounds:
            if b["kind"] in ("exact", "lower"):
                lo = max(lo, b["value"])
            if b["kind"] in ("exact", "upper"):
                hi = b["value"] if hi is None else min(hi, b["value"])
        return lo, hi


def complexity_report(S: EnumeratedSemigroup, recurse: int = 2, max_size: int = 20000, _depth: int = 0) -> ComplexityReport:
    """Bounds on the group complexity of ``S`` with the reason for each.

    Aperiodic gives 0.  A small GM monoid is decided by the two-J-class test.
    A smallish monoid is bounded by 2 and bounded below by its small
    submonoid.  The RLM quotient is reported recursively up to ``recurse``
    levels; anything beyond the configured scale is marked undetermined.
    """
    rep = ComplexityReport()
    if len(S) > max_size:
        rep.bounds.append({"kind": "undetermined", "value": None,
                           "reason": f"|S| = {len(S)} exceeds configured scale {max_size}"})
        return rep
    green = green_data(S)
    if is_aperiodic(S, green):
        rep.bounds.append({"kind": "exact", "value": 0, "reason": "aperiodic: all H-classes trivial"})
        return rep
    rep.bounds.append({"kind": "lower", "value": 1, "reason": "contains a nontrivial group"})
    if S.identity is not None and S.zero is not None:
        try:
            cls = classify_monoid(S, green)
        except SemigroupError as exc:
            cls = None
            rep.evidence.append({"classify": f"failed: {exc}"})
        if cls is not None:
            rep.evidence.append({"classify": cls.kind, "ideal_powers": cls.powers})
            if cls.kind == "small":
                try:
                    r = tilson_2j(S, green)
                    rep.bounds.append({"kind": "exact", "value": r.value, "reason": "small GM monoid: orbit monoid test"})
                    rep.evidence.append({"tilson_2j": r.evidence(S)})
                except ComplexityError as exc:
                    rep.evidence.append({"tilson_2j": f"not applicable: {exc}"})
            elif cls.kind == "smallish":
                rep.bounds.append({"kind": "upper", "value": 2, "reason": "smallish monoid"})
                Sm = small_submonoid(S, cls)
                try:
                    r = tilson_2j(Sm)
                    rep.bounds.append({"kind": "lower", "value": r.value, "reason": "small submonoid is a submonoid"})
                    rep.evidence.append({"small_submonoid": len(Sm), "tilson_2j": r.evidence(Sm)})
                except ComplexityError as exc:
                    rep.evidence.append({"small_submonoid": len(Sm), "tilson_2j": f"not applicable: {exc}"})
    if _depth < recurse and S.zero is not None:
        try:
            R = rlm(S).semigroup
        except SemigroupError as exc:
            rep.recursion_trace.append({"depth": _depth, "rlm": f"failed: {exc}"})
        else:
            sub = complexity_report(R, recurse, max_size, _depth + 1)
            rep.recursion_trace.append({"depth": _depth, "size": len(S), "rlm_size": len(R),
                                        "strictly_smaller": len(R) < len(S), "rlm_bounds": sub.bounds,
                                        "rlm_trace": sub.recursion_trace})
            lo, hi = sub.interval()
            if hi is not None and hi <= 1:
                rep.evidence.append({"reduction": "RLM(S) has complexity at most 1: Sc = 1 iff (S^Ev)c = 1; "
                                                  "the S^Ev side needs an aperiodic flow search, undetermined at configured scale"})
    if not any(b["kind"] == "exact" for b in rep.bounds):
        lo, hi = rep.interval()
        if hi is None or lo < hi:
            rep.bounds.append({"kind": "undetermined", "value": None, "interval": [lo, hi]})
    return rep
