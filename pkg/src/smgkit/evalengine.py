"""Closure operators on L x L as Boolean relations, the 0-flow monoid and Eval."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from smgkit.core.rowmonomial import act_point
from smgkit.core.semigroup import CapExceeded, EnumeratedSemigroup
from smgkit.flows import SPElement, all_sp_elements, sp_join, sp_leq, sp_meet

DEFAULT_MAX_LATTICE = int(os.environ.get("SMGKIT_MAX_LATTICE", "25000"))
DEFAULT_MAX_M0 = 100_000


class EvalError(RuntimeError):
    pass


def bell(n: int) -> int:
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


@dataclass
class Lattice:
    """Dense SP(G x B): elements, meet and order tables."""

    npts: int
    elements: list[SPElement]
    index: dict
    meet: np.ndarray
    leq: np.ndarray
    bottom: int
    top: int

    def __len__(self) -> int:
        return len(self.elements)

    def point(self, p: int) -> int:
        return self.index[SPElement.make([{p}])]


def sp_lattice(npts: int, cap: int = DEFAULT_MAX_LATTICE) -> Lattice:
    size = bell(npts + 1)
    if size > cap:
        raise CapExceeded("lattice", size, cap)
    els = all_sp_elements(npts)
    if len(els) != size:
        raise EvalError(f"enumerated {len(els)} lattice elements, expected Bell({npts + 1}) = {size}")
    index = {e: i for i, e in enumerate(els)}
    n = len(els)
    meet = np.empty((n, n), dtype=np.int32)
    leq = np.zeros((n, n), dtype=bool)
    for i, a in enumerate(els):
        for j in range(i, n):
            k = index[sp_meet(a, els[j])]
            meet[i, j] = meet[j, i] = k
        for j, b in enumerate(els):
            leq[i, j] = sp_leq(a, b)
    bottom = index[SPElement.bottom()]
    top = index[SPElement.make([set(range(npts))])] if npts else bottom
    return Lattice(npts, els, index, meet, leq, bottom, top)


# --- closure relations ------------------------------------------------------------------

def closure_check(L: Lattice, R: np.ndarray):
    """``(True, None)`` if ``R`` is meet-closed and holds ``(top, top)``; else a witness pair of pairs."""
    if not R[L.top, L.top]:
        return False, ("missing (top, top)",)
    A, B = np.nonzero(R)
    for a, b in zip(A.tolist(), B.tolist()):
        ok = R[L.meet[a, A], L.meet[b, B]]
        if not ok.all():
            k = int(np.argmin(ok))
            return False, ((a, b), (int(A[k]), int(B[k])))
    return True, None


def _validated(L: Lattice, R: np.ndarray, what: str) -> np.ndarray:
    ok, w = closure_check(L, R)
    if not ok:
        raise EvalError(f"{what} is not a closure relation: {w}")
    return R


def identity_closure(L: Lattice) -> np.ndarray:
    """The unit of relation product: the diagonal (every pair is closed under the identity map)."""
    return np.eye(len(L), dtype=bool)


def free_flow_pair(codes: tuple, size: int, table, a: SPElement, b: SPElement) -> bool:
    img = {}
    for y in a.Y:
        r = act_point(y, codes, size, table)
        if r >= 0:
            if r not in b.Y:
                return False
            img[y] = r
    src, dst = a.block_of(), b.block_of()
    pts = list(img)
    for i, y in enumerate(pts):
        for y2 in pts[:i]:
            if (src[y] == src[y2]) != (dst[img[y]] == dst[img[y2]]):
                return False
    return True


def free_flow(L: Lattice, codes: tuple, size: int, table, validate: bool = True) -> np.ndarray:
    n = len(L)
    R = np.zeros((n, n), dtype=bool)
    for i, a in enumerate(L.elements):
        for j, b in enumerate(L.elements):
            R[i, j] = free_flow_pair(codes, size, table, a, b)
    return _validated(L, R, "free flow") if validate else R


def closure_compose(L: Lattice, f: np.ndarray, g: np.ndarray, validate: bool = True) -> np.ndarray:
    R = (f.astype(np.uint16) @ g.astype(np.uint16)) > 0
    return _validated(L, R, "product") if validate else R


def domain(f: np.ndarray) -> np.ndarray:
    return f.any(axis=1)


def back(f: np.ndarray) -> np.ndarray:
    return np.diag(domain(f))


def kleene(f: np.ndarray) -> np.ndarray:
    return np.diag(np.diag(f).copy())


def omega(L: Lattice, f: np.ndarray, limit: int = 10_000) -> np.ndarray:
    """The idempotent power of ``f`` (powers are compared until one repeats)."""
    seen = {}
    p = f
    k = 1
    while k <= limit:
        key = p.tobytes()
        if key in seen:
            break
        seen[key] = k
        p = closure_compose(L, p, f, validate=False)
        k += 1
    # the idempotent power lies in the cycle: test successive powers
    q = f
    for _ in range(k + 1):
        if np.array_equal(closure_compose(L, q, q, validate=False), q):
            return q
        q = closure_compose(L, q, f, validate=False)
    raise EvalError("no idempotent power found")


def loop(L: Lattice, f: np.ndarray) -> np.ndarray:
    return closure_compose(L, omega(L, f), kleene(f))


def closure_unary(L: Lattice, kind: str, f: np.ndarray):
    if kind == "dom":
        return domain(f)
    if kind == "back":
        return back(f)
    if kind == "kleene":
        return kleene(f)
    if kind == "loop":
        return loop(L, f)
    raise ValueError(f"unknown unary operation {kind!r}")


# --- the 0-flow monoid ------------------------------------------------------------------

@dataclass
class M0:
    lattice: Lattice
    elements: list[np.ndarray]
    index: dict  # bytes -> position
    generators: dict[str, int]
    identity: int
    vacuum: np.ndarray

    def __len__(self) -> int:
        return len(self.elements)

    def find(self, R: np.ndarray) -> Optional[int]:
        return self.index.get(R.tobytes())


def enumerate_m0(L: Lattice, gens: dict[str, np.ndarray], cap: int = DEFAULT_MAX_M0) -> M0:
    """Least set with the identity and the free flows, closed under product, back flow and loop.

    Every back flow and loop produced so far is kept as an atom; the monoid is the
    closure of the identity under right multiplication by atoms.
    """
    els: list[np.ndarray] = []
    index: dict = {}
    atoms: list[np.ndarray] = []
    atom_keys: set = set()
    queue: list[tuple[int, int]] = []
    fresh: list[int] = []

    def add(R):
        key = R.tobytes()
        i = index.get(key)
        if i is None:
            if len(els) >= cap:
                raise CapExceeded("0-flow monoid", len(els), cap)
            _validated(L, R, "M0 element")
            i = index[key] = len(els)
            els.append(R)
            queue.extend((i, a) for a in range(len(atoms)))
            fresh.append(i)
        return i

    def add_atom(R):
        key = R.tobytes()
        if key in atom_keys:
            return
        atom_keys.add(key)
        atoms.append(R)
        a = len(atoms) - 1
        queue.extend((i, a) for i in range(len(els)))
        add(R)

    ident = add(identity_closure(L))
    for R in gens.values():
        add_atom(R)
    gidx = {nm: index[R.tobytes()] for nm, R in gens.items()}
    while queue or fresh:
        while fresh:
            f = els[fresh.pop()]
            add_atom(back(f))
            add_atom(loop(L, f))
        if queue:
            i, a = queue.pop()
            add(closure_compose(L, els[i], atoms[a], validate=False))
    V = np.diag(np.logical_and.reduce([domain(f) for f in els]))
    if not np.array_equal(closure_compose(L, V, V), V):
        raise EvalError("vacuum is not idempotent")
    if V.tobytes() not in index:
        raise EvalError("vacuum is not in M0")
    return M0(L, els, index, gidx, ident, V)


def forward_flow(L: Lattice, f: np.ndarray, l: int, in_LV: bool = False) -> int:
    """Right coordinate of the least stable pair above ``(l, bottom)``."""
    A, B = np.nonzero(f & L.leq[l][:, None])
    if len(A) == 0:
        raise EvalError("no stable pair above (l, bottom)")
    a, b = int(A[0]), int(B[0])
    for x, y in zip(A[1:].tolist(), B[1:].tolist()):
        a, b = int(L.meet[a, x]), int(L.meet[b, y])
    if not f[a, b]:
        raise EvalError("stable pairs are not meet-closed")
    if in_LV and a != l:
        raise EvalError("left coordinate moved for an element of LV")
    return b


# --- WFFs ---------------------------------------------------------------------------------

@dataclass(frozen=True)
class WFF:
    """``kind`` is ``"eps"``, ``"letter"``, ``"cat"`` or ``"loop"``."""

    kind: str
    letter: str = ""
    parts: tuple = ()

    @staticmethod
    def eps() -> "WFF":
        return WFF("eps")

    @staticmethod
    def x(name: str) -> "WFF":
        return WFF("letter", name)

    @staticmethod
    def cat(*ws: "WFF") -> "WFF":
        return WFF("cat", parts=tuple(ws))

    @staticmethod
    def word(letters: Sequence[str]) -> "WFF":
        return WFF.cat(*[WFF.x(a) for a in letters])

    @staticmethod
    def loop(w: "WFF") -> "WFF":
        return WFF("loop", parts=(w,))

    def letters(self) -> Optional[list[str]]:
        """The letter string if this WFF is loop-free."""
        if self.kind == "eps":
            return []
        if self.kind == "letter":
            return [self.letter]
        if self.kind == "cat":
            out = []
            for p in self.parts:
                s = p.letters()
                if s is None:
                    return None
                out.extend(s)
            return out
        return None


def primitive_root(s: Sequence) -> list:
    """Shortest ``r`` with ``s = r^k``, via the failure function."""
    s = list(s)
    n = len(s)
    if n == 0:
        return s
    fail = [0] * n
    k = 0
    for i in range(1, n):
        while k and s[i] != s[k]:
            k = fail[k - 1]
        if s[i] == s[k]:
            k += 1
        fail[i] = k
    p = n - fail[-1]
    return s[:p] if n % p == 0 else s


def interpret_wff(w: WFF, m0: M0) -> np.ndarray:
    L = m0.lattice
    V = m0.vacuum
    if w.kind == "eps":
        return V
    if w.kind == "letter":
        if w.letter not in m0.generators:
            raise EvalError(f"unknown letter {w.letter!r}")
        f = m0.elements[m0.generators[w.letter]]
        return closure_compose(L, closure_compose(L, V, f), V)
    if w.kind == "cat":
        out = V
        for p in w.parts:
            out = closure_compose(L, out, interpret_wff(p, m0))
        return out
    if w.kind == "loop":
        inner = w.parts[0]
        s = inner.letters()
        if s is not None and s:
            inner = WFF.word(primitive_root(s))
        return loop(L, interpret_wff(inner, m0))
    raise ValueError(f"bad WFF kind {w.kind!r}")


# --- Eval ---------------------------------------------------------------------------------

@dataclass
class EvalTS:
    states: list[int]  # lattice indices
    actions: list[tuple]  # distinct maps States -> States (positions in ``states``)
    action_of: list[int]  # element of VM0V -> action index
    contradiction: Optional[dict]
    m0: M0

    def report(self) -> dict:
        L = self.m0.lattice
        return {"lattice_size": len(L), "m0_size": len(self.m0),
                "vacuum_domain_size": int(np.diag(self.m0.vacuum).sum()), "states": len(self.states),
                "contradiction": self.contradiction is not None, "witness": self.contradiction,
                "eval_size": len(self.actions)}


def contradictory_class(e: SPElement, size: int) -> Optional[list[int]]:
    """A class of ``e`` holding two labels over one base point, if any.

    The set ``Y`` itself may carry several labels over a point (a G-invariant
    element does); only a single class doing so is contradictory.
    """
    for blk in e.blocks:
        if len({p % size for p in blk}) != len(blk):
            return sorted(blk)
    return None


def sandwich(m0: M0) -> list[np.ndarray]:
    L, V = m0.lattice, m0.vacuum
    seen = {}
    for f in m0.elements:
        R = closure_compose(L, closure_compose(L, V, f, validate=False), V, validate=False)
        seen.setdefault(R.tobytes(), R)
    return list(seen.values())


def build_eval_ts(m0: M0, size: int, cap: int = DEFAULT_MAX_M0) -> EvalTS:
    """States reached from the points under forward flows of ``V M0 V``, and the action monoid."""
    L = m0.lattice
    V = m0.vacuum
    inLV = np.diag(V)
    VMV = sandwich(m0)
    points = [L.point(p) for p in range(L.npts)]
    for p in points:
        if not inLV[p]:
            raise EvalError("a point is not fixed by the vacuum")
    states = list(points)
    pos = {s: k for k, s in enumerate(states)}
    frontier = list(states)
    cache: dict = {}
    while frontier:
        nxt = []
        for s in frontier:
            for k, f in enumerate(VMV):
                r = forward_flow(L, f, s, in_LV=True)
                cache[(k, s)] = r
                if r not in pos:
                    if not inLV[r]:
                        raise EvalError("forward flow left LV")
                    if len(states) >= cap:
                        raise CapExceeded("States", len(states), cap)
                    pos[r] = len(states)
                    states.append(r)
                    nxt.append(r)
        frontier = nxt
    actions: list[tuple] = []
    aidx: dict = {}
    action_of = []
    for k in range(len(VMV)):
        t = tuple(pos[cache[(k, s)]] for s in states)
        action_of.append(aidx.setdefault(t, len(aidx)))
        if len(aidx) > len(actions):
            actions.append(t)
    contradiction = None
    for s in states:
        e = L.elements[s]
        bad = contradictory_class(e, size)
        if bad is not None:
            contradiction = {"state": sorted(e.Y), "blocks": sorted(sorted(b) for b in e.blocks), "class": bad}
            break
    return EvalTS(states, actions, action_of, contradiction, m0)


def setup(S: EnumeratedSemigroup, cap_lattice: int = DEFAULT_MAX_LATTICE, cap_m0: int = DEFAULT_MAX_M0):
    """Dense lattice, free flows of the generators and M0 for ``(G x B, S)``."""
    L = sp_lattice(S.group.order * S.size, cap_lattice)
    gens = {nm: free_flow(L, codes, S.size, S.group.table) for nm, codes in zip(S.generator_names, S.generators)}
    return L, enumerate_m0(L, gens, cap_m0)


# --- lazy forward flows and the embedding check ------------------------------------------

def lazy_forward(codes: tuple, size: int, table, l: SPElement) -> tuple[SPElement, SPElement]:
    """Least stable pair of the free flow of ``codes`` above ``(l, bottom)``, without a lattice.

    Blocks on the left are merged while two of them reach a common block on the right.
    """
    from scipy.cluster.hierarchy import DisjointSet
    img = {y: act_point(y, codes, size, table) for y in l.Y}
    img = {y: r for y, r in img.items() if r >= 0}
    left = DisjointSet(sorted(l.Y))
    for b in l.blocks:
        first = next(iter(b))
        for y in b:
            left.merge(first, y)
    while True:
        right = DisjointSet(sorted(set(img.values())))
        for b in left.subsets():
            hits = [img[y] for y in b if y in img]
            for r in hits[1:]:
                right.merge(hits[0], r)
        # pull back: sources whose images share a block must share one
        changed = False
        owner: dict = {}
        for y, r in img.items():
            root = right[r]
            if root in owner and not left.connected(owner[root], y):
                left.merge(owner[root], y)
                changed = True
            owner.setdefault(root, y)
        if not changed:
            break
    x = SPElement.make(left.subsets()) if l.Y else SPElement.bottom()
    z = SPElement.make(right.subsets()) if img else SPElement.bottom()
    return x, z


def lazy_loop(codes: tuple, size: int, table, l: SPElement, period: int) -> SPElement:
    """Forward flow of the loop of a free flow on ``l`` computed pointwise.

    The ``period``-th power is applied first, then the least state above it that
    is a Kleene fixed point; membership of both stable pairs is verified.
    """
    w = l
    for _ in range(period):
        x, nw = lazy_forward(codes, size, table, w)
        if x != w:
            raise EvalError("left lift while iterating the loop")
        w = nw
    z = w
    while True:
        nz = sp_join(z, lazy_forward(codes, size, table, z)[1])
        if nz == z:
            break
        z = nz
    if not free_flow_pair(codes, size, table, z, z):
        raise EvalError("loop state is not a Kleene fixed point")
    if not free_flow_pair(codes, size, table, l, z):
        raise EvalError("loop state is not reached in one step")
    return z


@dataclass
class EmbedReport:
    mode: str
    ok: bool
    size_S: int
    size_S_prime: int
    maps: dict  # generator name -> images of G x B' in G x B indexing (-1 undefined)
    orbit_failures: list = field(default_factory=list)
    h_failures: list = field(default_factory=list)
    witness: Optional[dict] = None

    def to_json(self) -> dict:
        return {"mode": self.mode, "ok": self.ok, "size_S": self.size_S, "size_S_prime": self.size_S_prime,
                "orbit_failures": self.orbit_failures, "h_failures": self.h_failures, "witness": self.witness}


def _period(codes: tuple, size: int, G) -> int:
    """Least ``m`` with ``x^m`` idempotent, for the point map of ``codes``."""
    from smgkit.core.rowmonomial import point_map
    f = point_map(codes, size, G)
    p, k, seen = f, 1, {}
    while p not in seen:
        seen[p] = k
        if all(p[q] < 0 or p[p[q]] == p[q] for q in range(len(p))) and all(
                (p[q] < 0) == (p[q] < 0 or p[p[q]] < 0) for q in range(len(p))):
            return k
        p = tuple(f[q] if q >= 0 else -1 for q in p)
        k += 1
    raise EvalError("no idempotent power")


def _embed_maps(S: EnumeratedSemigroup, gen, loop_point, h_point):
    """Images of the generators of ``S'`` on ``G x B'``, pulled back to ``G x B`` indices."""
    G, n, ix = S.group, S.size, gen.index
    N = ix.size
    phi = [g * N + ix.point(b + 1, 0) for g in range(G.order) for b in range(n)]
    back_of = {q: p for p, q in enumerate(phi)}
    maps, orbit_fail, h_fail = {}, [], []
    for k, nm in enumerate(S.generator_names):
        x = S.index[S.generators[k]]
        if x not in gen.h:
            raise EvalError(f"S^Ev has no h letter for generator {nm!r}")
        images = []
        for p, q in enumerate(phi):
            g, b = divmod(p, n)
            orbit = loop_point(q)
            want = SPElement.make([{g * N + ix.point(b + 1, j)} for j in range(n + 1)])
            if orbit != want:
                orbit_fail.append({"generator": nm, "point": p, "state": sorted(orbit.Y)})
            r = h_point(x, orbit)
            if len(r.Y) > 1:
                h_fail.append({"generator": nm, "point": p, "state": sorted(r.Y)})
                images.append(-2)
                continue
            if not r.Y:
                images.append(-1)
                continue
            (y,) = r.Y
            images.append(back_of.get(y, -2))
            expected = act_point(p, S.generators[k], n, G.table)
            if images[-1] != expected:
                h_fail.append({"generator": nm, "point": p, "image": images[-1], "expected": expected})
        maps[nm] = images
    return maps, orbit_fail, h_fail


def _finish(mode: str, S: EnumeratedSemigroup, maps, orbit_fail, h_fail) -> EmbedReport:
    from smgkit.core.rowmonomial import RowMonomial
    from smgkit.core.semigroup import enumerate_semigroup
    G, n = S.group, S.size
    witness = None
    gens = []
    for nm, images in maps.items():
        codes = []
        for b in range(n):
            r = images[b]  # image of (1, b)
            codes.append(r if r >= 0 else -1)
        rm = RowMonomial(G, n, tuple(codes))
        from smgkit.core.rowmonomial import point_map
        if tuple(point_map(rm.codes, n, G)) != tuple(images):
            witness = witness or {"generator": nm, "reason": "not label respecting", "images": images}
        gens.append(rm)
    size_prime = 0
    if witness is None and not h_fail:
        Sp = enumerate_semigroup(gens, list(maps))
        size_prime = len(Sp)
        for k, nm in enumerate(S.generator_names):
            if gens[k].codes != S.generators[k]:
                witness = {"generator": nm, "S": list(S.generators[k]), "S_prime": list(gens[k].codes)}
                break
        if witness is None and size_prime != len(S):
            witness = {"reason": "sizes differ", "S": len(S), "S_prime": size_prime}
    ok = witness is None and not orbit_fail and not h_fail
    return EmbedReport(mode, ok, len(S), size_prime, maps, orbit_fail, h_fail, witness)


def embed_check_formula(S: EnumeratedSemigroup, gen) -> EmbedReport:
    """Realize ``t^{w+*} h_x`` on ``G x B'`` with lazy forward flows and compare with ``S``."""
    G, N = S.group, gen.index.size
    tab = G.table
    period = _period(gen.t.codes, N, G)

    def loop_point(q):
        return lazy_loop(gen.t.codes, N, tab, SPElement.make([{q}]), period)

    def h_point(x, state):
        left, right = lazy_forward(gen.h[x].codes, N, tab, state)
        if left != state:
            raise EvalError("left lift under an h letter")
        return right

    return _finish("formula", S, *_embed_maps(S, gen, loop_point, h_point))


def embed_check_full(S: EnumeratedSemigroup, gen, SEv: EnumeratedSemigroup,
                     cap_lattice: int = DEFAULT_MAX_LATTICE, cap_m0: int = DEFAULT_MAX_M0) -> EmbedReport:
    """The same check through ``V M0 V`` of the dense evaluation machinery for ``S^Ev``."""
    L, m0 = setup(SEv, cap_lattice, cap_m0)
    names = {x: SEv.generator_names[k] for k, x in enumerate(sorted(gen.h), start=1)}
    loop_t = interpret_wff(WFF.loop(WFF.x("t")), m0)

    def loop_point(q):
        return L.elements[forward_flow(L, loop_t, L.point(q), in_LV=True)]

    def h_point(x, state):
        f = interpret_wff(WFF.x(names[x]), m0)
        return L.elements[forward_flow(L, f, L.index[state], in_LV=True)]

    return _finish("full", S, *_embed_maps(S, gen, loop_point, h_point))


def action_check(m0: M0) -> Optional[dict]:
    """``None`` if forward flow is a monoid action of ``V M0 V`` on ``LV``; else a witness."""
    L = m0.lattice
    VMV = sandwich(m0)
    LV = np.nonzero(np.diag(m0.vacuum))[0].tolist()
    fw = [[forward_flow(L, f, l, in_LV=True) for l in LV] for f in VMV]
    pos = {l: k for k, l in enumerate(LV)}
    for a, f in enumerate(VMV):
        for b, g in enumerate(VMV):
            fg = closure_compose(L, f, g)
            for k, l in enumerate(LV):
                mid = fw[a][k]
                if mid not in pos:
                    return {"f": a, "l": l, "reason": "forward flow left LV"}
                lhs = forward_flow(L, fg, l, in_LV=True)
                rhs = fw[b][pos[mid]]
                if lhs != rhs:
                    return {"f": a, "g": b, "l": l, "fg": lhs, "then": rhs}
    return None
