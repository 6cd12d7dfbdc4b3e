from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ev_pipeline, eval_setup, load
from smgkit.core import Group, RowMonomial, enumerate_semigroup
from smgkit.core.rowmonomial import act_point
from smgkit.evalengine import (WFF, EvalError, action_check, back, bell, build_eval_ts, closure_check,
                               closure_compose, contradictory_class, embed_check_formula, embed_check_full,
                               enumerate_m0, forward_flow, free_flow, identity_closure, interpret_wff, kleene,
                               lazy_forward, loop, omega, primitive_root, setup, sp_lattice)
from smgkit.flows import SPElement, is_cross_section

ALL = ["tiny", "toy1col", "toy2", "toy3", "toy2_swap", "mtf"]


@pytest.fixture(scope="module")
def L52():
    return sp_lattice(4)


def test_bell_numbers():
    assert [bell(n) for n in range(7)] == [1, 1, 2, 5, 15, 52, 203]


# --- closure relations -------------------------------------------------------------------

def test_closure_check_examples(L52):
    n = len(L52)
    assert closure_check(L52, np.ones((n, n), dtype=bool)) == (True, None)
    assert closure_check(L52, np.eye(n, dtype=bool)) == (True, None)


def test_closure_check_catches_missing_meet(L52):
    S = load("toy2")
    f = free_flow(L52, S.generators[0], S.size, S.group.table)
    # drop a pair that is the meet of two other pairs
    A, B = np.nonzero(f)
    for i in range(len(A)):
        for j in range(i):
            a, b = L52.meet[A[i], A[j]], L52.meet[B[i], B[j]]
            if (a, b) not in {(A[i], B[i]), (A[j], B[j])} and (a, b) != (L52.top, L52.top):
                g = f.copy()
                g[a, b] = False
                ok, w = closure_check(L52, g)
                assert not ok and w is not None
                return
    pytest.fail("no droppable meet found")


def test_free_flow_contains_sink_pairs(L52):
    S = load("toy2")
    for codes in S.generators:
        f = free_flow(L52, codes, S.size, S.group.table)
        assert f[L52.bottom, :].all()


def test_identity_free_flow_contains_diagonal(L52):
    G = Group.cyclic(2)
    f = free_flow(L52, RowMonomial.identity(G, 2).codes, 2, G.table)
    assert f.diagonal().all()
    assert not (f & ~L52.leq).any()


def test_identity_is_unit(L52):
    S = load("toy2")
    f = free_flow(L52, S.generators[1], S.size, S.group.table)
    I = identity_closure(L52)
    assert np.array_equal(closure_compose(L52, f, I), f)
    assert np.array_equal(closure_compose(L52, I, f), f)


def test_unaries_are_subdiagonal(L52):
    S = load("toy2")
    f = free_flow(L52, S.generators[1], S.size, S.group.table)
    off = ~np.eye(len(L52), dtype=bool)
    assert not (back(f) & off).any() and not (kleene(f) & off).any()
    assert not (kleene(f) & ~back(f)).any()
    I = identity_closure(L52)
    assert np.array_equal(back(I), I)
    w = omega(L52, f)
    assert np.array_equal(closure_compose(L52, w, w), w)
    assert closure_check(L52, loop(L52, f))[0]


def test_single_identity_generator(L52):
    m0 = enumerate_m0(L52, {"e": identity_closure(L52)})
    assert len(m0) == 1
    assert np.array_equal(m0.vacuum, back(identity_closure(L52)))


# --- M0 for toy2 (|G x B| = 4) ---------------------------------------------------------------

@pytest.fixture(scope="module")
def toy2_m0():
    return eval_setup("toy2")


def test_m0_members_are_closure_relations(toy2_m0):
    L, m0 = toy2_m0
    assert len(L) == 52
    for f in m0.elements:
        assert closure_check(L, f)[0]


def test_vacuum(toy2_m0):
    L, m0 = toy2_m0
    V = m0.vacuum
    assert not (V & ~np.eye(len(L), dtype=bool)).any()
    assert np.array_equal(closure_compose(L, V, V), V)
    for f in m0.elements:
        assert m0.find(closure_compose(L, closure_compose(L, V, f), V)) is not None


def test_m0_closed_under_operations(toy2_m0):
    L, m0 = toy2_m0
    rng = np.random.default_rng(7)
    for _ in range(200):
        i, j = rng.integers(len(m0), size=2)
        f, g = m0.elements[i], m0.elements[j]
        assert m0.find(closure_compose(L, f, g)) is not None
    for f in m0.elements[:50]:
        assert m0.find(back(f)) is not None
        assert m0.find(loop(L, f)) is not None


def test_product_associative(toy2_m0):
    L, m0 = toy2_m0
    rng = np.random.default_rng(11)
    for _ in range(100):
        f, g, h = (m0.elements[k] for k in rng.integers(len(m0), size=3))
        left = closure_compose(L, closure_compose(L, f, g), h)
        right = closure_compose(L, f, closure_compose(L, g, h))
        assert np.array_equal(left, right)


def test_forward_flow_of_generator_on_points(toy2_m0):
    L, m0 = toy2_m0
    S = load("toy2")
    for k, nm in enumerate(S.generator_names):
        f = m0.elements[m0.generators[nm]]
        for p in range(L.npts):
            r = act_point(p, S.generators[k], S.size, S.group.table)
            want = L.bottom if r < 0 else L.point(r)
            assert forward_flow(L, f, L.point(p)) == want


def test_forward_flow_monotone(toy2_m0):
    L, m0 = toy2_m0
    for f in m0.elements[:40]:
        fw = [forward_flow(L, f, l) for l in range(len(L))]
        A, B = np.nonzero(L.leq)
        assert all(L.leq[fw[a], fw[b]] for a, b in zip(A.tolist(), B.tolist()))


def test_action_check_tiny_and_toy2(toy2_m0):
    assert action_check(eval_setup("tiny")[1]) is None
    assert action_check(toy2_m0[1]) is None


def test_loop_orbit_on_points(toy2_m0):
    L, m0 = toy2_m0
    S = load("toy2")
    lt = interpret_wff(WFF.loop(WFF.x(S.generator_names[0])), m0)
    assert closure_check(L, lt)[0]


# --- WFFs ------------------------------------------------------------------------------------

def test_primitive_root():
    assert primitive_root("abab") == list("ab")
    assert primitive_root("aaa") == ["a"]
    assert primitive_root("aba") == list("aba")
    assert primitive_root("") == []


@settings(max_examples=100)
@given(st.text(alphabet="xyz", min_size=1, max_size=6), st.integers(1, 4))
def test_primitive_root_power(s, k):
    r = primitive_root(s)
    assert primitive_root(s * k) == r
    assert len(s) % len(r) == 0 and "".join(r) * (len(s) // len(r)) == s


def test_interpretation_rules(toy2_m0):
    L, m0 = toy2_m0
    x, y = load("toy2").generator_names[:2]
    assert np.array_equal(interpret_wff(WFF.eps(), m0), m0.vacuum)
    assert np.array_equal(interpret_wff(WFF.loop(WFF.word([x, x])), m0), interpret_wff(WFF.loop(WFF.x(x)), m0))
    xy = interpret_wff(WFF.word([x, y]), m0)
    assert np.array_equal(xy, closure_compose(L, interpret_wff(WFF.x(x), m0), interpret_wff(WFF.x(y), m0)))
    with pytest.raises(EvalError):
        interpret_wff(WFF.x("nope"), m0)


# --- Eval --------------------------------------------------------------------------------------

def test_eval_toy2_has_no_contradiction(toy2_m0):
    L, m0 = toy2_m0
    ts = build_eval_ts(m0, load("toy2").size)
    for p in range(L.npts):
        assert L.point(p) in ts.states
    assert ts.contradiction is None
    rep = ts.report()
    assert rep["lattice_size"] == 52 and rep["m0_size"] == len(m0)
    for act in ts.actions:
        assert all(0 <= s < len(ts.states) for s in act)


def test_group_only_states_are_cross_sections():
    G = Group.cyclic(2)
    swap = RowMonomial.from_edges(G, 2, {0: (1, 1), 1: (0, 0)})
    S = enumerate_semigroup([swap], ["s"])
    L, m0 = setup(S)
    ts = build_eval_ts(m0, 2)
    assert ts.contradiction is None
    # each class is a cross-section; Y itself may be a whole G-orbit
    for s in ts.states:
        e = L.elements[s]
        assert contradictory_class(e, 2) is None
        assert all(is_cross_section(SPElement.make([b]), 2) for b in e.blocks)


@pytest.mark.slow
def test_swap_instance_flags_contradiction():
    L, m0 = eval_setup("toy2_swap")
    ts = build_eval_ts(m0, 2)
    w = ts.contradiction
    assert w is not None
    assert len({p % 2 for p in w["class"]}) < len(w["class"])


# --- lazy flows and the embedding check ---------------------------------------------------------

def test_lazy_forward_agrees_with_dense():
    S2, coord, gen, SEv, green = ev_pipeline("tiny")
    L = sp_lattice(SEv.group.order * SEv.size)
    for codes in SEv.generators:
        f = free_flow(L, codes, SEv.size, SEv.group.table)
        for i, l in enumerate(L.elements):
            x, z = lazy_forward(codes, SEv.size, SEv.group.table, l)
            A, B = np.nonzero(f & L.leq[i][:, None])
            a, b = int(A[0]), int(B[0])
            for u, v in zip(A[1:].tolist(), B[1:].tolist()):
                a, b = int(L.meet[a, u]), int(L.meet[b, v])
            assert (L.elements[a], L.elements[b]) == (x, z)


@pytest.mark.parametrize("name", ALL)
def test_embed_formula(name):
    S2, coord, gen, SEv, green = ev_pipeline(name)
    rep = embed_check_formula(S2, gen)
    assert rep.ok, rep.to_json()
    assert rep.size_S_prime == len(S2)


def test_embed_full_agrees_with_formula():
    S2, coord, gen, SEv, green = ev_pipeline("tiny")
    assert SEv.group.order * SEv.size == 4
    full = embed_check_full(S2, gen, SEv)
    formula = embed_check_formula(S2, gen)
    assert full.ok and formula.ok
    assert full.maps == formula.maps


def test_embed_detects_wrong_h():
    import copy
    S2, coord, gen, SEv, green = ev_pipeline("toy2")
    x = S2.index[S2.generators[0]]
    other = next(y for y in gen.h if S2.elements[y] != S2.elements[x])
    bad = copy.copy(gen)
    bad.h = dict(gen.h)
    bad.h[x] = gen.h[other]
    rep = embed_check_formula(S2, bad)
    assert not rep.ok and rep.h_failures
