from __future__ import annotations

import json
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ev_pipeline, load
from smgkit.core import Group, RowMonomial, enumerate_semigroup
from smgkit.core.rowmonomial import act_point
from smgkit.description import bundled
from smgkit.evalengine import sp_lattice
from smgkit.flows import (Flow, FlowAutomaton, RhodesElement, SPElement, flow_from_dict, flow_to_dict,
                          is_cross_section, lift_flow_ev, load_flow, rees_point_flow, relabel_flow, rh_embed,
                          rh_from_sp, sp_join, sp_leq, sp_meet, verify_flow, verify_saturated)


# --- the lattice SP(G x B) ---------------------------------------------------------

def test_meet_examples():
    # points (1,b1) = 0 and (-1,b2) = 3 on G x B with |B| = 2
    p = SPElement.make([{0, 3}])
    q = SPElement.make([{0}])
    assert sp_meet(p, q) == q
    assert sp_meet(p, p) == p
    assert sp_leq(SPElement.bottom(), p)


@pytest.fixture(scope="module")
def lattice52():
    return sp_lattice(4)


def test_lattice_size(lattice52):
    assert len(lattice52) == 52


def test_order_is_partial_order(lattice52):
    leq = lattice52.leq
    n = len(lattice52)
    assert leq.diagonal().all()
    assert not (leq & leq.T & ~np.eye(n, dtype=bool)).any()
    # transitivity: leq o leq within leq
    comp = (leq.astype(np.uint16) @ leq.astype(np.uint16)) > 0
    assert not (comp & ~leq).any()


def test_meet_is_glb(lattice52):
    L = lattice52
    n = len(L)
    M, leq = L.meet, L.leq
    for a in range(n):
        for b in range(n):
            m = M[a, b]
            assert leq[m, a] and leq[m, b]
            lower = leq[:, a] & leq[:, b]
            assert leq[lower, m].all()
            assert (m == a) == bool(leq[a, b])


def test_join_is_lub(lattice52):
    L = lattice52
    leq = L.leq
    els = L.elements
    for a in range(len(L)):
        for b in range(a, len(L)):
            j = L.index[sp_join(els[a], els[b])]
            assert leq[a, j] and leq[b, j]
            upper = leq[a, :] & leq[b, :]
            assert leq[j, upper].all()


def test_cross_section_examples():
    assert not is_cross_section(SPElement.make([{0, 2}]), 2)
    assert is_cross_section(SPElement.bottom(), 2)
    assert is_cross_section(SPElement.make([{0}, {3}]), 2)


# --- Rhodes elements ------------------------------------------------------------------

def test_rh_embed_examples():
    G = Group.cyclic(2)
    assert rh_embed(RhodesElement.bottom(), 2) == SPElement.bottom()
    r = RhodesElement.make(G, [[1]], {1: G.identity})
    assert rh_embed(r, 2) == SPElement.make([{1}])


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_rh_round_trip(data):
    G = Group.cyclic(data.draw(st.sampled_from([2, 3])))
    m = data.draw(st.integers(1, 5))
    X = data.draw(st.sets(st.integers(0, m - 1)))
    pts = sorted(X)
    random.Random(data.draw(st.integers(0, 10 ** 6))).shuffle(pts)
    cut = data.draw(st.integers(0, len(pts)))
    blocks = [b for b in (pts[:cut], pts[cut:]) if b]
    f = {b: data.draw(st.integers(0, G.order - 1)) for b in X}
    r = RhodesElement.make(G, blocks, f)
    assert rh_from_sp(rh_embed(r, m), G, m) == r


# --- verification -------------------------------------------------------------------

def _toy2_flow():
    S = load("toy2")
    return S, load_flow(bundled("toy2_flow"), S)


def test_fixture_flow_verifies():
    S, F = _toy2_flow()
    rep = verify_flow(S, F)
    assert rep.ok and rep.aperiodic
    assert verify_saturated(S, F).ok
    for v in F.assignment:
        assert is_cross_section(rh_embed(v, S.size), S.size)


def test_fixture_matches_point_flow():
    S, F = _toy2_flow()
    from smgkit.rees import is_gm
    G = rees_point_flow(S, is_gm(S).coordinatization)
    assert flow_to_dict(G, S.group, S.base_names) == flow_to_dict(F, S.group, S.base_names)


def test_identity_flow_on_group_fails_cross_section():
    G = Group.cyclic(2)
    g = RowMonomial.from_edges(G, 1, {0: (1, 0)})
    S = enumerate_semigroup([g], ["g"], base_names=["b"])
    aut = FlowAutomaton(["q"], ["g"], {(0, 0): 0})
    F = Flow(aut, "SP", [SPElement.make([{0}, {1}])], {"g": ["g"]}, 1)
    rep = verify_flow(S, F)
    assert any(f["condition"] == "cross_section" for f in rep.failures)
    triv = Group.trivial()
    S1 = enumerate_semigroup([RowMonomial.identity(triv, 1)], ["g"])
    F1 = Flow(aut, "SP", [SPElement.make([{0}])], {"g": ["g"]}, 1)
    assert verify_flow(S1, F1).ok


def test_deleted_transition_fails():
    S, F = _toy2_flow()
    q, a = sorted(F.automaton.delta)[0]
    broken = Flow(F.automaton.without(q, a), F.target, F.assignment, F.covering, F.base_size)
    rep = verify_flow(S, broken)
    assert not rep.ok
    w = rep.failures[0]
    assert w["target"] == "sink" and w["letter"] == F.automaton.letters[a]


def test_corrupted_value_fails():
    S, F = _toy2_flow()
    G = S.group
    bad = RhodesElement.make(G, [sorted(set(range(S.size)))], {b: (G.identity if b == 0 else 1) for b in range(S.size)})
    rep = verify_flow(S, F.with_value(0, bad))
    assert not rep.ok
    assert not verify_saturated(S, F.with_value(0, bad)).ok


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_saturated_route_agrees(data):
    S, F = _toy2_flow()
    G = S.group
    q = data.draw(st.integers(0, len(F.assignment) - 1))
    X = sorted(data.draw(st.sets(st.integers(0, S.size - 1), min_size=1)))
    split = data.draw(st.booleans())
    blocks = [[b] for b in X] if split else [X]
    f = {b: data.draw(st.integers(0, G.order - 1)) for b in X}
    F2 = F.with_value(q, RhodesElement.make(G, blocks, f))
    assert verify_flow(S, F2, check_aperiodic=False).ok == verify_saturated(S, F2).ok


def test_flow_json_round_trip():
    S, F = _toy2_flow()
    d = flow_to_dict(F, S.group, S.base_names)
    again = flow_from_dict(json.loads(json.dumps(d)), S)
    assert flow_to_dict(again, S.group, S.base_names) == d


# --- lifting ----------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["toy2", "toy3", "tiny"])
def test_lift_verifies(name):
    S2, coord, gen, SEv, green = ev_pipeline(name)
    F = rees_point_flow(S2, coord)
    assert verify_flow(S2, F).ok
    L = lift_flow_ev(F, gen, S2, SEv)
    rep = verify_flow(SEv, L)
    assert rep.ok and rep.aperiodic
    assert verify_saturated(SEv, L).ok
    for v, w in zip(F.assignment, L.assignment):
        assert len(v.blocks) == len(w.blocks)
        # t fixes X^Ev and each class
        for blk in w.blocks:
            img = {act_point(b, gen.t.codes, gen.index.size, gen.group.table) % gen.index.size for b in blk}
            assert img == set(blk)


def test_lift_mutations_fail():
    S2, coord, gen, SEv, green = ev_pipeline("toy2")
    L = lift_flow_ev(rees_point_flow(S2, coord), gen, S2, SEv)
    q, a = sorted(L.automaton.delta)[0]
    cut = Flow(L.automaton.without(q, a), L.target, L.assignment, L.covering, L.base_size)
    assert not verify_flow(SEv, cut).ok
    v = L.assignment[0]
    f = dict(v.f)
    b = max(f)
    f[b] = gen.group.mul(f[b], 1)
    assert len(f) > 1
    assert not verify_flow(SEv, L.with_value(0, RhodesElement.make(gen.group, v.blocks, f))).ok


def test_relabel_flow_round_trip():
    S, F = _toy2_flow()
    G = S.group
    d = [1, 0]
    back = relabel_flow(relabel_flow(F, G, d), G, [G.inv(x) for x in d])
    assert back.assignment == F.assignment
