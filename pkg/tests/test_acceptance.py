"""Acceptance criteria 1-8.  Each test records one PASS/FAIL line, printed at the end of the run."""

from __future__ import annotations

import itertools
import random

import numpy as np
import pytest

from conftest import ACCEPTANCE, ev_pipeline, eval_setup, load
from smgkit.complexity import point_partition_oracle, tilson_2j, tilson_congruence, type_ii
from smgkit.core import Group, RowMonomial, green_data, is_aperiodic
from smgkit.core.congruence import brute_force_minimal_injective_congruence
from smgkit.core.green import group_of_units, zero_minimal_ideal
from smgkit.core.rowmonomial import compose_codes
from smgkit.core.semigroup import induced_subsemigroup
from smgkit.description import bundled
from smgkit.ev import ev_cross_sections, ev_structure_matrix, verify_ev_properties
from smgkit.evalengine import (action_check, build_eval_ts, closure_check, closure_compose, embed_check_formula,
                               embed_check_full, sp_lattice)
from smgkit.flows import Flow, RhodesElement, lift_flow_ev, load_flow, sp_join, verify_flow
from smgkit.rees import classify_monoid, is_gm, small_submonoid

BUNDLED = ["tiny", "toy1col", "toy2", "toy3", "toy2_swap", "mtf"]


def record(k: int, title: str, checks: dict[str, bool], extra: str = ""):
    failed = [name for name, ok in checks.items() if not ok]
    detail = ("failed: " + ", ".join(failed)) if failed else f"{len(checks)} checks"
    if extra:
        detail += "; " + extra
    ACCEPTANCE[k] = (title, not failed, detail)
    assert not failed, detail


# --- 1 ---------------------------------------------------------------------------------------

def _mtf_structure(mtf):
    green = green_data(mtf)
    chain = green.chain_order()
    sizes = [len(green.j_classes[j]) for j in chain]
    sigma = mtf.index[mtf.generators[mtf.generator_names.index("sigma")]]
    r = mtf.index[mtf.generators[mtf.generator_names.index("r")]]
    powers = [mtf.identity]
    for _ in range(3):
        powers.append(mtf.mul(powers[-1], sigma))
    sandwiches = {mtf.mul(mtf.mul(a, r), b) for a in powers for b in powers}
    return green, chain, sizes, sandwiches


def test_criterion_1_mtf(mtf):
    green, chain, sizes, sandwiches = _mtf_structure(mtf)
    units = group_of_units(mtf, green)
    orders = []
    for u in units:
        p, k = u, 1
        while p != mtf.identity:
            p, k = mtf.mul(p, u), k + 1
        orders.append(k)
    ideal = zero_minimal_ideal(mtf, green)
    middle = chain[1] if len(chain) == 4 else None
    cls = classify_monoid(mtf, green)
    checks = {
        "four J-classes": len(chain) == 4,
        "chain order units > middle > ideal > zero": len(chain) == 4 and mtf.identity in green.j_classes[chain[0]]
        and ideal.j_class == chain[2] and green.j_classes[chain[3]] == [mtf.zero],
        "units cyclic of order 4": sorted(orders) == [1, 2, 4, 4],
        "middle class is {s^i r s^j}": middle is not None and set(green.j_classes[middle]) == sandwiches,
        "middle class non-regular": middle is not None and not green.regular[middle],
        "middle Schutzenberger group trivial": middle is not None and green.schutzenberger_order(middle) == 1,
        "middle class has 16 elements": middle is not None and sizes[1] == 16,
        "I(MTF) maximal subgroup Z2": green.schutzenberger_order(ideal.j_class) == 2,
        "smallish, not small": cls.kind == "smallish",
    }
    ACCEPTANCE[1] = ("MTF reproduction", all(checks.values()),
                     f"J-class sizes {sizes}; middle J-class has {sizes[1]} elements, expected 16" if not
                     checks["middle class has 16 elements"] else f"{len(checks)} checks")
    # everything but the count is asserted here; the count has its own strict xfail below
    structural = {k: v for k, v in checks.items() if k != "middle class has 16 elements"}
    assert all(structural.values()), [k for k, v in structural.items() if not v]


@pytest.mark.xfail(strict=True, reason="s has period 2 on dom(r), so s^i r s^j takes 8 values, not 16")
def test_criterion_1_middle_class_count(mtf):
    green, chain, sizes, sandwiches = _mtf_structure(mtf)
    assert sizes[1] == 16


# --- 2 ---------------------------------------------------------------------------------------

def test_criterion_2_tilson_2j_sm_mtf(mtf):
    Sm = small_submonoid(mtf, classify_monoid(mtf))
    res = tilson_2j(Sm)
    evidence = []
    for om in res.orbits:
        E = induced_subsemigroup(Sm, om.E_generated)
        evidence.append(om.aperiodic and is_aperiodic(E))
    record(2, "Tilson 2J on Sm(MTF)", {
        "Sm(MTF) is small": classify_monoid(Sm).kind == "small",
        "tilson_2j = 1": res.value == 1,
        "orbit evidence emitted": len(res.orbits) > 0,
        "every <E> aperiodic": all(evidence),
    }, f"{len(res.orbits)} orbit monoids")


# --- 3 ---------------------------------------------------------------------------------------

def _pipeline_checks(name):
    S2, coord, gen, SEv, green = ev_pipeline(name)
    props = verify_ev_properties(SEv, gen, green)
    out = {f"{name}: {c.name}": c.ok for c in props.checks}
    out[f"{name}: smallish"] = classify_monoid(SEv, green).kind in ("small", "smallish")
    sm = ev_structure_matrix(SEv, gen, ev_cross_sections(SEv, gen, green), green)
    n, na = gen.n, len(sm.A0)
    blocks_ok = True
    for k in range(n + 1):
        for l in range(n + 1):
            block = [row[l * na:(l + 1) * na] for row in sm.C[k * n:(k + 1) * n]]
            if k == l:
                blocks_ok &= block == sm.C0
            else:
                blocks_ok &= all(v is None for row in block for v in row)
    out[f"{name}: C^Ev is n+1 copies of C0"] = blocks_ok
    R = coord.rees
    out[f"{name}: C is a column submatrix of C0"] = len(sm.source_columns) == len(R.A) and all(
        [sm.C0[i][col] for i in range(n)] == [R.C(i, a) for i in range(n)] for a, col in sm.source_columns.items())
    Sm = small_submonoid(SEv, classify_monoid(SEv, green))
    out[f"{name}: tilson_2j(Sm(S^Ev)) = 1"] = tilson_2j(Sm).value == 1
    return out, len(SEv)


def test_criterion_3_sev_pipeline():
    checks = {}
    sizes = []
    for name, nb in [("toy2", 2), ("toy3", 3)]:
        S = load(name)
        checks[f"{name}: G = Z2, |B| = {nb}"] = S.group.order == 2 and S.size == nb and is_gm(S).is_gm
        c, n = _pipeline_checks(name)
        checks.update(c)
        sizes.append(f"|{name}^Ev| = {n}")
    record(3, "S^Ev pipeline", checks, ", ".join(sizes))


# --- 4 ---------------------------------------------------------------------------------------

def test_criterion_4_tilson_oracle():
    checks = {}
    for name in BUNDLED:
        S = load(name)
        if not is_gm(S).is_gm or S.group.order * S.size > 12:
            continue
        res = tilson_congruence(S)
        maps = [tuple(RowMonomial(S.group, S.size, g).point_map()) for g in S.generators]
        brute = brute_force_minimal_injective_congruence(S.group.order * S.size, maps)
        checks[f"{name}: unrestricted"] = res.partition == brute
        checks[f"{name}: ideal-restricted"] = res.restricted == brute
        checks[f"{name}: pruned oracle"] = point_partition_oracle(S) == brute
    checks["at least three instances"] = len(checks) >= 9
    record(4, "Tilson congruence oracle", checks, f"{len(checks) // 3} instances")


# --- 5 ---------------------------------------------------------------------------------------

def test_criterion_5_flow_lifting():
    S = load("toy2")
    F = load_flow(bundled("toy2_flow"), S)
    base = verify_flow(S, F)
    S2, coord, gen, SEv, green = ev_pipeline("toy2")
    lifted = lift_flow_ev(F, gen, S2, SEv)
    up = verify_flow(SEv, lifted)
    q, a = sorted(F.automaton.delta)[0]
    cut = verify_flow(S, Flow(F.automaton.without(q, a), F.target, F.assignment, F.covering, F.base_size))
    # the fixture's classes are singletons, where a relabel is invisible; widen one and label it -1
    v = F.assignment[0]
    (b0,) = v.X
    b1 = 1 - b0
    bad_value = RhodesElement.make(S.group, [[b0, b1]], {b0: S.group.identity, b1: S.group.index("-1")})
    bad = verify_flow(S, F.with_value(0, bad_value))
    record(5, "flow lifting", {
        "F verifies": base.ok,
        "F aperiodic": base.aperiodic is True,
        "lifted F verifies on S^Ev": up.ok,
        "lifted automaton aperiodic": up.aperiodic is True,
        "deleted transition gives a witness": not cut.ok and bool(cut.failures),
        "corrupted cross-section gives a witness": not bad.ok and bool(bad.failures),
    }, f"lifted flow checked on {up.checked} (state, letter) pairs")


# --- 6 ---------------------------------------------------------------------------------------

def test_criterion_6_eval_engine():
    L, m0 = eval_setup("toy2")
    V = m0.vacuum
    ts = build_eval_ts(m0, load("toy2").size)
    S2, coord, gen, SEv, green = ev_pipeline("tiny")
    full = embed_check_full(S2, gen, SEv)
    formula = embed_check_formula(S2, gen)
    record(6, "eval engine at |L| = 52", {
        "|L| = 52": len(L) == 52,
        "M0 within caps": len(m0) > 0,
        "every member is a closure relation": all(closure_check(L, f)[0] for f in m0.elements),
        "V idempotent": np.array_equal(closure_compose(L, V, V), V),
        "forward flow is an action": action_check(m0) is None,
        "no contradiction for toy2": ts.contradiction is None,
        "S^Ev of tiny acts on 4 points": SEv.group.order * SEv.size == 4,
        "full mode passes": full.ok,
        "formula mode passes": formula.ok,
        "full and formula agree": full.maps == formula.maps,
    }, f"|M0| = {len(m0)}, |States| = {len(ts.states)}, |Eval| = {len(ts.actions)}")


# --- 7 ---------------------------------------------------------------------------------------

def test_criterion_7_embedding_formula():
    checks = {}
    for name in BUNDLED:
        S2, coord, gen, SEv, green = ev_pipeline(name)
        rep = embed_check_formula(S2, gen)
        checks[f"{name}: orbit formula"] = not rep.orbit_failures
        checks[f"{name}: h formula"] = not rep.h_failures
        checks[f"{name}: S' = S"] = rep.ok and rep.size_S_prime == len(S2)
    record(7, "embedding by formula", checks, f"{len(BUNDLED)} instances")


# --- 8 ---------------------------------------------------------------------------------------

def test_criterion_8_property_suites():
    checks = {}
    # composition: every triple over Z2 with |B| = 2
    G = Group.cyclic(2)
    codes = list(itertools.product(range(-1, 4), repeat=2))
    comp = {(a, b): compose_codes(a, b, 2, G.table) for a in codes for b in codes}
    checks["rm_compose associative (15625 triples)"] = all(
        comp[(comp[(a, b)], c)] == comp[(a, comp[(b, c)])] for a in codes for b in codes for c in codes)
    # SP lattice laws at |G x B| = 4
    L = sp_lattice(4)
    leq, M = L.leq, L.meet
    n = len(L)
    order_ok = leq.diagonal().all() and not (leq & leq.T & ~np.eye(n, dtype=bool)).any() and not (
        ((leq.astype(np.uint16) @ leq.astype(np.uint16)) > 0) & ~leq).any()
    glb_ok = lub_ok = True
    for a in range(n):
        for b in range(n):
            m = M[a, b]
            glb_ok &= bool(leq[m, a] and leq[m, b] and leq[leq[:, a] & leq[:, b], m].all())
            j = L.index[sp_join(L.elements[a], L.elements[b])]
            lub_ok &= bool(leq[a, j] and leq[b, j] and leq[j, leq[a, :] & leq[b, :]].all())
    checks["SP order is a partial order"] = bool(order_ok)
    checks["meets are greatest lower bounds"] = glb_ok
    checks["joins are least upper bounds"] = lub_ok
    # the two smallish characterizations
    corpus = {name: load(name) for name in ["mtf", "toy2_swap"]}
    for name in ["tiny", "toy1col", "toy2"]:
        corpus[f"{name}^Ev"] = ev_pipeline(name)[3]
    for name in list(corpus):
        M_ = corpus[name]
        if M_.identity is not None and M_.zero is not None:
            corpus[f"Sm({name})"] = small_submonoid(M_, classify_monoid(M_))
    seen = 0
    for name, M_ in corpus.items():
        if len(M_) > 200 or M_.identity is None or M_.zero is None:
            continue
        cls = classify_monoid(M_)
        checks[f"smallish tests agree on {name}"] = cls.nilpotent_test == cls.census_test
        seen += 1
    # type II under 20 random sweep orders
    rng = random.Random(2024)
    for name in ["toy2", "toy3", "toy2_swap", "mtf"]:
        S = load(name)
        base = type_ii(S, seed=None).members
        checks[f"type_ii order independent on {name}"] = all(
            type_ii(S, seed=rng.randrange(10 ** 9)).members == base for _ in range(20))
    record(8, "property suites", checks, f"{seen} monoids in the smallish census")
