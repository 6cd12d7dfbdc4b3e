from __future__ import annotations

import pytest

from conftest import ev_pipeline, load
from smgkit.complexity import (ComplexityError, check_type_ii, complexity_report, idempotent_generated,
                               orbit_monoids, point_partition_oracle, tilson_2j, tilson_congruence, type_ii)
from smgkit.core import Group, RowMonomial, enumerate_semigroup, green_data, is_aperiodic
from smgkit.core.congruence import brute_force_minimal_injective_congruence, is_injective_congruence
from smgkit.core.semigroup import induced_subsemigroup
from smgkit.rees import classify_monoid, rlm, small_submonoid

GM_INSTANCES = ["tiny", "toy2", "toy3", "toy2_swap", "mtf"]


def _group(n=3):
    G = Group.cyclic(n)
    return enumerate_semigroup([RowMonomial.from_edges(G, 1, {0: (1, 0)})], ["g"])


def _band():
    G = Group.trivial()
    return enumerate_semigroup([RowMonomial(G, 3, (k, k, k)) for k in range(3)] + [RowMonomial.identity(G, 3)])


def test_type_ii_of_group_is_identity():
    S = _group()
    cert = type_ii(S)
    assert cert.members == {S.identity}


def test_type_ii_of_band_is_everything():
    S = _band()
    assert type_ii(S).members == set(range(len(S)))


@pytest.mark.parametrize("name", GM_INSTANCES)
def test_type_ii_certificate(name):
    S = load(name)
    cert = type_ii(S)
    assert check_type_ii(S, cert)
    assert set(green_data(S).idempotents) <= cert.members


@pytest.mark.parametrize("name", ["toy2", "toy3", "toy2_swap"])
def test_type_ii_order_independent(name):
    S = load(name)
    base = type_ii(S, seed=None).members
    for seed in range(20):
        assert type_ii(S, seed=seed).members == base


@pytest.mark.parametrize("name", ["toy2", "toy3", "mtf"])
def test_type_ii_functorial_under_rlm(name):
    S = load(name)
    R = rlm(S)
    image = {R.quotient[x] for x in type_ii(S).members}
    assert image <= type_ii(R.semigroup).members


@pytest.mark.parametrize("name", GM_INSTANCES)
def test_tilson_matches_brute_force(name):
    S = load(name)
    res = tilson_congruence(S)
    maps = [tuple(RowMonomial(S.group, S.size, g).point_map()) for g in S.generators]
    n = S.group.order * S.size
    assert n <= 12
    assert res.partition == res.restricted
    assert res.partition == brute_force_minimal_injective_congruence(n, maps)
    assert res.partition == point_partition_oracle(S)
    assert is_injective_congruence(res.partition, maps)


def test_tilson_on_sev_with_four_points():
    SEv = ev_pipeline("tiny")[3]
    res = tilson_congruence(SEv)
    maps = [tuple(RowMonomial(SEv.group, SEv.size, g).point_map()) for g in SEv.generators]
    assert res.partition == brute_force_minimal_injective_congruence(4, maps)


def test_idempotent_generated_trivial_cases():
    B = _band()
    assert idempotent_generated(B) == set(range(len(B)))
    G = _group()
    assert idempotent_generated(G) == {G.identity}


def test_sm_mtf_is_complexity_one(mtf):
    Sm = small_submonoid(mtf, classify_monoid(mtf))
    assert classify_monoid(Sm).kind == "small"
    res = tilson_2j(Sm)
    assert res.value == 1
    assert all(om.aperiodic for om in res.orbits)
    for om in res.orbits:
        E = induced_subsemigroup(Sm, om.E_generated)
        assert is_aperiodic(E)


@pytest.mark.parametrize("name", ["tiny", "toy2", "toy3"])
def test_sm_of_sev_is_complexity_one(name):
    SEv = ev_pipeline(name)[3]
    Sm = small_submonoid(SEv, classify_monoid(SEv))
    assert classify_monoid(Sm).kind == "small"
    assert tilson_2j(Sm).value == 1


@pytest.mark.parametrize("name", ["toy2", "toy3"])
def test_orbits_of_sm_sev(name):
    S2, coord, gen, SEv, green = ev_pipeline(name)
    Sm = small_submonoid(SEv, classify_monoid(SEv))
    oms = orbit_monoids(Sm)
    assert len(oms) == gen.n
    ix = gen.index
    for om in oms:
        rows = {ix.pair(p)[0] for p in om.orbit}
        assert len(rows) == 1 and len(om.orbit) == gen.n + 1


def test_swap_toy_is_complexity_two():
    M = load("toy2_swap")
    res = tilson_2j(M)
    assert res.value == 2
    bad = [om for om in res.orbits if not om.aperiodic]
    assert bad and bad[0].witness is not None
    assert not is_aperiodic(induced_subsemigroup(M, bad[0].E_generated))


def test_trivial_group_refused():
    G = Group.trivial()
    M = enumerate_semigroup([RowMonomial(G, 2, (0, -1)), RowMonomial.identity(G, 2), RowMonomial.empty(G, 2)])
    with pytest.raises(ComplexityError):
        tilson_2j(M)


def test_trivial_unit_group_gives_singleton_orbits():
    # toy2 with an identity adjoined: units {1}, so every orbit is one point
    import json
    from smgkit.description import build_semigroup, bundled, description_from_dict
    d = json.loads(bundled("toy2").read_text())
    d["monoid"] = True
    M = build_semigroup(description_from_dict(d))
    assert classify_monoid(M).kind == "small"
    assert sorted(len(om.orbit) for om in orbit_monoids(M)) == [1, 1]


def test_mtf_report(mtf):
    r = complexity_report(mtf)
    assert r.interval() == (1, 2)
    assert r.value() is None
    assert any(b["kind"] == "upper" and b["value"] == 2 for b in r.bounds)
    tj = [e for e in r.evidence if "tilson_2j" in e]
    assert tj and all(o["aperiodic"] for o in tj[0]["tilson_2j"])


def test_aperiodic_report_is_zero():
    r = complexity_report(_band())
    assert r.value() == 0


def test_swap_report_is_two():
    assert complexity_report(load("toy2_swap")).value() == 2
