import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nscartan import cusp_comb as cc
from nscartan import gl2_groups as gg
from nscartan.fp_arith import make_context


def double_coset_count(H, p):
    """|H \\ GL2(F_p) / +-U(p)|, counted without the symbol machinery."""
    gl2 = [g for g in itertools.product(range(p), repeat=4) if (g[0] * g[3] - g[1] * g[2]) % p]
    U = [(s, s * t % p, 0, s) for s in (1, p - 1) for t in range(p)]
    seen, n = set(), 0
    for g in gl2:
        if g in seen:
            continue
        n += 1
        for h in H.elements:
            hg = gg.mat_mul(p, h, g)
            seen.update(gg.mat_mul(p, hg, u) for u in U)
    return n


@pytest.mark.parametrize("p", [5, 7, 11])
def test_counts_match_double_cosets(p):
    ctx = make_context(p)
    for curve, kind in cc.CURVES.items():
        if curve == "G" and p % 3 != 2:
            continue
        H = gg.build_subgroup(ctx, kind)
        assert cc.cusp_table(ctx, curve).cusp_count == double_coset_count(H, p), curve


# frozen from the double-coset oracle above
FROZEN = {
    5: {"x0": 2, "sp": 6, "sp+": 3, "ns": 4, "ns+": 2, "G": 6, "Hp": 6},
    7: {"x0": 2, "sp": 8, "sp+": 4, "ns": 6, "ns+": 3, "Hp": 12},
    11: {"x0": 2, "sp": 12, "sp+": 6, "ns": 10, "ns+": 5, "G": 15, "Hp": 30},
}


@pytest.mark.parametrize("p", sorted(FROZEN))
def test_frozen_counts(p):
    ctx = make_context(p)
    assert {c: cc.cusp_table(ctx, c).cusp_count for c in FROZEN[p]} == FROZEN[p]


@pytest.mark.parametrize("p", [5, 7, 11, 13, 17, 19, 23])
def test_nonsplit_cartan_has_p_minus_1_cusps(p):
    table = cc.cusp_table(make_context(p), "ns")
    assert table.cusp_count == p - 1
    assert all(table.at_infinity)
    assert len(table.galois_orbits()) == 1


@pytest.mark.parametrize("p", [5, 11, 17, 23])
def test_g_cusps(p):
    ctx = make_context(p)
    table = cc.cusp_table(ctx, "G")
    assert table.cusp_count == 3 * (p - 1) // 2
    assert sum(table.at_infinity) == (p - 1) // 2
    assert len(table.galois_orbits()) == 2
    assert cc.cube_orbit_check(ctx)


def test_g_table_needs_p_2_mod_3(ctx13):
    with pytest.raises(ValueError):
        cc.cusp_table(ctx13, "G")


def test_cube_orbit_check_rejects_p_1_mod_3(ctx13):
    with pytest.raises(ValueError):
        cc.cube_orbit_check(ctx13)


def test_sizes_partition_mp():
    ctx = make_context(13)
    for curve in ("x0", "sp", "sp+", "ns", "ns+", "Hp"):
        t = cc.cusp_table(ctx, curve)
        assert sum(t.sizes) == (13 * 13 - 1) // 2


def test_x0_cusps_rational(ctx11):
    t = cc.cusp_table(ctx11, "x0")
    assert sorted(len(o) for o in t.galois_orbits()) == [1, 1]
    assert t.is_at_infinity((1, 0)) and not t.is_at_infinity((0, 1))


def test_json_shape(ctx5):
    d = json.loads(cc.cusp_table(ctx5, "ns+").to_json())
    assert d["p"] == 5 and d["cusp_count"] == 2
    assert set(d["orbits"][0]) == {"rep", "size", "at_infinity", "galois_orbit_id"}


@pytest.mark.parametrize("p", [11, 17, 23])
def test_fiber_profile_of_cubes(p):
    prof = cc.o_cubes_fiber_profile(make_context(p))
    assert prof[0] == p - 1
    assert all(prof[a] == (p - 2) // 3 for a in range(1, p))
    assert sum(prof.values()) == (p * p - 1) // 3


def test_cuspidal_order():
    assert [cc.cuspidal_order(p) for p in (5, 7, 11, 13, 17, 23, 37)] == [1, 1, 5, 1, 4, 11, 3]
    with pytest.raises(ValueError):
        cc.cuspidal_order(3)


def test_split_maps(ctx11):
    imgs = cc.split_cusp_maps(ctx11, ((1, 0), 1))
    assert imgs.d1 == cc.INF
    assert cc.w_p(cc.w_p(cc.ZERO)) == cc.ZERO
    with pytest.raises(ValueError):
        cc.w_p("1/2")


@pytest.mark.parametrize("p", [11, 17, 23])
def test_nu_matches_closed_form(p):
    ctx = make_context(p)
    for kind in ("G", "Hintersect"):
        H = gg.build_subgroup(ctx, kind)
        t = cc.enumerate_cusps(H)
        for c in range(t.cusp_count):
            f = cc.nu_fiber(H, c)
            n = f.value.modulus
            assert f.value.coefficient == cc.nu_expected(p, f.index, t.at_infinity[c]) % n
            # over a cusp at infinity exactly one fiber cusp is at infinity
            assert sum(f.fiber_at_infinity) == int(t.at_infinity[c])


def test_nu_rejects_nns(ctx11):
    with pytest.raises(ValueError):
        cc.nu_fiber(gg.build_subgroup(ctx11, "Nns"), 0)


def test_nu_rejects_non_overgroup(ctx11):
    with pytest.raises(ValueError):
        cc.nu_fiber(gg.build_subgroup(ctx11, "Cns"), 0)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([5, 11, 13]), st.sampled_from(["sp", "ns", "ns+", "Hp"]), st.data())
def test_classification_is_h_invariant(p, curve, data):
    ctx = make_context(p)
    t = cc.cusp_table(ctx, curve)
    H = t.H
    v = data.draw(st.sampled_from(cc.mp_points(p)))
    d = data.draw(st.integers(1, p - 1))
    h = data.draw(st.sampled_from(sorted(H.generators)))
    moved = ((h[0] * v[0] + h[1] * v[1]) % p, (h[2] * v[0] + h[3] * v[1]) % p)
    assert t.classify(moved, d * gg.det(p, h)) == t.classify(v, d)
