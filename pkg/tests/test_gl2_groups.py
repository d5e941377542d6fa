import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nscartan import gl2_groups as gg
from nscartan.fp_arith import make_context


def all_gl2(p):
    return [g for g in itertools.product(range(p), repeat=4) if (g[0] * g[3] - g[1] * g[2]) % p]


def brute_force_sets(ctx):
    """Each subgroup as a plain set, straight from its matrix description."""
    p, e = ctx.p, ctx.epsilon
    gl2 = all_gl2(p)
    cns = {g for g in gl2 if g[3] == g[0] and g[1] == e * g[2] % p}
    coset = {g for g in gl2 if g[3] == -g[0] % p and g[1] == -e * g[2] % p}
    diag = {g for g in gl2 if g[1] == g[2] == 0}
    anti = {g for g in gl2 if g[0] == g[3] == 0}
    sets = {
        "Cns": cns,
        "Nns": cns | coset,
        "Csp": diag,
        "Nsp": diag | anti,
        "Borel": {g for g in gl2 if g[2] == 0},
        "Unipotent": {g for g in gl2 if g[2] == 0 and g[0] == g[3] == 1},
    }
    sets["Hintersect"] = sets["Nns"] & sets["Nsp"]
    return sets


@pytest.mark.parametrize("p", [5, 7, 11])
def test_subgroups_match_brute_force(p):
    ctx = make_context(p)
    for kind, ref in brute_force_sets(ctx).items():
        H = gg.build_subgroup(ctx, kind)
        assert H.elements == frozenset(ref), kind
        assert gg.closure_elements(ctx, H.generators) == H.elements, kind


@pytest.mark.parametrize("p", [5, 11, 17, 23])
def test_g_is_cubes_and_twisted_cubes(p):
    ctx = make_context(p)
    G = gg.build_subgroup(ctx, "G")
    cubes = gg.cns_cubes(ctx)
    J = (1, 0, 0, p - 1)
    ref = set(cubes.elements) | {gg.mat_mul(p, c, J) for c in cubes.elements}
    assert G.elements == frozenset(ref)
    assert G.order == 2 * (p * p - 1) // 3


def test_g_rejected_at_3():
    with pytest.raises(ValueError):
        gg.build_subgroup(make_context(3), "G")


def test_custom_kind_rejected(ctx11):
    with pytest.raises(ValueError):
        gg.build_subgroup(ctx11, "Custom")


def test_index_raises_on_non_subgroup(ctx11):
    with pytest.raises(ValueError):
        gg.index(gg.build_subgroup(ctx11, "Borel"), gg.build_subgroup(ctx11, "Nns"))


@pytest.mark.parametrize("p", [5, 11, 17, 23, 29])
def test_structure_for_p_2_mod_3(p):
    ctx = make_context(p)
    nns = gg.build_subgroup(ctx, "Nns")
    assert gg.check_lemma_lem1(ctx)
    assert gg.index(gg.build_subgroup(ctx, "G"), nns) == 3
    assert gg.quotient_is_dihedral3(ctx)
    assert not gg.quotient_is_dihedral3(ctx, gg.build_subgroup(ctx, "Cns"))
    assert len(gg.det_image(gg.build_subgroup(ctx, "G"))) == p - 1


def test_lemma_needs_p_2_mod_3(ctx13):
    with pytest.raises(ValueError):
        gg.check_lemma_lem1(ctx13)


@pytest.mark.parametrize("p", [7, 13, 19])
def test_cubes_lose_det_surjectivity_for_p_1_mod_3(p):
    ctx = make_context(p)
    assert len(gg.det_image(gg.cns_cubes(ctx))) == (p - 1) // 3


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_pgl_profile(p):
    ctx = make_context(p)
    prof = gg.pgl_order_profile(gg.build_subgroup(ctx, "Nns"))
    assert prof.image_size == 2 * (p + 1)
    assert all((p + 1) % n == 0 for n in prof.orders)
    coset_prof = gg.pgl_order_profile(gg.build_subgroup(ctx, "Nns"), gg.coset_elements(ctx))
    assert set(coset_prof.orders) == {2}


@pytest.mark.parametrize("p", [5, 11, 13])
def test_squares_of_coset_are_scalar(p):
    ctx = make_context(p)
    assert gg.squares_are_scalar(ctx)
    assert not gg.squares_are_scalar(ctx, "cartan")


def test_det_section(ctx11):
    H = gg.build_subgroup(ctx11, "Hintersect")
    sec = gg.det_section(H)
    assert sorted(sec) == list(range(1, 11))
    assert all(gg.det(11, g) == d and H.contains(g) for d, g in sec.items())


@pytest.mark.parametrize("p", [5, 11])
def test_conjugated_unipotent_generates(p):
    ctx = make_context(p)
    rng = random.Random(1)
    conj = [gg.random_invertible(p, rng) for _ in range(5)]
    assert all(gg.conjugated_unipotent_generates(ctx, conj))
    n = gg.generated_order(ctx, gg.build_subgroup(ctx, "Hintersect").generators)
    assert gg.gl2_order(p) % n == 0


def test_closure_guard():
    ctx = make_context(101)
    with pytest.raises(MemoryError):
        gg.closure_elements(ctx, [(1, 1, 0, 1), (0, 1, 1, 0), (2, 0, 0, 1)])


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([5, 7, 11, 13]), st.sampled_from(["Cns", "Nns", "Nsp", "Hintersect", "Borel"]),
       st.integers(0, 10**6))
def test_group_axioms(p, kind, seed):
    ctx = make_context(p)
    H = gg.build_subgroup(ctx, kind)
    rng = random.Random(seed)
    g, h = H.random_element(rng), H.random_element(rng)
    assert H.contains(gg.mat_mul(p, g, h))
    assert H.contains(gg.mat_inv(p, g))
    assert gg.mat_mul(p, g, gg.mat_inv(p, g)) == gg.IDENTITY
    assert H.order % gg.element_order(p, g) == 0


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([5, 11, 17]), st.integers(0, 10**6))
def test_cubes_normal_in_nns(p, seed):
    ctx = make_context(p)
    C, N = gg.cns_cubes(ctx), gg.build_subgroup(ctx, "Nns")
    rng = random.Random(seed)
    n, c = N.random_element(rng), C.random_element(rng)
    assert C.contains(gg.conjugate(p, n, c))


@pytest.mark.parametrize("p", [5, 11])
def test_g_is_not_normal(p):
    # G(p)/cubes is a subgroup of order 2 in D3
    ctx = make_context(p)
    G, N = gg.build_subgroup(ctx, "G"), gg.build_subgroup(ctx, "Nns")
    assert any(not G.contains(gg.conjugate(p, n, g)) for n in N.generators for g in G.generators)
