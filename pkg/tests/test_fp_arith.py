import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nscartan.fp_arith import (cube_class, frobenius, is_cube, is_prime, make_context,
                               multiplicative_order, smallest_primitive_root)

PRIMES = [3, 5, 7, 11, 13, 17, 23, 29]


def test_is_prime_small():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@pytest.mark.parametrize("p,eps", [(3, 2), (5, 2), (7, 3), (11, 2), (13, 2), (23, 5)])
def test_smallest_primitive_root(p, eps):
    assert smallest_primitive_root(p) == eps
    assert make_context(p).epsilon == eps


def test_non_prime_rejected():
    with pytest.raises(ValueError):
        make_context(9)


def test_non_generator_epsilon_rejected():
    # 4 is a square mod 11, so not a primitive root
    with pytest.raises(ValueError):
        make_context(11, 4)


def test_fp2_generator_order(ctx11):
    g = ctx11.fp2_generator()
    assert ctx11.order2(g) == 11 * 11 - 1
    assert tuple(g) == (1, 5)


@pytest.mark.parametrize("p", [5, 11, 17])
def test_cube_count(p):
    ctx = make_context(p)
    cubes = [z for z in ctx.nonzero() if is_cube(ctx, z)]
    assert len(cubes) == (p * p - 1) // 3


def test_is_cube_rejects_zero(ctx11):
    with pytest.raises(ValueError):
        is_cube(ctx11, (0, 0))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(PRIMES), st.data())
def test_field_axioms(p, data):
    ctx = make_context(p)
    elem = st.tuples(st.integers(0, p - 1), st.integers(0, p - 1))
    x, y, z = (data.draw(elem) for _ in range(3))
    assert ctx.mul(ctx.mul(x, y), z) == ctx.mul(x, ctx.mul(y, z))
    assert ctx.mul(x, y) == ctx.mul(y, x)
    assert ctx.norm(ctx.mul(x, y)) == ctx.norm(x) * ctx.norm(y) % p
    if x != (0, 0):
        assert ctx.mul(x, ctx.inv2(x)) == (1, 0)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([5, 11, 17, 23]), st.data())
def test_cube_class_is_a_homomorphism(p, data):
    ctx = make_context(p)
    nz = [z for z in ctx.nonzero()]
    x, y = data.draw(st.sampled_from(nz)), data.draw(st.sampled_from(nz))
    assert cube_class(ctx, ctx.mul(x, y)) == (cube_class(ctx, x) + cube_class(ctx, y)) % 3
    assert is_cube(ctx, ctx.mul(x, ctx.mul(x, x)))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(PRIMES), st.data())
def test_frobenius_is_pth_power(p, data):
    ctx = make_context(p)
    z = data.draw(st.tuples(st.integers(0, p - 1), st.integers(0, p - 1)))
    assert frobenius(ctx, z) == ctx.pow(z, p)


@pytest.mark.parametrize("a,p,n", [(2, 11, 10), (3, 11, 5), (10, 11, 2)])
def test_multiplicative_order(a, p, n):
    assert multiplicative_order(a, p) == n
