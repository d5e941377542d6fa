import cmath
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nscartan.cyclotomic import CycloElem
from nscartan.qexp import LogProduct, QExp, exp_series


def cyclo(p):
    return st.lists(st.integers(-5, 5), min_size=p - 1, max_size=p - 1).map(lambda c: CycloElem(p, c))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([3, 5, 7, 11]), st.data())
def test_ring_ops_commute_with_embedding(p, data):
    x, y = data.draw(cyclo(p)), data.draw(cyclo(p))
    assert abs((x * y).to_complex() - x.to_complex() * y.to_complex()) < 1e-9 * (1 + abs(x.to_complex() * y.to_complex()))
    assert abs((x + y).to_complex() - x.to_complex() - y.to_complex()) < 1e-9
    assert x * y == y * x
    assert x - x == 0


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([5, 7, 11]), st.data())
def test_galois_is_a_ring_map(p, data):
    x, y = data.draw(cyclo(p)), data.draw(cyclo(p))
    t = data.draw(st.integers(1, p - 1))
    assert (x * y).galois(t) == x.galois(t) * y.galois(t)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_norm_of_one_minus_zeta(p):
    assert (1 - CycloElem.zeta(p)).norm() == p


def test_cyclotomic_relation():
    p = 7
    total = sum((CycloElem.zeta(p, k) for k in range(p)), CycloElem.rational(p, 0))
    assert total == 0
    assert CycloElem.zeta(p, p) == 1


def test_to_rational_rejects_irrational():
    with pytest.raises(ValueError):
        CycloElem.zeta(5).to_rational()


def test_mixed_fields_rejected():
    with pytest.raises(TypeError):
        CycloElem.zeta(5) + CycloElem.zeta(7)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.lists(st.tuples(st.integers(0, 6), st.integers(1, 4)),
                                              min_size=1, max_size=6))
def test_exact_and_complex_products_agree(p, factors):
    K = 12
    ex, cx = QExp.one(p, "exact", K), QExp.one(p, "complex", K)
    for j, e in factors:
        ex.mul_binomial(j, e)
        cx.mul_binomial(j, e)
    assert np.allclose(ex.complex_coeffs(), cx.complex_coeffs(), atol=1e-9)


def test_binomial_power_matches_repeated_product():
    p, K = 5, 20
    a = QExp.one(p, "exact", K).mul_binomial(2, 3, power=4)
    b = QExp.one(p, "exact", K)
    for _ in range(4):
        b.mul_binomial(2, 3)
    assert (a.coeffs == b.coeffs).all()


def test_general_multiplication_matches_binomials():
    p, K = 5, 15
    a = QExp.one(p, "exact", K).mul_binomial(1, 2)
    b = QExp.one(p, "exact", K).mul_binomial(3, 5)
    c = QExp.one(p, "exact", K).mul_binomial(1, 2).mul_binomial(3, 5)
    assert ((a * b).coeffs == c.coeffs).all()


def test_shift_and_phase_stay_rational():
    s = QExp.one(5, "exact", 4).mul_monomial(Fraction(1, 3), Fraction(7, 5))
    assert s.shift == Fraction(1, 3) and s.phase == Fraction(2, 5)
    assert s.leading_exponent() == Fraction(1, 3)


def test_evaluate():
    # (1 - x) with x = q^(1/p)
    s = QExp.one(3, "complex", 5).mul_binomial(0, 1)
    tau = 0.1 + 1.0j
    assert abs(s.evaluate(tau) - (1 - cmath.exp(2j * cmath.pi * tau / 3))) < 1e-14
    with pytest.raises(ValueError):
        s.evaluate(1 - 1j)


def test_coefficient_beyond_truncation():
    with pytest.raises(IndexError):
        QExp.one(5, "exact", 3).coefficient(4)


def test_exp_series_inverts_log():
    K = 15
    c = 0.7 * cmath.exp(0.3j)
    log = np.zeros(K + 1, dtype=complex)
    r = np.arange(1, K + 1)
    log[1:] = -(c**r) / r           # log(1 - c x)
    E = exp_series(log)
    assert abs(E[0] - 1) < 1e-15 and abs(E[1] + c) < 1e-15
    assert np.abs(E[2:]).max() < 1e-14


def test_log_product_matches_direct_product():
    p, K = 7, 30
    lp = LogProduct(p, K)
    direct = QExp.one(p, "complex", K)
    for j, e in [(1, 1), (3, 2), (5, 4), (0, 3), (2, 0)]:
        lp.add_binomial(j, e, 2)
        direct.mul_binomial(j, e, 2)
    s = lp.to_qexp()
    assert np.allclose(s.coeffs, direct.coeffs, atol=1e-10)
    assert (s.coefficient_budget() >= 0).all()
