from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpackets.cyclo import CycloNum, LevelError, MuVal, hermitian_inner, psi

PE = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)]


def cyclo(p, e):
    n = (p - 1) * p ** (e - 1)
    return st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=4), min_size=n, max_size=n).map(
        lambda c: CycloNum(p, e, c))


@st.composite
def cyclo_triples(draw):
    p, e = draw(st.sampled_from(PE))
    return tuple(draw(cyclo(p, e)) for _ in range(3))


@settings(max_examples=150, deadline=None)
@given(cyclo_triples())
def test_ring_axioms(t):
    a, b, c = t
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == CycloNum.from_rational(a.p, 0, a.e)
    assert (a * 6) / 6 == a


@settings(max_examples=100, deadline=None)
@given(cyclo_triples())
def test_conjugation_is_a_ring_involution(t):
    a, b, _ = t
    assert a.conj().conj() == a
    assert (a * b).conj() == a.conj() * b.conj()
    assert (a + b).conj() == a.conj() + b.conj()


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(PE), st.integers(), st.integers())
def test_psi_is_a_homomorphism(pe, a, b):
    p, e = pe
    u, v = MuVal(p, e, a), MuVal(p, e, b)
    assert psi(u + v) == psi(u) * psi(v)
    assert psi(u) * psi(u).conj() == CycloNum.from_rational(p, 1)
    assert (psi(u) == CycloNum.from_rational(p, 1)) == (u.a == 0)


def test_psi_examples():
    assert psi(MuVal.zero(2)) == CycloNum.from_rational(2, 1)
    assert psi(MuVal(2, 1, 1)) == CycloNum.from_rational(2, -1)
    u, v = MuVal.from_fraction(3, Fraction(1, 9)), MuVal.from_fraction(3, Fraction(2, 9))
    assert psi(u) * psi(v) == psi(MuVal.from_fraction(3, Fraction(1, 3))) == CycloNum.zeta(3, 1)


def test_roots_of_unity_sum_to_zero():
    for p, e in PE:
        n = p**e
        total = CycloNum.from_rational(p, 0, e)
        for k in range(n):
            total = total + CycloNum.zeta(p, e, k)
        assert total == CycloNum.from_rational(p, 0)
        assert CycloNum.zeta(p, e, n) == CycloNum.from_rational(p, 1)


def test_level_coercion_commutes_with_arithmetic():
    a = CycloNum.zeta(2, 1, 1)
    b = CycloNum.zeta(2, 2, 1)
    assert (a.at_level(3) * b.at_level(3)) == (a * b).at_level(3)
    assert a.at_level(2) == a
    assert (a + b).at_level(3) == a.at_level(3) + b.at_level(3)


def test_rational_detection():
    z = CycloNum.zeta(3, 1)
    s = z + z.conj()
    assert s.is_rational() and s.rational() == -1
    assert not z.is_rational()
    assert CycloNum.from_rational(3, Fraction(5, 2)).rational() == Fraction(5, 2)
    assert not CycloNum.from_rational(3, Fraction(5, 2)).is_integral()


def test_muval_levels():
    v = MuVal(3, 2, 3)
    assert v.reduced() == MuVal(3, 1, 1)
    assert v.at_level(1).a == 1
    with pytest.raises(LevelError):
        MuVal(3, 2, 1).at_level(1)
    with pytest.raises(LevelError):
        MuVal.from_fraction(3, Fraction(1, 2))
    assert (MuVal(2, 1, 1) + MuVal(2, 2, 1)).as_fraction() == Fraction(3, 4)


def test_hermitian_inner_trivial_and_regular():
    one = CycloNum.from_rational(2, 1)
    zero = CycloNum.from_rational(2, 0)
    sizes = [1, 1, 2, 2, 2]
    triv = [one] * 5
    reg = [CycloNum.from_rational(2, 8)] + [zero] * 4
    assert hermitian_inner(triv, triv, sizes, 8) == one
    assert hermitian_inner(triv, reg, sizes, 8) == one
    with pytest.raises(ValueError):
        hermitian_inner(triv, triv[:3], sizes, 8)


def test_to_json_is_exact():
    doc = CycloNum.zeta(3, 1).to_json()
    assert "coeffs" in doc or "coefficients" in doc
