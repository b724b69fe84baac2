import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpackets.gf import (FieldElem, FieldError, conway_polynomial, elements, embed, frobenius,
                         is_primitive_poly, make_field, multiplicative_order, rel_trace)

FIELDS = [(2, 1), (3, 1), (2, 2), (2, 3), (3, 2), (5, 1), (2, 4), (5, 2), (7, 2), (3, 3)]


def field_and_elems(n):
    return st.sampled_from(FIELDS).flatmap(
        lambda pr: st.tuples(st.just(make_field(*pr)),
                             *[st.integers(0, pr[0] ** pr[1] - 1) for _ in range(n)]))


@settings(max_examples=200, deadline=None)
@given(field_and_elems(3))
def test_ring_axioms(data):
    F, a, b, c = data
    assert F.add(a, F.add(b, c)) == F.add(F.add(a, b), c)
    assert F.mul(a, F.mul(b, c)) == F.mul(F.mul(a, b), c)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.add(a, F.neg(a)) == 0
    assert F.sub(F.add(a, b), b) == a
    if a:
        assert F.mul(a, F.inv(a)) == 1
        assert F.mul(F.div(b, a), a) == b


@settings(max_examples=100, deadline=None)
@given(field_and_elems(2))
def test_frobenius_is_additive_and_multiplicative(data):
    F, a, b = data
    assert F.frobenius(F.add(a, b)) == F.add(F.frobenius(a), F.frobenius(b))
    assert F.frobenius(F.mul(a, b)) == F.mul(F.frobenius(a), F.frobenius(b))
    assert F.frobenius(F.frobenius(a, 1), -1) == a
    assert F.pow(a, F.p) == F.frobenius(a)


@pytest.mark.parametrize("p,r", FIELDS)
def test_every_element_is_a_root_of_x_q_minus_x(p, r):
    F = make_field(p, r)
    x = F.elements()
    assert np.array_equal(F.frobenius(x, r), x)
    assert len(x) == p**r


def test_prime_field_polynomial_convention():
    F = make_field(2, 1)
    assert F.q == 2
    assert [e.value for e in elements(F)] == [0, 1]


def test_f4_enumeration_and_relation():
    F = make_field(2, 2)
    assert len(elements(F)) == 4
    w = FieldElem(F, F.primitive_element())
    assert w * w == w + 1
    assert rel_trace(w, make_field(2, 1)) == 1


def test_f9_multiplicative_group_is_cyclic_of_order_8():
    F = make_field(3, 2)
    orders = [multiplicative_order(F, a) for a in range(1, 9)]
    assert max(orders) == 8
    assert sorted(set(orders)) == [1, 2, 4, 8]


def test_conway_polynomials_are_primitive():
    # coefficients from the constant term up
    assert conway_polynomial(2, 2) == (1, 1, 1)
    assert conway_polynomial(2, 3) == (1, 1, 0, 1)
    assert conway_polynomial(3, 2) == (2, 2, 1)
    for p, r in [(2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (7, 2)]:
        f = conway_polynomial(p, r)
        assert len(f) == r + 1 and f[-1] == 1
        assert is_primitive_poly(f, p)


def test_embed_unit_and_transitivity():
    F2, F4, F16 = make_field(2, 1), make_field(2, 2), make_field(2, 4)
    one = FieldElem(F2, 1)
    assert embed(one, F4) == FieldElem(F4, 1)
    for x in elements(F2):
        assert embed(embed(x, F4), F16) == embed(x, F16)
    for x in elements(F4):
        assert embed(embed(x, F4), F16) == embed(x, F16)


def test_embedded_subfield_is_fixed_by_frobenius_squared():
    F4, F16 = make_field(2, 2), make_field(2, 4)
    image = {embed(x, F16).value for x in elements(F4)}
    fixed = {x.value for x in elements(F16) if frobenius(x, 2) == x}
    assert image == fixed


@pytest.mark.parametrize("p,a,r", [(2, 1, 4), (2, 2, 4), (3, 1, 2), (2, 1, 3), (5, 1, 2)])
def test_embed_is_an_injective_ring_map(p, a, r):
    S, F = make_field(p, a), make_field(p, r)
    xs = elements(S)
    img = [embed(x, F) for x in xs]
    assert len({y.value for y in img}) == len(xs)
    for x in xs:
        for y in xs:
            assert embed(x * y, F) == embed(x, F) * embed(y, F)
            assert embed(x + y, F) == embed(x, F) + embed(y, F)
        assert embed(frobenius(x), F) == frobenius(embed(x, F))


@pytest.mark.parametrize("p,r,m", [(2, 1, 2), (2, 1, 4), (2, 2, 2), (3, 1, 2), (3, 1, 3), (2, 2, 3), (5, 1, 2), (2, 3, 2)])
def test_relative_trace_is_additive_surjective_and_frobenius_invariant(p, r, m):
    Fq, E = make_field(p, r), make_field(p, r * m)
    x = E.elements()
    tr = np.asarray(E.rel_trace(x, Fq))
    assert set(tr.tolist()) == set(range(Fq.q))
    y = x[::-1]
    assert np.array_equal(np.asarray(E.rel_trace(E.add(x, y), Fq)), Fq.add(tr, np.asarray(E.rel_trace(y, Fq))))
    assert np.array_equal(np.asarray(E.rel_trace(E.frobenius(x, r), Fq)), tr)


def test_trace_of_base_element_at_degree_one():
    F = make_field(3, 2)
    for x in elements(F):
        assert rel_trace(x, F) == x


def test_negative_frobenius_wraps():
    F = make_field(2, 3)
    x = F.elements()
    assert np.array_equal(F.frobenius(x, -1), F.frobenius(x, 2))


def test_prime_field_is_fixed():
    F = make_field(5, 1)
    for x in elements(F):
        assert frobenius(x, 1) == x


def test_same_arguments_give_the_same_object():
    assert make_field(3, 2) is make_field(3, 2)


def test_field_errors():
    with pytest.raises(FieldError):
        make_field(4, 1)
    with pytest.raises(FieldError):
        make_field(2, 0)
    with pytest.raises(FieldError):
        make_field(2, 40)
    with pytest.raises(FieldError):
        FieldElem(make_field(2, 2), 7)
    with pytest.raises(FieldError):
        FieldElem(make_field(2, 2), 1) + FieldElem(make_field(2, 1), 1)
