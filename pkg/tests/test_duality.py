import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lpackets.chars import linear_characters
from lpackets.duality.lang import (lang_character, lang_values, serre_pairing_matrix, solve_mod_p,
                                   trace_character)
from lpackets.duality.linearized import (LinearizedPoly, RealizationError, all_subspaces, apply_matrix,
                                         map_matrix, moore_solve, realize_subgroup)
from lpackets.duality.pairings import (AlternatingPairing, FiniteAbelian, Pairing, PairingError,
                                       QuadraticForm, check_quadratic_refinement, find_lagrangian,
                                       random_alternating)
from lpackets.duality.twisted import (F_eval, TwistedError, TwistedPoly, isotropic_search,
                                      is_skewsymmetric, random_skew, skew_part, twisted_mul, twisted_star)
from lpackets.gf import make_field
from lpackets.group import VectorGroup, points

# -- linearized polynomials -----------------------------------------------------


def test_moore_examples():
    F = make_field(2, 3)
    assert moore_solve(np.eye(3, dtype=int), F).coeffs == (1,)
    frob = map_matrix(F, lambda x: F.frobenius(x))
    assert moore_solve(frob, F).coeffs == (0, 1)
    F4, F2 = make_field(2, 2), make_field(2, 1)
    tr = map_matrix(F4, lambda x: int(F4.embed_from(F4.rel_trace(x, F2), F2)))
    f = moore_solve(tr, F4)
    assert f.coeffs == (1, 1)
    assert [f(x) for x in range(4)] == [F4.add(x, F4.frobenius(x)) for x in range(4)]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, 2), (2, 3), (3, 2), (5, 2), (2, 4)]), st.data())
def test_moore_solve_reproduces_random_maps(pr, data):
    p, r = pr
    F = make_field(p, r)
    M = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=r * r, max_size=r * r))).reshape(r, r)
    f = moore_solve(M, F)
    xs = np.arange(F.q)
    assert np.array_equal(f(xs), apply_matrix(F, M, xs))


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_composition_matches_evaluation(data):
    F = make_field(3, 2)
    a = LinearizedPoly(F, tuple(data.draw(st.lists(st.integers(0, 8), max_size=3))))
    b = LinearizedPoly(F, tuple(data.draw(st.lists(st.integers(0, 8), max_size=3))))
    xs = np.arange(F.q)
    assert np.array_equal(np.asarray(a.compose(b)(xs)), np.asarray(a(b(xs))))
    assert np.array_equal(np.asarray(a.compose(b).reduce_mod_frobenius()(xs)), np.asarray(a(b(xs))))


def test_realize_examples():
    F = make_field(3, 1)
    line = np.array([[x, 0] for x in range(3)])
    R = realize_subgroup(line, F, 2)
    assert R.k == 1 and {tuple(v) for v in R.points().tolist()} == {tuple(v) for v in line.tolist()}
    diag = np.array([[x, x] for x in range(3)])
    R = realize_subgroup(diag, F, 2)
    assert {tuple(v) for v in R.points().tolist()} == {tuple(v) for v in diag.tolist()}
    F4 = make_field(2, 2)
    f2sq = np.array([[a, b] for a in (0, 1) for b in (0, 1)])
    R = realize_subgroup(f2sq, F4, 2)
    assert {tuple(v) for v in R.points().tolist()} == {tuple(v) for v in f2sq.tolist()}
    assert all(R.base_change_ok(2).values())


def test_realize_rejects_bad_input():
    F4 = make_field(2, 2)
    with pytest.raises(RealizationError):
        realize_subgroup(np.array([[0, 0], [1, 0]]), F4, 2)  # order 2 is not a power of 4
    with pytest.raises(RealizationError):
        realize_subgroup(np.array([[0, 0], [1, 0], [0, 1], [2, 3]]), F4, 2)


@pytest.mark.parametrize("p,r,n,size", [(2, 2, 2, 16), (3, 1, 2, 3), (2, 1, 3, 4)])
def test_all_realizations_hit_their_subspace(p, r, n, size):
    F = make_field(p, r)
    for L in all_subspaces(F, n, size):
        R = realize_subgroup(L, F, n)
        assert {tuple(v) for v in R.points().tolist()} == {tuple(v) for v in L.tolist()}


# -- twisted Laurent polynomials ------------------------------------------------


def test_tau_commutation():
    k = make_field(3, 2)
    for c in range(k.q):
        lhs = TwistedPoly.tau(k) * TwistedPoly.const(k, c)
        assert lhs == TwistedPoly.const(k, k.frobenius(c)) * TwistedPoly.tau(k)


def test_star_of_monomial():
    k = make_field(2, 3)
    for c in range(k.q):
        for j in (-2, 1, 3):
            assert twisted_star(TwistedPoly.tau(k, j, c)) == TwistedPoly.tau(k, -j, k.frobenius(c, -j))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([(2, 2), (3, 2), (2, 3), (5, 1)]), st.integers(0, 2**32 - 1))
def test_star_is_an_anti_involution_and_multiplication_associates(pr, seed):
    k = make_field(*pr)
    rng = np.random.default_rng(seed)
    f, g, h = (TwistedPoly.random(k, rng, -4, 4) for _ in range(3))
    assert (f * g).star() == g.star() * f.star()
    assert f.star().star() == f
    assert (f * g) * h == f * (g * h)
    assert twisted_mul(f, g + h) == f * g + f * h


def test_skewsymmetric_examples():
    k = make_field(3, 1)
    assert is_skewsymmetric(TwistedPoly(k))
    assert is_skewsymmetric(TwistedPoly.tau(k, 1) - TwistedPoly.tau(k, -1))
    assert not is_skewsymmetric(TwistedPoly.const(k, 1))
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = random_skew(make_field(3, 2), rng, 3)
        assert is_skewsymmetric(a) and a.star() == -a


def test_F_eval_examples():
    k = make_field(3, 1)
    z = TwistedPoly(k)
    x = TwistedPoly.const(k, 1)
    assert F_eval(z, z, z, x, x).is_zero()
    a = TwistedPoly.tau(k, 1) - TwistedPoly.tau(k, -1)
    for c in (1, 2):
        xc = TwistedPoly.const(k, c)
        assert F_eval(a, z, -a, xc, xc).is_zero()
    with pytest.raises(TwistedError):
        F_eval(TwistedPoly.const(k, 1), z, z, x, x)


def test_isotropic_examples():
    k = make_field(3, 2)
    z = TwistedPoly(k)
    res = isotropic_search(z, z, z, N=0, m_max=1)
    assert res.found and res.m == 1 and res.N == 0
    a = skew_part(1, 1, k)
    res = isotropic_search(a, z, -a, N=0, m_max=1)
    assert res.found and F_eval(a, z, -a, res.x, res.y).is_zero()


def test_isotropic_reports_bound_limits():
    k = make_field(3, 2)
    rng = np.random.default_rng(5)
    a, d, b = random_skew(k, rng), random_skew(k, rng), TwistedPoly.random(k, rng)
    res = isotropic_search(a, b, d, N=1, m_max=2, budget=5)
    assert not res.found and res.status == "not found within bounds"
    assert all(t["status"].startswith("skipped") for t in res.transcript)
    with pytest.raises(TwistedError):
        isotropic_search(a, b, d, N=-1)


# -- Lang isogeny and the Serre pairing -----------------------------------------


def test_lang_m1_is_the_character_itself():
    F = make_field(2, 2)
    G = points(VectorGroup(1, F))
    for chi in linear_characters(G):
        for x in range(F.q):
            assert lang_character(chi, [x], 1) == chi(G.coords.tolist().index([x]))


def test_lang_m2_is_chi_of_the_trace():
    F = make_field(3, 1)
    E = make_field(3, 2)
    G = points(VectorGroup(1, F))
    for chi in linear_characters(G):
        for x in range(E.q):
            tr = E.descend(E.add(x, E.frobenius(x, 1)), F)
            assert lang_character(chi, [x], 2) == chi(int(tr))
            assert lang_character(chi, [x], 2) == trace_character(chi, [x], 2)


@pytest.mark.parametrize("p,r,m", [(2, 1, 3), (2, 2, 2), (3, 1, 2), (2, 1, 8), (2, 2, 4)])
def test_lang_is_additive(p, r, m):
    F = make_field(p, r)
    E = make_field(p, r * m)
    xs = np.arange(E.q)
    vals = lang_values(F, m, xs)
    rng = np.random.default_rng(0)
    a, b = rng.integers(0, E.q, 200), rng.integers(0, E.q, 200)
    assert np.array_equal(vals[E.add(a, b)], F.add(vals[a], vals[b]))


def test_serre_pairing_examples():
    S = serre_pairing_matrix(make_field(2, 1), 1)
    assert S.residues.tolist() == [[0, 0], [0, 1]]
    assert S.is_perfect()
    S4 = serre_pairing_matrix(make_field(2, 2), 1)
    assert not S4.residues[0].any()
    assert S4.is_perfect()
    C = np.exp(2j * np.pi * S4.residues / 2)
    assert np.allclose(C @ C.conj().T, 4 * np.eye(4))


def test_solve_mod_p():
    rng = np.random.default_rng(1)
    A = np.array([[1, 2], [0, 1]])
    x = rng.integers(0, 3, (2, 4))
    assert np.array_equal(solve_mod_p(A, (A @ x) % 3, 3), x)


# -- pairings, Lagrangians, quadratic forms -------------------------------------


def test_standard_symplectic_lagrangian():
    for p in (2, 3, 5):
        W = FiniteAbelian.elementary(p, 2)
        P = AlternatingPairing(W, [[0, 1], [-1, 0]], 1)
        L = find_lagrangian(P)
        assert {tuple(v) for v in L.vectors().tolist()} == {(a, 0) for a in range(p)}


def test_random_lagrangian_on_rank_four():
    W = FiniteAbelian.elementary(3, 4)
    P = random_alternating(W, np.random.default_rng(2))
    L = find_lagrangian(P)
    assert L.order == 9
    T = P.table()
    assert not T[np.ix_(L.members, L.members)].any()


def test_degenerate_pairing_is_rejected():
    W = FiniteAbelian.elementary(3, 2)
    with pytest.raises(PairingError, match="degenerate pairing"):
        find_lagrangian(AlternatingPairing(W, [[0, 0], [0, 0]], 1))


def test_lagrangian_on_non_elementary_group():
    W = FiniteAbelian(2, (4, 4))
    P = AlternatingPairing(W, [[0, 1], [-1, 0]], 2)
    L = find_lagrangian(P)
    assert L.order ** 2 == W.size
    assert not P.table()[np.ix_(L.members, L.members)].any()


def test_pairing_validation():
    W = FiniteAbelian(2, (2, 4))
    with pytest.raises(PairingError):
        Pairing(W, [[0, 1], [1, 0]], 2)  # 2 * (1/4) is not 0
    with pytest.raises(PairingError):
        AlternatingPairing(FiniteAbelian.elementary(3, 2), [[1, 0], [0, 0]], 1)
    with pytest.raises(PairingError):
        FiniteAbelian(2, (6,))
    P = Pairing(FiniteAbelian.elementary(3, 2), [[1, 2], [0, 1]], 1)
    assert Pairing.from_table(P.W, P.table(), 1).B.tolist() == P.B.tolist()
    bad = P.table().copy()
    bad[1, 1] = (bad[1, 1] + 1) % 3
    with pytest.raises(PairingError):
        Pairing.from_table(P.W, bad, 1)


def test_quadratic_examples():
    W = FiniteAbelian(2, (2,))
    v = check_quadratic_refinement(QuadraticForm(W, [0, 0], 1))
    assert v.scaling_ok and v.polarization_ok and not v.nondegenerate
    q = QuadraticForm(W, [0, 1], 2)  # q(1) = 1/4
    v = check_quadratic_refinement(q)
    assert v.ok
    assert q.polar_table()[1, 1] == 2  # -1/2 = 1/2
    v = check_quadratic_refinement(QuadraticForm(W, [0, 1], 1))  # q(1) = 1/2
    assert not v.ok and not v.nondegenerate


def test_quadratic_against_given_pairing():
    W = FiniteAbelian.elementary(3, 2)
    Q = QuadraticForm.from_function(W, lambda x: x[0] * x[1], 1)
    P = Pairing(W, [[0, 1], [1, 0]], 1)
    assert check_quadratic_refinement(Q, P).ok
    wrong = Pairing(W, [[0, 2], [2, 0]], 1)
    v = check_quadratic_refinement(Q, wrong)
    assert not v.polarization_ok and v.counterexamples


def test_scaling_violation_is_caught():
    W = FiniteAbelian(3, (3,))
    v = check_quadratic_refinement(QuadraticForm(W, [0, 1, 1], 1))
    assert v.scaling_ok
    v = check_quadratic_refinement(QuadraticForm(W, [0, 1, 0], 1))
    assert not v.scaling_ok
