from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lattbuild.errors import DimensionMismatch, DomainError, NotPrimePower, OrderTooLarge
from lattbuild.gfq import (
    GramForm,
    QuotientSpace,
    Subspace,
    complete_flag_count,
    contains_vector,
    enumerate_complete_flags,
    enumerate_isotropic_flags,
    enumerate_subspaces,
    full_space,
    gaussian_binomial,
    gf_init,
    invariant_subspaces,
    is_totally_isotropic,
    isotropic_flag_count,
    kernel,
    mat_inv,
    mat_mul,
    orthogonal_complement,
    rank,
    rref,
    span,
    standard_form,
    subspace_intersection,
    subspace_sum,
    symplectic_basis,
    zero_subspace,
)

from oracles import (
    all_subspaces,
    all_vectors,
    closure,
    dim_of,
    invariant_subspaces_bruteforce,
    pair,
    prime_field_poly_mul,
)

ORDERS = [2, 3, 4, 5, 7, 8, 9]


def as_set(F, S: Subspace):
    return closure(F, S.basis, S.ambient_dim)


# ----------------------------------------------------------------- fields


@pytest.mark.parametrize("q", ORDERS)
def test_field_axioms_exhaustive(q):
    F = gf_init(q)
    E = range(q)
    for a in E:
        assert F.add[a][0] == a and F.mul[a][1] == a
        assert F.add[a][F.neg[a]] == 0
        assert F.sub[a][a] == 0
        if a:
            assert F.mul[a][F.inv[a]] == 1
        for b in E:
            assert F.add[a][b] == F.add[b][a]
            assert F.mul[a][b] == F.mul[b][a]
            for c in E:
                assert F.mul[a][F.add[b][c]] == F.add[F.mul[a][b]][F.mul[a][c]]
                assert F.mul[F.mul[a][b]][c] == F.mul[a][F.mul[b][c]]


@pytest.mark.parametrize("q", [4, 8, 9])
def test_extension_tables_match_polynomial_oracle(q):
    F = gf_init(q)
    p, e = F.p, F.e
    for a, b in itertools.product(range(q), repeat=2):
        da = [(a // p**i) % p for i in range(e)]
        db = [(b // p**i) % p for i in range(e)]
        prod = prime_field_poly_mul(da, db, p, F.modulus, e)
        assert F.mul[a][b] == sum(x * p**i for i, x in enumerate(prod))


def test_f2_and_f4_examples():
    F2 = gf_init(2)
    assert F2.add[1][1] == 0
    F4 = gf_init(4)
    x = 2  # the class of x under the digit encoding
    assert F4.mul[x][x] == F4.add[x][1]


def test_field_errors():
    with pytest.raises(NotPrimePower):
        gf_init(6)
    with pytest.raises(NotPrimePower):
        gf_init(1)
    with pytest.raises(OrderTooLarge):
        gf_init(11)


# ------------------------------------------------------------------- rref


def test_rref_examples():
    F = gf_init(2)
    I3 = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
    assert rref(F, I3) == (I3, 3)
    assert rref(F, ((0, 0), (0, 0))) == ((), 0)
    assert rref(F, ((1, 1), (1, 1))) == (((1, 1),), 1)


matrices = st.integers(1, 4).flatmap(
    lambda m: st.lists(st.lists(st.integers(0, 2), min_size=m, max_size=m), min_size=0, max_size=5)
)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rref_idempotent_and_span_preserving(M):
    F = gf_init(3)
    if not M:
        return
    m = len(M[0])
    R, r = rref(F, M)
    assert rref(F, R) == (R, r)
    assert closure(F, R, m) == closure(F, [tuple(row) for row in M], m)
    assert 3**r == len(closure(F, [tuple(row) for row in M], m))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(0, 4), min_size=4, max_size=4), min_size=1, max_size=4))
def test_kernel_is_annihilated(A):
    F = gf_init(5)
    K = kernel(F, A, 4)
    assert len(K) == 4 - rank(F, A)
    for v in K:
        for row in A:
            assert sum(a * b for a, b in zip(row, v)) % 5 == 0


def test_mat_inv_roundtrip():
    F = gf_init(9)
    M = ((1, 2, 3), (0, 4, 5), (7, 0, 8))
    if rank(F, M) == 3:
        assert mat_mul(F, M, mat_inv(F, M)) == ((1, 0, 0), (0, 1, 0), (0, 0, 1))


# -------------------------------------------------------------- subspaces


@pytest.mark.parametrize("q,m", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (4, 2)])
def test_enumerate_subspaces_matches_bruteforce(q, m):
    F = gf_init(q)
    brute = all_subspaces(F, m)
    for d in range(m + 1):
        got = [as_set(F, S) for S in enumerate_subspaces(m, d, q)]
        assert len(got) == len(set(got)) == gaussian_binomial(m, d, q)
        assert set(got) == {S for S in brute if dim_of(q, S) == d}


def test_subspace_examples():
    assert gaussian_binomial(3, 1, 2) == 7
    assert gaussian_binomial(5, 0, 3) == 1
    assert gaussian_binomial(4, 2, 2) == 35
    lines = list(enumerate_subspaces(2, 1, 2))
    assert {S.basis for S in lines} == {((1, 0),), ((0, 1),), ((1, 1),)}
    assert list(enumerate_subspaces(3, 3, 2)) == [full_space(3)]
    assert sum(1 for _ in enumerate_subspaces(3, 1, 3)) == 13
    with pytest.raises(DomainError):
        gaussian_binomial(2, 3, 2)


def test_enumeration_order_is_stable():
    a = [S.basis for S in enumerate_subspaces(4, 2, 3)]
    b = [S.basis for S in enumerate_subspaces(4, 2, 3)]
    assert a == b


@pytest.mark.parametrize("q,m", [(2, 3), (3, 2), (2, 4)])
def test_canonical_form_is_set_equality(q, m):
    F = gf_init(q)
    seen = {}
    for gens in itertools.product(all_vectors(q, m), repeat=2):
        S = span(F, gens, m)
        key = as_set(F, S)
        if key in seen:
            assert seen[key] == S
        seen[key] = S


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.tuples(*[st.integers(0, 2)] * 4), max_size=3),
    st.lists(st.tuples(*[st.integers(0, 2)] * 4), max_size=3),
)
def test_sum_and_intersection(us, ws):
    F = gf_init(3)
    U, W = span(F, us, 4), span(F, ws, 4)
    S, I = subspace_sum(F, U, W), subspace_intersection(F, U, W)
    assert S.dim + I.dim == U.dim + W.dim
    assert as_set(F, I) == as_set(F, U) & as_set(F, W)
    assert as_set(F, S) == closure(F, list(us) + list(ws), 4)


def test_quotient_space_roundtrip():
    F = gf_init(3)
    low = span(F, [(1, 0, 0, 0)], 4)
    high = span(F, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 1)], 4)
    Q = QuotientSpace(F, low, high)
    assert Q.dim == 2
    for X in enumerate_subspaces(2, 1, F):
        Y = Q.lift_subspace(X)
        assert Y.dim == 2 and Q.project_subspace(Y) == X
    assert all(contains_vector(F, high, Q.lift(x)) for x in all_vectors(3, 2))


# ------------------------------------------------------------------ flags


def _brute_flags(F, m):
    subs = sorted(all_subspaces(F, m), key=len)
    by_dim = {}
    for S in subs:
        by_dim.setdefault(dim_of(F.q, S), []).append(S)
    chains = [[S] for S in by_dim.get(1, [])]
    for d in range(2, m):
        chains = [c + [S] for c in chains for S in by_dim[d] if c[-1] < S]
    return chains


@pytest.mark.parametrize("q,m", [(2, 2), (2, 3), (2, 4), (3, 3)])
def test_complete_flags_match_bruteforce(q, m):
    F = gf_init(q)
    brute = _brute_flags(F, m)
    got = list(enumerate_complete_flags(m, q))
    assert len(got) == len(brute) == complete_flag_count(m, q)
    assert {tuple(as_set(F, S) for S in f) for f in got} == {tuple(c) for c in brute}


def test_flag_counts():
    assert complete_flag_count(1, 5) == 1
    assert complete_flag_count(3, 2) == 21
    assert complete_flag_count(4, 2) == 315
    assert complete_flag_count(2, 3) == 4


@pytest.mark.parametrize("q,expected", [(2, 45), (3, 160)])
def test_isotropic_flags_match_bruteforce(q, expected):
    F = gf_init(q)
    J = standard_form(2, q)
    iso = [S for S in all_subspaces(F, 4) if all(pair(F, J.matrix, x, y) == 0 for x in S for y in S)]
    lines = [S for S in iso if dim_of(q, S) == 1]
    planes = [S for S in iso if dim_of(q, S) == 2]
    brute = sum(1 for a in lines for b in planes if a < b)
    got = list(enumerate_isotropic_flags(J))
    assert brute == len(got) == expected == isotropic_flag_count(2, q)
    assert all(is_totally_isotropic(S, J) for f in got for S in f)


def test_isotropic_flag_count_small():
    assert isotropic_flag_count(1, 2) == 3
    assert isotropic_flag_count(3, 2) == 2835


# ------------------------------------------------------------------ forms


def test_isotropy_examples():
    J = standard_form(2, 2)
    F = J.field
    e1, e2, f1 = (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)
    assert is_totally_isotropic(span(F, [e1], 4), J)
    assert not is_totally_isotropic(span(F, [e1, f1], 4), J)
    assert is_totally_isotropic(span(F, [e1, e2], 4), J)
    with pytest.raises(DimensionMismatch):
        is_totally_isotropic(span(F, [(1, 0)], 2), J)


def test_orthogonal_complement_examples():
    J = standard_form(2, 3)
    F = J.field
    assert orthogonal_complement(full_space(4), J) == zero_subspace(4)
    assert orthogonal_complement(zero_subspace(4), J) == full_space(4)
    e1 = span(F, [(1, 0, 0, 0)], 4)
    assert orthogonal_complement(e1, J) == span(F, [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 0, 1)], 4)


@pytest.mark.parametrize("n,q", [(2, 2), (2, 3), (3, 2)])
def test_double_complement(n, q):
    J = standard_form(n, q)
    for d in range(2 * n + 1):
        for i, U in enumerate(enumerate_subspaces(2 * n, d, q)):
            if i > 60:
                break
            P = orthogonal_complement(U, J)
            assert U.dim + P.dim == 2 * n
            assert orthogonal_complement(P, J) == U


def test_gram_form_validation():
    F = gf_init(2)
    with pytest.raises(DomainError):
        GramForm(F, ((1, 0), (0, 1)))  # symmetric with nonzero diagonal is skew at p = 2
    with pytest.raises(DomainError):
        GramForm(F, ((0, 0), (0, 0)))
    F3 = gf_init(3)
    with pytest.raises(DomainError):
        GramForm(F3, ((0, 1), (1, 0)))


@pytest.mark.parametrize("q", [2, 3, 4])
def test_symplectic_basis(q):
    J = standard_form(2, q)
    F = J.field
    vecs = [(1, 1, 0, 1), (0, 1, 1, 0), (1, 0, 1, 1), (0, 0, 1, 1)]
    if rank(F, vecs) < 4:
        return
    B = symplectic_basis(F, vecs, J.pair)
    for i in range(4):
        for j in range(4):
            want = 1 if (i < 2 and j == i + 2) else F.neg[1] if (i >= 2 and j == i - 2) else 0
            assert J.pair(B[i], B[j]) == want


# ---------------------------------------------------- invariant subspaces


def _nilpotent_shift(m, q):
    # t acting on t^-1 L / t L with L of rank m // 2: second block maps to the first
    n = m // 2
    return tuple(tuple(1 if (i < n and j == i + n) else 0 for j in range(m)) for i in range(m))


@pytest.mark.parametrize(
    "T,q",
    [
        (_nilpotent_shift(4, 2), 2),
        (_nilpotent_shift(4, 3), 3),
        (((0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (0, 0, 0, 0)), 2),
        (((0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 0), (0, 0, 0, 0)), 3),
        (((0,) * 3,) * 3, 2),
    ],
)
def test_invariant_subspaces_match_bruteforce(T, q):
    F = gf_init(q)
    m = len(T)
    brute = invariant_subspaces_bruteforce(F, T, m)
    got = [as_set(F, S) for S in invariant_subspaces(F, T, m)]
    assert len(got) == len(set(got))
    assert set(got) == brute
    for d in range(m + 1):
        got_d = {as_set(F, S) for S in invariant_subspaces(F, T, m, dim=d)}
        assert got_d == {S for S in brute if dim_of(q, S) == d}


def test_invariant_subspaces_rejects_non_nilpotent():
    F = gf_init(2)
    with pytest.raises(DomainError):
        list(invariant_subspaces(F, ((1, 1, 0), (0, 1, 0), (0, 0, 0)), 3))
