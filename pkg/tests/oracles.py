"""Brute-force oracles shared by the tests.

Everything here works on explicit vector sets and avoids the row-reduction
and Hermite code under test.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from lattbuild.gfq import gf_init


def prime_field_poly_mul(a, b, p, modulus, e):
    """Multiply digit vectors in F_p[x]/(modulus), modulus monic of degree e."""
    prod = [0] * (2 * e - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, e - 1, -1):
        c = prod[k]
        for i, m in enumerate(modulus):
            prod[k - e + i] = (prod[k - e + i] - c * m) % p
    return prod[:e]


def all_vectors(q, m):
    return list(itertools.product(range(q), repeat=m))


def vadd(F, u, v):
    return tuple(F.add[a][b] for a, b in zip(u, v))


def vscale(F, c, v):
    return tuple(F.mul[c][a] for a in v)


def closure(F, gens, m):
    """Set of all linear combinations of gens."""
    S = {(0,) * m}
    for g in gens:
        new = set()
        for c in range(F.q):
            cg = vscale(F, c, g)
            for s in S:
                new.add(vadd(F, s, cg))
        S = new
    return frozenset(S)


def all_subspaces(F, m):
    """Every subspace of F^m as a frozenset of vectors, by breadth-first growth."""
    zero = frozenset({(0,) * m})
    seen = {zero}
    frontier = [zero]
    vecs = all_vectors(F.q, m)
    while frontier:
        nxt = []
        for S in frontier:
            for v in vecs:
                if v in S:
                    continue
                T = closure(F, [v], m)
                U = frozenset(vadd(F, s, t) for s in S for t in T)
                if U not in seen:
                    seen.add(U)
                    nxt.append(U)
        frontier = nxt
    return seen


def dim_of(q, S):
    d = 0
    n = len(S)
    while n > 1:
        n //= q
        d += 1
    return d


def invariant_subspaces_bruteforce(F, T, m, max_dim=None):
    """Subspaces S with T(S) ⊆ S, grown from cyclic submodules."""
    limit = F.q ** (m if max_dim is None else max_dim)

    def apply(v):
        return tuple(
            _sum(F, [F.mul[T[i][j]][v[j]] for j in range(m)]) for i in range(m)
        )

    def cyclic(v):
        gens, cur = [], v
        for _ in range(m + 1):
            gens.append(cur)
            cur = apply(cur)
        return closure(F, gens, m)

    zero = frozenset({(0,) * m})
    seen = {zero}
    frontier = [zero]
    vecs = all_vectors(F.q, m)
    cyc = {v: cyclic(v) for v in vecs}
    while frontier:
        nxt = []
        for S in frontier:
            for v in vecs:
                if v in S:
                    continue
                if len(cyc[v]) > limit:
                    continue
                U = frozenset(vadd(F, s, t) for s in S for t in cyc[v])
                if len(U) <= limit and U not in seen:
                    seen.add(U)
                    nxt.append(U)
        frontier = nxt
    return seen


def _sum(F, xs):
    acc = 0
    for x in xs:
        acc = F.add[acc][x]
    return acc


def pair(F, J, x, y):
    return _sum(F, [F.mul[x[i]][F.mul[J[i][j]][y[j]]] for i in range(len(x)) for j in range(len(y))])


# ----------------------------------------------------- truncated modules


def poly_vectors(q, d, N):
    """All vectors of (F_q[t]/t^N)^d as tuples of coefficient tuples."""
    polys = list(itertools.product(range(q), repeat=N))
    return list(itertools.product(polys, repeat=d))


def pmul_trunc(F, a, b, N):
    out = [0] * N
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if i + j < N and y:
                out[i + j] = F.add[out[i + j]][F.mul[x][y]]
    return tuple(out)


def padd(F, a, b):
    return tuple(F.add[x][y] for x, y in zip(a, b))


def module_span(F, gens, d, N):
    """O-span of gens inside (O/t^N)^d, as a set of vectors."""
    zero = tuple((0,) * N for _ in range(d))
    S = {zero}
    scalars = list(itertools.product(range(F.q), repeat=N))
    for g in gens:
        multiples = {tuple(pmul_trunc(F, c, x, N) for x in g) for c in scalars}
        S = {tuple(padd(F, a, b) for a, b in zip(v, w)) for v in S for w in multiples}
    return frozenset(S)


def det_laplace(F, M):
    """Determinant of a square matrix of polynomials (coefficient lists) by cofactor expansion."""
    n = len(M)
    if n == 1:
        return list(M[0][0])
    total = [0]
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        sub = det_laplace(F, minor)
        term = _pmul(F, list(M[0][j]), sub)
        if j % 2:
            term = [F.neg[x] for x in term]
        total = _padd(F, total, term)
    return total


def _pmul(F, a, b):
    if not a or not b:
        return [0]
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = F.add[out[i + j]][F.mul[x][y]]
    return out


def _padd(F, a, b):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return [F.add[x][y] for x, y in zip(a, b)]


def poly_val(a):
    for i, x in enumerate(a):
        if x:
            return i
    return None


@lru_cache(maxsize=None)
def close_window_subspaces(n, q):
    """t-stable S ⊆ t^-1 O^n / t O^n with [L : L∩M] = q = [L+M : L], L = O^n.

    Coordinates: e_i t^-1 for i < n, then e_i t^0.
    """
    F = gf_init(q)
    m = 2 * n
    T = [[0] * m for _ in range(m)]
    for i in range(n):
        T[n + i][i] = 1
    U = closure(F, [tuple(1 if j == n + i else 0 for j in range(m)) for i in range(n)], m)
    out = []
    for S in invariant_subspaces_bruteforce(F, T, m, max_dim=n):
        if len(S & U) * q != len(U) or len(closure(F, list(S | U), m)) != len(U) * q:
            continue
        out.append(S)
    return tuple(out)


def basis_of(F, S, m):
    chosen = []
    span = closure(F, [], m)
    for v in sorted(S):
        if v not in span:
            chosen.append(v)
            span = closure(F, chosen, m)
    return chosen
