"""Linear algebra over the residue field F_q.

Elements of F_q (q = p^e) are encoded as integers ``0..q-1``: the integer
``sum(c_i * p**i)`` stands for the polynomial ``sum(c_i * x**i)`` modulo a
fixed monic irreducible of degree ``e``.  All arithmetic goes through
precomputed tables, so every routine below is exact.

Vectors are tuples of field elements, matrices are tuples of row tuples, and
a subspace is always stored by its reduced row echelon basis, which makes
``==`` on :class:`Subspace` the same thing as equality of subspaces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, reduce
from operator import mul
from typing import Callable, Iterable, Iterator, Sequence

from .errors import DimensionMismatch, DomainError, NotPrimePower, OrderTooLarge

MAX_ORDER = 9

# Conway polynomials, coefficients from the constant term upward.
IRREDUCIBLES = {
    (2, 2): (1, 1, 1),  # x^2 + x + 1
    (2, 3): (1, 1, 0, 1),  # x^3 + x + 1
    (3, 2): (2, 2, 1),  # x^2 + 2x + 2
}

Vector = tuple
Matrix = tuple


@dataclass(frozen=True)
class FieldTable:
    p: int
    e: int
    modulus: tuple = field(compare=True)
    add: tuple = field(compare=False, repr=False)
    sub: tuple = field(compare=False, repr=False)
    mul: tuple = field(compare=False, repr=False)
    neg: tuple = field(compare=False, repr=False)
    inv: tuple = field(compare=False, repr=False)

    @property
    def q(self) -> int:
        return self.p**self.e

    @property
    def elements(self) -> range:
        return range(self.q)

    @property
    def units(self) -> range:
        return range(1, self.q)

    def __reduce__(self):
        return (gf_init, (self.q,))


def _factor_prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise NotPrimePower(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e, rest = 0, q
    while rest % p == 0:
        rest //= p
        e += 1
    if rest != 1:
        raise NotPrimePower(f"{q} is not a prime power")
    return p, e


_FIELD_CACHE: dict[int, FieldTable] = {}


def gf_init(q: int, max_order: int = MAX_ORDER) -> FieldTable:
    """Build (or fetch) the arithmetic tables of F_q."""
    if q in _FIELD_CACHE:
        return _FIELD_CACHE[q]
    p, e = _factor_prime_power(q)
    if q > max_order:
        raise OrderTooLarge(f"q = {q} exceeds the supported bound {max_order}")
    modulus = IRREDUCIBLES.get((p, e), (0, 1))

    def digits(a):
        return [(a // p**i) % p for i in range(e)]

    def encode(ds):
        return sum(d * p**i for i, d in enumerate(ds))

    def polymul(a, b):
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(digits(a)):
            for j, y in enumerate(digits(b)):
                prod[i + j] = (prod[i + j] + x * y) % p
        # reduce by the monic modulus
        for k in range(len(prod) - 1, e - 1, -1):
            c = prod[k]
            if c:
                for i, m in enumerate(modulus):
                    prod[k - e + i] = (prod[k - e + i] - c * m) % p
        return encode(prod[:e])

    add = tuple(
        tuple(encode([(x + y) % p for x, y in zip(digits(a), digits(b))]) for b in range(q))
        for a in range(q)
    )
    sub = tuple(
        tuple(encode([(x - y) % p for x, y in zip(digits(a), digits(b))]) for b in range(q))
        for a in range(q)
    )
    mult = tuple(tuple(polymul(a, b) for b in range(q)) for a in range(q))
    neg = tuple(sub[0][a] for a in range(q))
    inv = [0] * q
    for a in range(1, q):
        inv[a] = next(b for b in range(1, q) if mult[a][b] == 1)
    F = FieldTable(p, e, modulus, add, sub, mult, neg, tuple(inv))
    _FIELD_CACHE[q] = F
    return F


def as_field(q_or_field) -> FieldTable:
    if isinstance(q_or_field, FieldTable):
        return q_or_field
    return gf_init(int(q_or_field))


# ---------------------------------------------------------------- matrices


def mat_vec(F: FieldTable, T: Matrix, v: Vector) -> Vector:
    add, mul_ = F.add, F.mul
    out = []
    for row in T:
        acc = 0
        for a, b in zip(row, v):
            if a and b:
                acc = add[acc][mul_[a][b]]
        out.append(acc)
    return tuple(out)


def mat_mul(F: FieldTable, A: Matrix, B: Matrix) -> Matrix:
    cols = list(zip(*B))
    return tuple(mat_vec(F, cols, row) for row in A)


def dot(F: FieldTable, u: Vector, v: Vector) -> int:
    add, mul_ = F.add, F.mul
    acc = 0
    for a, b in zip(u, v):
        if a and b:
            acc = add[acc][mul_[a][b]]
    return acc


def lincomb(F: FieldTable, coeffs: Sequence[int], vectors: Sequence[Vector], m: int) -> Vector:
    add, mul_ = F.add, F.mul
    out = [0] * m
    for c, v in zip(coeffs, vectors):
        if c:
            mc = mul_[c]
            out = [add[x][mc[y]] for x, y in zip(out, v)]
    return tuple(out)


def rref_rows(F: FieldTable, rows: Iterable[Sequence[int]]) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form; returns the nonzero rows and their pivots."""
    mat = [list(r) for r in rows]
    if not mat:
        return (), ()
    ncols = len(mat[0])
    sub, mul_, inv = F.sub, F.mul, F.inv
    pivots: list[int] = []
    r = 0
    nrows = len(mat)
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        row = mat[r]
        if row[c] != 1:
            mi = mul_[inv[row[c]]]
            row = [mi[x] for x in row]
            mat[r] = row
        for i in range(nrows):
            if i != r and mat[i][c]:
                f = mul_[mat[i][c]]
                mat[i] = [sub[x][f[y]] for x, y in zip(mat[i], row)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return tuple(tuple(x) for x in mat[:r]), tuple(pivots)


def rref(F: FieldTable, M: Sequence[Sequence[int]]) -> tuple[Matrix, int]:
    """Reduced row echelon form of ``M`` with zero rows dropped, and the rank."""
    rows, pivots = rref_rows(F, M)
    return rows, len(pivots)


def rank(F: FieldTable, M: Sequence[Sequence[int]]) -> int:
    return rref(F, M)[1]


def kernel(F: FieldTable, A: Sequence[Sequence[int]], m: int) -> Matrix:
    """Basis (rows) of ``{x in k^m : A x = 0}``."""
    rows, pivots = rref_rows(F, A)
    free = [c for c in range(m) if c not in pivots]
    basis = []
    for f in free:
        x = [0] * m
        x[f] = 1
        for row, pc in zip(rows, pivots):
            x[pc] = F.neg[row[f]]
        basis.append(tuple(x))
    return tuple(basis)


def mat_inv(F: FieldTable, M: Sequence[Sequence[int]]) -> Matrix:
    m = len(M)
    aug = [tuple(row) + tuple(int(i == j) for j in range(m)) for i, row in enumerate(M)]
    rows, pivots = rref_rows(F, aug)
    if tuple(pivots[:m]) != tuple(range(m)) or len(rows) < m:
        from .errors import SingularMatrix

        raise SingularMatrix("matrix is not invertible over F_q")
    return tuple(row[m:] for row in rows)


def transpose(M: Matrix) -> Matrix:
    return tuple(zip(*M))


# --------------------------------------------------------------- subspaces


@dataclass(frozen=True)
class Subspace:
    """A subspace of k^m held by its reduced row echelon basis."""

    ambient_dim: int
    basis: Matrix

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(i for i, x in enumerate(row) if x) for row in self.basis)

    def __repr__(self):
        return f"Subspace({self.ambient_dim}, {list(map(list, self.basis))})"


def span(F: FieldTable, vectors: Iterable[Sequence[int]], m: int) -> Subspace:
    rows, _ = rref_rows(F, vectors)
    return Subspace(m, rows)


def zero_subspace(m: int) -> Subspace:
    return Subspace(m, ())


def full_space(m: int) -> Subspace:
    return Subspace(m, tuple(tuple(int(i == j) for j in range(m)) for i in range(m)))


def reduce_vector(F: FieldTable, S: Subspace, v: Sequence[int]) -> Vector:
    """Canonical representative of ``v`` modulo ``S`` (zero at the pivots of ``S``)."""
    v = list(v)
    sub, mul_ = F.sub, F.mul
    for row, pc in zip(S.basis, S.pivots):
        c = v[pc]
        if c:
            f = mul_[c]
            v = [sub[x][f[y]] for x, y in zip(v, row)]
    return tuple(v)


def contains_vector(F: FieldTable, S: Subspace, v: Sequence[int]) -> bool:
    return not any(reduce_vector(F, S, v))


def is_subspace_of(F: FieldTable, U: Subspace, W: Subspace) -> bool:
    if U.dim > W.dim:
        return False
    return all(contains_vector(F, W, u) for u in U.basis)


def subspace_sum(F: FieldTable, U: Subspace, W: Subspace) -> Subspace:
    return span(F, U.basis + W.basis, U.ambient_dim)


def subspace_intersection(F: FieldTable, U: Subspace, W: Subspace) -> Subspace:
    """Zassenhaus: row reduce [[u, u], [w, 0]]; rows with vanishing left half span U ∩ W."""
    m = U.ambient_dim
    if U.dim == 0 or W.dim == 0:
        return zero_subspace(m)
    zero = (0,) * m
    rows, pivots = rref_rows(F, [u + u for u in U.basis] + [w + zero for w in W.basis])
    inter = [row[m:] for row, pc in zip(rows, pivots) if pc >= m]
    return span(F, inter, m)


def enumerate_subspaces(m: int, d: int, q) -> Iterator[Subspace]:
    """Every d-dimensional subspace of F_q^m, each exactly once.

    Ordered by pivot columns (lexicographically), then by the free entries
    read row by row.
    """
    if d < 0 or d > m:
        raise DomainError(f"need 0 <= d <= m, got d={d}, m={m}")
    F = as_field(q)
    elems = range(F.q)
    for pivots in itertools.combinations(range(m), d):
        pset = set(pivots)
        free = [(r, c) for r, pc in enumerate(pivots) for c in range(pc + 1, m) if c not in pset]
        for values in itertools.product(elems, repeat=len(free)):
            rows = [[0] * m for _ in range(d)]
            for r, pc in enumerate(pivots):
                rows[r][pc] = 1
            for (r, c), x in zip(free, values):
                rows[r][c] = x
            yield Subspace(m, tuple(tuple(row) for row in rows))


def subspaces_within(F: FieldTable, S: Subspace, d: int) -> Iterator[Subspace]:
    """The d-dimensional subspaces of ``S`` (as subspaces of the ambient space)."""
    for X in enumerate_subspaces(S.dim, d, F):
        yield span(F, [lincomb(F, x, S.basis, S.ambient_dim) for x in X.basis], S.ambient_dim)


def gaussian_binomial(m: int, d: int, q: int) -> int:
    if d < 0 or d > m:
        raise DomainError(f"need 0 <= d <= m, got d={d}, m={m}")
    num = reduce(mul, (q ** (m - i) - 1 for i in range(d)), 1)
    den = reduce(mul, (q ** (i + 1) - 1 for i in range(d)), 1)
    return num // den


def complete_flag_count(n: int, q: int) -> int:
    """Number of complete flags in F_q^n: prod_{m=1}^{n} (q^m - 1)/(q - 1)."""
    if n < 0:
        raise DomainError("n must be non-negative")
    return reduce(mul, ((q**m - 1) // (q - 1) for m in range(1, n + 1)), 1)


def isotropic_flag_count(n: int, q: int) -> int:
    """Maximal isotropic flags in symplectic F_q^{2n}: prod (q^{2m} - 1)/(q - 1)."""
    return reduce(mul, ((q ** (2 * m) - 1) // (q - 1) for m in range(1, n + 1)), 1)


# ---------------------------------------------------------------- quotients


class QuotientSpace:
    """Coordinates on ``upper / lower`` for subspaces ``lower ⊆ upper`` of k^m.

    Without ``basis`` the coordinates come from a row-reduced complement of
    ``lower``; with ``basis`` (vectors of ``upper`` whose images form a basis
    of the quotient) the coordinates are taken with respect to those vectors.
    """

    def __init__(self, F: FieldTable, lower: Subspace, upper: Subspace, basis=None):
        self.F = F
        self.lower = lower
        self.upper = upper
        self.ambient_dim = upper.ambient_dim
        reduced = [reduce_vector(F, lower, v) for v in upper.basis]
        comp, pivots = rref_rows(F, reduced)
        self.dim = len(comp)
        if self.dim != upper.dim - lower.dim:
            raise DimensionMismatch("lower is not contained in upper")
        self._comp = comp
        self._pivots = pivots
        if basis is None:
            self.basis = comp
            self._change = None
        else:
            basis = tuple(tuple(b) for b in basis)
            if len(basis) != self.dim:
                raise DimensionMismatch("quotient basis has the wrong size")
            R = [self._comp_coords(b) for b in basis]
            self._change = mat_inv(F, R)
            self.basis = basis

    def _comp_coords(self, v) -> Vector:
        r = reduce_vector(self.F, self.lower, v)
        y = tuple(r[p] for p in self._pivots)
        if lincomb(self.F, y, self._comp, self.ambient_dim) != r:
            raise DimensionMismatch("vector does not lie in the upper space")
        return y

    def coords(self, v) -> Vector:
        y = self._comp_coords(v)
        if self._change is None:
            return y
        return mat_vec(self.F, transpose(self._change), y)

    def lift(self, x: Sequence[int]) -> Vector:
        return lincomb(self.F, x, self.basis, self.ambient_dim)

    def lift_subspace(self, X: Subspace) -> Subspace:
        return span(self.F, self.lower.basis + tuple(self.lift(x) for x in X.basis), self.ambient_dim)

    def project_subspace(self, S: Subspace) -> Subspace:
        return span(self.F, [self.coords(v) for v in S.basis], self.dim)

    def operator(self, f: Callable[[Vector], Vector]) -> Matrix:
        """Matrix (acting on coordinate columns) of the map induced by ``f``."""
        cols = [self.coords(f(b)) for b in self.basis]
        return transpose(cols) if cols else ()


# --------------------------------------------------------------------- flags


def enumerate_complete_flags(m: int, q) -> Iterator[tuple[Subspace, ...]]:
    """Complete flags S_1 ⊊ ... ⊊ S_{m-1} of proper nontrivial subspaces of k^m."""
    F = as_field(q)
    full = full_space(m)

    def extend(chain, cur):
        if cur.dim >= m - 1:
            yield chain
            return
        Q = QuotientSpace(F, cur, full)
        for line in enumerate_subspaces(Q.dim, 1, F):
            nxt = Q.lift_subspace(line)
            yield from extend(chain + (nxt,), nxt)

    yield from extend((), zero_subspace(m))


# -------------------------------------------------------- alternating forms


@dataclass(frozen=True)
class GramForm:
    """Nondegenerate alternating form ``<x, y> = x^T J y`` on k^dim."""

    field: FieldTable
    matrix: Matrix

    def __post_init__(self):
        J = self.matrix
        m = len(J)
        F = self.field
        if any(len(row) != m for row in J):
            raise DimensionMismatch("Gram matrix must be square")
        # alternating: zero diagonal plus skew off-diagonal (skew alone is not enough at p = 2)
        for i in range(m):
            if J[i][i]:
                raise DomainError("form is not alternating")
            for j in range(i + 1, m):
                if J[i][j] != F.neg[J[j][i]]:
                    raise DomainError("form is not skew")
        if rank(F, J) != m:
            raise DomainError("form is degenerate")

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def pair(self, x: Sequence[int], y: Sequence[int]) -> int:
        return dot(self.field, x, mat_vec(self.field, self.matrix, y))


def standard_symplectic_matrix(n: int, F: FieldTable) -> Matrix:
    """The block matrix [[0, I_n], [-I_n, 0]]."""
    m = 2 * n
    J = [[0] * m for _ in range(m)]
    for i in range(n):
        J[i][n + i] = 1
        J[n + i][i] = F.neg[1]
    return tuple(tuple(r) for r in J)


def standard_form(n: int, q) -> GramForm:
    F = as_field(q)
    return GramForm(F, standard_symplectic_matrix(n, F))


def is_totally_isotropic(U: Subspace, J: GramForm) -> bool:
    if U.ambient_dim != J.dim:
        raise DimensionMismatch("subspace and form live in different dimensions")
    B = U.basis
    return all(J.pair(B[i], B[j]) == 0 for i in range(len(B)) for j in range(i + 1, len(B)))


def orthogonal_complement(U: Subspace, J: GramForm) -> Subspace:
    if U.ambient_dim != J.dim:
        raise DimensionMismatch("subspace and form live in different dimensions")
    F = J.field
    rows = [mat_vec(F, transpose(J.matrix), u) for u in U.basis]  # row u^T J
    return span(F, kernel(F, rows, J.dim), J.dim) if rows else full_space(J.dim)


def enumerate_isotropic_flags(J: GramForm) -> Iterator[tuple[Subspace, ...]]:
    """Maximal flags S_1 ⊊ ... ⊊ S_n of nontrivial totally isotropic subspaces."""
    F = J.field
    n = J.dim // 2

    def extend(chain, cur):
        if cur.dim == n:
            yield chain
            return
        perp = orthogonal_complement(cur, J)
        Q = QuotientSpace(F, cur, perp)
        for line in enumerate_subspaces(Q.dim, 1, F):
            nxt = Q.lift_subspace(line)
            yield from extend(chain + (nxt,), nxt)

    yield from extend((), zero_subspace(J.dim))


def enumerate_isotropic_subspaces(J: GramForm, d: int) -> Iterator[Subspace]:
    for U in enumerate_subspaces(J.dim, d, J.field):
        if is_totally_isotropic(U, J):
            yield U


def symplectic_basis(F: FieldTable, vectors: Sequence[Vector], pair: Callable[[Vector, Vector], int]):
    """Rearrange a basis into (u_1..u_r, w_1..w_r) with <u_i, w_j> = δ_ij, others 0."""
    rest = [tuple(v) for v in vectors]
    us, ws = [], []
    m = len(rest[0]) if rest else 0
    while rest:
        x = rest.pop(0)
        j = next((i for i, y in enumerate(rest) if pair(x, y)), None)
        if j is None:
            raise DomainError("pairing is degenerate on the given vectors")
        y = rest.pop(j)
        s = F.inv[pair(x, y)]
        y = lincomb(F, (s,), (y,), m)
        new = []
        for z in rest:
            # z - <z,y> x + <z,x> y is orthogonal to both x and y
            z = lincomb(F, (1, F.neg[pair(z, y)], pair(z, x)), (z, x, y), m)
            new.append(z)
        rest = new
        us.append(x)
        ws.append(y)
    return tuple(us + ws)


# ----------------------------------------------------- invariant subspaces


def is_invariant(F: FieldTable, T: Matrix, S: Subspace) -> bool:
    return all(contains_vector(F, S, mat_vec(F, T, v)) for v in S.basis)


def _is_zero(T: Matrix) -> bool:
    return not any(any(row) for row in T)


def invariant_subspaces(F: FieldTable, T: Matrix, m: int, dim: int | None = None) -> Iterator[Subspace]:
    """Subspaces of k^m invariant under the nilpotent operator ``T``.

    ``T == 0`` enumerates all subspaces; ``T^2 == 0`` uses the decomposition
    W ↔ (B = W ∩ ker T, A = image of W in k^m/ker T, graph of A → ker T / B);
    anything else falls back to a breadth-first search by dimension.
    """
    dims = range(m + 1) if dim is None else [dim]
    if dim is not None and not 0 <= dim <= m:
        return
    if m == 0 or _is_zero(T):
        for d in dims:
            yield from enumerate_subspaces(m, d, F)
        return
    if _is_zero(mat_mul(F, T, T)):
        for d in dims:
            yield from _square_zero_invariant(F, T, m, d)
        return
    P = T
    for _ in range(m - 1):
        P = mat_mul(F, P, T)
    if not _is_zero(P):
        raise DomainError("operator is not nilpotent")
    yield from _bfs_invariant(F, T, m, dim)


def _square_zero_invariant(F: FieldTable, T: Matrix, m: int, d: int) -> Iterator[Subspace]:
    full = full_space(m)
    N = span(F, kernel(F, T, m), m)
    section = QuotientSpace(F, N, full).basis
    images = [mat_vec(F, T, s) for s in section]
    for b in range(N.dim + 1):
        a = d - b
        if a < 0 or a > len(section):
            continue
        for B in subspaces_within(F, N, b):
            QB = QuotientSpace(F, B, N)
            # coordinates of T s_i modulo B; A must lie in the kernel
            M = [QB.coords(img) for img in images]
            pre = kernel(F, transpose(M), len(section)) if QB.dim else full_space(len(section)).basis
            P = span(F, pre, len(section))
            if a > P.dim:
                continue
            comp = QB.basis
            for A in subspaces_within(F, P, a):
                lifts = [lincomb(F, alpha, section, m) for alpha in A.basis]
                for phi in itertools.product(F.elements, repeat=a * len(comp)):
                    gens = list(B.basis)
                    for j, v in enumerate(lifts):
                        coeffs = phi[j * len(comp):(j + 1) * len(comp)]
                        gens.append(lincomb(F, (1,) + tuple(coeffs), (v,) + tuple(comp), m))
                    yield span(F, gens, m)


def _bfs_invariant(F: FieldTable, T: Matrix, m: int, dim: int | None) -> Iterator[Subspace]:
    level = [zero_subspace(m)]
    top = m if dim is None else dim
    for d in range(top + 1):
        if dim is None or d == dim:
            yield from level
        if d == top:
            break
        children = set()
        for X in level:
            # v with T v in X, modulo X
            QX = QuotientSpace(F, X, full_space(m))
            M = [QX.coords(mat_vec(F, T, e)) for e in full_space(m).basis]
            pre = span(F, kernel(F, transpose(M), m), m) if QX.dim else full_space(m)
            Q = QuotientSpace(F, X, pre)
            if Q.dim == 0:
                continue
            for line in enumerate_subspaces(Q.dim, 1, F):
                children.add(Q.lift_subspace(line))
        level = sorted(children, key=lambda S: S.basis)
