"""O-lattices in K^d for K = F_q((t)), O = F_q[[t]], uniformizer t.

A lattice is kept as ``t^shift * H O^d`` where ``H`` is in column Hermite
form: upper triangular, diagonal entries ``t^{a_i}``, and every entry in row
``r`` above the diagonal a polynomial of degree below ``a_r``.  The shift is
chosen so that ``H O^d`` lies in ``O^d`` but not in ``t O^d``.  With that
normalization the pair ``(shift, H)`` is unique, so equality of lattices is
equality of representations.

``N`` (the ring precision) bounds the spread of the elementary divisors of
``H``: every lattice handled must satisfy ``t^{shift+N-1} O^d ⊆ L``.  A
result outside that window raises :class:`PrecisionOverflow` instead of being
silently truncated.

For enumeration work a :class:`Window` identifies lattices squeezed between
``t^hi O^d`` and ``t^lo O^d`` with t-stable subspaces of
``k^{d(hi-lo)}``; sums and intersections then become plain subspace
operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from . import _poly as P
from .errors import (
    DimensionMismatch,
    DomainError,
    EnumerationTooLarge,
    NotAdjacent,
    NotContained,
    NotInWindow,
    PrecisionOverflow,
    SingularMatrix,
)
from .gfq import (
    FieldTable,
    GramForm,
    QuotientSpace,
    Subspace,
    gf_init,
    invariant_subspaces,
    rank,
    span,
    subspace_intersection,
    subspace_sum,
)

DEFAULT_PRECISION = 4
_SMITH_CAP = 128
DEFAULT_ENUM_CAP = 1_000_000


@dataclass(frozen=True)
class TruncRing:
    q: int
    N: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("precision must be at least 1")
        gf_init(self.q)

    @property
    def field(self) -> FieldTable:
        return gf_init(self.q)


def as_ring(ring_or_q, N: int = DEFAULT_PRECISION) -> TruncRing:
    if isinstance(ring_or_q, TruncRing):
        return ring_or_q
    return TruncRing(int(ring_or_q), N)


# ------------------------------------------------------------ Smith / Hermite


def smith_exponents(F: FieldTable, cols: Sequence[Sequence[P.Poly]], d: int, prec: int):
    """Invariant-factor exponents of a d x k polynomial matrix, computed mod t^prec.

    Returns ``(exps, missing)``: the sorted exponents that are below ``prec``
    and how many invariant factors vanish mod t^prec.
    """
    k = len(cols)
    A = [[P.trunc(cols[j][i], prec) for j in range(k)] for i in range(d)]
    rows = list(range(d))
    live = list(range(k))
    exps = []
    while rows and live:
        best = None
        for i in rows:
            Ai = A[i]
            for j in live:
                v = P.val(Ai[j])
                if v is not None and (best is None or v < best[0]):
                    best = (v, i, j)
                    if v == 0:
                        break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, r, c = best
        unit = P.shift(A[r][c], -v)
        uinv = P.inv_unit(F, unit, prec - v)
        pivrow = A[r]
        for i in rows:
            if i != r and A[i][c]:
                f = P.mul(F, P.shift(A[i][c], -v), uinv, prec)
                Ai = A[i]
                A[i] = [P.sub(F, Ai[j], P.mul(F, f, pivrow[j], prec)) if j in live else Ai[j] for j in range(k)]
        rows.remove(r)
        live.remove(c)
        exps.append(v)
    return sorted(exps), d - len(exps)


def _hermite(F: FieldTable, cols, d: int, prec: int):
    """Column Hermite form of span(cols) + t^(prec-1) O^d, working mod t^prec."""
    work = [[P.trunc(x, prec) for x in c] for c in cols]
    for i in range(d):
        work.append([P.monomial(prec - 1) if r == i else P.ZERO for r in range(d)])
    piv: list = [None] * d
    for r in range(d - 1, -1, -1):
        best, bv = None, None
        for idx, c in enumerate(work):
            v = P.val(c[r])
            if v is not None and (bv is None or v < bv):
                best, bv = idx, v
                if v == 0:
                    break
        col = work.pop(best)
        unit = P.shift(col[r], -bv)
        uinv = P.inv_unit(F, unit, prec)
        col = [P.mul(F, x, uinv, prec) for x in col]
        col[r] = P.monomial(bv)
        for c in work:
            if c[r]:
                f = P.shift(c[r], -bv)
                for k in range(r + 1):
                    if col[k]:
                        c[k] = P.sub(F, c[k], P.mul(F, f, col[k], prec))
                c[r] = P.ZERO
        piv[r] = col
    diag = [len(piv[r][r]) - 1 for r in range(d)]
    for j in range(d):
        col = piv[j]
        for r in range(j - 1, -1, -1):
            low, high = P.split(col[r], diag[r])
            if high:
                pr = piv[r]
                for k in range(r):
                    if pr[k]:
                        col[k] = P.sub(F, col[k], P.mul(F, high, pr[k], prec))
                col[r] = low
    return tuple(tuple(c) for c in piv)


# ------------------------------------------------------------------ lattices


class LatticeRep:
    """Canonical representative ``t^shift * H O^d`` of an O-lattice."""

    __slots__ = ("ring", "shift", "cols", "_exps", "__weakref__", "_hash")

    def __init__(self, ring: TruncRing, shift: int, cols, exps):
        self.ring = ring
        self.shift = shift
        self.cols = cols
        self._exps = exps
        self._hash = None

    @property
    def d(self) -> int:
        return len(self.cols)

    @property
    def field(self) -> FieldTable:
        return self.ring.field

    @property
    def diag(self) -> tuple[int, ...]:
        return tuple(len(self.cols[i][i]) - 1 for i in range(self.d))

    @property
    def hermite_exponents(self) -> tuple[int, ...]:
        """Elementary-divisor exponents of H (smallest is 0)."""
        return self._exps

    @property
    def exponents(self) -> tuple[int, ...]:
        """Elementary-divisor exponents relative to the standard lattice O^d."""
        return tuple(self.shift + e for e in self._exps)

    @property
    def emax(self) -> int:
        return self._exps[-1]

    @property
    def ord_det(self) -> int:
        return self.d * self.shift + sum(self.diag)

    def matrix(self) -> tuple:
        """Rows of H."""
        return tuple(tuple(self.cols[j][i] for j in range(self.d)) for i in range(self.d))

    def key(self):
        return (self.shift, self.cols)

    def scaled(self, k: int) -> "LatticeRep":
        """t^k L."""
        return LatticeRep(self.ring, self.shift + k, self.cols, self._exps)

    def homothety_class(self) -> "HomothetyClass":
        return HomothetyClass(self.scaled(-self.shift))

    def generators(self) -> list[tuple[int, tuple]]:
        return [(self.shift, c) for c in self.cols]

    def __eq__(self, other):
        if not isinstance(other, LatticeRep):
            return NotImplemented
        return self.ring.q == other.ring.q and self.shift == other.shift and self.cols == other.cols

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring.q, self.shift, self.cols))
        return self._hash

    def __lt__(self, other):
        return self.key() < other.key()

    def __repr__(self):
        rows = [[list(x) for x in row] for row in self.matrix()]
        return f"LatticeRep(shift={self.shift}, H={rows})"

    def __reduce__(self):
        return (LatticeRep, (self.ring, self.shift, self.cols, self._exps))


@dataclass(frozen=True, order=True)
class HomothetyClass:
    """A vertex of the building: the lattice representative with shift 0."""

    rep: LatticeRep = field(compare=False)
    _key: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if self.rep.shift != 0:
            raise ValueError("homothety class representative must have shift 0")
        object.__setattr__(self, "_key", self.rep.cols)

    @property
    def d(self) -> int:
        return self.rep.d

    def __repr__(self):
        return f"HomothetyClass({self.rep!r})"


@dataclass(frozen=True)
class RelPosition:
    """Sorted elementary-divisor exponents of one lattice relative to another."""

    exponents: tuple[int, ...]

    def normalized(self) -> "RelPosition":
        m = self.exponents[0]
        return RelPosition(tuple(e - m for e in self.exponents))

    @property
    def spread(self) -> int:
        return self.exponents[-1] - self.exponents[0]


def _as_poly(x) -> P.Poly:
    if isinstance(x, int):
        return (x,) if x else P.ZERO
    return P.trim(x)


def _build(ring: TruncRing, cols, shift: int) -> LatticeRep:
    F = ring.field
    cols = [[_as_poly(x) for x in c] for c in cols]
    if not cols:
        raise SingularMatrix("no generators")
    d = len(cols[0])
    vals = [P.val(x) for c in cols for x in c if x]
    if not vals:
        raise SingularMatrix("all generators vanish")
    v = min(vals)
    if v:
        cols = [[P.shift(x, -v) for x in c] for c in cols]
        shift += v
    prec = max(ring.N, 2)
    while True:
        exps, missing = smith_exponents(F, cols, d, prec)
        if not missing:
            break
        if prec >= _SMITH_CAP:
            raise SingularMatrix("generators do not span a full-rank lattice")
        prec *= 2
    if exps[-1] > ring.N - 1:
        raise PrecisionOverflow(
            f"elementary divisors span {exps[-1]} > N-1 = {ring.N - 1}; raise the precision"
        )
    H = _hermite(F, cols, d, exps[-1] + 1)
    return LatticeRep(ring, shift, H, tuple(exps))


def lattice_from_generators(ring, M, shift: int = 0) -> LatticeRep:
    """Canonical lattice ``t^shift`` times the O-span of the columns of ``M``.

    ``M`` is either a :class:`KMatrix` or a sequence of rows whose entries are
    field elements or coefficient tuples (low degree first).
    """
    ring = as_ring(ring)
    if isinstance(M, KMatrix):
        return _build(ring, M.columns(), shift + M.shift)
    rows = [list(r) for r in M]
    if not rows:
        raise SingularMatrix("empty matrix")
    cols = [[rows[i][j] for i in range(len(rows))] for j in range(len(rows[0]))]
    return _build(ring, cols, shift)


def lattice_from_columns(ring, columns: Iterable[tuple[int, Sequence]]) -> LatticeRep:
    """Span of Laurent columns given as ``(shift, entries)`` pairs."""
    ring = as_ring(ring)
    columns = [(s, [_as_poly(x) for x in c]) for s, c in columns]
    base = min(s for s, _ in columns)
    cols = [[P.shift(x, s - base) for x in c] for s, c in columns]
    return _build(ring, cols, base)


def standard_lattice(ring, d: int) -> LatticeRep:
    ring = as_ring(ring)
    return _build(ring, [[1 if i == j else 0 for i in range(d)] for j in range(d)], 0)


def diagonal_lattice(ring, exps: Sequence[int]) -> LatticeRep:
    """t^{e_1} O e_1 + ... + t^{e_d} O e_d."""
    d = len(exps)
    return lattice_from_columns(ring, [(e, [1 if i == j else 0 for i in range(d)]) for j, e in enumerate(exps)])


# ------------------------------------------------------------ K-matrices


@dataclass(frozen=True)
class KMatrix:
    """Matrix ``t^shift * rows`` over K with polynomial entries in ``rows``."""

    shift: int
    rows: tuple

    @classmethod
    def make(cls, rows, shift: int = 0) -> "KMatrix":
        return cls(shift, tuple(tuple(_as_poly(x) for x in r) for r in rows))

    @classmethod
    def identity(cls, d: int) -> "KMatrix":
        return cls.make([[1 if i == j else 0 for j in range(d)] for i in range(d)])

    @classmethod
    def diagonal(cls, exps: Sequence[int], units: Sequence[int] | None = None) -> "KMatrix":
        d = len(exps)
        base = min(exps)
        units = units or [1] * d
        return cls.make(
            [[P.monomial(exps[i] - base, units[i]) if i == j else 0 for j in range(d)] for i in range(d)],
            base,
        )

    @property
    def d(self) -> int:
        return len(self.rows)

    def columns(self):
        return [[self.rows[i][j] for i in range(self.d)] for j in range(len(self.rows[0]))]

    def mul(self, F: FieldTable, other: "KMatrix") -> "KMatrix":
        n, m = len(self.rows[0]), len(other.rows[0])
        out = []
        for i in range(self.d):
            row = []
            for j in range(m):
                acc = P.ZERO
                for k in range(n):
                    a, b = self.rows[i][k], other.rows[k][j]
                    if a and b:
                        acc = P.add(F, acc, P.mul(F, a, b))
                row.append(acc)
            out.append(tuple(row))
        return KMatrix(self.shift + other.shift, tuple(out))

    def transpose(self) -> "KMatrix":
        return KMatrix(self.shift, tuple(zip(*self.rows)))

    def ord_det(self, F: FieldTable) -> int:
        exps, missing = smith_exponents(F, self.columns(), self.d, _SMITH_CAP)
        if missing:
            raise SingularMatrix("matrix is singular")
        return self.d * self.shift + sum(exps)


def apply_matrix(g: KMatrix, L: LatticeRep) -> LatticeRep:
    """g L, the span of g applied to the generators of L."""
    if g.d != L.d or len(g.rows[0]) != L.d:
        raise DimensionMismatch("matrix and lattice ranks differ")
    F = L.field
    H = KMatrix(L.shift, L.matrix())
    return lattice_from_generators(L.ring, g.mul(F, H))


def ord_det(g: KMatrix, q) -> int:
    return g.ord_det(gf_init(q) if isinstance(q, int) else q)


# --------------------------------------------------------- linear solving


def _solve(L: LatticeRep, shift: int, vec: Sequence[P.Poly]):
    """O-coefficients c with H c = t^(shift - L.shift) vec, or None if vec ∉ L."""
    F = L.field
    k = shift - L.shift
    w = []
    for x in vec:
        if not x:
            w.append(P.ZERO)
        elif k >= 0:
            w.append(P.shift(x, k))
        else:
            if P.val(x) < -k:
                return None
            w.append(P.shift(x, k))
    d = L.d
    diag = L.diag
    coeffs = [P.ZERO] * d
    for r in range(d - 1, -1, -1):
        x = w[r]
        if not x:
            continue
        v = P.val(x)
        if v < diag[r]:
            return None
        c = P.shift(x, -diag[r])
        coeffs[r] = c
        col = L.cols[r]
        for i in range(r + 1):
            if col[i]:
                w[i] = P.sub(F, w[i], P.mul(F, c, col[i]))
    return coeffs


def contains_vector(L: LatticeRep, shift: int, vec: Sequence) -> bool:
    return _solve(L, shift, [_as_poly(x) for x in vec]) is not None


def contains(Lsup: LatticeRep, Lsub: LatticeRep) -> bool:
    """Lsub ⊆ Lsup."""
    if Lsup.d != Lsub.d:
        raise DimensionMismatch("ranks differ")
    return all(_solve(Lsup, Lsub.shift, c) is not None for c in Lsub.cols)


def index(Lsub: LatticeRep, Lsup: LatticeRep) -> int:
    """e with [Lsup : Lsub] = q^e."""
    if not contains(Lsup, Lsub):
        raise NotContained("first lattice is not contained in the second")
    return Lsub.ord_det - Lsup.ord_det


def lattice_sum(L: LatticeRep, M: LatticeRep) -> LatticeRep:
    if L.d != M.d:
        raise DimensionMismatch("ranks differ")
    return lattice_from_columns(L.ring, L.generators() + M.generators())


def lattice_intersect(L: LatticeRep, M: LatticeRep) -> LatticeRep:
    if L.d != M.d:
        raise DimensionMismatch("ranks differ")
    lo = min(L.shift, M.shift)
    hi = max(L.shift + L.emax, M.shift + M.emax)
    W = Window(L.field, L.d, lo, max(hi, lo + 1))
    S = subspace_intersection(L.field, W.from_lattice(L), W.from_lattice(M))
    return W.to_lattice(S, L.ring)


def _scaled_inverse(L: LatticeRep):
    """Columns of X = t^D H^{-1} with D = emax; X is integral."""
    F = L.field
    d, D, diag = L.d, L.emax, L.diag
    out = []
    for m in range(d):
        x = [P.ZERO] * d
        for i in range(d - 1, -1, -1):
            rhs = P.monomial(D) if i == m else P.ZERO
            for j in range(i + 1, d):
                h = L.cols[j][i]
                if h and x[j]:
                    rhs = P.sub(F, rhs, P.mul(F, h, x[j]))
            x[i] = P.shift(rhs, -diag[i])
        out.append(x)
    return out


def relative_position(L: LatticeRep, M: LatticeRep) -> RelPosition:
    """Raw exponents e with M = g diag(t^e) L-basis for some g ∈ GL_d(O)."""
    if L.d != M.d:
        raise DimensionMismatch("ranks differ")
    F = L.field
    d = L.d
    X = _scaled_inverse(L)
    Xrows = [[X[m][i] for m in range(d)] for i in range(d)]
    cols = []
    for j in range(d):
        hm = M.cols[j]
        col = []
        for i in range(d):
            acc = P.ZERO
            for m in range(d):
                if Xrows[i][m] and hm[m]:
                    acc = P.add(F, acc, P.mul(F, Xrows[i][m], hm[m]))
            col.append(acc)
        cols.append(col)
    total = d * L.emax - sum(L.diag) + sum(M.diag)
    exps, missing = smith_exponents(F, cols, d, total + 1)
    assert not missing
    off = M.shift - L.shift - L.emax
    return RelPosition(tuple(e + off for e in exps))


def is_adjacent(L: LatticeRep, M: LatticeRep) -> bool:
    """[L] and [M] are distinct adjacent vertices."""
    return relative_position(L, M).spread == 1


def adjacent_representative(L: LatticeRep, t2: HomothetyClass) -> LatticeRep:
    """The representative L' of t2 with tL ⊊ L' ⊊ L."""
    rp = relative_position(L, t2.rep)
    if rp.spread != 1:
        raise NotAdjacent("classes are equal or not adjacent")
    return t2.rep.scaled(-rp.exponents[0])


def reduction_mod_pi(L: LatticeRep, Lmid: LatticeRep) -> Subspace:
    """Lmid / tL as a subspace of L / tL ≅ k^d (coordinates in the basis of L)."""
    if not (contains(L, Lmid) and contains(Lmid, L.scaled(1))):
        raise NotInWindow("need tL ⊆ Lmid ⊆ L")
    F = L.field
    vecs = []
    for c in Lmid.cols:
        coeffs = _solve(L, Lmid.shift, c)
        vecs.append(tuple(P.evaluate_const(x) for x in coeffs))
    return span(F, vecs, L.d)


def lift_from_reduction(L: LatticeRep, S: Subspace) -> LatticeRep:
    """tL + (lift of S), inverse of :func:`reduction_mod_pi`."""
    F = L.field
    gens = [(L.shift + 1, c) for c in L.cols]
    for v in S.basis:
        col = [P.ZERO] * L.d
        for coef, hc in zip(v, L.cols):
            if coef:
                for i in range(L.d):
                    col[i] = P.add(F, col[i], P.scale(F, coef, hc[i]))
        gens.append((L.shift, col))
    return lattice_from_columns(L.ring, gens)


def enumerate_intermediate_lattices(lower: LatticeRep, upper: LatticeRep, cap: int = DEFAULT_ENUM_CAP) -> Iterator[LatticeRep]:
    """Every O-module between ``lower`` and ``upper``, each once, in canonical order."""
    if not contains(upper, lower):
        raise NotContained("lower is not contained in upper")
    F = lower.field
    W = Window(F, lower.d, upper.shift, max(lower.shift + lower.emax, upper.shift + 1))
    Sl, Su = W.from_lattice(lower), W.from_lattice(upper)
    Q = QuotientSpace(F, Sl, Su)
    T = Q.operator(W.times_t_vector)
    out = []
    for X in invariant_subspaces(F, T, Q.dim):
        out.append(W.to_lattice(Q.lift_subspace(X), lower.ring))
        if len(out) > cap:
            raise EnumerationTooLarge(f"more than {cap} intermediate lattices")
    yield from sorted(out)


# ------------------------------------------------------------ alternating forms


def gram_matrix(L: LatticeRep, J: GramForm) -> tuple[int, tuple]:
    """(2*shift, G) with G = H^T J H; the Gram matrix of L is t^(2 shift) G."""
    if J.dim != L.d:
        raise DimensionMismatch("form and lattice dimensions differ")
    F = L.field
    d = L.d
    JH = []
    for j in range(d):
        col = L.cols[j]
        jc = []
        for i in range(d):
            acc = P.ZERO
            for k in range(d):
                if J.matrix[i][k] and col[k]:
                    acc = P.add(F, acc, P.scale(F, J.matrix[i][k], col[k]))
            jc.append(acc)
        JH.append(jc)
    G = []
    for i in range(d):
        row = []
        for j in range(d):
            acc = P.ZERO
            for k in range(d):
                if L.cols[i][k] and JH[j][k]:
                    acc = P.add(F, acc, P.mul(F, L.cols[i][k], JH[j][k]))
            row.append(acc)
        G.append(tuple(row))
    return 2 * L.shift, tuple(G)


def form_valuation(L: LatticeRep, J: GramForm) -> int:
    """Largest v with <L, L> ⊆ t^v O."""
    s, G = gram_matrix(L, J)
    return s + min(P.val(x) for row in G for x in row if x)


def residue_gram(L: LatticeRep, J: GramForm) -> tuple:
    """Constant terms of the Gram matrix of L in its Hermite basis, given <L, L> ⊆ O."""
    s, G = gram_matrix(L, J)
    if s + min(P.val(x) for row in G for x in row if x) < 0:
        raise DomainError("form is not integral on the lattice")
    k = -s
    return tuple(tuple(x[k] if 0 <= k < len(x) else 0 for x in row) for row in G)


def is_primitive(L: LatticeRep, J: GramForm) -> bool:
    """<L, L> ⊆ O and the induced form on L/tL is nondegenerate."""
    if form_valuation(L, J) != 0:
        return False
    return rank(L.field, residue_gram(L, J)) == L.d


def is_special_lattice(L: LatticeRep, J: GramForm) -> bool:
    """The form's invariant factors on L all agree (L's dual is homothetic to L)."""
    _, G = gram_matrix(L, J)
    cols = [[G[i][j] for i in range(L.d)] for j in range(L.d)]
    exps, missing = smith_exponents(L.field, cols, L.d, 4 * L.ring.N + 4)
    return not missing and exps[0] == exps[-1]


def vertex_type(L, modulus: int | None = None) -> int:
    """ord det mod ``modulus`` (the rank by default)."""
    rep = L.rep if isinstance(L, HomothetyClass) else L
    return rep.ord_det % (modulus or rep.d)


# ------------------------------------------------------------------ windows


@dataclass(frozen=True)
class Window:
    """Lattices between t^hi O^d and t^lo O^d as t-stable subspaces of k^{d(hi-lo)}.

    Coordinate ``(j - lo) * d + i`` carries the coefficient of t^j e_i.
    """

    field: FieldTable
    d: int
    lo: int
    hi: int

    @property
    def dim(self) -> int:
        return self.d * (self.hi - self.lo)

    def vector(self, shift: int, col: Sequence[P.Poly]) -> tuple:
        v = [0] * self.dim
        for i, p in enumerate(col):
            for k, c in enumerate(p):
                if not c:
                    continue
                deg = shift + k
                if deg < self.lo:
                    raise NotInWindow("vector leaves the window")
                if deg < self.hi:
                    v[(deg - self.lo) * self.d + i] = c
        return tuple(v)

    def columns(self, v: Sequence[int]) -> list[P.Poly]:
        """Entries of a window vector as polynomials relative to t^lo."""
        d = self.d
        return [P.trim(v[i::d]) for i in range(d)]

    def level(self, j: int) -> Subspace:
        """t^j O^d."""
        start = max(0, (j - self.lo) * self.d)
        if j < self.lo:
            raise NotInWindow("level below the window")
        m = self.dim
        return Subspace(m, tuple(tuple(int(c == r) for c in range(m)) for r in range(start, m)))

    def from_lattice(self, L: LatticeRep) -> Subspace:
        if L.shift < self.lo or L.shift + L.emax > self.hi:
            raise NotInWindow("lattice does not fit the window")
        vecs = []
        for j in range(self.hi - L.shift):
            for c in L.cols:
                v = self.vector(L.shift + j, c)
                if any(v):
                    vecs.append(v)
        return span(self.field, vecs, self.dim)

    def to_lattice(self, S: Subspace, ring) -> LatticeRep:
        ring = as_ring(ring)
        d = self.d
        cols = [self.columns(v) for v in S.basis]
        for i in range(d):
            cols.append([P.monomial(self.hi - self.lo) if r == i else P.ZERO for r in range(d)])
        return _build(ring, cols, self.lo)

    def times_t_vector(self, v: Sequence[int]) -> tuple:
        d = self.d
        return (0,) * d + tuple(v[: self.dim - d])

    def times_t(self, S: Subspace) -> Subspace:
        return span(self.field, [self.times_t_vector(v) for v in S.basis], self.dim)

    def div_t(self, S: Subspace) -> Subspace:
        """t^{-1} S (requires S ⊆ t^{lo+1} O^d)."""
        d = self.d
        if any(any(v[:d]) for v in S.basis):
            raise NotInWindow("t^-1 S leaves the window")
        vecs = [tuple(v[d:]) + (0,) * d for v in S.basis]
        vecs += [tuple(int(c == r) for c in range(self.dim)) for r in range(self.dim - d, self.dim)]
        return span(self.field, vecs, self.dim)

    def is_lattice(self, S: Subspace) -> bool:
        from .gfq import contains_vector as cv

        return all(cv(self.field, S, self.times_t_vector(v)) for v in S.basis)

    def ord_det(self, S: Subspace) -> int:
        return self.d * self.hi - S.dim

    def sum(self, A: Subspace, B: Subspace) -> Subspace:
        return subspace_sum(self.field, A, B)

    def intersect(self, A: Subspace, B: Subspace) -> Subspace:
        return subspace_intersection(self.field, A, B)

    def pairing(self, J: GramForm, x: Sequence[int], y: Sequence[int]) -> dict[int, int]:
        """Nonzero t-coefficients of <x, y>, keyed by degree."""
        F, d = self.field, self.d
        blocks = self.hi - self.lo
        xb = [x[j * d:(j + 1) * d] for j in range(blocks)]
        from .gfq import dot, mat_vec

        yb = [mat_vec(F, J.matrix, y[j * d:(j + 1) * d]) for j in range(blocks)]
        out: dict[int, int] = {}
        for a in range(blocks):
            if not any(xb[a]):
                continue
            for b in range(blocks):
                c = dot(F, xb[a], yb[b])
                if c:
                    deg = 2 * self.lo + a + b
                    out[deg] = F.add[out.get(deg, 0)][c]
        return {k: v for k, v in out.items() if v}

    def form_at_least(self, S: Subspace, J: GramForm, v: int) -> bool:
        """<S, S> ⊆ t^v O, valid when v <= hi + lo."""
        if v > self.hi + self.lo:
            raise NotInWindow("window too narrow to decide the form valuation")
        B = S.basis
        for i in range(len(B)):
            for j in range(i, len(B)):
                if any(deg < v for deg in self.pairing(J, B[i], B[j])):
                    return False
        return True

    def is_primitive(self, S: Subspace, J: GramForm) -> bool:
        return self.ord_det(S) == 0 and self.form_at_least(S, J, 0)
