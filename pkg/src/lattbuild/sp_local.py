"""Distance-one structure of the Sp_n building at a special vertex.

The symplectic building sits inside the SL_{2n} building on K^{2n} with the
form <x, y> = x^T J y, J = [[0, I], [-I, 0]].  Type-0 vertices are the
classes with a primitive representative; the enumerators here all start
from such a vertex.

Apartment coordinates ``(a; b)`` with respect to a symplectic basis
(u_1..u_n, w_1..w_n) denote the lattice sum of t^{a_i} O u_i and t^{b_i} O w_i.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache, partial
from typing import Iterator, Sequence

import networkx as nx

from . import _poly as P
from .errors import (
    DimensionMismatch,
    DomainError,
    NotAdjacent,
    NotClose,
    NotInCommonApartment,
    NotSpecial,
)
from .gfq import (
    GramForm,
    QuotientSpace,
    Subspace,
    enumerate_isotropic_flags,
    enumerate_subspaces,
    isotropic_flag_count,
    standard_form,
    symplectic_basis,
)
from .lattice import (
    DEFAULT_PRECISION,
    HomothetyClass,
    KMatrix,
    LatticeRep,
    TruncRing,
    Window,
    adjacent_representative,
    apply_matrix,
    contains,
    form_valuation,
    index,
    is_primitive,
    lattice_from_columns,
    lift_from_reduction,
    relative_position,
    residue_gram,
    standard_lattice,
)
from .parallel import pmap
from .sl_local import ClosePair, LocalFrame, close_subspaces
from .spherical import Complex, VertexMap, build_C_building


def r_delta(n: int, q: int) -> int:
    """Chambers through a special vertex: prod_{m=1}^{n} (q^{2m}-1)/(q-1)."""
    if n < 1:
        raise DomainError("n must be at least 1")
    return isotropic_flag_count(n, q)


def coset_count_sp(n: int, q: int) -> int:
    """(q^{2n} - 1) q / (q - 1)."""
    if n < 2:
        raise DomainError("n must be at least 2")
    return (q ** (2 * n) - 1) * q // (q - 1)


omega_delta = coset_count_sp


# --------------------------------------------------------------- frames


class SpFrame(LocalFrame):
    """Local frame at a primitive lattice, with the ambient symplectic form."""

    def __init__(self, base: LatticeRep):
        if base.d % 2:
            raise DimensionMismatch("symplectic space needs even rank")
        self.n = base.d // 2
        self.J = standard_form(self.n, base.field)
        if not is_primitive(base, self.J):
            raise NotSpecial("base lattice is not primitive")
        super().__init__(base)
        if self.W.hi + self.W.lo < 1:
            W = self.W
            self.W = Window(W.field, W.d, W.lo, 1 - W.lo)
            self.S_L = self.W.from_lattice(base)
            self.S_tL = self.W.times_t(self.S_L)
            self.S_invL = self.W.div_t(self.S_L)
            self.residue = QuotientSpace(self.F, self.S_tL, self.S_L, [self.W.vector(base.shift, c) for c in base.cols])
            self.upper = QuotientSpace(self.F, self.S_L, self.S_invL, [self.W.vector(base.shift - 1, c) for c in base.cols])
        # induced form on L/tL in the basis of L
        self.residue_form = GramForm(self.F, residue_gram(base, self.J))

    def const_pairing(self, x, y) -> int:
        return self.W.pairing(self.J, x, y).get(0, 0)

    def is_primitive(self, S: Subspace) -> bool:
        return self.W.is_primitive(S, self.J)

    def isotropic_mod_t(self, S: Subspace) -> bool:
        """<S, S> ⊆ tO."""
        return self.W.form_at_least(S, self.J, 1)


def sp_frame(base: LatticeRep) -> SpFrame:
    # equal lattices at different precisions need different frames
    return _sp_frame(base, base.ring.N)


@lru_cache(maxsize=32)
def _sp_frame(base: LatticeRep, precision: int) -> SpFrame:
    return SpFrame(base)


def _sp_base(n: int, q: int, base, precision: int) -> LatticeRep:
    if base is None:
        return standard_lattice(TruncRing(q, precision), 2 * n)
    L = base.rep if isinstance(base, HomothetyClass) else base
    if L.d != 2 * n or L.ring.q != q:
        raise DomainError("base vertex does not match n and q")
    J = standard_form(n, L.field)
    if not is_primitive(L, J):
        # a type-0 class has exactly one primitive representative
        for k in range(-4, 5):
            if is_primitive(L.scaled(k), J):
                return L.scaled(k)
        raise NotSpecial("base vertex has no primitive representative")
    return L


# -------------------------------------------------------------- chambers


@dataclass(frozen=True)
class SpChamber:
    """Chamber through a type-0 vertex: a maximal isotropic flag of L/tL."""

    base: LatticeRep
    flag: tuple

    def chain(self) -> list[LatticeRep]:
        """tL ⊊ L_1 ⊊ ... ⊊ L_n ⊊ L."""
        return [self.base.scaled(1)] + [lift_from_reduction(self.base, S) for S in self.flag] + [self.base]


def sp_chambers_containing(n: int, q: int, base=None, precision: int = DEFAULT_PRECISION) -> Iterator[SpChamber]:
    L = _sp_base(n, q, base, precision)
    frame = sp_frame(L)
    for flag in enumerate_isotropic_flags(frame.residue_form):
        yield SpChamber(L, flag)


# --------------------------------------------------------- close vertices


@dataclass(frozen=True)
class SpCloseScan:
    close: tuple  # window subspaces of the primitive close representatives
    candidates: int  # classes meeting the index criterion
    type_histogram: dict = field(hash=False)  # type -> number of such candidates
    non_primitive: int

    @property
    def non_type0(self) -> int:
        return sum(c for t, c in self.type_histogram.items() if t != 0)


def sp_close_scan(frame: SpFrame, workers: int = 1, interpolate: bool = True) -> SpCloseScan:
    """Classes [M] with [L+M : L] = q = [L+M : M], split by type and primitivity.

    With ``interpolate`` every accepted M is backed by an explicit isotropic
    chain joining a chamber on [L] to a chamber on [M].
    """
    W = frame.W
    L_det = W.ord_det(frame.S_L)
    cands = []
    for S in close_subspaces(frame, workers):
        # [L+M : M] = q  <=>  ord det M = ord det L, given [L : L∩M] = q = [L+M : L]
        if W.ord_det(S) == L_det:
            cands.append(S)
    types = Counter((W.ord_det(S) - L_det) % (2 * frame.n) for S in cands)
    close = tuple(S for S in cands if frame.is_primitive(S))
    if interpolate:
        for S in close:
            sp_interpolating_chain(ClosePair(frame.L, frame.lattice(S)))
    return SpCloseScan(close, len(cands), dict(sorted(types.items())), len(cands) - len(close))


def sp_close_vertices(n: int, q: int, base=None, precision: int = DEFAULT_PRECISION, workers: int = 1) -> list[HomothetyClass]:
    if n < 2:
        raise DomainError("n must be at least 2")
    frame = sp_frame(_sp_base(n, q, base, precision))
    return sorted(frame.vertex(S) for S in sp_close_scan(frame, workers).close)


def sp_close_pairs(n: int, q: int, base=None, precision: int = DEFAULT_PRECISION, workers: int = 1) -> list[ClosePair]:
    frame = sp_frame(_sp_base(n, q, base, precision))
    return [ClosePair(frame.L, frame.lattice(S)) for S in sp_close_scan(frame, workers).close]


def sample_sp_close_pairs(n: int, q: int, count: int, seed: int = 0, workers: int = 1) -> list[ClosePair]:
    pairs = sp_close_pairs(n, q, workers=workers)
    return random.Random(seed).sample(pairs, min(count, len(pairs)))


def _sp_pair_spaces(pair: ClosePair):
    frame = sp_frame(pair.L)
    S_M = frame.subspace(pair.M)
    if not (frame.is_close(S_M) and frame.is_primitive(S_M)):
        raise NotClose("not a pair of close type-0 vertices")
    low = frame.W.times_t(frame.sum(frame.S_L, S_M))
    high = frame.meet(frame.S_L, S_M)
    return frame, S_M, low, high


def middle_quotient(pair: ClosePair) -> tuple[SpFrame, QuotientSpace]:
    """(L∩M)/t(L+M) with a symplectic basis for the induced form."""
    frame, _, low, high = _sp_pair_spaces(pair)
    Q0 = QuotientSpace(frame.F, low, high)
    basis = symplectic_basis(frame.F, Q0.basis, frame.const_pairing)
    return frame, QuotientSpace(frame.F, low, high, basis)


def sp_middle_chains(pair: ClosePair) -> Iterator[tuple[Subspace, ...]]:
    """Chains t(L+M) ⊊ L_2 ⊊ ... ⊊ L_n inside L∩M with every <L_i, L_i> ⊆ tO."""
    frame, Q = middle_quotient(pair)
    J = standard_form(Q.dim // 2, frame.F)
    for flag in enumerate_isotropic_flags(J):
        lifts = tuple(Q.lift_subspace(X) for X in flag)
        if all(frame.W.is_lattice(S) and frame.isotropic_mod_t(S) for S in lifts):
            yield lifts


def sp_gallery_multiplicity(pair: ClosePair) -> int:
    return sum(1 for _ in sp_middle_chains(pair))


def sp_interpolating_chain(pair: ClosePair) -> tuple[list[LatticeRep], list[LatticeRep]]:
    """Adjacent chambers tL ⊊ L_1 ⊊ ... ⊊ L_n ⊊ L and the same chain ending at M."""
    frame = sp_frame(pair.L)
    mid = next(sp_middle_chains(pair), None)
    if mid is None:
        raise NotClose("no isotropic middle chain")
    _, S_M, low, _ = _sp_pair_spaces(pair)
    inner = [frame.lattice(low)] + [frame.lattice(S) for S in mid]
    C = [pair.L.scaled(1)] + inner + [pair.L]
    C2 = [pair.M.scaled(1)] + inner + [pair.M]
    for chain in (C, C2):
        for a, b in zip(chain, chain[1:]):
            assert contains(b, a) and index(a, b) >= 1
    return C, C2


@dataclass(frozen=True)
class SpRelationReport:
    n: int
    q: int
    r_n: int
    r_prev: int
    omega: int
    lhs: int
    rhs: int
    omega_enumerated: int | None = None
    r_n_enumerated: int | None = None

    @property
    def holds(self) -> bool:
        ok = self.lhs == self.rhs
        if self.omega_enumerated is not None:
            ok = ok and self.omega_enumerated == self.omega
        if self.r_n_enumerated is not None:
            ok = ok and self.r_n_enumerated == self.r_n
        return ok

    def __bool__(self):
        return self.holds


def verify_sp_relation(n: int, q: int, enumerate: bool = False, workers: int = 1) -> SpRelationReport:
    """q r(Δ_n) == r(Δ_{n-1}) ω(Δ_n), with r(Δ_1) = q + 1."""
    if n < 2:
        raise DomainError("n must be at least 2")
    r_n, r_prev, om = r_delta(n, q), r_delta(n - 1, q), coset_count_sp(n, q)
    r_enum = om_enum = None
    if enumerate:
        r_enum = sum(1 for _ in sp_chambers_containing(n, q))
        om_enum = len(sp_close_vertices(n, q, workers=workers))
    return SpRelationReport(n, q, r_n, r_prev, om, q * (r_enum or r_n), r_prev * (om_enum or om), om_enum, r_enum)


# -------------------------------------------------------------- thickness


def _sp_opposite(frame: SpFrame, flag) -> list[Subspace]:
    """Primitive X with L_n ⊊ X ⊆ t^-1 L_1, [X : L_n] = q^n."""
    bottom = frame.lift(flag[0])
    top = frame.lift(flag[-1])
    Q = QuotientSpace(frame.F, top, frame.W.div_t(bottom))
    out = []
    for Y in enumerate_subspaces(Q.dim, frame.n, frame.F):
        X = Q.lift_subspace(Y)
        if frame.W.is_lattice(X) and frame.is_primitive(X):
            out.append(X)
    return out


def _sp_gallery_chunk(frame: SpFrame, flags):
    hist: Counter = Counter()
    thick: Counter = Counter()
    for flag in flags:
        comps = _sp_opposite(frame, flag)
        thick[len(comps)] += 1
        assert frame.S_L in comps
        for X in comps:
            if X != frame.S_L:
                hist[X] += 1
    return hist, thick


@dataclass(frozen=True)
class SpGalleryCount:
    chambers: int
    total: int
    histogram: dict = field(hash=False)
    thickness: dict = field(hash=False)

    @property
    def classes(self) -> int:
        return len(self.histogram)


def sp_count_galleries_from(n: int, q: int, base=None, precision: int = DEFAULT_PRECISION, workers: int = 1) -> SpGalleryCount:
    """Galleries leaving the special vertex across the face opposite it.

    ``thickness`` is {chambers through a codim-one face: number of faces},
    covering every codim-one face of every chamber on t.
    """
    frame = sp_frame(_sp_base(n, q, base, precision))
    flags = list(enumerate_isotropic_flags(frame.residue_form))
    through: Counter = Counter()
    for flag in flags:
        for i in range(len(flag)):
            through[(i, flag[:i] + flag[i + 1:])] += 1
    thick = Counter(through.values())
    size = 128
    parts = pmap(partial(_sp_gallery_chunk, frame), [flags[i:i + size] for i in range(0, len(flags), size)], workers)
    hist: Counter = Counter()
    for h, t in parts:
        hist.update(h)
        thick.update(t)
    named = {frame.vertex(S): c for S, c in sorted(hist.items(), key=lambda kv: kv[0].basis)}
    return SpGalleryCount(len(flags), sum(hist.values()), named, dict(sorted(thick.items())))


# ----------------------------------------------------------- close complex


def sp_close_complex(pair: ClosePair) -> tuple[Complex, VertexMap]:
    """Vertices of the symplectic building adjacent to t, t2 and [L+M].

    Candidates are the nontrivial isotropic subspaces of L/tL; a candidate
    stays when its class has a representative X' with tM ⊊ X' ⊊ M and
    <X', X'> ⊆ tO, and it is adjacent to [L+M].  The vertex map sends X to
    X/t(L+M) in symplectic coordinates on (L∩M)/t(L+M).
    """
    frame, Q = middle_quotient(pair)
    _, S_M, low, high = _sp_pair_spaces(pair)
    F, W, n = frame.F, frame.W, frame.n
    L_sum = frame.lattice(frame.sum(frame.S_L, S_M))
    accepted: dict = {}
    for d in range(1, n + 1):
        for Y in enumerate_subspaces(2 * n, d, F):
            if any(frame.residue_form.pair(Y.basis[i], Y.basis[j]) for i in range(d) for j in range(i + 1, d)):
                continue
            X = frame.lift(Y)
            lat = frame.lattice(X)
            v = lat.homothety_class()
            try:
                Xm = adjacent_representative(pair.M, v)
            except NotAdjacent:
                continue
            if form_valuation(Xm, frame.J) < 1:
                continue
            if relative_position(L_sum, lat).spread != 1:
                continue
            accepted[v] = X
    verts = sorted(accepted)
    G = nx.Graph()
    G.add_nodes_from(range(len(verts)))
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            if relative_position(verts[i].rep, verts[j].rep).spread == 1:
                G.add_edge(i, j)
    facets = [frozenset(verts[i] for i in c) for c in nx.find_cliques(G)] if verts else []
    cx = Complex.from_facets(facets)
    target = build_C_building(n - 1, F.q)
    mapping = {}
    for v in verts:
        X = accepted[v]
        if W.sum(low, X) == X and W.sum(X, high) == high:
            mapping[v] = Q.project_subspace(X)
    return cx, VertexMap(cx, target, mapping)


# ------------------------------------------------------ apartment coordinates


@dataclass(frozen=True)
class SymplecticBasis:
    """Columns u_1..u_n, w_1..w_n given as Laurent vectors (shift, entries)."""

    vectors: tuple
    name: str = "B"

    @property
    def n(self) -> int:
        return len(self.vectors) // 2

    @classmethod
    def standard(cls, n: int) -> "SymplecticBasis":
        d = 2 * n
        return cls(tuple((0, tuple((1,) if i == j else () for i in range(d))) for j in range(d)), "B0")


@dataclass(frozen=True)
class ApartmentVertex:
    a: tuple
    b: tuple
    basis: SymplecticBasis | None = None

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def coords(self) -> tuple:
        return tuple(self.a) + tuple(self.b)

    def normalized(self) -> tuple:
        m = min(self.coords)
        return tuple(x - m for x in self.coords)

    def same_class(self, other: "ApartmentVertex") -> bool:
        return self.basis == other.basis and self.normalized() == other.normalized()

    def scaled(self, k: int) -> "ApartmentVertex":
        return ApartmentVertex(tuple(x + k for x in self.a), tuple(x + k for x in self.b), self.basis)


def coords_is_primitive(v: ApartmentVertex) -> bool:
    return all(x + y == 0 for x, y in zip(v.a, v.b))


def coords_is_special(v: ApartmentVertex) -> bool:
    return len({x + y for x, y in zip(v.a, v.b)}) == 1


def coords_type(v: ApartmentVertex, n: int | None = None) -> int:
    n = n or v.n
    return (sum(v.a) + sum(v.b)) % (2 * n)


def coords_in_delta(v: ApartmentVertex) -> bool:
    """Some rep t^k L is primitive or sits between tP and P (P primitive) with <L, L> ⊆ tO."""
    sums = {x + y for x, y in zip(v.a, v.b)}
    lo, hi = min(sums), max(sums)
    if hi - lo > 1:
        return False
    # shifting by k adds 2k to every sum; need all sums in {1, 2} after the shift
    return any(all(s + 2 * k in (1, 2) for s in sums) for k in range((1 - hi) // 2 - 1, (2 - lo) // 2 + 2))


def realize(v: ApartmentVertex, ring) -> LatticeRep:
    B = v.basis or SymplecticBasis.standard(v.n)
    cols = []
    for e, (s, vec) in zip(v.coords, B.vectors):
        cols.append((s + e, vec))
    return lattice_from_columns(ring, cols)


# ------------------------------------------------------------ GSp elements


def _kmat_equal(F, A: KMatrix, B: KMatrix) -> bool:
    s = min(A.shift, B.shift)
    for ra, rb in zip(A.rows, B.rows):
        for x, y in zip(ra, rb):
            if P.shift(x, A.shift - s) != P.shift(y, B.shift - s):
                return False
    return True


def j_matrix(n: int, F) -> KMatrix:
    return KMatrix.make(standard_form(n, F).matrix)


@dataclass(frozen=True)
class GspElement:
    """g with g^T J g = nu J, nu = unit * t^m."""

    g: KMatrix
    m: int
    unit: int = 1

    @property
    def n(self) -> int:
        return self.g.d // 2

    def is_valid(self, F) -> bool:
        J = j_matrix(self.n, F)
        lhs = self.g.transpose().mul(F, J).mul(F, self.g)
        nu = KMatrix.diagonal([self.m] * (2 * self.n), [self.unit] * (2 * self.n))
        return _kmat_equal(F, lhs, nu.mul(F, J))

    def twisted_basis(self, B: SymplecticBasis, F) -> SymplecticBasis:
        """(nu^-1 g u_i, g w_i)."""
        n = B.n
        cinv = F.inv[self.unit]
        out = []
        for j, (s, vec) in enumerate(B.vectors):
            col = KMatrix.make([[x] for x in vec], s)
            img = self.g.mul(F, col)
            entries = tuple(r[0] for r in img.rows)
            shift = img.shift
            if j < n:
                entries = tuple(P.scale(F, cinv, x) for x in entries)
                shift -= self.m
            out.append((shift, entries))
        return SymplecticBasis(tuple(out), B.name + "_g")

    def mul(self, F, other: "GspElement") -> "GspElement":
        return GspElement(self.g.mul(F, other.g), self.m + other.m, F.mul[self.unit][other.unit])


def gsp_act(g: GspElement, v: ApartmentVertex, F) -> ApartmentVertex:
    """g (a; b)_B = (a + m; b)_{B_g}."""
    B = v.basis or SymplecticBasis.standard(v.n)
    return ApartmentVertex(tuple(x + g.m for x in v.a), tuple(v.b), g.twisted_basis(B, F))


def gsp_transport(v: ApartmentVertex, v2: ApartmentVertex, c: int = 0) -> GspElement:
    """Diagonal similitude carrying the special vertex [v] to [v2] (standard basis)."""
    if not (coords_is_special(v) and coords_is_special(v2)):
        raise NotSpecial("both vertices must be special")
    mu = v.a[0] + v.b[0]
    mu2 = v2.a[0] + v2.b[0]
    alpha = [a2 - a + c for a, a2 in zip(v.a, v2.a)]
    beta = [mu2 - mu - a2 + a + c for a, a2 in zip(v.a, v2.a)]
    return GspElement(KMatrix.diagonal(alpha + beta), mu2 - mu + 2 * c)


def random_gsp(n: int, F, rng: random.Random, length: int = 3, max_deg: int = 1) -> GspElement:
    """Random product of symplectic generators and similitudes with small valuations."""
    d = 2 * n
    g = GspElement(KMatrix.identity(d), 0, 1)
    for _ in range(length):
        kind = rng.randrange(5)
        c = rng.randrange(1, F.q)
        k = rng.randrange(-max_deg, max_deg + 1)
        i, j = rng.randrange(n), rng.randrange(n)
        rows = [[(1,) if r == col else () for col in range(d)] for r in range(d)]
        shift = 0
        if kind in (0, 1):
            # [[I, S], [0, I]] or its transpose, S symmetric with one or two entries
            base = min(k, 0)
            rows = [[P.monomial(-base) if r == col else () for col in range(d)] for r in range(d)]
            shift = base
            ent = P.monomial(k - base, c)
            r0, c0 = (i, n + j) if kind == 0 else (n + i, j)
            r1, c1 = (j, n + i) if kind == 0 else (n + j, i)
            rows[r0][c0] = ent
            rows[r1][c1] = ent
            elem = GspElement(KMatrix.make(rows, shift), 0, 1)
        elif kind == 2 and i != j:
            # diag(A, A^-T) with A = I + c t^k E_ij
            base = min(k, 0)
            rows = [[P.monomial(-base) if r == col else () for col in range(d)] for r in range(d)]
            rows[i][j] = P.monomial(k - base, c)
            rows[n + j][n + i] = P.monomial(k - base, F.neg[c])
            elem = GspElement(KMatrix.make(rows, base), 0, 1)
        elif kind == 3:
            m = rng.choice([-1, 1, 2])
            exps = [m] * n + [0] * n
            units = [c] * n + [1] * n
            elem = GspElement(KMatrix.diagonal(exps, units), m, c)
        else:
            elem = GspElement(j_matrix(n, F), 0, 1)
        g = g.mul(F, elem)
    return g


def random_gl(d: int, F, rng: random.Random, length: int = 4, max_deg: int = 1) -> KMatrix:
    """Random invertible matrix over K: elementary and diagonal factors."""
    g = KMatrix.identity(d)
    for _ in range(length):
        if rng.random() < 0.5:
            i, j = rng.sample(range(d), 2)
            k = rng.randrange(-max_deg, max_deg + 1)
            base = min(k, 0)
            rows = [[P.monomial(-base) if r == c else () for c in range(d)] for r in range(d)]
            rows[i][j] = P.monomial(k - base, rng.randrange(1, F.q))
            g = g.mul(F, KMatrix.make(rows, base))
        else:
            exps = [rng.randrange(-1, 2) for _ in range(d)]
            units = [rng.randrange(1, F.q) for _ in range(d)]
            g = g.mul(F, KMatrix.diagonal(exps, units))
    return g


def gsp_chamber_image(g: GspElement, lattices: dict, F) -> list[LatticeRep]:
    """Images of L_n, L_{n+1}, ..., L_{2n-1}, L_0 under g with odd m = 2r + 1.

    Returns [L_n', L_{n+1}', ..., L_{2n-1}', L_0'] where L_n' = t^-(r+1) g L_n
    and L_j' = t^-r g L_j; L_n' is primitive and
    t L_n' ⊊ L_{n+1}' ⊊ ... ⊊ L_{2n-1}' ⊊ L_0' ⊊ L_n'.
    """
    if g.m % 2 == 0:
        raise DomainError("similitude exponent must be odd")
    r = (g.m - 1) // 2
    n = g.n
    order = [n] + list(range(n + 1, 2 * n)) + [0]
    out = []
    for j in order:
        img = apply_matrix(g.g, lattices[j])
        out.append(img.scaled(-(r + 1) if j == n else -r))
    return out


# ----------------------------------------------------- galleries in apartments


Coord = tuple


def _contained(x: Coord, y: Coord) -> bool:
    """Lattice with coordinates x lies inside the one with coordinates y."""
    return all(a >= b for a, b in zip(x, y))


def _norm(x: Coord) -> Coord:
    m = min(x)
    return tuple(v - m for v in x)


@dataclass(frozen=True)
class ApartmentChamber:
    """Chain t L_0 ⊊ L_1 ⊊ ... ⊊ L_n ⊊ L_0 in coordinates on one symplectic basis."""

    chain: tuple  # (L_0, L_1, ..., L_n) as 2n-tuples
    basis: str = "B0"

    @property
    def n(self) -> int:
        return len(self.chain) - 1

    def classes(self) -> list:
        return [_norm(x) for x in self.chain]


def apartment_chambers_at_origin(n: int) -> list[ApartmentChamber]:
    """The 2^n n! chambers of the standard apartment through (0; 0)."""
    out = []
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((0, 1), repeat=n):
            chosen = [p + n * s for p, s in zip(perm, signs)]
            chain = [(0,) * (2 * n)]
            for i in range(1, n + 1):
                chain.append(tuple(0 if ell in chosen[:i] else 1 for ell in range(2 * n)))
            out.append(ApartmentChamber(tuple(chain)))
    return out


def _is_primitive_coord(x: Coord, n: int) -> bool:
    return all(x[i] + x[n + i] == 0 for i in range(n))


def apartment_neighbours(C: ApartmentChamber) -> list[tuple[int, ApartmentChamber]]:
    """(j, C') for the chamber C' sharing every vertex of C except the j-th."""
    n = C.n
    ch = list(C.chain)
    out = []
    for j in range(1, n + 1):
        lower = ch[j - 1] if j > 1 else tuple(v + 1 for v in ch[0])
        upper = ch[j + 1] if j < n else ch[0]
        found = []
        # every coordinate lattice strictly between, of index q over lower, isotropic mod t
        diff = [ell for ell in range(2 * n) if lower[ell] != upper[ell]]
        for ell in diff:
            cand = tuple(v - 1 if i == ell else v for i, v in enumerate(lower))
            if not _contained(cand, upper) or cand == ch[j]:
                continue
            if all(cand[i] + cand[n + i] >= 1 for i in range(n)):
                found.append(cand)
        assert len(found) == 1, (j, found)
        new = ch[:j] + [found[0]] + ch[j + 1:]
        out.append((j, ApartmentChamber(tuple(new), C.basis)))
    # j = 0: the other primitive lattice through L_1, ..., L_n
    Ln, L1 = ch[n], ch[1]
    found = []
    for a in itertools.product(*[(Ln[i] - 1, Ln[i]) for i in range(n)]):
        cand = tuple(a) + tuple(-x for x in a)
        if cand == ch[0] or not _contained(Ln, cand):
            continue
        if _contained(tuple(v + 1 for v in cand), L1):
            found.append(cand)
    assert len(found) == 1, found
    out.append((0, ApartmentChamber((found[0],) + tuple(ch[1:]), C.basis)))
    return sorted(out)


def _lowering_chain(start: Coord, end: Coord) -> list[Coord]:
    """start ⊊ ... ⊊ end, lowering one coordinate at a time in index order."""
    assert _contained(start, end)
    steps = [ell for ell in range(len(start)) for _ in range(start[ell] - end[ell])]
    out, cur = [], list(start)
    for ell in steps[:-1]:
        cur[ell] -= 1
        out.append(tuple(cur))
    return out


@dataclass(frozen=True)
class LiftedGallery:
    j: int | None
    D: tuple  # (L_0, L_1, ..., L_{2n-1})
    D2: tuple


def _rep_between(cls_coord: Coord, lower: Coord, upper: Coord) -> Coord:
    hits = []
    for k in range(-6, 7):
        x = tuple(v + k for v in cls_coord)
        if _contained(lower, x) and _contained(x, upper) and x != lower and x != upper:
            hits.append(x)
    if len(hits) != 1:
        raise NotAdjacent("no unique representative between the given lattices")
    return hits[0]


def lift_gallery(C: ApartmentChamber, C2: ApartmentChamber) -> LiftedGallery:
    """Adjacent chambers D ⊇ C, D2 ⊇ C2 of the SL_{2n} building, in coordinates."""
    if C.basis != C2.basis:
        raise NotInCommonApartment("chambers are given on different bases")
    n = C.n
    A = C.chain[0]
    Bv = C.chain[n]
    cls1, cls2 = C.classes(), C2.classes()
    if set(cls1) == set(cls2):
        D = tuple(C.chain) + tuple(_lowering_chain(Bv, A))
        return LiftedGallery(None, D, D)
    shared = set(cls1) & set(cls2)
    if len(shared) != n:
        raise NotAdjacent("chambers do not share a codimension-one face")
    j = next(i for i, c in enumerate(cls1) if c not in shared)
    new_cls = next(c for c in cls2 if c not in shared)
    ch = list(C.chain)
    if 1 <= j <= n - 1:
        lower = ch[j - 1] if j > 1 else tuple(v + 1 for v in A)
        Lp = _rep_between(new_cls, lower, ch[j + 1])
        # coordinates where L_n exceeds L_0 by one, lowered in order
        idx = [ell for ell in range(2 * n) if Bv[ell] == A[ell] + 1]
        assert len(idx) == n
        upper = []
        for r in range(1, n):
            upper.append(tuple(A[ell] if ell in idx[:r] else Bv[ell] for ell in range(2 * n)))
        D = tuple(ch) + tuple(upper)
        D2 = tuple(ch[:j] + [Lp] + ch[j + 1:]) + tuple(upper)
    elif j == n:
        lower = ch[n - 1] if n > 1 else tuple(v + 1 for v in A)
        Lp = _rep_between(new_cls, lower, A)
        top = tuple(min(x, y) for x, y in zip(Bv, Lp))
        # L_n + L_n' sits just above L_n; for n = 1 it is L_0 itself
        upper = ([top] if top != A else []) + _lowering_chain(top, A)
        D = tuple(ch) + tuple(upper)
        D2 = tuple(ch[:n] + [Lp]) + tuple(upper)
    else:
        Lp = None
        for k in range(-6, 7):
            x = tuple(v + k for v in new_cls)
            if _is_primitive_coord(x, n):
                Lp = x
        if Lp is None:
            raise NotAdjacent("replacement vertex has no primitive representative")
        bottom = tuple(max(x, y) for x, y in zip(A, Lp))
        # L_0 ∩ L_0' sits just below L_0; for n = 1 it is L_1 itself
        upper = _lowering_chain(Bv, bottom) + ([bottom] if bottom != Bv else [])
        D = tuple(ch) + tuple(upper)
        D2 = (Lp,) + tuple(ch[1:]) + tuple(upper)
    return LiftedGallery(j, D, D2)


def check_xi_chamber(chain: Sequence[Coord], ring) -> bool:
    """Lattice-level check: t L_0 ⊊ L_1 ⊊ ... ⊊ L_{2n-1} ⊊ L_0 with every index q."""
    n2 = len(chain)
    lats = [realize(ApartmentVertex(tuple(x[: n2 // 2]), tuple(x[n2 // 2:])), ring) for x in chain]
    seq = [lats[0].scaled(1)] + lats[1:] + [lats[0]]
    for a, b in zip(seq, seq[1:]):
        if not contains(b, a) or index(a, b) != 1:
            return False
    return True


def check_lift(C: ApartmentChamber, C2: ApartmentChamber, lifted: LiftedGallery, ring) -> bool:
    """D ⊇ C, D2 ⊇ C2 as vertex sets, both chambers, adjacent, distinct iff C ≠ C2."""
    D, D2 = lifted.D, lifted.D2
    if not (check_xi_chamber(D, ring) and check_xi_chamber(D2, ring)):
        return False
    sD, sD2 = {_norm(x) for x in D}, {_norm(x) for x in D2}
    if not (set(C.classes()) <= sD and set(C2.classes()) <= sD2):
        return False
    if set(C.classes()) == set(C2.classes()):
        return sD == sD2
    return len(sD & sD2) == len(D) - 1
