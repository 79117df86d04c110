"""Distance-one structure of the SL_n building around one vertex.

Everything happens inside a :class:`LocalFrame`: a window of lattices
between t^2 L and t^-1 L around the base lattice L, where lattices are
t-stable subspaces of a finite k-vector space.  Indices, sums and
intersections are subspace dimension counts and subspace operations there.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache, partial
from typing import Iterator

import networkx as nx

from .errors import DomainError, NotClose, NotInWindow
from .gfq import (
    QuotientSpace,
    Subspace,
    complete_flag_count,
    enumerate_complete_flags,
    enumerate_subspaces,
    gf_init,
)
from .lattice import (
    DEFAULT_PRECISION,
    HomothetyClass,
    LatticeRep,
    TruncRing,
    Window,
    adjacent_representative,
    lift_from_reduction,
    relative_position,
    standard_lattice,
)
from .parallel import pmap
from .spherical import Complex, VertexMap, build_A_building


def omega_formula(n: int, q: int) -> int:
    """Close vertices around one vertex: (q^n-1)/(q-1) * (q^(n-1)-1)/(q-1) * q."""
    if n < 3:
        raise DomainError("n must be at least 3")
    return ((q**n - 1) // (q - 1)) * ((q ** (n - 1) - 1) // (q - 1)) * q


def _base_lattice(n: int, q: int, base, precision: int) -> LatticeRep:
    if base is None:
        return standard_lattice(TruncRing(q, precision), n)
    L = base.rep if isinstance(base, HomothetyClass) else base
    if L.d != n or L.ring.q != q:
        raise DomainError("base vertex does not match n and q")
    return L


class LocalFrame:
    """Window [s-1, s+e+2) around the base lattice L = t^s H O^d."""

    def __init__(self, base: LatticeRep):
        self.L = base
        self.ring = base.ring
        F = self.F = base.field
        d = self.d = base.d
        W = self.W = Window(F, d, base.shift - 1, base.shift + base.emax + 2)
        self.S_L = W.from_lattice(base)
        self.S_tL = W.times_t(self.S_L)
        self.S_invL = W.div_t(self.S_L)
        self.residue = QuotientSpace(F, self.S_tL, self.S_L, [W.vector(base.shift, c) for c in base.cols])
        self.upper = QuotientSpace(F, self.S_L, self.S_invL, [W.vector(base.shift - 1, c) for c in base.cols])
        self._lattices: dict = {}

    def __getstate__(self):
        return {"L": self.L}

    def __setstate__(self, state):
        self.__init__(state["L"])

    def lift(self, X: Subspace) -> Subspace:
        """tL + lift of a subspace of L/tL."""
        return self.residue.lift_subspace(X)

    def lattice(self, S: Subspace) -> LatticeRep:
        L = self._lattices.get(S)
        if L is None:
            L = self._lattices[S] = self.W.to_lattice(S, self.ring)
        return L

    def vertex(self, S: Subspace) -> HomothetyClass:
        return self.lattice(S).homothety_class()

    def subspace(self, L: LatticeRep) -> Subspace:
        return self.W.from_lattice(L)

    def sum(self, A: Subspace, B: Subspace) -> Subspace:
        return self.W.sum(A, B)

    def meet(self, A: Subspace, B: Subspace) -> Subspace:
        return self.W.intersect(A, B)

    def is_close(self, S_M: Subspace) -> bool:
        """[L : L∩M] = q and [L+M : L] = q (the normalized close position)."""
        if S_M == self.S_L:
            return False
        meet = self.meet(self.S_L, S_M)
        if self.S_L.dim - meet.dim != 1:
            return False
        return self.sum(self.S_L, S_M).dim - self.S_L.dim == 1


def local_frame(base: LatticeRep) -> LocalFrame:
    # equal lattices at different precisions need different frames
    return _local_frame(base, base.ring.N)


@lru_cache(maxsize=64)
def _local_frame(base: LatticeRep, precision: int) -> LocalFrame:
    return LocalFrame(base)


# ------------------------------------------------------------------ chambers


@dataclass(frozen=True)
class SLChamber:
    """Chamber through [L]: a complete flag of L/tL in the basis of L."""

    base: LatticeRep
    flag: tuple

    def chain(self) -> list[LatticeRep]:
        """tL ⊊ L_1 ⊊ ... ⊊ L_{n-1} ⊊ L."""
        return [self.base.scaled(1)] + [lift_from_reduction(self.base, S) for S in self.flag] + [self.base]

    def vertices(self) -> list[HomothetyClass]:
        return [self.base.homothety_class()] + [L.homothety_class() for L in self.chain()[1:-1]]


def chambers_containing_vertex(n: int, q: int, base=None, precision: int = DEFAULT_PRECISION) -> Iterator[SLChamber]:
    if n < 2:
        raise DomainError("n must be at least 2")
    L = _base_lattice(n, q, base, precision)
    for flag in enumerate_complete_flags(n, L.field):
        yield SLChamber(L, flag)


# ------------------------------------------------------------ close vertices


def _close_under(frame: LocalFrame, u_line: Subspace) -> list[Subspace]:
    F, W = frame.F, frame.W
    S_U = frame.upper.lift_subspace(u_line)
    found = []
    for hyper in enumerate_subspaces(frame.d, frame.d - 1, F):
        S_H = frame.lift(hyper)
        Q = QuotientSpace(F, S_H, S_U)
        for line in enumerate_subspaces(2, 1, F):
            S_M = Q.lift_subspace(line)
            if S_M == frame.S_L or not W.is_lattice(S_M):
                continue
            if frame.is_close(S_M):
                found.append(S_M)
    return found


def close_subspaces(frame: LocalFrame, workers: int = 1) -> list[Subspace]:
    """Window subspaces of the normalized representatives of all close vertices.

    Candidates M satisfy H ⊊ M ⊊ U with tL ⊆ H ⊊ L and L ⊊ U ⊆ t^-1 L of
    index q; every normalized close M arises this way with H = L∩M and
    U = L+M.
    """
    lines = list(enumerate_subspaces(frame.d, 1, frame.F))
    parts = pmap(partial(_close_under, frame), lines, workers)
    out = [S for part in parts for S in part]
    assert len(set(out)) == len(out)
    return sorted(out, key=lambda S: S.basis)


def close_vertices(n: int, q: int, base=None, precision: int = DEFAULT_PRECISION, workers: int = 1) -> list[HomothetyClass]:
    """All vertices close to the base vertex, sorted canonically."""
    if n < 3:
        raise DomainError("n must be at least 3")
    frame = local_frame(_base_lattice(n, q, base, precision))
    return sorted(frame.vertex(S) for S in close_subspaces(frame, workers))


# -------------------------------------------------------------- close pairs


@dataclass(frozen=True)
class ClosePair:
    """t = [L], t2 = [M] with [L : L∩M] = q = [L+M : L]."""

    L: LatticeRep
    M: LatticeRep

    @property
    def t(self) -> HomothetyClass:
        return self.L.homothety_class()

    @property
    def t2(self) -> HomothetyClass:
        return self.M.homothety_class()

    @property
    def n(self) -> int:
        return self.L.d


def make_close_pair(base, t2: HomothetyClass) -> ClosePair:
    """Scale t2's representative into the close position relative to ``base``."""
    L = base.rep if isinstance(base, HomothetyClass) else base
    if L.d < 3:
        raise DomainError("close pairs need n >= 3")
    rp = relative_position(L, t2.rep)
    norm = rp.normalized().exponents
    if norm != (0,) + (1,) * (L.d - 2) + (2,):
        raise NotClose(f"relative position {norm} is not that of a close pair")
    frame = local_frame(L)
    # scan nearby scalings; exactly one may land in close position
    hits = []
    for k in range(-rp.exponents[0] - 4, -rp.exponents[0] + 3):
        M = t2.rep.scaled(k)
        try:
            S_M = frame.subspace(M)
        except NotInWindow:
            continue
        if frame.W.is_lattice(S_M) and frame.is_close(S_M):
            hits.append(M)
    assert len(hits) == 1, "close representative is not unique"
    return ClosePair(L, hits[0])


def _pair_spaces(pair: ClosePair):
    frame = local_frame(pair.L)
    S_M = frame.subspace(pair.M)
    if not frame.is_close(S_M):
        raise NotClose("representatives are not in close position")
    low = frame.W.times_t(frame.sum(frame.S_L, S_M))
    high = frame.meet(frame.S_L, S_M)
    return frame, S_M, low, high


def middle_chains(pair: ClosePair) -> Iterator[tuple[Subspace, ...]]:
    """Chains t(L+M) = L_1 ⊊ L_2 ⊊ ... ⊊ L_{n-1} = L∩M, each step of index q."""
    frame, _, low, high = _pair_spaces(pair)
    Q = QuotientSpace(frame.F, low, high)
    for flag in enumerate_complete_flags(Q.dim, frame.F):
        lifts = tuple(Q.lift_subspace(X) for X in flag)
        if all(frame.W.is_lattice(S) for S in lifts):
            yield (low,) + lifts + (high,)


def gallery_multiplicity(pair: ClosePair) -> int:
    """Length-one galleries from a chamber on t to a chamber on t2."""
    return sum(1 for _ in middle_chains(pair))


def interpolating_chain(pair: ClosePair) -> tuple[list[LatticeRep], list[LatticeRep]]:
    """Chambers C ∋ [L], C' ∋ [M] sharing L_1, ..., L_{n-1}.

    Returns the chains tL ⊊ L_1 ⊊ ... ⊊ L_{n-1} ⊊ L and
    tM ⊊ L_1 ⊊ ... ⊊ L_{n-1} ⊊ M; every step is checked to have index q.
    """
    frame, S_M, _, _ = _pair_spaces(pair)
    mid = next(middle_chains(pair))
    W = frame.W
    for top in (frame.S_L, S_M):
        chain = (W.times_t(top),) + mid + (top,)
        for a, b in zip(chain, chain[1:]):
            assert b.dim - a.dim == 1 and frame.W.sum(a, b) == b, "chain step is not of index q"
    lat = [frame.lattice(S) for S in mid]
    return [pair.L.scaled(1)] + lat + [pair.L], [pair.M.scaled(1)] + lat + [pair.M]


def close_pairs(n: int, q: int, base=None, precision: int = DEFAULT_PRECISION, workers: int = 1) -> list[ClosePair]:
    frame = local_frame(_base_lattice(n, q, base, precision))
    return [ClosePair(frame.L, frame.lattice(S)) for S in close_subspaces(frame, workers)]


def sample_close_pairs(n: int, q: int, count: int, seed: int = 0, base=None, precision: int = DEFAULT_PRECISION, workers: int = 1) -> list[ClosePair]:
    pairs = close_pairs(n, q, base, precision, workers)
    rng = random.Random(seed)
    return rng.sample(pairs, min(count, len(pairs)))


# ------------------------------------------------------------- galleries


@dataclass(frozen=True)
class GalleryCount:
    chambers: int
    total: int
    histogram: dict = field(hash=False)

    @property
    def classes(self) -> int:
        return len(self.histogram)


def _opposite_completions(frame: LocalFrame, flag) -> list[Subspace]:
    """X with L_{n-1} ⊊ X ⊊ t^-1 L_1 (index q each way), X a lattice."""
    bottom = frame.lift(flag[0])
    top = frame.lift(flag[-1])
    Q = QuotientSpace(frame.F, top, frame.W.div_t(bottom))
    out = []
    for line in enumerate_subspaces(Q.dim, 1, frame.F):
        X = Q.lift_subspace(line)
        if frame.W.is_lattice(X):
            out.append(X)
    return out


def _galleries_chunk(frame: LocalFrame, flags):
    hist: Counter = Counter()
    thick: Counter = Counter()
    for flag in flags:
        comps = _opposite_completions(frame, flag)
        thick[len(comps)] += 1
        assert frame.S_L in comps
        for X in comps:
            if X != frame.S_L:
                hist[X] += 1
    return hist, thick


def _chunks(seq, size):
    return [seq[i:i + size] for i in range(0, len(seq), size)]


def count_galleries_from(n: int, q: int, base=None, precision: int = DEFAULT_PRECISION, workers: int = 1) -> GalleryCount:
    """Galleries C, C' with t ∈ C, t ∉ C', enumerated across the face opposite t.

    The histogram maps each vertex replacing t to the number of such
    galleries ending at it.
    """
    if n < 3:
        raise DomainError("n must be at least 3")
    frame = local_frame(_base_lattice(n, q, base, precision))
    flags = list(enumerate_complete_flags(n, frame.F))
    parts = pmap(partial(_galleries_chunk, frame), _chunks(flags, 256), workers)
    hist: Counter = Counter()
    for h, _ in parts:
        hist.update(h)
    named = {frame.vertex(S): c for S, c in sorted(hist.items(), key=lambda kv: kv[0].basis)}
    return GalleryCount(len(flags), sum(hist.values()), named)


def sl_thickness(n: int, q: int, base=None, precision: int = DEFAULT_PRECISION, workers: int = 1) -> Counter:
    """Histogram {chambers through a face: number of faces} over codim-one faces of chambers on t."""
    frame = local_frame(_base_lattice(n, q, base, precision))
    flags = list(enumerate_complete_flags(n, frame.F))
    through: Counter = Counter()
    for flag in flags:
        for i in range(len(flag)):
            through[(i, flag[:i] + flag[i + 1:])] += 1
    out = Counter(through.values())
    parts = pmap(partial(_galleries_chunk, frame), _chunks(flags, 256), workers)
    for _, thick in parts:
        out.update(thick)
    return out


# ------------------------------------------------------------ relation


@dataclass(frozen=True)
class RelationReport:
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


def verify_sl_relation(n: int, q: int, enumerate: bool = False, workers: int = 1) -> RelationReport:
    """q * r_n == r_{n-2} * omega_n, optionally with enumerated r_n and omega_n."""
    if n < 3:
        raise DomainError("n must be at least 3")
    r_n = complete_flag_count(n, q)
    r_prev = complete_flag_count(n - 2, q)
    om = omega_formula(n, q)
    r_enum = om_enum = None
    if enumerate:
        r_enum = sum(1 for _ in chambers_containing_vertex(n, q))
        om_enum = len(close_vertices(n, q, workers=workers))
    return RelationReport(n, q, r_n, r_prev, om, q * (r_enum or r_n), r_prev * (om_enum or om), om_enum, r_enum)


# ------------------------------------------------------------ close complex


def close_complex(pair: ClosePair) -> tuple[Complex, VertexMap]:
    """Vertices adjacent to t, t2, [L+M] and [L∩M], with the map onto A_{n-3}(k).

    Candidates are the vertices adjacent to [L∩M] (submodules strictly
    between t(L∩M) and L∩M); facets are the maximal pairwise-adjacent sets.
    The map sends a vertex with representative X, t(L+M) ⊆ X ⊆ L∩M, to
    X / t(L+M) inside (L∩M)/t(L+M) ≅ k^{n-2}.
    """
    frame, S_M, low, high = _pair_spaces(pair)
    F, W = frame.F, frame.W
    n = pair.n
    L_sum = frame.lattice(frame.sum(frame.S_L, S_M))
    L_meet = frame.lattice(high)
    M = pair.M
    Qc = QuotientSpace(F, W.times_t(high), high)
    others = [pair.L, M, L_sum]
    accepted: dict[HomothetyClass, Subspace] = {}
    for d in range(1, n):
        for Y in enumerate_subspaces(Qc.dim, d, F):
            X = Qc.lift_subspace(Y)
            if not W.is_lattice(X):
                continue
            lat = frame.lattice(X)
            if all(relative_position(o, lat).spread == 1 for o in others):
                accepted[lat.homothety_class()] = X
    verts = sorted(accepted)
    G = nx.Graph()
    G.add_nodes_from(range(len(verts)))
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            if relative_position(verts[i].rep, verts[j].rep).spread == 1:
                G.add_edge(i, j)
    facets = [frozenset(verts[i] for i in c) for c in nx.find_cliques(G)] if verts else []
    cx = Complex.from_facets(facets)
    target = build_A_building(n - 3, F.q)
    Q = QuotientSpace(F, low, high)
    mapping = {}
    for v in verts:
        X = accepted[v]
        if W.sum(low, X) == X and W.sum(X, high) == high:
            mapping[v] = Q.project_subspace(X)
    return cx, VertexMap(cx, target, mapping)
