"""Finite spherical buildings as facet-listed simplicial complexes.

``build_A_building(m, q)`` is the flag complex of proper nontrivial subspaces
of k^{m+1}; ``build_C_building(m, q)`` is the flag complex of nontrivial
totally isotropic subspaces of a symplectic k^{2m}.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Any, Hashable, Iterable, Mapping

from .errors import EnumerationTooLarge, FaceNotInComplex
from .gfq import (
    as_field,
    complete_flag_count,
    enumerate_complete_flags,
    enumerate_isotropic_flags,
    isotropic_flag_count,
    standard_form,
)

MAX_FACETS = 200_000


def _label_key(x):
    key = getattr(x, "_key", None)
    if key is not None:
        return key
    basis = getattr(x, "basis", None)
    if basis is not None:
        return (len(basis), basis)
    return x


@dataclass(frozen=True)
class Complex:
    """Vertices are labels; facets are sorted tuples of vertex indices."""

    vertices: tuple
    facets: tuple

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable[Hashable]]) -> "Complex":
        """Build from facets given as label collections; labels are sorted canonically."""
        facets = [frozenset(f) for f in facets]
        labels = sorted({v for f in facets for v in f}, key=_label_key)
        pos = {v: i for i, v in enumerate(labels)}
        idx = sorted({tuple(sorted(pos[v] for v in f)) for f in facets})
        return cls(tuple(labels), tuple(idx))

    @cached_property
    def position(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def facet_sets(self) -> frozenset:
        return frozenset(frozenset(f) for f in self.facets)

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_facets(self) -> int:
        return len(self.facets)

    def facet_labels(self, f) -> frozenset:
        return frozenset(self.vertices[i] for i in f)

    def check(self) -> None:
        sets = [frozenset(f) for f in self.facets]
        for a, b in combinations(sets, 2):
            assert not (a < b or b < a), "facet contained in another"
        used = set().union(*sets) if sets else set()
        assert used == set(range(len(self.vertices))), "vertex outside every facet"

    def codim_one_faces(self) -> Counter:
        """Number of facets through each codimension-one face (as index tuples)."""
        cnt: Counter = Counter()
        for f in self.facets:
            for i in range(len(f)):
                cnt[f[:i] + f[i + 1:]] += 1
        return cnt


def _face_indices(face, C: Complex) -> frozenset:
    out = set()
    for v in face:
        if isinstance(v, int) and not isinstance(v, bool):
            if not 0 <= v < C.num_vertices:
                raise FaceNotInComplex(f"no vertex {v}")
            out.add(v)
        else:
            try:
                out.add(C.position[v])
            except KeyError:
                raise FaceNotInComplex("label is not a vertex") from None
    return frozenset(out)


def chambers_containing(face, C: Complex) -> int:
    """Number of facets of C containing ``face`` (vertex indices or labels)."""
    f = _face_indices(face, C)
    n = sum(1 for s in C.facet_sets if f <= s)
    if n == 0:
        raise FaceNotInComplex("face is not a simplex of the complex")
    return n


def build_A_building(m: int, q) -> Complex:
    """Flag complex of k^{m+1}; A_0 is the empty complex."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if m == 0:
        return Complex((), ())
    F = as_field(q)
    if complete_flag_count(m + 1, F.q) > MAX_FACETS:
        raise EnumerationTooLarge("too many flags")
    return Complex.from_facets(enumerate_complete_flags(m + 1, F))


def build_C_building(m: int, q) -> Complex:
    """Flag complex of nontrivial isotropic subspaces of (k^{2m}, standard form)."""
    if m < 1:
        raise ValueError("m must be at least 1")
    F = as_field(q)
    if isotropic_flag_count(m, F.q) > MAX_FACETS:
        raise EnumerationTooLarge("too many isotropic flags")
    return Complex.from_facets(enumerate_isotropic_flags(standard_form(m, F)))


@dataclass(frozen=True)
class VertexMap:
    domain: Complex
    codomain: Complex
    mapping: Mapping[Any, Any] = field(hash=False)


@dataclass(frozen=True)
class IsoResult:
    ok: bool
    reason: str = ""
    witness: Any = None

    def __bool__(self) -> bool:
        return self.ok


def verify_simplicial_iso(f: VertexMap) -> IsoResult:
    """Vertex bijection that carries facets exactly onto facets."""
    dom, cod, mp = f.domain, f.codomain, f.mapping
    for v in dom.vertices:
        if v not in mp:
            return IsoResult(False, "map is not total", v)
        if mp[v] not in cod.position:
            return IsoResult(False, "image is not a vertex of the codomain", v)
    seen: dict = {}
    for v in dom.vertices:
        w = mp[v]
        if w in seen:
            return IsoResult(False, "two vertices share an image", (seen[w], v))
        seen[w] = v
    if len(seen) != cod.num_vertices:
        missing = next(w for w in cod.vertices if w not in seen)
        return IsoResult(False, "map is not surjective", missing)
    images = set()
    for fa in dom.facets:
        img = frozenset(cod.position[mp[dom.vertices[i]]] for i in fa)
        if img not in cod.facet_sets:
            return IsoResult(False, "facet maps to a non-facet", dom.facet_labels(fa))
        images.add(img)
    if len(images) != cod.num_facets:
        extra = next(s for s in cod.facet_sets if s not in images)
        return IsoResult(False, "codomain facet not hit", frozenset(cod.vertices[i] for i in extra))
    return IsoResult(True)
