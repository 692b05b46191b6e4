#!/usr/bin/env python3
"""
Simplicial complexes dual to simple polytopes.
Vertices carry stable string identifiers; maximal faces are frozensets of
identifiers. Provides validation, face queries, links, joins, stellar
subdivision and a backtracking isomorphism search.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .errors import LabelCollisionError, UnknownVertexError

logger = logging.getLogger("torsym.complex")

Face = FrozenSet[str]


@dataclass(frozen=True)
class SimplicialComplex:
    """
    Pure simplicial complex given by its maximal faces.

    The rank-0 complex (dual of a point) has no vertices and the single
    maximal face frozenset().
    """
    vertices: Tuple[str, ...]
    maximal_faces: FrozenSet[Face]

    @classmethod
    def from_faces(cls, vertices: Sequence[str], faces: Iterable[Iterable[str]]) -> "SimplicialComplex":
        return cls(tuple(vertices), frozenset(frozenset(face) for face in faces))

    @property
    def rank(self) -> int:
        """Cardinality of the maximal faces (dimension + 1); -1 when impure."""
        sizes = {len(face) for face in self.maximal_faces}
        return sizes.pop() if len(sizes) == 1 else -1

    def index(self, vertex: str) -> int:
        try:
            return self.vertices.index(vertex)
        except ValueError:
            raise UnknownVertexError(f"unknown vertex {vertex!r}") from None

    def ordered(self, face: Iterable[str]) -> Tuple[str, ...]:
        """Face as a tuple in vertex (identifier) order."""
        return tuple(sorted(face, key=self.index))

    def sorted_faces(self) -> List[Tuple[str, ...]]:
        """Maximal faces as ordered tuples, sorted lexicographically by vertex index."""
        faces = [self.ordered(face) for face in self.maximal_faces]
        return sorted(faces, key=lambda f: tuple(self.index(v) for v in f))

    def degree(self, vertex: str) -> int:
        return sum(1 for face in self.maximal_faces if vertex in face)


@dataclass
class ComplexReport:
    """Structured result of validate_complex."""
    rank: int
    violations: List[str] = field(default_factory=list)
    is_closed: bool = True

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_complex(K: SimplicialComplex, n: int) -> ComplexReport:
    """
    Check purity at rank n, the Sperner condition and the ridge condition.

    Args:
        K: The complex
        n: Expected cardinality of maximal faces

    Returns:
        ComplexReport: violations (empty when valid) and whether K is closed
    """
    report = ComplexReport(rank=n)
    known = set(K.vertices)
    if len(known) != len(K.vertices):
        report.violations.append("duplicate vertex identifiers")
    if not K.maximal_faces:
        report.violations.append("no maximal faces")
    faces = sorted(K.maximal_faces, key=lambda f: (len(f), sorted(f)))
    for face in faces:
        unknown = sorted(face - known)
        if unknown:
            report.violations.append(f"face {sorted(face)} uses unknown vertices {unknown}")
        if len(face) != n:
            report.violations.append(f"face {sorted(face)} has {len(face)} vertices, expected {n} (not pure)")
    for a, b in combinations(faces, 2):
        if a < b or b < a:
            small, large = (a, b) if a < b else (b, a)
            report.violations.append(f"face {sorted(small)} is contained in {sorted(large)}")
    used = set().union(*faces) if faces else set()
    for vertex in K.vertices:
        if vertex not in used:
            report.violations.append(f"vertex {vertex!r} lies in no maximal face")
    ridges: Dict[Face, int] = {}
    for face in faces:
        if len(face) != n or n == 0:
            continue
        for vertex in face:
            ridge = face - {vertex}
            ridges[ridge] = ridges.get(ridge, 0) + 1
    for ridge, count in sorted(ridges.items(), key=lambda item: sorted(item[0])):
        if count > 2:
            report.violations.append(f"ridge {sorted(ridge)} lies in {count} maximal faces")
        if count != 2:
            report.is_closed = False
    if n == 1 and len(faces) != 2:
        report.is_closed = False
    return report


def is_face(K: SimplicialComplex, sigma: Iterable[str]) -> bool:
    """True iff sigma is contained in some maximal face."""
    sigma = frozenset(sigma)
    for vertex in sigma:
        K.index(vertex)
    return any(sigma <= face for face in K.maximal_faces)


def link_of_vertex(K: SimplicialComplex, v: str) -> SimplicialComplex:
    K.index(v)
    faces = [face - {v} for face in K.maximal_faces if v in face]
    used = set().union(*faces) if faces else set()
    vertices = tuple(w for w in K.vertices if w in used)
    return SimplicialComplex(vertices, frozenset(faces))


def simplex_boundary(labels: Sequence[str]) -> SimplicialComplex:
    """Boundary of the simplex on the given labels."""
    faces = [frozenset(labels) - {label} for label in labels]
    return SimplicialComplex(tuple(labels), frozenset(faces))


def join_with_simplex_boundary(K: SimplicialComplex, k: int, labels: Sequence[str]) -> SimplicialComplex:
    """
    Join of the boundary of a (k-1)-simplex on fresh labels with K.

    Raises:
        LabelCollisionError: a label repeats or already names a vertex of K
    """
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if len(labels) != k:
        raise ValueError(f"expected {k} labels, got {len(labels)}")
    clash = [label for label in labels if label in K.vertices]
    if clash or len(set(labels)) != len(labels):
        raise LabelCollisionError(f"labels {list(labels)} are not fresh for {list(K.vertices)}")
    boundary = simplex_boundary(labels)
    faces = [b | face for b in boundary.maximal_faces for face in K.maximal_faces]
    return SimplicialComplex(tuple(labels) + K.vertices, frozenset(faces))


def stellar_subdivision(K: SimplicialComplex, sigma: Iterable[str], label: str) -> SimplicialComplex:
    """
    Stellar subdivision of K at the face sigma with new vertex label.

    Faces containing sigma are replaced by label * boundary(sigma) * link(sigma).
    """
    sigma = frozenset(sigma)
    if label in K.vertices:
        raise LabelCollisionError(f"label {label!r} already names a vertex")
    faces = set()
    for face in K.maximal_faces:
        if sigma <= face:
            for vertex in sigma:
                faces.add((face - {vertex}) | {label})
        else:
            faces.add(face)
    return SimplicialComplex(K.vertices + (label,), frozenset(faces))


@dataclass(frozen=True)
class VertexBijection:
    """Bijection between vertex sets, stored as (source, target) pairs in source order."""
    pairs: Tuple[Tuple[str, str], ...]

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str], order: Optional[Sequence[str]] = None) -> "VertexBijection":
        keys = list(order) if order is not None else list(mapping)
        return cls(tuple((key, mapping[key]) for key in keys))

    @classmethod
    def identity(cls, vertices: Sequence[str]) -> "VertexBijection":
        return cls(tuple((v, v) for v in vertices))

    def as_dict(self) -> Dict[str, str]:
        return dict(self.pairs)

    def __call__(self, vertex: str) -> str:
        for source, target in self.pairs:
            if source == vertex:
                return target
        raise UnknownVertexError(f"{vertex!r} is not in the domain")

    def image(self, face: Iterable[str]) -> Face:
        mapping = self.as_dict()
        return frozenset(mapping[v] for v in face)

    def compose(self, other: "VertexBijection") -> "VertexBijection":
        """self after other."""
        mine = self.as_dict()
        return VertexBijection(tuple((source, mine[target]) for source, target in other.pairs))

    def inverse(self, order: Optional[Sequence[str]] = None) -> "VertexBijection":
        flipped = {target: source for source, target in self.pairs}
        keys = list(order) if order is not None else [target for _, target in self.pairs]
        return VertexBijection(tuple((key, flipped[key]) for key in keys))

    def is_identity(self) -> bool:
        return all(source == target for source, target in self.pairs)


def _search_order(K: SimplicialComplex) -> List[str]:
    """Vertex order for backtracking: each next vertex adjacent to as many placed ones as possible."""
    adjacency = {v: set() for v in K.vertices}
    for face in K.maximal_faces:
        for v in face:
            adjacency[v] |= face - {v}
    order: List[str] = []
    remaining = list(K.vertices)
    while remaining:
        placed = set(order)
        best = max(remaining, key=lambda v: (len(adjacency[v] & placed), -K.index(v)))
        order.append(best)
        remaining.remove(best)
    return order


def complex_isomorphisms(K: SimplicialComplex, L: SimplicialComplex) -> List[VertexBijection]:
    """
    All vertex bijections K -> L carrying maximal faces onto maximal faces.

    Backtracking over candidates refined by degree and by edge adjacency with
    already-placed vertices. Output order is deterministic: sorted by the image
    tuple in K's vertex order.
    """
    if (len(K.vertices) != len(L.vertices)
            or len(K.maximal_faces) != len(L.maximal_faces)
            or K.rank != L.rank):
        return []

    def edge_set(C: SimplicialComplex) -> set:
        edges = set()
        for face in C.maximal_faces:
            for a, b in combinations(face, 2):
                edges.add(frozenset((a, b)))
        return edges

    K_edges, L_edges = edge_set(K), edge_set(L)
    K_degree = {v: K.degree(v) for v in K.vertices}
    L_degree = {v: L.degree(v) for v in L.vertices}
    order = _search_order(K)
    results: List[VertexBijection] = []
    mapping: Dict[str, str] = {}
    used: set = set()

    def consistent(v: str, w: str) -> bool:
        if K_degree[v] != L_degree[w]:
            return False
        for u, x in mapping.items():
            if (frozenset((u, v)) in K_edges) != (frozenset((x, w)) in L_edges):
                return False
        return True

    def extend(position: int) -> Iterator[None]:
        if position == len(order):
            if all(frozenset(mapping[v] for v in face) in L.maximal_faces for face in K.maximal_faces):
                yield None
            return
        v = order[position]
        for w in L.vertices:
            if w in used or not consistent(v, w):
                continue
            mapping[v] = w
            used.add(w)
            yield from extend(position + 1)
            del mapping[v]
            used.discard(w)

    for _ in extend(0):
        results.append(VertexBijection.from_mapping(dict(mapping), order=K.vertices))
    results.sort(key=lambda f: tuple(L.index(target) for _, target in f.pairs))
    logger.debug(f"Found {len(results)} isomorphisms between complexes on {len(K.vertices)} vertices")
    return results
