#!/usr/bin/env python3
"""
Characteristic pairs (K, lambda): validation, the additive degree-two
cohomology model, omniorientation normalization, facet classes, face
restrictions, pair isomorphisms and construction from Delzant inequalities.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import gcd
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import Matrix, Rational

from .complex import (
    ComplexReport,
    SimplicialComplex,
    VertexBijection,
    complex_isomorphisms,
    is_face,
    link_of_vertex,
    validate_complex,
)
from .errors import (
    InternalError,
    InvalidPairError,
    NotAFaceError,
    NotNormalizedError,
    NotPrimitiveError,
    NotSimpleError,
    RankError,
    RankMismatchError,
    RedundantFacetError,
    UnboundedError,
    ZeroDualError,
)
from .lattice import (
    AbelianGroupPresentation,
    IntVector,
    apply,
    cokernel_presentation,
    column_matrix,
    frozen,
    identity,
    int_matrix,
    is_part_of_basis,
    matmul,
    quotient_by_primitive,
    unimodular_inverse,
)

logger = logging.getLogger("torsym.charpair")


@dataclass(frozen=True)
class CharacteristicPair:
    """
    A simplicial complex of rank n with a lattice vector for every vertex.

    Vertices of the complex are the facets of the dual polytope; the
    characteristic vectors are stored aligned with complex.vertices.
    """
    n: int
    complex: SimplicialComplex
    characteristic: Tuple[IntVector, ...]

    @classmethod
    def build(
        cls,
        n: int,
        facets: Sequence[str],
        max_simplices: Sequence[Sequence[str]],
        characteristic: Mapping[str, Sequence[int]],
    ) -> "CharacteristicPair":
        K = SimplicialComplex.from_faces(facets, max_simplices)
        missing = [facet for facet in facets if facet not in characteristic]
        if missing:
            raise InvalidPairError(f"no characteristic vector for {missing}")
        vectors = tuple(tuple(int(x) for x in characteristic[facet]) for facet in facets)
        return cls(n, K, vectors)

    @property
    def facets(self) -> Tuple[str, ...]:
        return self.complex.vertices

    def lam(self, facet: str) -> IntVector:
        return self.characteristic[self.complex.index(facet)]

    def as_mapping(self) -> Dict[str, IntVector]:
        return dict(zip(self.facets, self.characteristic))

    def replace_vectors(self, vectors: Mapping[str, Sequence[int]]) -> "CharacteristicPair":
        updated = self.as_mapping()
        updated.update({facet: tuple(int(x) for x in v) for facet, v in vectors.items()})
        return CharacteristicPair(self.n, self.complex, tuple(updated[f] for f in self.facets))


@dataclass
class PairReport:
    """Validation result: complex checks plus the nonsingular-face condition."""
    rank: int
    complex_report: ComplexReport
    singular_faces: List[Tuple[str, ...]] = field(default_factory=list)
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_pair(pair: CharacteristicPair) -> PairReport:
    """
    Check the complex and that the vectors of every maximal face extend to a
    basis of Z^n.

    Args:
        pair: The characteristic pair

    Returns:
        PairReport: with the offending faces listed
    """
    complex_report = validate_complex(pair.complex, pair.n)
    report = PairReport(rank=pair.n, complex_report=complex_report)
    report.violations.extend(complex_report.violations)
    wrong_length = [f for f, v in zip(pair.facets, pair.characteristic) if len(v) != pair.n]
    for facet in wrong_length:
        report.violations.append(f"vector of {facet} has length {len(pair.lam(facet))}, expected {pair.n}")
    if wrong_length or complex_report.violations:
        return report
    for face in pair.complex.sorted_faces():
        if not is_part_of_basis([pair.lam(f) for f in face], pair.n):
            report.singular_faces.append(face)
            report.violations.append(f"face {list(face)} is singular: vectors are not part of a basis")
    return report


def require_valid(pair: CharacteristicPair) -> None:
    report = validate_pair(pair)
    if not report.ok:
        raise InvalidPairError("; ".join(report.violations))


@dataclass(frozen=True)
class CohomologyModel:
    """Degree-two cohomology as a quotient of the free group on the facets."""
    presentation: AbelianGroupPresentation
    pd: Dict[str, IntVector]

    def negative(self, vector: Sequence[int]) -> IntVector:
        return self.presentation.canonical(tuple(-x for x in vector))

    def is_zero(self, vector: Sequence[int]) -> bool:
        return not any(vector)


def cohomology_model(pair: CharacteristicPair) -> CohomologyModel:
    """
    Relations: for each dual basis vector v_j the sum over facets of
    <v_j, lambda(F)> times the generator of F vanishes.
    """
    require_valid(pair)
    m = len(pair.facets)
    relations = int_matrix([[pair.characteristic[i][j] for i in range(m)] for j in range(pair.n)], cols=m)
    presentation = cokernel_presentation(relations)
    if presentation.free_rank != m - pair.n:
        raise InternalError(f"free rank {presentation.free_rank} differs from {m - pair.n}")
    torsion = presentation.torsion_coefficients()
    if torsion:
        raise InternalError(f"cohomology model has torsion {torsion}")
    pd = {facet: presentation.generator(i) for i, facet in enumerate(pair.facets)}
    return CohomologyModel(presentation=presentation, pd=pd)


@dataclass(frozen=True)
class OmniOrientationSigns:
    """A sign per facet; -1 negates that facet's characteristic vector."""
    signs: Tuple[Tuple[str, int], ...]

    @classmethod
    def trivial(cls, facets: Sequence[str]) -> "OmniOrientationSigns":
        return cls(tuple((facet, 1) for facet in facets))

    def sign(self, facet: str) -> int:
        return dict(self.signs)[facet]

    @property
    def flipped(self) -> Tuple[str, ...]:
        return tuple(facet for facet, s in self.signs if s < 0)

    def is_identity(self) -> bool:
        return not self.flipped


def with_signs(pair: CharacteristicPair, signs: OmniOrientationSigns) -> CharacteristicPair:
    table = dict(signs.signs)
    vectors = tuple(
        tuple(table.get(facet, 1) * x for x in v) for facet, v in zip(pair.facets, pair.characteristic)
    )
    return CharacteristicPair(pair.n, pair.complex, vectors)


def _positive_leading(vector: IntVector) -> bool:
    for x in vector:
        if x:
            return x > 0
    return False


def normalize_omniorientation(pair: CharacteristicPair) -> Tuple[CharacteristicPair, OmniOrientationSigns]:
    """
    Negate characteristic vectors so that every dual class is positively leading.

    A facet is flipped exactly when its dual's first nonzero coordinate is
    negative. Flipping a facet negates its own dual and leaves the others in
    place, so duals equal up to sign become equal and a second pass is a no-op.

    Raises:
        ZeroDualError: some facet has vanishing dual class
        InternalError: the flipped pair still has a negatively leading dual
    """
    model = cohomology_model(pair)
    for facet in pair.facets:
        if model.is_zero(model.pd[facet]):
            raise ZeroDualError(f"dual class of {facet} vanishes")
    flips = {facet for facet in pair.facets if not _positive_leading(model.pd[facet])}
    signs = OmniOrientationSigns(tuple((facet, -1 if facet in flips else 1) for facet in pair.facets))
    if signs.is_identity():
        return pair, signs
    normalized = with_signs(pair, signs)
    check = cohomology_model(normalized)
    stray = [facet for facet in normalized.facets if not _positive_leading(check.pd[facet])]
    if stray:
        raise InternalError(f"normalization left negatively leading duals at {stray}")
    logger.info(f"Normalized omniorientation by flipping {list(signs.flipped)}")
    return normalized, signs


def is_normalized(pair: CharacteristicPair) -> bool:
    try:
        model = cohomology_model(pair)
    except InvalidPairError:
        return False
    return all(_positive_leading(model.pd[facet]) for facet in pair.facets)


@dataclass(frozen=True)
class FacetClass:
    label: IntVector
    facets: Tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.facets)


@dataclass(frozen=True)
class FacetClassPartition:
    """Facets grouped by equal dual class, classes ordered by their first facet."""
    classes: Tuple[FacetClass, ...]

    def class_of(self, facet: str) -> FacetClass:
        for cls in self.classes:
            if facet in cls.facets:
                return cls
        raise KeyError(facet)

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(cls.size for cls in self.classes)

    def blocks(self) -> Tuple[Tuple[str, ...], ...]:
        return tuple(cls.facets for cls in self.classes)


def facet_classes(pair: CharacteristicPair) -> FacetClassPartition:
    """
    Partition the facets of a normalized pair by exact equality of duals.

    Raises:
        NotNormalizedError: two facets have duals equal only up to sign
    """
    model = cohomology_model(pair)
    by_dual: Dict[IntVector, List[str]] = {}
    for facet in pair.facets:
        by_dual.setdefault(model.pd[facet], []).append(facet)
    for dual, members in by_dual.items():
        negative = model.negative(dual)
        if negative != dual and negative in by_dual:
            raise NotNormalizedError(
                f"facets {members} and {by_dual[negative]} have opposite duals {dual} and {negative}"
            )
    classes = tuple(FacetClass(label=dual, facets=tuple(members)) for dual, members in by_dual.items())
    return FacetClassPartition(classes)


@dataclass
class VertexBoundReport:
    """Per fixed point, each class meets the vertex in all or all but one facet."""
    violations: List[Tuple[Tuple[str, ...], Tuple[str, ...]]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_vertex_class_bound(pair: CharacteristicPair) -> VertexBoundReport:
    normalized, _ = normalize_omniorientation(pair)
    partition = facet_classes(normalized)
    report = VertexBoundReport()
    for face in pair.complex.sorted_faces():
        for cls in partition.classes:
            meet = len(set(face) & set(cls.facets))
            if meet not in (cls.size - 1, cls.size):
                report.violations.append((face, cls.facets))
    if report.violations:
        logger.warning(f"Vertex class bound fails at {len(report.violations)} (vertex, class) pairs")
    return report


def _restrict_once(pair: CharacteristicPair, facet: str) -> Tuple[CharacteristicPair, np.ndarray]:
    Q = quotient_by_primitive(pair.lam(facet))
    link = link_of_vertex(pair.complex, facet)
    vectors = tuple(apply(Q, pair.lam(g)) for g in link.vertices)
    return CharacteristicPair(pair.n - 1, link, vectors), Q


def restrict_to_facet(pair: CharacteristicPair, facet: str) -> CharacteristicPair:
    """
    The pair of the characteristic submanifold over a facet.

    The complex is the link of the facet; vectors are pushed to the quotient
    lattice Z^n / <lambda(facet)>.
    """
    require_valid(pair)
    restricted, _ = _restrict_once(pair, facet)
    report = validate_pair(restricted)
    if not report.ok:
        raise InvalidPairError(f"restriction to {facet} is invalid: {'; '.join(report.violations)}")
    return restricted


def restrict_with_projection(
    pair: CharacteristicPair, sigma: Sequence[str]
) -> Tuple[CharacteristicPair, np.ndarray]:
    """
    Restrict to a face and return the composite lattice projection.

    Returns:
        Tuple: the restricted pair and the (n - |sigma|) x n projection matrix

    Raises:
        NotAFaceError: sigma is not a face of the complex
    """
    require_valid(pair)
    face = frozenset(sigma)
    if not is_face(pair.complex, face):
        raise NotAFaceError(f"{sorted(face)} is not a face")
    projection = identity(pair.n)
    current = pair
    for facet in pair.complex.ordered(face):
        current, Q = _restrict_once(current, facet)
        projection = matmul(Q, projection)
    report = validate_pair(current)
    if not report.ok:
        raise InvalidPairError(f"restriction to {sorted(face)} is invalid: {'; '.join(report.violations)}")
    return current, frozen(projection)


def restrict_to_face(pair: CharacteristicPair, sigma: Sequence[str]) -> CharacteristicPair:
    if not sigma:
        require_valid(pair)
        return pair
    restricted, _ = restrict_with_projection(pair, sigma)
    return restricted


def characteristic_matrix(
    pair: CharacteristicPair, face: Sequence[str] = ()
) -> Tuple[Tuple[str, ...], np.ndarray]:
    """
    Characteristic vectors written in the basis of a fixed point.

    The basis is given by the vectors of the first maximal face containing
    `face`, with the facets of `face` first. Columns follow pair.facets, so
    the basis facets carry identity columns.

    Returns:
        Tuple: the basis facets and the n x m matrix
    """
    wanted = frozenset(face)
    for maximal in pair.complex.sorted_faces():
        if wanted <= frozenset(maximal):
            break
    else:
        raise NotAFaceError(f"{sorted(wanted)} is not a face")
    leading = pair.complex.ordered(wanted)
    basis = leading + tuple(f for f in maximal if f not in wanted)
    B = column_matrix([pair.lam(f) for f in basis], pair.n)
    matrix = matmul(unimodular_inverse(B), column_matrix(list(pair.characteristic), pair.n))
    return basis, frozen(matrix)


def pair_isomorphisms(
    p: CharacteristicPair, q: CharacteristicPair, signed: bool = False
) -> Iterator[Tuple[VertexBijection, np.ndarray]]:
    """
    All witnesses (f, g) with g lambda_p(F) = lambda_q(f F) for every facet.

    With signed=True the equation only has to hold up to a sign per facet,
    which compares unoriented pairs.
    """
    if p.n != q.n:
        raise RankMismatchError(f"ranks {p.n} and {q.n} differ")
    anchor = p.complex.sorted_faces()[0]
    A_inv = unimodular_inverse(column_matrix([p.lam(f) for f in anchor], p.n))
    sign_choices = list(product((1, -1), repeat=len(anchor))) if signed else [(1,) * len(anchor)]
    for f in complex_isomorphisms(p.complex, q.complex):
        mapping = f.as_dict()
        for choice in sign_choices:
            images = [tuple(s * x for x in q.lam(mapping[a])) for s, a in zip(choice, anchor)]
            g = matmul(column_matrix(images, p.n), A_inv)
            if _intertwines(p, q, mapping, g, signed):
                yield f, frozen(g)


def _intertwines(p: CharacteristicPair, q: CharacteristicPair, mapping: Mapping[str, str],
                 g: np.ndarray, signed: bool) -> bool:
    for facet in p.facets:
        image = apply(g, p.lam(facet))
        target = q.lam(mapping[facet])
        if image == target:
            continue
        if signed and image == tuple(-x for x in target):
            continue
        return False
    return True


def pair_isomorphic(
    p: CharacteristicPair, q: CharacteristicPair, signed: bool = False
) -> Optional[Tuple[VertexBijection, np.ndarray]]:
    for witness in pair_isomorphisms(p, q, signed=signed):
        return witness
    return None


Offset = Union[int, str, Fraction, Rational]


def _as_rational(offset: Offset) -> Rational:
    if isinstance(offset, Fraction):
        return Rational(offset.numerator, offset.denominator)
    if isinstance(offset, str):
        return Rational(offset.strip())
    return Rational(offset)


def delzant_pair(inequalities: Sequence[Tuple[Sequence[int], Offset]]) -> CharacteristicPair:
    """
    Build the pair of the polytope {x : <u_i, x> <= b_i} with outward normals u_i.

    Vertices are enumerated exactly over the rationals from every n-subset of
    inequalities with independent normals. Facets are named F1, F2, ... in
    input order.

    Args:
        inequalities: (normal, offset) pairs; offsets may be ints, fractions or "p/q" strings

    Returns:
        CharacteristicPair: the valid pair of the polytope

    Raises:
        NotPrimitiveError: a normal is not primitive
        UnboundedError: no vertices, or an edge leaves the polytope forever
        NotSimpleError: a vertex lies on more than n facets
        RedundantFacetError: an inequality does not define a facet
        InvalidPairError: the polytope is simple but not Delzant
    """
    if not inequalities:
        raise UnboundedError("no inequalities")
    n = len(inequalities[0][0])
    if n == 0:
        raise RankError("normals must have positive length")
    normals = []
    for normal, _ in inequalities:
        if len(normal) != n:
            raise RankError(f"normal {tuple(normal)} has length {len(normal)}, expected {n}")
        g = 0
        for x in normal:
            g = gcd(g, int(x))
        if g != 1:
            raise NotPrimitiveError(f"normal {tuple(normal)} is not primitive")
        normals.append(tuple(int(x) for x in normal))
    offsets = [_as_rational(b) for _, b in inequalities]
    m = len(normals)
    seen = set()
    for u, b in zip(normals, offsets):
        if (u, b) in seen:
            raise RedundantFacetError(f"inequality {u} <= {b} is repeated")
        seen.add((u, b))

    def value(i: int, x: Matrix) -> Rational:
        return sum((normals[i][k] * x[k] for k in range(n)), Rational(0))

    vertices: Dict[Tuple[Rational, ...], Tuple[int, ...]] = {}
    for subset in combinations(range(m), n):
        A = Matrix([list(normals[i]) for i in subset])
        if A.det() == 0:
            continue
        x = A.inv() * Matrix([offsets[i] for i in subset])
        if all(value(i, x) <= offsets[i] for i in range(m)):
            point = tuple(x[k] for k in range(n))
            if point not in vertices:
                vertices[point] = tuple(i for i in range(m) if value(i, x) == offsets[i])
    if not vertices:
        raise UnboundedError("the inequalities have no vertices (empty or unbounded region)")
    logger.debug(f"Enumerated {len(vertices)} vertices from {m} inequalities in dimension {n}")

    for point, tight in vertices.items():
        if len(tight) != n:
            raise NotSimpleError(f"vertex {[str(c) for c in point]} lies on {len(tight)} facets, expected {n}")
        A_inv = Matrix([list(normals[i]) for i in tight]).inv()
        for k in range(n):
            direction = -A_inv[:, k]
            blocked = any(
                sum((normals[i][j] * direction[j] for j in range(n)), Rational(0)) > 0
                for i in range(m) if i not in tight
            )
            if not blocked:
                raise UnboundedError(f"edge from vertex {[str(c) for c in point]} is unbounded")

    names = [f"F{i + 1}" for i in range(m)]
    for i in range(m):
        on_facet = [Matrix(point) for point, tight in vertices.items() if i in tight]
        if not on_facet:
            raise RedundantFacetError(f"inequality {names[i]} touches no vertex")
        differences = [point - on_facet[0] for point in on_facet[1:]]
        rank = Matrix.hstack(*differences).rank() if differences else 0
        if rank != n - 1:
            raise RedundantFacetError(f"inequality {names[i]} defines a face of dimension {rank}, not a facet")

    faces = [[names[i] for i in tight] for tight in vertices.values()]
    pair = CharacteristicPair.build(n, names, faces, dict(zip(names, normals)))
    report = validate_pair(pair)
    if not report.ok:
        raise InvalidPairError(f"polytope is not Delzant: {'; '.join(report.violations)}")
    logger.info(f"Built Delzant pair with {m} facets and {len(vertices)} vertices")
    return pair


@dataclass
class SignTheoremReport:
    """Facets whose duals are negatives of each other without being equal."""
    violations: List[Tuple[str, str, IntVector, IntVector]] = field(default_factory=list)
    classes: Tuple[Tuple[str, ...], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def check_delzant_sign_theorem(pair: CharacteristicPair) -> SignTheoremReport:
    """
    With outward normals as omniorientation, duals of a Delzant polytope's
    facets are never related by -1 unless equal.
    """
    model = cohomology_model(pair)
    report = SignTheoremReport()
    for a, b in combinations(pair.facets, 2):
        pa, pb = model.pd[a], model.pd[b]
        if pa != pb and pa == model.negative(pb):
            report.violations.append((a, b, pa, pb))
    by_dual: Dict[IntVector, List[str]] = {}
    for facet in pair.facets:
        by_dual.setdefault(model.pd[facet], []).append(facet)
    report.classes = tuple(tuple(members) for members in by_dual.values())
    if report.violations:
        logger.error(f"Sign theorem violated by {[(a, b) for a, b, _, _ in report.violations]}")
    return report
