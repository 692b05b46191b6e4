#!/usr/bin/env python3
"""
Symmetries of characteristic pairs.
Maximal symmetry group type, the class case analysis with its sphere-bundle
decomposition and blow-up/blow-down moves, construction trees, the lift of
class-preserving permutations to pair automorphisms, and admissible triples.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations, permutations, product
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .charpair import (
    CharacteristicPair,
    cohomology_model,
    facet_classes,
    normalize_omniorientation,
    pair_isomorphisms,
    require_valid,
    restrict_with_projection,
    validate_pair,
)
from .complex import (
    SimplicialComplex,
    VertexBijection,
    complex_isomorphisms,
    is_face,
    join_with_simplex_boundary,
    link_of_vertex,
    stellar_subdivision,
)
from .errors import (
    CaseMismatchError,
    DichotomyViolation,
    InternalError,
    NotAdmissibleError,
    NotAFaceError,
    NotAPartitionError,
    NotClassPreservingError,
    NotExceptionalError,
    RefinementError,
    SingletonClassError,
)
from .lattice import (
    IntVector,
    apply,
    column_matrix,
    frozen,
    matmul,
    unimodular_inverse,
)

logger = logging.getLogger("torsym.symmetry")

DEFAULT_EXCEPTIONAL_PREFIX = "E"


@dataclass(frozen=True)
class SymmetryGroupType:
    """Covering type of the maximal compact symmetry group: prod SU(k) x T^l."""
    su_sizes: Tuple[int, ...]
    torus_rank: int

    @property
    def rank(self) -> int:
        return sum(k - 1 for k in self.su_sizes) + self.torus_rank


def group_string(group: SymmetryGroupType) -> str:
    """Canonical rendering, e.g. "SU(3)", "SU(2) x T^1", "T^0"."""
    factors = [f"SU({k})" for k in group.su_sizes]
    if group.torus_rank or not factors:
        factors.append(f"T^{group.torus_rank}")
    return " x ".join(factors)


def maximal_group_type(pair: CharacteristicPair) -> SymmetryGroupType:
    normalized, _ = normalize_omniorientation(pair)
    partition = facet_classes(normalized)
    su_sizes = tuple(sorted((k for k in partition.sizes if k >= 2), reverse=True))
    torus_rank = pair.n - sum(k - 1 for k in su_sizes)
    if torus_rank < 0:
        raise InternalError(f"class sizes {partition.sizes} exceed rank {pair.n}")
    return SymmetryGroupType(su_sizes=su_sizes, torus_rank=torus_rank)


class CaseTag(Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"


@dataclass(frozen=True)
class ClassCase:
    """
    Case1: the class is not a face but every subset missing one facet is;
    witness is the chosen facet. Case2: the class is itself a face.
    """
    tag: CaseTag
    facets: Tuple[str, ...]
    chosen_facet: Optional[str] = None

    @property
    def face(self) -> Tuple[str, ...]:
        return self.facets if self.tag is CaseTag.CASE2 else ()


def _ordered(pair: CharacteristicPair, facets: Sequence[str]) -> Tuple[str, ...]:
    return pair.complex.ordered(facets)


def classify_class(pair: CharacteristicPair, facets: Sequence[str]) -> ClassCase:
    """
    Decide which induction case applies to a class.

    Raises:
        SingletonClassError: the class has fewer than two facets
        DichotomyViolation: the class is neither a face nor a minimal non-face
    """
    ordered = _ordered(pair, facets)
    if len(ordered) < 2:
        raise SingletonClassError(f"class {list(ordered)} is a singleton")
    if is_face(pair.complex, ordered):
        return ClassCase(tag=CaseTag.CASE2, facets=ordered)
    missing = [f for f in ordered if not is_face(pair.complex, set(ordered) - {f})]
    if missing:
        raise DichotomyViolation(
            f"class {list(ordered)} is not a face and dropping {missing[0]} does not give a face"
        )
    return ClassCase(tag=CaseTag.CASE1, facets=ordered, chosen_facet=ordered[0])


@dataclass(frozen=True)
class Decomposition:
    """
    Sphere-bundle splitting of a pair along a Case1 class.

    In the adapted basis the class facets other than the chosen one are the
    first unit vectors, the chosen facet is (-1, ..., -1, mu) and every other
    facet H is (0, ..., 0, lambda_N(H)).
    """
    class_facets: Tuple[str, ...]
    k: int
    chosen_facet: str
    reduced_pair: CharacteristicPair
    mu: IntVector
    projection: np.ndarray = field(repr=False)
    adapted_basis: np.ndarray = field(repr=False)
    parent_facets: Tuple[str, ...] = ()
    join_witness: Optional[VertexBijection] = field(default=None, repr=False)


def _block_coordinates(
    rest: Sequence[str], chosen: str, mu: IntVector, child: CharacteristicPair, facet: str
) -> IntVector:
    head = len(rest)
    if facet in rest:
        return tuple(1 if i == rest.index(facet) else 0 for i in range(head)) + (0,) * child.n
    if facet == chosen:
        return (-1,) * head + tuple(mu)
    return (0,) * head + child.lam(facet)


def decompose_case1(pair: CharacteristicPair, facets: Sequence[str]) -> Decomposition:
    """
    Split off the simplex factor of a Case1 class.

    The reduced pair is the restriction to the face spanned by the class minus
    its chosen facet; mu is the sum of the class vectors pushed to that pair's
    lattice. The join reconstruction and the block form are both verified.

    Raises:
        CaseMismatchError: the class is a face
    """
    case = classify_class(pair, facets)
    if case.tag is not CaseTag.CASE1:
        raise CaseMismatchError(f"class {list(case.facets)} is a face; blow it up instead")
    chosen = case.chosen_facet
    rest = tuple(f for f in case.facets if f != chosen)
    N, P = restrict_with_projection(pair, rest)
    total = tuple(sum(column) for column in zip(*(pair.lam(f) for f in case.facets)))
    mu = apply(P, total)

    joined = join_with_simplex_boundary(N.complex, len(case.facets), case.facets)
    if set(joined.vertices) == set(pair.facets) and joined.maximal_faces == pair.complex.maximal_faces:
        witness = VertexBijection.identity(pair.facets)
    else:
        found = complex_isomorphisms(pair.complex, joined)
        if not found:
            raise InternalError(f"complex does not split along class {list(case.facets)}")
        witness = found[0]

    # adapted basis: the rest vectors, then N's anchor face lifted so that P maps it to the identity
    anchor = N.complex.sorted_faces()[0]
    lifted = column_matrix([pair.lam(f) for f in anchor], pair.n)
    inverse_in_child = unimodular_inverse(column_matrix([N.lam(f) for f in anchor], N.n))
    basis = np.zeros((pair.n, pair.n), dtype=object)
    basis[:, :len(rest)] = column_matrix([pair.lam(f) for f in rest], pair.n)
    basis[:, len(rest):] = matmul(lifted, inverse_in_child)
    basis_inv = unimodular_inverse(basis)
    for facet in pair.facets:
        expected = _block_coordinates(rest, chosen, mu, N, facet)
        if apply(basis_inv, pair.lam(facet)) != expected:
            raise InternalError(f"facet {facet} breaks the block form of class {list(case.facets)}")

    logger.info(f"Split off class {list(case.facets)} at {chosen}: reduced rank {N.n}, mu {mu}")
    return Decomposition(
        class_facets=case.facets,
        k=len(case.facets),
        chosen_facet=chosen,
        reduced_pair=N,
        mu=mu,
        projection=P,
        adapted_basis=frozen(basis),
        parent_facets=pair.facets,
        join_witness=witness,
    )


def recompose(decomposition: Decomposition, child: CharacteristicPair) -> CharacteristicPair:
    """Rebuild the parent pair from a child with the reduced pair's facets."""
    rest = tuple(f for f in decomposition.class_facets if f != decomposition.chosen_facet)
    complex_ = join_with_simplex_boundary(child.complex, decomposition.k, decomposition.class_facets)
    order = decomposition.parent_facets or complex_.vertices
    vectors = tuple(
        apply(decomposition.adapted_basis,
              _block_coordinates(rest, decomposition.chosen_facet, decomposition.mu, child, facet))
        for facet in order
    )
    ordered = SimplicialComplex(tuple(order), complex_.maximal_faces)
    return CharacteristicPair(child.n + decomposition.k - 1, ordered, vectors)


def exceptional_label(pair: CharacteristicPair, prefix: str = DEFAULT_EXCEPTIONAL_PREFIX) -> str:
    """First of prefix, prefix2, prefix3, ... not naming a facet."""
    if prefix not in pair.facets:
        return prefix
    index = 2
    while f"{prefix}{index}" in pair.facets:
        index += 1
    return f"{prefix}{index}"


def blowup_face(pair: CharacteristicPair, sigma: Sequence[str], label: Optional[str] = None) -> CharacteristicPair:
    """
    Stellar blow-up at a face with at least two facets.

    The exceptional facet gets the vector minus the sum over sigma.
    """
    require_valid(pair)
    face = _ordered(pair, sigma)
    if len(face) < 2:
        raise CaseMismatchError(f"blow-up needs a face with at least two facets, got {list(face)}")
    if not is_face(pair.complex, face):
        raise NotAFaceError(f"{list(face)} is not a face")
    label = label or exceptional_label(pair)
    K = stellar_subdivision(pair.complex, face, label)
    exceptional = tuple(-sum(column) for column in zip(*(pair.lam(f) for f in face)))
    blown_up = CharacteristicPair(pair.n, K, pair.characteristic + (exceptional,))
    report = validate_pair(blown_up)
    if not report.ok:
        raise InternalError(f"blow-up at {list(face)} is invalid: {'; '.join(report.violations)}")
    logger.info(f"Blew up face {list(face)} with exceptional facet {label} = {exceptional}")
    return blown_up


def blowup_class(pair: CharacteristicPair, facets: Sequence[str], label: Optional[str] = None) -> CharacteristicPair:
    case = classify_class(pair, facets)
    if case.tag is not CaseTag.CASE2:
        raise CaseMismatchError(f"class {list(case.facets)} is not a face")
    return blowup_face(pair, case.facets, label)


def _blowdown_candidate(pair: CharacteristicPair, exceptional: str, sigma: Tuple[str, ...],
                        link: SimplicialComplex) -> Optional[CharacteristicPair]:
    total = tuple(sum(column) for column in zip(pair.lam(exceptional), *(pair.lam(f) for f in sigma)))
    if any(total):
        return None
    sigma_set = frozenset(sigma)
    if any(len(face & sigma_set) != len(sigma) - 1 for face in link.maximal_faces):
        return None
    residues = {face - sigma_set for face in link.maximal_faces}
    expected = {(sigma_set - {v}) | rho for v in sigma for rho in residues}
    if expected != set(link.maximal_faces):
        return None
    if is_face(pair.complex, sigma_set):
        return None
    faces = {face for face in pair.complex.maximal_faces if exceptional not in face}
    faces |= {sigma_set | rho for rho in residues}
    keep = [i for i, f in enumerate(pair.facets) if f != exceptional]
    K = SimplicialComplex(tuple(pair.facets[i] for i in keep), frozenset(faces))
    candidate = CharacteristicPair(pair.n, K, tuple(pair.characteristic[i] for i in keep))
    report = validate_pair(candidate)
    if not report.ok or not report.complex_report.is_closed:
        return None
    return candidate


def blowdown(pair: CharacteristicPair, exceptional: str, face: Optional[Sequence[str]] = None) -> CharacteristicPair:
    """
    Inverse of the stellar blow-up: contract an exceptional facet.

    The face sigma restored by the contraction is searched among subsets of the
    link's vertices (by size, then identifier order) unless given.

    Raises:
        NotExceptionalError: no face sigma makes the facet exceptional
    """
    require_valid(pair)
    link = link_of_vertex(pair.complex, exceptional)
    if face is not None:
        candidates = [_ordered(pair, face)]
    else:
        candidates = [
            sigma for size in range(2, len(link.vertices) + 1)
            for sigma in combinations(link.vertices, size)
        ]
    for sigma in candidates:
        result = _blowdown_candidate(pair, exceptional, tuple(sigma), link)
        if result is not None:
            logger.info(f"Blew down {exceptional} onto face {list(sigma)}")
            return result
    raise NotExceptionalError(f"{exceptional} is not the exceptional facet of a blow-up")


class StepKind(Enum):
    BLOW_UP = "BlowUp"
    SPLIT_OFF = "SplitOff"


@dataclass(frozen=True)
class ConstructionStep:
    kind: StepKind
    class_facets: Tuple[str, ...]
    exceptional: Optional[str] = None
    decomposition: Optional[Decomposition] = None

    @property
    def k(self) -> int:
        return len(self.class_facets)


@dataclass(frozen=True)
class ConstructionTree:
    """Steps from the normalized root down to a leaf with singleton classes."""
    root: CharacteristicPair
    steps: Tuple[ConstructionStep, ...]
    leaf: CharacteristicPair
    leaf_partition: Tuple[Tuple[str, ...], ...]

    @property
    def split_sizes(self) -> Tuple[int, ...]:
        return tuple(step.k for step in self.steps if step.kind is StepKind.SPLIT_OFF)


def _signed_blocks(pair: CharacteristicPair) -> List[frozenset]:
    """Facets grouped by dual class up to sign."""
    if not pair.facets:
        return []
    model = cohomology_model(pair)
    groups: Dict[Tuple[IntVector, IntVector], set] = {}
    for facet in pair.facets:
        dual = model.pd[facet]
        negative = model.negative(dual)
        groups.setdefault((min(dual, negative), max(dual, negative)), set()).add(facet)
    return [frozenset(members) for members in groups.values()]


def _check_refinement(carried: Sequence[Tuple[str, ...]], child: CharacteristicPair) -> None:
    own = _signed_blocks(child)
    for block in carried:
        if not any(set(block) <= group for group in own):
            raise RefinementError(f"carried block {list(block)} is split in the reduced pair")


def build_construction_tree(
    pair: CharacteristicPair, prefix: str = DEFAULT_EXCEPTIONAL_PREFIX
) -> ConstructionTree:
    """
    Reduce a pair by blow-ups and split-offs until every carried class is a singleton.

    The largest carried class is processed first (ties by its first facet);
    Case2 classes are blown up, Case1 classes are split off and the partition
    restricted to the reduced pair is carried along.

    Raises:
        RefinementError: a carried block is split by the reduced pair's classes
    """
    root, _ = normalize_omniorientation(pair)
    current = root
    carried: List[Tuple[str, ...]] = list(facet_classes(root).blocks())
    steps: List[ConstructionStep] = []
    while True:
        induced = [block for block in carried if len(block) >= 2]
        if not induced:
            break
        block = max(induced, key=lambda b: (len(b), -current.complex.index(b[0])))
        case = classify_class(current, block)
        if case.tag is CaseTag.CASE2:
            label = exceptional_label(current, prefix)
            current = blowup_face(current, case.facets, label)
            carried.append((label,))
            steps.append(ConstructionStep(StepKind.BLOW_UP, case.facets, exceptional=label))
            continue
        decomposition = decompose_case1(current, case.facets)
        current = decomposition.reduced_pair
        survivors = set(current.facets)
        carried = [tuple(f for f in b if f in survivors) for b in carried]
        carried = [b for b in carried if b]
        _check_refinement(carried, current)
        steps.append(ConstructionStep(StepKind.SPLIT_OFF, case.facets, decomposition=decomposition))
    logger.info(
        f"Construction tree: {len(steps)} steps, split sizes "
        f"{[s.k for s in steps if s.kind is StepKind.SPLIT_OFF]}, leaf rank {current.n}"
    )
    return ConstructionTree(root=root, steps=tuple(steps), leaf=current, leaf_partition=tuple(carried))


def replay_construction_tree(tree: ConstructionTree) -> CharacteristicPair:
    """Rebuild the root from the leaf by undoing every step in reverse."""
    current = tree.leaf
    for step in reversed(tree.steps):
        if step.kind is StepKind.SPLIT_OFF:
            current = recompose(step.decomposition, current)
        else:
            current = blowdown(current, step.exceptional, face=step.class_facets)
    return current


@dataclass(frozen=True)
class PairAutomorphism:
    """(f, g) with g lambda(F) = lambda(f F) for every facet F."""
    f: VertexBijection
    g: np.ndarray

    def compose(self, other: "PairAutomorphism") -> "PairAutomorphism":
        """self after other."""
        return PairAutomorphism(self.f.compose(other.f), frozen(matmul(self.g, other.g)))

    def key(self) -> Tuple:
        return (self.f.pairs, tuple(tuple(int(x) for x in row) for row in self.g))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PairAutomorphism) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())


Permutation = Union[Mapping[str, str], VertexBijection]


def _as_bijection(pair: CharacteristicPair, perm: Permutation) -> VertexBijection:
    mapping = perm.as_dict() if isinstance(perm, VertexBijection) else dict(perm)
    full = {facet: mapping.get(facet, facet) for facet in pair.facets}
    if sorted(full.values()) != sorted(pair.facets):
        raise NotClassPreservingError(f"{mapping} is not a permutation of the facets")
    return VertexBijection.from_mapping(full, order=pair.facets)


def phi(pair: CharacteristicPair, perm: Permutation) -> PairAutomorphism:
    """
    Lift a class-preserving facet permutation to the unique pair automorphism.

    Raises:
        NotClassPreservingError: perm moves a facet out of its class
        InternalError: the lift does not exist
    """
    partition = facet_classes(pair)
    f = _as_bijection(pair, perm)
    for cls in partition.classes:
        if f.image(cls.facets) != frozenset(cls.facets):
            raise NotClassPreservingError(f"permutation does not preserve class {list(cls.facets)}")
    for face in pair.complex.maximal_faces:
        if f.image(face) not in pair.complex.maximal_faces:
            raise InternalError(f"class-preserving permutation moves face {sorted(face)} off the complex")
    anchor = pair.complex.sorted_faces()[0]
    A_inv = unimodular_inverse(column_matrix([pair.lam(a) for a in anchor], pair.n))
    g = matmul(column_matrix([pair.lam(f(a)) for a in anchor], pair.n), A_inv)
    for facet in pair.facets:
        if apply(g, pair.lam(facet)) != pair.lam(f(facet)):
            raise InternalError(f"lift of the permutation fails at facet {facet}")
    return PairAutomorphism(f=f, g=frozen(g))


def class_preserving_permutations(pair: CharacteristicPair) -> Iterator[VertexBijection]:
    """Every permutation of the facets preserving each class, in a fixed order."""
    partition = facet_classes(pair)
    per_class = [list(permutations(cls.facets)) for cls in partition.classes]
    for choice in product(*per_class):
        mapping = {}
        for cls, image in zip(partition.classes, choice):
            mapping.update(zip(cls.facets, image))
        yield VertexBijection.from_mapping(mapping, order=pair.facets)


def aut_char_pair(pair: CharacteristicPair) -> List[PairAutomorphism]:
    require_valid(pair)
    automorphisms = [PairAutomorphism(f=f, g=g) for f, g in pair_isomorphisms(pair, pair)]
    logger.debug(f"Pair on {len(pair.facets)} facets has {len(automorphisms)} automorphisms")
    return automorphisms


def _check_partition(pair: CharacteristicPair, partition: Sequence[Sequence[str]]) -> List[Tuple[str, ...]]:
    blocks = [tuple(block) for block in partition]
    flat = [f for block in blocks for f in block]
    if len(flat) != len(set(flat)) or set(flat) != set(pair.facets) or any(not b for b in blocks):
        raise NotAPartitionError(f"{[list(b) for b in blocks]} is not a partition of {list(pair.facets)}")
    return blocks


def weyl_partition_admissible(pair: CharacteristicPair, partition: Sequence[Sequence[str]]) -> bool:
    """True iff every block with two or more facets lies inside one facet class."""
    blocks = _check_partition(pair, partition)
    normalized, _ = normalize_omniorientation(pair)
    classes = [set(cls.facets) for cls in facet_classes(normalized).classes]
    return all(any(set(block) <= cls for cls in classes) for block in blocks if len(block) >= 2)


@dataclass(frozen=True)
class AdmissibleTriple:
    """
    Reduced pair N with one mu vector and one optional marked facet of N
    per non-singleton block; marked facets come from Case2 blocks.
    """
    blocks: Tuple[Tuple[str, ...], ...]
    psi_data: Tuple[IntVector, ...]
    reduced_pair: CharacteristicPair
    marked: Tuple[Optional[str], ...]
    chosen: Tuple[str, ...] = ()


def extract_admissible_triple(
    pair: CharacteristicPair,
    orbit_partition: Sequence[Sequence[str]],
    prefix: str = DEFAULT_EXCEPTIONAL_PREFIX,
) -> AdmissibleTriple:
    """
    Reduce a pair along the non-singleton blocks of an orbit partition.

    Blocks that are faces are blown up first; the exceptional facet then
    survives into N as the marked facet. From each block the lowest facet is
    kept and the others are restricted to.

    Raises:
        NotAdmissibleError: some block crosses facet classes
    """
    if not weyl_partition_admissible(pair, orbit_partition):
        raise NotAdmissibleError(f"partition {[list(b) for b in orbit_partition]} crosses facet classes")
    current, _ = normalize_omniorientation(pair)
    blocks = [current.complex.ordered(b) for b in orbit_partition if len(b) >= 2]
    blocks.sort(key=lambda b: current.complex.index(b[0]))
    exceptional: List[Optional[str]] = []
    for block in blocks:
        case = classify_class(current, block)
        if case.tag is CaseTag.CASE2:
            label = exceptional_label(current, prefix)
            current = blowup_face(current, block, label)
            exceptional.append(label)
        else:
            exceptional.append(None)
    chosen = tuple(block[0] for block in blocks)
    face = [f for block in blocks for f in block[1:]]
    N, P = restrict_with_projection(current, face) if face else (current, None)
    psi_data = []
    for block in blocks:
        total = tuple(sum(column) for column in zip(*(current.lam(f) for f in block)))
        psi_data.append(apply(P, total) if P is not None else total)
    marked = []
    for label in exceptional:
        if label is not None and label not in N.facets:
            raise InternalError(f"exceptional facet {label} does not meet the reduced pair")
        marked.append(label)
    logger.info(f"Admissible triple: {len(blocks)} blocks, reduced rank {N.n}, marked {marked}")
    return AdmissibleTriple(
        blocks=tuple(blocks),
        psi_data=tuple(psi_data),
        reduced_pair=N,
        marked=tuple(marked),
        chosen=chosen,
    )


def triples_equivalent(t: AdmissibleTriple, u: AdmissibleTriple) -> bool:
    """
    True iff some pair isomorphism of the reduced pairs matches the blocks,
    carries marked facets to marked facets and mu to mu (up to sign for
    blocks of two facets).
    """
    if len(t.blocks) != len(u.blocks) or t.reduced_pair.n != u.reduced_pair.n:
        return False
    if sorted(len(b) for b in t.blocks) != sorted(len(b) for b in u.blocks):
        return False
    witnesses = list(pair_isomorphisms(t.reduced_pair, u.reduced_pair))
    for f, g in witnesses:
        mapping = f.as_dict()
        for order in permutations(range(len(u.blocks))):
            if _blocks_match(t, u, order, mapping, g):
                return True
    return False


def _blocks_match(t: AdmissibleTriple, u: AdmissibleTriple, order: Sequence[int],
                  mapping: Mapping[str, str], g: np.ndarray) -> bool:
    for i, j in enumerate(order):
        if len(t.blocks[i]) != len(u.blocks[j]):
            return False
        if (t.marked[i] is None) != (u.marked[j] is None):
            return False
        if t.marked[i] is not None and mapping[t.marked[i]] != u.marked[j]:
            return False
        image = apply(g, t.psi_data[i])
        if image == u.psi_data[j]:
            continue
        if len(t.blocks[i]) == 2 and image == tuple(-x for x in u.psi_data[j]):
            continue
        return False
    return True
