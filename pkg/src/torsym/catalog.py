#!/usr/bin/env python3
"""
Catalog of standard characteristic pairs and seeded random generators.
"""

import logging
import random
import string
from dataclasses import dataclass
from itertools import combinations, product
from math import gcd
from typing import Callable, Dict, List, Sequence, Tuple

from .charpair import CharacteristicPair, validate_pair
from .errors import CatalogParameterError, UnknownCatalogError
from .lattice import IntVector

logger = logging.getLogger("torsym.catalog")

Inequality = Tuple[IntVector, int]


def _unit(n: int, i: int) -> IntVector:
    return tuple(1 if j == i else 0 for j in range(n))


def _checked(pair: CharacteristicPair, what: str) -> CharacteristicPair:
    report = validate_pair(pair)
    if not report.ok:
        raise CatalogParameterError(f"{what} does not give a valid pair: {'; '.join(report.violations)}")
    return pair


def cp(n: int) -> CharacteristicPair:
    """Complex projective space: boundary of the n-simplex, e_1..e_n and -(1,...,1)."""
    if n < 1:
        raise CatalogParameterError(f"cp needs n >= 1, got {n}")
    facets = [f"F{i + 1}" for i in range(n + 1)]
    vectors = {facets[i]: _unit(n, i) for i in range(n)}
    vectors[facets[n]] = (-1,) * n
    return CharacteristicPair.build(n, facets, combinations(facets, n), vectors)


def product_pair(*factors: CharacteristicPair) -> CharacteristicPair:
    """
    Product of pairs. Facets of the i-th factor are renamed with the i-th
    capital letter followed by their position, e.g. A1, A2, B1.
    """
    if not factors:
        raise CatalogParameterError("product needs at least one factor")
    if len(factors) > len(string.ascii_uppercase):
        raise CatalogParameterError(f"product supports at most {len(string.ascii_uppercase)} factors")
    n = sum(p.n for p in factors)
    facets: List[str] = []
    vectors: Dict[str, IntVector] = {}
    renamed_faces = []
    offset = 0
    for prefix, pair in zip(string.ascii_uppercase, factors):
        names = {facet: f"{prefix}{i + 1}" for i, facet in enumerate(pair.facets)}
        facets.extend(names[f] for f in pair.facets)
        for facet in pair.facets:
            vectors[names[facet]] = (0,) * offset + pair.lam(facet) + (0,) * (n - offset - pair.n)
        renamed_faces.append([[names[f] for f in face] for face in pair.complex.maximal_faces])
        offset += pair.n
    faces = [[f for part in choice for f in part] for choice in product(*renamed_faces)]
    return CharacteristicPair.build(n, facets, faces, vectors)


def hirzebruch(a: int) -> CharacteristicPair:
    facets = ["F1", "F2", "F3", "F4"]
    faces = [("F1", "F2"), ("F2", "F3"), ("F3", "F4"), ("F1", "F4")]
    vectors = {"F1": (1, 0), "F2": (0, 1), "F3": (-1, a), "F4": (0, -1)}
    return CharacteristicPair.build(2, facets, faces, vectors)


def bott_tower(n: int, twists: Sequence[int] = ()) -> CharacteristicPair:
    """
    Bott tower over the n-cube.

    Args:
        n: Number of stages
        twists: The entries a_ij (i < j) of the upper-triangular twist matrix, row by row

    Returns:
        CharacteristicPair: facets X1..Xn, Y1..Yn with X_i = e_i and
        Y_i = -e_i + sum over j > i of a_ij e_j
    """
    if n < 1:
        raise CatalogParameterError(f"bott needs n >= 1, got {n}")
    expected = n * (n - 1) // 2
    twists = list(twists) or [0] * expected
    if len(twists) != expected:
        raise CatalogParameterError(f"bott {n} needs {expected} twist entries, got {len(twists)}")
    entries = iter(twists)
    a = {(i, j): next(entries) for i in range(n) for j in range(i + 1, n)}
    xs = [f"X{i + 1}" for i in range(n)]
    ys = [f"Y{i + 1}" for i in range(n)]
    vectors = {}
    for i in range(n):
        vectors[xs[i]] = _unit(n, i)
        vectors[ys[i]] = tuple(-1 if j == i else (a[(i, j)] if j > i else 0) for j in range(n))
    faces = list(product(*zip(xs, ys)))
    return CharacteristicPair.build(n, xs + ys, faces, vectors)


def polygon(normals: Sequence[Sequence[int]]) -> CharacteristicPair:
    """Two-dimensional pair on a cycle of facets F1..Fm with the given vectors."""
    if len(normals) < 3:
        raise CatalogParameterError(f"polygon needs at least 3 vectors, got {len(normals)}")
    m = len(normals)
    facets = [f"F{i + 1}" for i in range(m)]
    faces = [(facets[i], facets[(i + 1) % m]) for i in range(m)]
    vectors = {facet: tuple(v) for facet, v in zip(facets, normals)}
    if any(len(v) != 2 for v in vectors.values()):
        raise CatalogParameterError("polygon vectors must have two coordinates")
    return _checked(CharacteristicPair.build(2, facets, faces, vectors), "polygon")


def p5() -> CharacteristicPair:
    """Boundary of the 3-simplex cut at the vertex dual to {F1,F2,F3}; {F1,F2} is a face class."""
    facets = ["F1", "F2", "F3", "F4", "E"]
    faces = [
        ("F1", "F2", "F4"), ("F1", "F3", "F4"), ("F2", "F3", "F4"),
        ("F1", "F2", "E"), ("F1", "F3", "E"), ("F2", "F3", "E"),
    ]
    vectors = {"F1": (1, 0, 0), "F2": (0, 1, 0), "F3": (-1, -1, 0), "F4": (0, 0, -1), "E": (1, 1, 1)}
    return CharacteristicPair.build(3, facets, faces, vectors)


def twisted_prism(a: int = 0) -> CharacteristicPair:
    """Triangle times interval with the top vector (-1,-1,a); a = 0 is CP^2 x CP^1."""
    facets = ["T1", "T2", "T3", "B1", "B2"]
    faces = [(s, t, b) for s, t in combinations(facets[:3], 2) for b in facets[3:]]
    vectors = {"T1": (1, 0, 0), "T2": (0, 1, 0), "T3": (-1, -1, a), "B1": (0, 0, 1), "B2": (0, 0, -1)}
    return CharacteristicPair.build(3, facets, faces, vectors)


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    parameters: Tuple[int, ...]
    pair: CharacteristicPair


def _arity(name: str, params: Sequence[int], count: int) -> None:
    if len(params) != count:
        raise CatalogParameterError(f"{name} takes {count} parameter(s), got {len(params)}")


def _cp_entry(params: Sequence[int]) -> CharacteristicPair:
    _arity("cp", params, 1)
    return cp(params[0])


def _product_entry(params: Sequence[int]) -> CharacteristicPair:
    if not params:
        raise CatalogParameterError("product takes the simplex dimensions of its factors")
    return product_pair(*(cp(k) for k in params))


def _hirzebruch_entry(params: Sequence[int]) -> CharacteristicPair:
    _arity("hirzebruch", params, 1)
    return hirzebruch(params[0])


def _bott_entry(params: Sequence[int]) -> CharacteristicPair:
    if not params:
        raise CatalogParameterError("bott takes n followed by the twist entries")
    return bott_tower(params[0], params[1:])


def _polygon_entry(params: Sequence[int]) -> CharacteristicPair:
    if len(params) % 2:
        raise CatalogParameterError("polygon takes a flat list of coordinate pairs")
    return polygon([tuple(params[i:i + 2]) for i in range(0, len(params), 2)])


def _p5_entry(params: Sequence[int]) -> CharacteristicPair:
    _arity("p5", params, 0)
    return p5()


def _prism_entry(params: Sequence[int]) -> CharacteristicPair:
    if len(params) > 1:
        raise CatalogParameterError(f"prism takes at most 1 parameter, got {len(params)}")
    return twisted_prism(params[0] if params else 0)


CATALOG: Dict[str, Callable[[Sequence[int]], CharacteristicPair]] = {
    "cp": _cp_entry,
    "product": _product_entry,
    "hirzebruch": _hirzebruch_entry,
    "bott": _bott_entry,
    "polygon": _polygon_entry,
    "p5": _p5_entry,
    "prism": _prism_entry,
}


def catalog_entry(name: str, params: Sequence[int] = ()) -> CatalogEntry:
    """
    Build a named catalog pair.

    Raises:
        UnknownCatalogError: no entry with that name
        CatalogParameterError: parameters do not fit the entry
    """
    builder = CATALOG.get(name)
    if builder is None:
        raise UnknownCatalogError(f"unknown catalog entry {name!r}; known: {', '.join(sorted(CATALOG))}")
    pair = _checked(builder(list(params)), f"{name} {list(params)}")
    logger.debug(f"Catalog entry {name} {list(params)}: rank {pair.n}, {len(pair.facets)} facets")
    return CatalogEntry(name=name, parameters=tuple(params), pair=pair)


def random_bott_tower(rng: random.Random, n: int, bound: int = 3) -> CharacteristicPair:
    twists = [rng.randint(-bound, bound) for _ in range(n * (n - 1) // 2)]
    return bott_tower(n, twists)


def _polygon_vertices(edges: Sequence[Inequality]) -> List[IntVector]:
    """Vertex i joins edge i-1 and edge i; edges are unimodular at every vertex."""
    vertices = []
    for i in range(len(edges)):
        (a, b), p = edges[i - 1]
        (c, d), q = edges[i]
        det = a * d - b * c
        vertices.append(((p * d - b * q) // det, (a * q - p * c) // det))
    return vertices


def _lattice_length(u: IntVector, v: IntVector) -> int:
    return gcd(v[0] - u[0], v[1] - u[1])


def random_delzant_polygon(rng: random.Random, cuts: int = 4, size: int = 6) -> List[Inequality]:
    """
    Delzant polygon from a square or triangle by random corner cuts.

    A cut at a vertex adds the sum of the two adjacent outward normals with an
    offset shrunk by less than the lattice length of either adjacent edge.

    Returns:
        List: (outward normal, offset) inequalities in cyclic order
    """
    if rng.random() < 0.5:
        edges: List[Inequality] = [((1, 0), size), ((0, 1), size), ((-1, 0), 0), ((0, -1), 0)]
    else:
        edges = [((1, 1), size), ((-1, 0), 0), ((0, -1), 0)]
    for _ in range(cuts):
        vertices = _polygon_vertices(edges)
        m = len(edges)
        room = []
        for i in range(m):
            before = _lattice_length(vertices[i - 1], vertices[i])
            after = _lattice_length(vertices[i], vertices[(i + 1) % m])
            if min(before, after) >= 2:
                room.append((i, min(before, after)))
        if not room:
            break
        i, limit = rng.choice(room)
        normal = (edges[i - 1][0][0] + edges[i][0][0], edges[i - 1][0][1] + edges[i][0][1])
        depth = rng.randint(1, limit - 1)
        offset = normal[0] * vertices[i][0] + normal[1] * vertices[i][1] - depth
        edges.insert(i, (normal, offset))
    return edges


def cube_family() -> List[Tuple[str, List[Tuple[IntVector, int]]]]:
    """The cube [0,2]^3 and Delzant cuts of it at vertices and an edge."""
    cube = [
        ((1, 0, 0), 2), ((0, 1, 0), 2), ((0, 0, 1), 2),
        ((-1, 0, 0), 0), ((0, -1, 0), 0), ((0, 0, -1), 0),
    ]
    return [
        ("cube", cube),
        ("cube-vertex-cut", cube + [((1, 1, 1), 5)]),
        ("cube-edge-cut", cube + [((1, 1, 0), 3)]),
        ("cube-two-vertex-cuts", cube + [((1, 1, 1), 5), ((-1, -1, -1), -1)]),
    ]


def standard_pairs() -> List[Tuple[str, CharacteristicPair]]:
    """A fixed selection of named catalog pairs covering every family."""
    return [
        ("cp1", cp(1)),
        ("cp2", cp(2)),
        ("cp3", cp(3)),
        ("square", hirzebruch(0)),
        ("hirzebruch1", hirzebruch(1)),
        ("hirzebruch-2", hirzebruch(-2)),
        ("prism", twisted_prism(0)),
        ("twisted-prism", twisted_prism(2)),
        ("p5", p5()),
        ("product-1-1-1", product_pair(cp(1), cp(1), cp(1))),
        ("bott-3", bott_tower(3, [1, 2, 3])),
        ("pentagon", polygon([(1, 0), (1, 1), (0, 1), (-1, 0), (0, -1)])),
    ]
