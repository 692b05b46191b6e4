#!/usr/bin/env python3
"""
Exact integer linear algebra over Z^n.
Smith and Hermite normal forms, basis completion, cokernel presentations and
quotient-lattice projections. Matrices are numpy arrays of dtype=object holding
Python ints, so no entry can overflow.
"""

import logging
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import NotExtendableError, NotPrimitiveError, NotUnimodularError, RankError

logger = logging.getLogger("torsym.lattice")

IntVector = Tuple[int, ...]


def int_matrix(rows: Iterable[Sequence[int]], cols: Optional[int] = None) -> np.ndarray:
    """
    Build an object-dtype integer matrix.

    Args:
        rows: Row sequences of integers
        cols: Column count, required when there are no rows

    Returns:
        np.ndarray: rows x cols matrix of Python ints
    """
    data = [[int(x) for x in row] for row in rows]
    if not data:
        return np.zeros((0, cols or 0), dtype=object)
    width = len(data[0])
    if any(len(row) != width for row in data):
        raise ValueError("ragged matrix rows")
    matrix = np.zeros((len(data), width), dtype=object)
    for i, row in enumerate(data):
        for j, x in enumerate(row):
            matrix[i, j] = x
    return matrix


def column_matrix(vectors: Sequence[Sequence[int]], n: int) -> np.ndarray:
    """n x k matrix whose columns are the given vectors."""
    matrix = np.zeros((n, len(vectors)), dtype=object)
    for j, vector in enumerate(vectors):
        if len(vector) != n:
            raise RankError(f"vector {tuple(vector)} has length {len(vector)}, expected {n}")
        for i, x in enumerate(vector):
            matrix[i, j] = int(x)
    return matrix


def identity(n: int) -> np.ndarray:
    matrix = np.zeros((n, n), dtype=object)
    for i in range(n):
        matrix[i, i] = 1
    return matrix


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact product; empty shapes are handled explicitly."""
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    if 0 in (a.shape[0], a.shape[1], b.shape[1]):
        return np.zeros((a.shape[0], b.shape[1]), dtype=object)
    return np.dot(a, b)


def apply(matrix: np.ndarray, vector: Sequence[int]) -> IntVector:
    """Matrix times vector, returned as a tuple of ints."""
    if matrix.shape[1] != len(vector):
        raise ValueError(f"shape mismatch {matrix.shape} @ {len(vector)}")
    return tuple(
        sum((int(matrix[i, j]) * int(vector[j]) for j in range(matrix.shape[1])), 0)
        for i in range(matrix.shape[0])
    )


def frozen(matrix: np.ndarray) -> np.ndarray:
    matrix.setflags(write=False)
    return matrix


def as_tuple_rows(matrix: np.ndarray) -> Tuple[IntVector, ...]:
    return tuple(tuple(int(x) for x in row) for row in matrix)


@dataclass(frozen=True)
class SmithDecomposition:
    """
    U @ A @ V == D with U, V unimodular and D diagonal with d1 | d2 | ...

    The inverses of U and V are tracked alongside so that callers never need
    a separate integer inversion.
    """
    U: np.ndarray
    D: np.ndarray
    V: np.ndarray
    U_inv: np.ndarray = field(repr=False)
    V_inv: np.ndarray = field(repr=False)

    @property
    def invariants(self) -> Tuple[int, ...]:
        return tuple(int(self.D[i, i]) for i in range(min(self.D.shape)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.invariants if d != 0)


def _smallest_entry(D: np.ndarray, t: int) -> Optional[Tuple[int, int]]:
    """Smallest nonzero |entry| of D[t:, t:], ties broken by row then column."""
    best = None
    best_value = None
    rows, cols = D.shape
    for i in range(t, rows):
        for j in range(t, cols):
            value = abs(D[i, j])
            if value and (best_value is None or value < best_value):
                best, best_value = (i, j), value
    return best


def smith_normal_form(matrix: np.ndarray) -> SmithDecomposition:
    """
    Compute the Smith normal form of an integer matrix.

    Pivot selection is deterministic: smallest nonzero absolute value, then
    lowest row, then lowest column.

    Args:
        matrix: rows x cols integer matrix

    Returns:
        SmithDecomposition: U, D, V (and inverses) with U @ A @ V == D
    """
    A = np.array(matrix, dtype=object)
    rows, cols = A.shape
    D = A.copy()
    U, U_inv = identity(rows), identity(rows)
    V, V_inv = identity(cols), identity(cols)

    def swap_rows(a: int, b: int) -> None:
        if a != b:
            D[[a, b]] = D[[b, a]]
            U[[a, b]] = U[[b, a]]
            U_inv[:, [a, b]] = U_inv[:, [b, a]]

    def swap_cols(a: int, b: int) -> None:
        if a != b:
            D[:, [a, b]] = D[:, [b, a]]
            V[:, [a, b]] = V[:, [b, a]]
            V_inv[[a, b]] = V_inv[[b, a]]

    def add_row(target: int, source: int, q: int) -> None:
        # row_target += q * row_source
        D[target] += q * D[source]
        U[target] += q * U[source]
        U_inv[:, source] -= q * U_inv[:, target]

    def add_col(target: int, source: int, q: int) -> None:
        # col_target += q * col_source
        D[:, target] += q * D[:, source]
        V[:, target] += q * V[:, source]
        V_inv[source] -= q * V_inv[target]

    for t in range(min(rows, cols)):
        pivot = _smallest_entry(D, t)
        if pivot is None:
            break
        while True:
            i, j = pivot
            swap_rows(t, i)
            swap_cols(t, j)
            p = D[t, t]
            clear = True
            for r in range(t + 1, rows):
                q = D[r, t] // p
                if q:
                    add_row(r, t, -q)
                if D[r, t]:
                    clear = False
            for c in range(t + 1, cols):
                q = D[t, c] // p
                if q:
                    add_col(c, t, -q)
                if D[t, c]:
                    clear = False
            if not clear:
                pivot = _smallest_entry(D, t)
                continue
            offender = next(
                ((r, c) for r in range(t + 1, rows) for c in range(t + 1, cols) if D[r, c] % p),
                None,
            )
            if offender is None:
                break
            add_row(t, offender[0], 1)
            pivot = (t, t)
        if D[t, t] < 0:
            D[t] *= -1
            U[t] *= -1
            U_inv[:, t] *= -1

    return SmithDecomposition(
        U=frozen(U), D=frozen(D), V=frozen(V), U_inv=frozen(U_inv), V_inv=frozen(V_inv)
    )


def hermite_normal_form(matrix: np.ndarray) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """
    Row-style Hermite normal form of the row lattice.

    Returns the nonzero rows H (a basis of the row lattice) and their pivot
    columns. Pivots are positive and the entries above each pivot lie in
    [0, pivot).
    """
    H = np.array(matrix, dtype=object).copy()
    rows, cols = H.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        while True:
            nonzero = [i for i in range(r, rows) if H[i, c] != 0]
            if not nonzero:
                break
            i = min(nonzero, key=lambda k: (abs(H[k, c]), k))
            if i != r:
                H[[r, i]] = H[[i, r]]
            for k in range(r + 1, rows):
                q = H[k, c] // H[r, c]
                if q:
                    H[k] -= q * H[r]
            if all(H[k, c] == 0 for k in range(r + 1, rows)):
                break
        if H[r, c] == 0:
            continue
        if H[r, c] < 0:
            H[r] *= -1
        for k in range(r):
            q = H[k, c] // H[r, c]
            if q:
                H[k] -= q * H[r]
        pivots.append(c)
        r += 1
    return frozen(H[:r].copy()), tuple(pivots)


def abs_determinant(matrix: np.ndarray) -> int:
    """|det M| of a square integer matrix, as the product of Smith invariants."""
    M = np.array(matrix, dtype=object)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"not square: {M.shape}")
    result = 1
    for d in smith_normal_form(M).invariants:
        result *= d
    return result


def unimodular_inverse(matrix: np.ndarray) -> np.ndarray:
    """Exact inverse of a matrix in GL(n, Z)."""
    M = np.array(matrix, dtype=object)
    if M.shape[0] != M.shape[1]:
        raise NotUnimodularError(f"not square: {M.shape}")
    if M.shape[0] == 0:
        return frozen(identity(0))
    snf = smith_normal_form(M)
    if any(d != 1 for d in snf.invariants):
        raise NotUnimodularError(f"matrix has Smith invariants {snf.invariants}")
    # U M V = I  =>  M^-1 = V U
    return frozen(matmul(snf.V, snf.U))


def is_part_of_basis(vectors: Sequence[Sequence[int]], n: int) -> bool:
    """
    Decide whether the vectors extend to a basis of Z^n.

    Raises:
        RankError: more than n vectors, or a vector of the wrong length
    """
    if len(vectors) > n:
        raise RankError(f"{len(vectors)} vectors cannot be part of a basis of Z^{n}")
    if not vectors:
        return True
    snf = smith_normal_form(column_matrix(vectors, n))
    return all(d == 1 for d in snf.invariants)


def complete_to_basis(vectors: Sequence[Sequence[int]], n: int) -> np.ndarray:
    """
    Extend vectors to a unimodular matrix whose first columns are the vectors.

    Args:
        vectors: k vectors of length n forming part of a basis
        n: Lattice rank

    Returns:
        np.ndarray: n x n matrix in GL(n, Z)

    Raises:
        NotExtendableError: the vectors are not part of a basis
    """
    if not is_part_of_basis(vectors, n):
        raise NotExtendableError(f"{[tuple(v) for v in vectors]} is not part of a basis of Z^{n}")
    k = len(vectors)
    if k == 0:
        return frozen(identity(n))
    A = column_matrix(vectors, n)
    snf = smith_normal_form(A)
    # A V = U^-1 [I; 0], so the trailing columns of U^-1 complete A.
    basis = np.zeros((n, n), dtype=object)
    basis[:, :k] = A
    basis[:, k:] = snf.U_inv[:, k:]
    return frozen(basis)


def quotient_by_primitive(v: Sequence[int]) -> np.ndarray:
    """
    Surjection Z^n -> Z^(n-1) whose kernel is the line spanned by v.

    The rows are a Hermite-reduced basis of the annihilator of v, which makes
    the result deterministic (coordinate projections for standard vectors).

    Raises:
        NotPrimitiveError: gcd of the entries is not 1
    """
    n = len(v)
    g = 0
    for x in v:
        g = gcd(g, int(x))
    if g != 1:
        raise NotPrimitiveError(f"{tuple(v)} is not primitive (gcd {g})")
    if n == 1:
        return frozen(np.zeros((0, 1), dtype=object))
    snf = smith_normal_form(column_matrix([v], n))
    Q, _ = hermite_normal_form(snf.U[1:, :])
    return Q


@dataclass(frozen=True)
class AbelianGroupPresentation:
    """
    Z^m modulo the row lattice of relation_matrix.

    Canonical representatives come from a Hermite basis of the relation
    lattice computed with pivots taken from the right, so representatives are
    supported on the earliest generators.
    """
    generator_count: int
    relation_matrix: np.ndarray
    free_rank: int
    reduction_rows: np.ndarray = field(repr=False)
    pivots: Tuple[int, ...] = ()

    def canonical(self, vector: Sequence[int]) -> IntVector:
        if len(vector) != self.generator_count:
            raise RankError(f"vector of length {len(vector)} in a group on {self.generator_count} generators")
        x = [int(a) for a in vector]
        for row, p in zip(self.reduction_rows, self.pivots):
            q = x[p] // row[p]
            if q:
                for j in range(self.generator_count):
                    x[j] -= q * row[j]
        return tuple(x)

    def generator(self, index: int) -> IntVector:
        unit = [0] * self.generator_count
        unit[index] = 1
        return self.canonical(unit)

    def equivalent(self, a: Sequence[int], b: Sequence[int]) -> bool:
        return self.canonical(tuple(x - y for x, y in zip(a, b))) == (0,) * self.generator_count

    def torsion_coefficients(self) -> Tuple[int, ...]:
        if self.relation_matrix.shape[0] == 0:
            return ()
        snf = smith_normal_form(self.relation_matrix)
        return tuple(d for d in snf.invariants if d > 1)


def cokernel_presentation(relations: np.ndarray) -> AbelianGroupPresentation:
    """
    Present Z^m / (row lattice of relations).

    Args:
        relations: r x m integer matrix, one relation per row

    Returns:
        AbelianGroupPresentation: with free_rank m - rank(relations)
    """
    R = np.array(relations, dtype=object)
    m = R.shape[1]
    reversed_rows, reversed_pivots = hermite_normal_form(R[:, ::-1])
    rows = reversed_rows[:, ::-1].copy()
    pivots = tuple(m - 1 - c for c in reversed_pivots)
    logger.debug(f"Cokernel of {R.shape[0]}x{m} relations has rank {m - len(pivots)}")
    return AbelianGroupPresentation(
        generator_count=m,
        relation_matrix=frozen(R.copy()),
        free_rank=m - len(pivots),
        reduction_rows=frozen(rows),
        pivots=pivots,
    )
