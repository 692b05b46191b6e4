#!/usr/bin/env python3
"""
Unit tests for exact integer linear algebra.
Smith and Hermite normal forms, basis completion, quotient projections and
cokernel presentations.
"""

import os
import random
import sys
import unittest

import numpy as np
from sympy import Matrix

# Add the project root to the path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../../")))

from src.torsym.errors import NotExtendableError, NotPrimitiveError, NotUnimodularError, RankError  # noqa: E402
from src.torsym.lattice import (  # noqa: E402
    abs_determinant,
    apply,
    as_tuple_rows,
    cokernel_presentation,
    column_matrix,
    complete_to_basis,
    hermite_normal_form,
    identity,
    int_matrix,
    is_part_of_basis,
    matmul,
    quotient_by_primitive,
    smith_normal_form,
    unimodular_inverse,
)


class TestMatrixHelpers(unittest.TestCase):
    """Test case for the object-dtype matrix helpers"""

    def test_int_matrix_holds_python_ints(self):
        matrix = int_matrix([[1, 2], [3, 4]])
        self.assertEqual(matrix.dtype, object)
        self.assertIsInstance(matrix[1, 0], int)

    def test_int_matrix_empty_needs_column_count(self):
        self.assertEqual(int_matrix([], cols=3).shape, (0, 3))

    def test_int_matrix_rejects_ragged_rows(self):
        with self.assertRaises(ValueError):
            int_matrix([[1, 2], [3]])

    def test_column_matrix_checks_lengths(self):
        self.assertEqual(as_tuple_rows(column_matrix([(1, 2), (3, 4)], 2)), ((1, 3), (2, 4)))
        with self.assertRaises(RankError):
            column_matrix([(1, 2, 3)], 2)

    def test_apply_and_matmul(self):
        m = int_matrix([[1, 1], [0, 1]])
        self.assertEqual(apply(m, (2, 3)), (5, 3))
        self.assertEqual(as_tuple_rows(matmul(m, m)), ((1, 2), (0, 1)))
        with self.assertRaises(ValueError):
            matmul(m, int_matrix([[1, 2, 3]]))

    def test_matmul_with_empty_shapes(self):
        result = matmul(np.zeros((2, 0), dtype=object), np.zeros((0, 3), dtype=object))
        self.assertEqual(result.shape, (2, 3))
        self.assertFalse(result.any())

    def test_big_entries_do_not_overflow(self):
        huge = 10 ** 30
        self.assertEqual(apply(int_matrix([[huge, huge]]), (huge, 1)), (huge * huge + huge,))


class TestSmithNormalForm(unittest.TestCase):
    """Test case for smith_normal_form"""

    def setUp(self):
        self.matrix = int_matrix([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])

    def test_invariants(self):
        snf = smith_normal_form(self.matrix)
        self.assertEqual(snf.invariants, (2, 6, 12))
        self.assertEqual(snf.rank, 3)

    def test_decomposition_identities(self):
        snf = smith_normal_form(self.matrix)
        self.assertEqual(as_tuple_rows(matmul(matmul(snf.U, self.matrix), snf.V)), as_tuple_rows(snf.D))
        self.assertEqual(as_tuple_rows(matmul(snf.U, snf.U_inv)), as_tuple_rows(identity(3)))
        self.assertEqual(as_tuple_rows(matmul(snf.V, snf.V_inv)), as_tuple_rows(identity(3)))

    def test_rectangular_and_rank_deficient(self):
        matrix = int_matrix([[1, 2, 3], [2, 4, 6]])
        snf = smith_normal_form(matrix)
        self.assertEqual(snf.invariants, (1, 0))
        self.assertEqual(snf.rank, 1)
        self.assertEqual(as_tuple_rows(matmul(matmul(snf.U, matrix), snf.V)), as_tuple_rows(snf.D))

    def test_divisibility_chain(self):
        snf = smith_normal_form(int_matrix([[2, 0], [0, 3]]))
        self.assertEqual(snf.invariants, (1, 6))

    def test_random_matrices(self):
        rng = random.Random(20240229)
        for trial in range(80):
            rows, cols = rng.randint(1, 6), rng.randint(1, 6)
            A = int_matrix([[rng.randint(-5, 5) for _ in range(cols)] for _ in range(rows)])
            with self.subTest(trial=trial, matrix=as_tuple_rows(A)):
                snf = smith_normal_form(A)
                self.assertEqual(as_tuple_rows(matmul(matmul(snf.U, A), snf.V)), as_tuple_rows(snf.D))
                off_diagonal = [snf.D[i, j] for i in range(rows) for j in range(cols) if i != j]
                self.assertTrue(all(x == 0 for x in off_diagonal))
                invariants = snf.invariants
                nonzero = invariants[:snf.rank]
                self.assertTrue(all(d > 0 for d in nonzero))
                self.assertTrue(all(d == 0 for d in invariants[snf.rank:]))
                self.assertTrue(all(b % a == 0 for a, b in zip(nonzero, nonzero[1:])))
                self.assertEqual(snf.rank, Matrix(A.tolist()).rank())
                self.assertEqual(abs(Matrix(snf.U.tolist()).det()), 1)
                self.assertEqual(abs(Matrix(snf.V.tolist()).det()), 1)
                self.assertEqual(as_tuple_rows(matmul(snf.U, snf.U_inv)), as_tuple_rows(identity(rows)))
                self.assertEqual(as_tuple_rows(matmul(snf.V, snf.V_inv)), as_tuple_rows(identity(cols)))

    def test_result_is_read_only(self):
        snf = smith_normal_form(self.matrix)
        with self.assertRaises(ValueError):
            snf.D[0, 0] = 5


class TestHermiteAndInverse(unittest.TestCase):
    """Test case for Hermite normal form, determinants and inverses"""

    def test_hermite_normal_form(self):
        H, pivots = hermite_normal_form(int_matrix([[2, 3], [4, 5]]))
        self.assertEqual(as_tuple_rows(H), ((2, 0), (0, 1)))
        self.assertEqual(pivots, (0, 1))

    def test_hermite_drops_dependent_rows(self):
        H, pivots = hermite_normal_form(int_matrix([[1, 2], [2, 4]]))
        self.assertEqual(as_tuple_rows(H), ((1, 2),))
        self.assertEqual(pivots, (0,))

    def test_abs_determinant(self):
        self.assertEqual(abs_determinant(int_matrix([[2, 1], [1, 3]])), 5)
        self.assertEqual(abs_determinant(int_matrix([[0, 1], [1, 0]])), 1)
        self.assertEqual(abs_determinant(int_matrix([[10 ** 20, 1], [0, 1]])), 10 ** 20)
        with self.assertRaises(ValueError):
            abs_determinant(int_matrix([[1, 2, 3]]))

    def test_unimodular_inverse(self):
        inverse = unimodular_inverse(int_matrix([[2, 1], [1, 1]]))
        self.assertEqual(as_tuple_rows(inverse), ((1, -1), (-1, 2)))

    def test_unimodular_inverse_rejects_singular(self):
        with self.assertRaises(NotUnimodularError):
            unimodular_inverse(int_matrix([[2, 0], [0, 1]]))
        with self.assertRaises(NotUnimodularError):
            unimodular_inverse(int_matrix([[1, 0]]))


class TestBases(unittest.TestCase):
    """Test case for basis extension and quotient projections"""

    def test_is_part_of_basis(self):
        self.assertTrue(is_part_of_basis([(1, 1)], 2))
        self.assertTrue(is_part_of_basis([], 3))
        self.assertFalse(is_part_of_basis([(2, 0)], 2))
        self.assertFalse(is_part_of_basis([(1, 0), (1, 2)], 2))
        with self.assertRaises(RankError):
            is_part_of_basis([(1, 0), (0, 1), (1, 1)], 2)

    def test_complete_to_basis_keeps_leading_columns(self):
        basis = complete_to_basis([(1, 1, 0), (0, 1, 1)], 3)
        self.assertEqual(tuple(basis[:, 0]), (1, 1, 0))
        self.assertEqual(tuple(basis[:, 1]), (0, 1, 1))
        self.assertEqual(abs_determinant(basis), 1)

    def test_complete_to_basis_rejects_non_primitive(self):
        with self.assertRaises(NotExtendableError):
            complete_to_basis([(2, 0)], 2)

    def test_quotient_of_standard_vector_is_coordinate_projection(self):
        self.assertEqual(as_tuple_rows(quotient_by_primitive((0, 0, 1))), ((1, 0, 0), (0, 1, 0)))

    def test_quotient_kernel_and_surjectivity(self):
        v = (2, 3, 5)
        Q = quotient_by_primitive(v)
        self.assertEqual(Q.shape, (2, 3))
        self.assertEqual(apply(Q, v), (0, 0))
        self.assertEqual(smith_normal_form(Q).invariants, (1, 1))

    def test_quotient_rank_one(self):
        self.assertEqual(quotient_by_primitive((-1,)).shape, (0, 1))

    def test_quotient_rejects_non_primitive(self):
        with self.assertRaises(NotPrimitiveError):
            quotient_by_primitive((2, 4))


class TestCokernel(unittest.TestCase):
    """Test case for cokernel presentations"""

    def test_torsion(self):
        presentation = cokernel_presentation(int_matrix([[2]]))
        self.assertEqual(presentation.free_rank, 0)
        self.assertEqual(presentation.torsion_coefficients(), (2,))

    def test_projective_plane_relations(self):
        # lambda = e1, e2, -(e1 + e2): all three generators coincide
        presentation = cokernel_presentation(int_matrix([[1, 0, -1], [0, 1, -1]]))
        self.assertEqual(presentation.free_rank, 1)
        self.assertEqual(presentation.torsion_coefficients(), ())
        self.assertEqual(presentation.generator(0), presentation.generator(2))
        self.assertTrue(presentation.equivalent((1, 0, 0), (0, 1, 0)))
        self.assertFalse(presentation.equivalent((1, 0, 0), (0, 0, 0)))

    def test_canonical_is_idempotent(self):
        presentation = cokernel_presentation(int_matrix([[1, 0, -1, 0], [0, 1, 0, -1]]))
        canonical = presentation.canonical((3, -2, 5, 7))
        self.assertEqual(presentation.canonical(canonical), canonical)

    def test_canonical_checks_length(self):
        presentation = cokernel_presentation(int_matrix([[1, -1]]))
        with self.assertRaises(RankError):
            presentation.canonical((1, 2, 3))

    def test_no_relations(self):
        presentation = cokernel_presentation(int_matrix([], cols=2))
        self.assertEqual(presentation.free_rank, 2)
        self.assertEqual(presentation.canonical((4, 5)), (4, 5))


if __name__ == "__main__":
    unittest.main()
