"""
Tests for dense matrix primitives.
"""

import pytest
import sys
from pathlib import Path

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from sympball.exceptions import (
    DimensionMismatch,
    NotPositiveDefinite,
    NotSymmetric,
    Singular,
    ValidationError,
)
from sympball.matcore import (
    Tolerance,
    as_matrix,
    as_vector,
    condition_number,
    det,
    inv,
    inv_sqrt_pd,
    is_positive_definite,
    is_psd,
    is_symmetric,
    jacobi_eig,
    norm_fro,
    norm_max,
    require_symmetric,
    sqrt_pd,
    sym_eig,
)


def random_symmetric(rng, size):
    a = rng.standard_normal((size, size))
    return 0.5 * (a + a.T)


class TestTolerance:
    """Tests for the tolerance value."""

    def test_bound(self):
        tol = Tolerance(rel=1e-9, abs=1e-12)
        assert tol.bound(0.0) == 1e-12
        assert tol.bound(1000.0) == pytest.approx(1e-12 + 1e-6)

    def test_defaults(self):
        tol = Tolerance()
        assert tol.rel == 1e-9
        assert tol.abs == 1e-12

    def test_non_positive_rejected(self):
        with pytest.raises(ValidationError):
            Tolerance(rel=0.0)
        with pytest.raises(ValidationError):
            Tolerance(abs=-1.0)


class TestValidation:
    """Tests for matrix and vector validation."""

    def test_as_matrix_converts_to_float(self):
        m = as_matrix([[1, 2], [3, 4]])
        assert m.dtype == np.float64
        assert m.shape == (2, 2)

    def test_as_matrix_rejects_vectors_and_empty(self):
        with pytest.raises(DimensionMismatch):
            as_matrix([1.0, 2.0])
        with pytest.raises(DimensionMismatch):
            as_matrix(np.zeros((0, 3)))

    def test_as_matrix_rejects_non_finite(self):
        with pytest.raises(ValidationError):
            as_matrix([[1.0, np.nan], [0.0, 1.0]])
        with pytest.raises(ValidationError):
            as_matrix([[np.inf]])

    def test_as_vector_shape(self):
        assert as_vector([1, 2, 3], 3).shape == (3,)
        with pytest.raises(DimensionMismatch):
            as_vector([1, 2], 3)

    def test_symmetry(self):
        assert is_symmetric([[1.0, 2.0], [2.0, 3.0]])
        assert not is_symmetric([[1.0, 2.0], [2.5, 3.0]])
        assert not is_symmetric(np.ones((2, 3)))

    def test_require_symmetric_symmetrizes(self):
        m = np.array([[1.0, 2.0], [2.0 + 1e-13, 3.0]])
        out = require_symmetric(m)
        assert np.array_equal(out, out.T)

    def test_require_symmetric_rejects(self):
        with pytest.raises(NotSymmetric):
            require_symmetric([[1.0, 0.0], [1.0, 1.0]])
        with pytest.raises(DimensionMismatch):
            require_symmetric(np.ones((2, 3)))


class TestElementary:
    """Tests for norms, determinant and inverse."""

    def test_norms(self):
        m = np.array([[3.0, -4.0], [0.0, 1.0]])
        assert norm_max(m) == 4.0
        assert norm_fro(m) == pytest.approx(np.sqrt(26.0))

    def test_det(self):
        assert det([[2.0, 0.0], [0.0, 3.0]]) == pytest.approx(6.0)

    def test_inverse(self):
        m = np.array([[2.0, 1.0], [1.0, 3.0]])
        np.testing.assert_allclose(inv(m) @ m, np.eye(2), atol=1e-14)

    def test_singular(self):
        with pytest.raises(Singular):
            inv([[1.0, 2.0], [2.0, 4.0]])

    def test_condition_guard(self):
        m = np.diag([1.0, 1e-13])
        assert condition_number(m) == pytest.approx(1e13)
        with pytest.raises(Singular):
            inv(m)

    def test_inverse_requires_square(self):
        with pytest.raises(DimensionMismatch):
            inv(np.ones((2, 3)))


class TestEigen:
    """Tests for the symmetric eigenproblem."""

    def test_sym_eig_reconstructs(self):
        rng = np.random.default_rng(1)
        for size in (1, 2, 5, 8):
            m = random_symmetric(rng, size)
            w, v = sym_eig(m)
            assert np.all(np.diff(w) >= 0)
            np.testing.assert_allclose(v @ np.diag(w) @ v.T, m, atol=1e-12)
            np.testing.assert_allclose(v.T @ v, np.eye(size), atol=1e-12)

    def test_jacobi_matches_lapack(self):
        rng = np.random.default_rng(2)
        for size in (2, 4, 6):
            m = random_symmetric(rng, size)
            w_ref, _ = sym_eig(m)
            w, v = jacobi_eig(m)
            np.testing.assert_allclose(w, w_ref, atol=1e-12)
            np.testing.assert_allclose(v @ np.diag(w) @ v.T, m, atol=1e-12)

    def test_jacobi_diagonal_input(self):
        w, v = jacobi_eig(np.diag([3.0, 1.0, 2.0]))
        np.testing.assert_array_equal(w, [1.0, 2.0, 3.0])
        assert np.allclose(np.abs(v), np.eye(3)[:, [1, 2, 0]])

    def test_sym_eig_rejects_asymmetric(self):
        with pytest.raises(NotSymmetric):
            sym_eig([[1.0, 2.0], [0.0, 1.0]])


class TestPositiveDefinite:
    """Tests for square roots and definiteness."""

    def test_sqrt_of_diagonal(self):
        np.testing.assert_allclose(sqrt_pd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)

    def test_sqrt_squares_back(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((4, 4))
        m = a @ a.T + np.eye(4)
        root = sqrt_pd(m)
        np.testing.assert_allclose(root, root.T, atol=0)
        np.testing.assert_allclose(root @ root, m, atol=1e-11)
        np.testing.assert_allclose(inv_sqrt_pd(m) @ root, np.eye(4), atol=1e-11)

    def test_sqrt_rejects_indefinite(self):
        with pytest.raises(NotPositiveDefinite):
            sqrt_pd([[1.0, 2.0], [2.0, 1.0]])

    def test_is_psd(self):
        assert is_psd([[1.0, 1.0], [1.0, 1.0]])
        assert not is_psd([[1.0, 2.0], [2.0, 1.0]])

    def test_is_positive_definite(self):
        assert is_positive_definite(np.eye(3))
        assert not is_positive_definite([[1.0, 1.0], [1.0, 1.0]])
        assert not is_positive_definite([[1.0, 2.0], [0.0, 1.0]])


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
