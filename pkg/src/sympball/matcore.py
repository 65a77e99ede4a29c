"""
Dense real matrix primitives with tolerance-aware checks.

Matrices are float64 ``numpy.ndarray`` values validated by ``as_matrix``;
everything downstream is expressed against the functions in this module.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import scipy.linalg

from .exceptions import (
    DimensionMismatch,
    EigFailed,
    NotPositiveDefinite,
    NotSymmetric,
    Singular,
    ValidationError,
)

logger = logging.getLogger("sympball.matcore")

# Ratio of extreme singular values above which inversion is refused.
CONDITION_LIMIT = 1e12

JACOBI_MAX_SWEEPS = 100


@dataclass(frozen=True)
class Tolerance:
    """Relative and absolute tolerance pair."""

    rel: float = 1e-9
    abs: float = 1e-12

    def __post_init__(self) -> None:
        if not self.rel > 0:
            raise ValidationError("Relative tolerance must be positive",
                                  field="rel", value=self.rel)
        if not self.abs > 0:
            raise ValidationError("Absolute tolerance must be positive",
                                  field="abs", value=self.abs)

    def bound(self, scale: float) -> float:
        """Return ``abs + rel * scale``."""
        return self.abs + self.rel * float(scale)


DEFAULT_TOLERANCE = Tolerance()


# ============================================================================
# VALIDATION
# ============================================================================

def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """
    Convert to a validated float64 matrix.

    Args:
        a: Array-like with two dimensions.
        name: Name used in error messages.

    Returns:
        A float64 array with rows >= 1, cols >= 1 and finite entries.

    Raises:
        DimensionMismatch: If the input is not a non-empty 2-D array.
        ValidationError: If an entry is NaN or infinite.
    """
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D array",
                                expected="rows >= 1, cols >= 1", actual=m.shape)
    if not np.all(np.isfinite(m)):
        raise ValidationError(f"{name} has non-finite entries", field=name)
    return m


def as_vector(v, dim: int, name: str = "vector") -> np.ndarray:
    """Convert to a validated float64 vector of length ``dim``."""
    x = np.asarray(v, dtype=np.float64)
    if x.shape != (dim,):
        raise DimensionMismatch(f"{name} has wrong shape", expected=(dim,), actual=x.shape)
    if not np.all(np.isfinite(x)):
        raise ValidationError(f"{name} has non-finite entries", field=name)
    return x


def require_square(m: np.ndarray, name: str = "matrix") -> int:
    """Return the order of a square matrix or raise DimensionMismatch."""
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square", expected="square", actual=m.shape)
    return m.shape[0]


def symmetry_residual(m: np.ndarray) -> float:
    return norm_max(m - m.T)


def is_symmetric(m, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """True iff ``|M - M^T|_max <= abs + rel * |M|_max``."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        return False
    return symmetry_residual(m) <= tol.bound(norm_max(m))


def require_symmetric(m, tol: Tolerance = DEFAULT_TOLERANCE,
                      name: str = "matrix") -> np.ndarray:
    """
    Validate a symmetric matrix and return its exact symmetrization.

    Raises:
        DimensionMismatch: If not square.
        NotSymmetric: If the asymmetry exceeds the tolerance.
    """
    m = as_matrix(m, name)
    require_square(m, name)
    residual = symmetry_residual(m)
    if residual > tol.bound(norm_max(m)):
        raise NotSymmetric(f"{name} is not symmetric",
                           details=f"|M - M^T|_max = {residual:.3e}")
    return 0.5 * (m + m.T)


# ============================================================================
# NORMS AND ELEMENTARY OPERATIONS
# ============================================================================

def norm_max(m) -> float:
    """Largest absolute entry."""
    return float(np.max(np.abs(m))) if np.size(m) else 0.0


def norm_fro(m) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(m, "fro"))


def det(m) -> float:
    """Determinant of a square matrix."""
    m = as_matrix(m)
    require_square(m)
    return float(np.linalg.det(m))


def condition_number(m: np.ndarray) -> float:
    """Ratio of the extreme singular values (inf for singular input)."""
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])


def inv(m) -> np.ndarray:
    """
    Inverse of a square matrix.

    Raises:
        DimensionMismatch: If not square.
        Singular: If the condition number exceeds CONDITION_LIMIT.
    """
    m = as_matrix(m)
    require_square(m)
    cond = condition_number(m)
    if not cond <= CONDITION_LIMIT:
        raise Singular("Matrix is singular to working precision", condition=cond,
                       details=f"condition number {cond:.3e} > {CONDITION_LIMIT:.0e}")
    return scipy.linalg.inv(m)


# ============================================================================
# SYMMETRIC EIGENPROBLEM
# ============================================================================

def jacobi_eig(m: np.ndarray, max_sweeps: int = JACOBI_MAX_SWEEPS) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cyclic Jacobi rotation sweep for a symmetric matrix.

    Args:
        m: Symmetric matrix.
        max_sweeps: Maximum number of full sweeps.

    Returns:
        (eigenvalues ascending, orthogonal eigenvector matrix).

    Raises:
        EigFailed: If the off-diagonal mass does not vanish.
    """
    a = np.array(m, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    threshold = np.finfo(np.float64).eps * max(norm_fro(a), np.finfo(np.float64).tiny)

    for sweep in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= threshold:
            w = np.diag(a).copy()
            order = np.argsort(w, kind="stable")
            logger.debug(f"Jacobi converged after {sweep} sweeps")
            return w[order], v[:, order]
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                if theta == 0.0:
                    t = 1.0
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot

    raise EigFailed("Jacobi sweep did not converge",
                    details=f"{max_sweeps} sweeps, order {n}")


def sym_eig(m, tol: Tolerance = DEFAULT_TOLERANCE) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a symmetric matrix.

    Args:
        m: Symmetric matrix (within tolerance).
        tol: Symmetry tolerance.

    Returns:
        (eigenvalues ascending, orthogonal eigenvectors as columns) with
        ``M = V diag(w) V^T``. No ordering is guaranteed inside a cluster of
        repeated eigenvalues.

    Raises:
        NotSymmetric: If M is not symmetric within tolerance.
        EigFailed: If neither LAPACK nor the Jacobi fallback converge.
    """
    sym = require_symmetric(m, tol)
    try:
        return scipy.linalg.eigh(sym)
    except (np.linalg.LinAlgError, ValueError) as e:
        logger.warning(f"LAPACK eigensolver failed ({e}); falling back to Jacobi")
        return jacobi_eig(sym)


def _positive_spectrum(m, tol: Tolerance, name: str) -> Tuple[np.ndarray, np.ndarray]:
    w, v = sym_eig(m, tol)
    if not w[0] > tol.abs:
        raise NotPositiveDefinite(f"{name} is not positive definite",
                                  details=f"min eigenvalue {w[0]:.3e}")
    return w, v


def sqrt_pd(m, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """
    Symmetric positive definite square root.

    Raises:
        NotPositiveDefinite: If the smallest eigenvalue is <= tol.abs.
    """
    w, v = _positive_spectrum(m, tol, "matrix")
    root = (v * np.sqrt(w)) @ v.T
    return 0.5 * (root + root.T)


def inv_sqrt_pd(m, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Inverse of the symmetric positive definite square root."""
    w, v = _positive_spectrum(m, tol, "matrix")
    root = (v / np.sqrt(w)) @ v.T
    return 0.5 * (root + root.T)


def is_psd(m, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """
    Positive semi-definiteness test.

    Returns:
        True iff the smallest eigenvalue is >= -(abs + rel * |M|_max).

    Raises:
        NotSymmetric: If M is not symmetric within tolerance.
    """
    w, _ = sym_eig(m, tol)
    return bool(w[0] >= -tol.bound(norm_max(m)))


def is_positive_definite(m, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """True iff M is symmetric with smallest eigenvalue above tol.abs."""
    try:
        _positive_spectrum(m, tol, "matrix")
    except (NotPositiveDefinite, NotSymmetric, DimensionMismatch):
        return False
    return True
