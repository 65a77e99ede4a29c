"""
Block partitions, Schur complements and orthogonal projections of ellipsoids.

The public API works in global (x, p) ordering; ``BlockPartition`` is the
only place where coordinates are reordered into (x_A, p_A, x_B, p_B).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.special import gammaln

from .exceptions import (
    DimensionMismatch,
    NotPositiveDefinite,
    PivotNotPD,
    ValidationError,
)
from .matcore import (
    DEFAULT_TOLERANCE,
    Tolerance,
    as_matrix,
    as_vector,
    inv_sqrt_pd,
    is_symmetric,
    norm_max,
    require_symmetric,
)
from .symplectic import dof_indices
from .utils import chunked, derive_rng

logger = logging.getLogger("sympball.projection")

DEFAULT_SAMPLES = 100_000
SAMPLE_CHUNK = 4096
# Relative slack of the ellipsoid membership predicate.
MEMBERSHIP_SLACK = 1e-9


class Side(Enum):
    """Which block of a partition a projection keeps."""

    A = "A"
    B = "B"

    @property
    def other(self) -> "Side":
        return Side.B if self is Side.A else Side.A


# ============================================================================
# BLOCK PARTITIONS
# ============================================================================

@dataclass(frozen=True)
class BlockPartition:
    """
    Splitting of n degrees of freedom into the first n_A and the last n_B.

    ``perm[i]`` is the global index of block position i, where block
    positions are ordered (x_A, p_A, x_B, p_B).
    """

    n_A: int
    n_B: int

    def __post_init__(self) -> None:
        if self.n_A < 0 or self.n_B < 0 or self.n_A + self.n_B < 1:
            raise DimensionMismatch("Invalid block sizes",
                                    expected="n_A, n_B >= 0 with n_A + n_B >= 1",
                                    actual=(self.n_A, self.n_B))

    @classmethod
    def from_sizes(cls, n: int, n_a: int) -> "BlockPartition":
        if not 0 <= n_a <= n:
            raise DimensionMismatch("Block size out of range", expected=f"0..{n}", actual=n_a)
        return cls(n_A=n_a, n_B=n - n_a)

    @property
    def n(self) -> int:
        return self.n_A + self.n_B

    @property
    def a_indices(self) -> list:
        return dof_indices(self.n, self.n_A)[0]

    @property
    def b_indices(self) -> list:
        return dof_indices(self.n, self.n_A)[1]

    @property
    def perm(self) -> np.ndarray:
        return np.array(self.a_indices + self.b_indices, dtype=int)

    def to_block(self, z) -> np.ndarray:
        """Reorder a global vector (or rows of vectors) into block order."""
        return np.asarray(z, dtype=float)[..., self.perm]

    def to_global(self, z_block) -> np.ndarray:
        """Inverse of ``to_block``."""
        z_block = np.asarray(z_block, dtype=float)
        out = np.empty_like(z_block)
        out[..., self.perm] = z_block
        return out

    def split(self, z) -> Tuple[np.ndarray, np.ndarray]:
        """(z_A, z_B) components of a global vector."""
        z = np.asarray(z, dtype=float)
        return z[..., self.a_indices], z[..., self.b_indices]

    def join(self, z_a, z_b) -> np.ndarray:
        """Global vector with components z_A and z_B."""
        z_a = np.asarray(z_a, dtype=float)
        z_b = np.asarray(z_b, dtype=float)
        return self.to_global(np.concatenate([z_a, z_b], axis=-1))

    def permute_matrix(self, m: np.ndarray) -> np.ndarray:
        p = self.perm
        return np.asarray(m)[np.ix_(p, p)]

    def embed_block_matrix(self, m_block: np.ndarray) -> np.ndarray:
        p = self.perm
        out = np.empty_like(np.asarray(m_block, dtype=float))
        out[np.ix_(p, p)] = m_block
        return out


@dataclass(frozen=True)
class PartitionedMatrix:
    """The four blocks of a 2n x 2n matrix under a BlockPartition."""

    AA: np.ndarray
    AB: np.ndarray
    BA: np.ndarray
    BB: np.ndarray
    partition: BlockPartition
    symmetric: bool = False

    def assemble(self) -> np.ndarray:
        """Reassemble the global-ordering matrix."""
        block = np.block([[self.AA, self.AB], [self.BA, self.BB]])
        return self.partition.embed_block_matrix(block)


def partition(m, p: BlockPartition, tol: Tolerance = DEFAULT_TOLERANCE) -> PartitionedMatrix:
    """
    Extract the blocks M_AA, M_AB, M_BA, M_BB after permuting rows and columns.

    Raises:
        DimensionMismatch: If M is not 2n x 2n with n = n_A + n_B.
    """
    m = as_matrix(m, "M")
    size = 2 * p.n
    if m.shape != (size, size):
        raise DimensionMismatch("Matrix does not match the partition",
                                expected=(size, size), actual=m.shape)
    a, b = p.a_indices, p.b_indices
    return PartitionedMatrix(
        AA=m[np.ix_(a, a)],
        AB=m[np.ix_(a, b)],
        BA=m[np.ix_(b, a)],
        BB=m[np.ix_(b, b)],
        partition=p,
        symmetric=is_symmetric(m, tol),
    )


def _cholesky(pivot: np.ndarray, label: str):
    try:
        return scipy.linalg.cho_factor(pivot)
    except np.linalg.LinAlgError as e:
        raise PivotNotPD(f"Pivot block {label} is not positive definite", details=str(e))


def spd_inverse(m: np.ndarray, label: str = "matrix") -> np.ndarray:
    """Inverse of a symmetric positive definite matrix through Cholesky."""
    factor = _cholesky(m, label)
    out = scipy.linalg.cho_solve(factor, np.eye(m.shape[0]))
    return 0.5 * (out + out.T)


def schur(p: PartitionedMatrix, which: Side = Side.B,
          tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """
    Schur complement with respect to a pivot block.

    ``which=Side.B`` gives M/M_BB = M_AA - M_AB M_BB^{-1} M_BA and
    ``which=Side.A`` gives M/M_AA = M_BB - M_BA M_AA^{-1} M_AB.

    Raises:
        PivotNotPD: If the pivot block is not symmetric positive definite.
    """
    if which is Side.B:
        keep, pivot, upper, lower = p.AA, p.BB, p.AB, p.BA
    else:
        keep, pivot, upper, lower = p.BB, p.AA, p.BA, p.AB
    label = f"M_{which.value}{which.value}"
    if pivot.size == 0:
        return keep.copy()
    if not is_symmetric(pivot, tol):
        raise PivotNotPD(f"Pivot block {label} is not symmetric")
    factor = _cholesky(pivot, label)
    result = keep - upper @ scipy.linalg.cho_solve(factor, lower)
    if p.symmetric:
        result = 0.5 * (result + result.T)
    return result


def inverse_blocks(p: PartitionedMatrix, tol: Tolerance = DEFAULT_TOLERANCE) -> PartitionedMatrix:
    """
    Blocks of M^{-1} assembled from Schur complements.

    (M^{-1})_AA = (M/M_BB)^{-1}, (M^{-1})_AB = X = -(M/M_BB)^{-1} M_AB M_BB^{-1},
    (M^{-1})_BA = -M_BB^{-1} M_BA (M/M_BB)^{-1}, (M^{-1})_BB = (M/M_AA)^{-1}.

    Raises:
        PivotNotPD: If a pivot or Schur complement is not positive definite.
    """
    part = p.partition
    if part.n_B == 0 or part.n_A == 0:
        only = p.AA if part.n_B == 0 else p.BB
        inverse = spd_inverse(only, "M")
        empty_ab = np.zeros((p.AA.shape[0], p.BB.shape[0]))
        return PartitionedMatrix(
            AA=inverse if part.n_B == 0 else p.AA.copy(),
            AB=empty_ab,
            BA=empty_ab.T.copy(),
            BB=inverse if part.n_A == 0 else p.BB.copy(),
            partition=part,
            symmetric=True,
        )

    schur_b_inv = spd_inverse(schur(p, Side.B, tol), "M/M_BB")
    schur_a_inv = spd_inverse(schur(p, Side.A, tol), "M/M_AA")
    bb_inv = spd_inverse(p.BB, "M_BB")
    x = -schur_b_inv @ p.AB @ bb_inv
    lower_left = -bb_inv @ p.BA @ schur_b_inv
    return PartitionedMatrix(AA=schur_b_inv, AB=x, BA=lower_left, BB=schur_a_inv,
                             partition=part, symmetric=p.symmetric)


def block_inverse(p: PartitionedMatrix, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """M^{-1} in global ordering, built from the Schur-complement block formula."""
    return inverse_blocks(p, tol).assemble()


# ============================================================================
# ELLIPSOIDS
# ============================================================================

@dataclass(frozen=True)
class Ellipsoid:
    """The set {z : Q(z - c).(z - c) <= R^2} with Q symmetric positive definite."""

    Q: np.ndarray = field(repr=False)
    R: float = 1.0
    center: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        q = require_symmetric(self.Q, name="Q")
        if q.shape[0] % 2:
            raise DimensionMismatch("Ellipsoid dimension must be even",
                                    expected="even", actual=q.shape[0])
        try:
            scipy.linalg.cho_factor(q)
        except np.linalg.LinAlgError:
            raise NotPositiveDefinite("Ellipsoid shape matrix is not positive definite")
        if not (np.isfinite(self.R) and self.R > 0):
            raise ValidationError("Radius must be positive", field="R", value=self.R)
        if self.center is None:
            center = np.zeros(q.shape[0])
        else:
            center = as_vector(self.center, q.shape[0], "center").copy()
        q.setflags(write=False)
        center.setflags(write=False)
        object.__setattr__(self, "Q", q)
        object.__setattr__(self, "R", float(self.R))
        object.__setattr__(self, "center", center)

    @classmethod
    def ball(cls, dim: int, R: float = 1.0, center=None) -> "Ellipsoid":
        """Euclidean ball B^dim(center, R)."""
        return cls(Q=np.eye(dim), R=R, center=center)

    @property
    def dim(self) -> int:
        return self.Q.shape[0]

    def gauge(self, points) -> np.ndarray:
        """Q(z - c).(z - c) / R^2 for a point or rows of points."""
        d = np.asarray(points, dtype=float) - self.center
        return np.einsum("...i,ij,...j->...", d, self.Q, d) / self.R ** 2

    def contains_point(self, points, rel_tol: float = MEMBERSHIP_SLACK):
        """Membership predicate Q(z - c).(z - c) <= R^2 (1 + rel_tol)."""
        return self.gauge(points) <= 1.0 + rel_tol

    def boundary_points(self, directions) -> np.ndarray:
        """Map directions u to boundary points c + R Q^{-1/2} u / |u|."""
        u = np.asarray(directions, dtype=float)
        u = u / np.linalg.norm(u, axis=-1, keepdims=True)
        return self.center + self.R * (u @ inv_sqrt_pd(self.Q))

    def transform(self, a) -> "Ellipsoid":
        """Image under an invertible linear map A: shape A^{-T} Q A^{-1}, center Ac."""
        a = as_matrix(a, "A")
        if a.shape != (self.dim, self.dim):
            raise DimensionMismatch("Map does not match the ellipsoid",
                                    expected=(self.dim, self.dim), actual=a.shape)
        a_inv = scipy.linalg.inv(a)
        shape = a_inv.T @ self.Q @ a_inv
        return Ellipsoid(Q=0.5 * (shape + shape.T), R=self.R, center=a @ self.center)

    def volume(self) -> float:
        return volume(self)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "Q": self.Q.tolist(),
            "R": self.R,
            "center": self.center.tolist(),
        }


def project_ellipsoid(e: Ellipsoid, p: BlockPartition, side: Side = Side.A,
                      tol: Tolerance = DEFAULT_TOLERANCE) -> Ellipsoid:
    """
    Orthogonal projection of an ellipsoid onto one block.

    The projection on the A block has shape Q/Q_BB, the projection on the
    B block has shape Q/Q_AA; the radius is unchanged and the center is the
    block component of the center.

    Raises:
        DimensionMismatch: If dimensions disagree or the kept block is empty.
        PivotNotPD: If the eliminated block is not positive definite.
    """
    if e.dim != 2 * p.n:
        raise DimensionMismatch("Ellipsoid does not match the partition",
                                expected=2 * p.n, actual=e.dim)
    kept = p.n_A if side is Side.A else p.n_B
    if kept == 0:
        raise DimensionMismatch(f"Block {side.value} is empty", expected=">= 1", actual=0)
    blocks = partition(e.Q, p, tol)
    shape = schur(blocks, side.other, tol)
    center_a, center_b = p.split(e.center)
    center = center_a if side is Side.A else center_b
    return Ellipsoid(Q=shape, R=e.R, center=center)


def lift_to_boundary(e: Ellipsoid, p: BlockPartition, z_a) -> np.ndarray:
    """
    Lift points of the A block to the source ellipsoid.

    Uses z_B = c_B - Q_BB^{-1} Q_BA (z_A - c_A), the point of the fibre over
    z_A where the gauge is smallest; boundary points of the projection lift
    to boundary points of the source.
    """
    blocks = partition(e.Q, p)
    center_a, center_b = p.split(e.center)
    offset = np.asarray(z_a, dtype=float) - center_a
    factor = _cholesky(blocks.BB, "Q_BB")
    z_b = center_b - scipy.linalg.cho_solve(factor, blocks.BA @ offset.T).T
    return p.join(np.asarray(z_a, dtype=float), z_b)


def ball_volume(dim: int, R: float = 1.0) -> float:
    """pi^{d/2} R^d / Gamma(d/2 + 1); equals (pi R^2)^k / k! for d = 2k."""
    if dim < 1:
        raise ValidationError("Dimension must be positive", field="dim", value=dim)
    log_unit = 0.5 * dim * np.log(np.pi) - gammaln(0.5 * dim + 1.0)
    return float(np.exp(log_unit + dim * np.log(R)))


def volume(e: Ellipsoid) -> float:
    """
    Volume V_d R^d / sqrt(det Q).

    Raises:
        NotPositiveDefinite: If det Q is not positive.
    """
    sign, logdet = np.linalg.slogdet(e.Q)
    if sign <= 0:
        raise NotPositiveDefinite("Shape matrix has non-positive determinant")
    return float(ball_volume(e.dim, e.R) * np.exp(-0.5 * logdet))


# ============================================================================
# SAMPLING
# ============================================================================

def sample_boundary(e: Ellipsoid, count: int, seed: int, label: str = "boundary") -> np.ndarray:
    """Boundary points from isotropic Gaussian directions (count x dim)."""
    rng = derive_rng(seed, label)
    return e.boundary_points(rng.standard_normal((count, e.dim)))


def sample_interior(e: Ellipsoid, count: int, seed: int, label: str = "interior") -> np.ndarray:
    """Points distributed uniformly inside the ellipsoid (count x dim)."""
    rng = derive_rng(seed, label)
    u = rng.standard_normal((count, e.dim))
    radii = rng.random(count) ** (1.0 / e.dim)
    boundary = e.boundary_points(u)
    return e.center + radii[:, None] * (boundary - e.center)


def containment_margin(outer: Ellipsoid, inner: Ellipsoid,
                       samples: int = DEFAULT_SAMPLES, seed: int = 0) -> float:
    """
    Largest gauge of ``outer`` over sampled boundary points of ``inner``.

    Sample chunk i always draws from the stream keyed by (seed, i), so the
    result does not depend on chunking order.
    """
    if outer.dim != inner.dim:
        raise DimensionMismatch("Ellipsoids live in different dimensions",
                                expected=outer.dim, actual=inner.dim)
    worst = 0.0
    for index, length in chunked(samples, SAMPLE_CHUNK):
        rng = derive_rng(seed, "contains", index)
        points = inner.boundary_points(rng.standard_normal((length, inner.dim)))
        worst = max(worst, float(np.max(outer.gauge(points))))
    return worst


def contains(outer: Ellipsoid, inner: Ellipsoid, samples: int = DEFAULT_SAMPLES,
             seed: int = 0, rel_slack: float = MEMBERSHIP_SLACK) -> bool:
    """
    Monte-Carlo containment oracle.

    True iff every sampled boundary point of ``inner`` satisfies the
    membership predicate of ``outer`` with relative slack ``rel_slack``.

    Raises:
        DimensionMismatch: If the dimensions differ.
    """
    worst = containment_margin(outer, inner, samples, seed)
    logger.debug(f"containment: max gauge {worst:.12g} over {samples} samples")
    return worst <= 1.0 + rel_slack


def estimate_volume(e: Ellipsoid, samples: int, seed: int) -> Tuple[float, float]:
    """
    Hit-or-miss volume estimate in the axis-aligned bounding box.

    Returns:
        (estimate, standard error).
    """
    if samples < 1:
        raise ValidationError("Sample count must be positive", field="samples", value=samples)
    half = e.R * np.sqrt(np.diag(spd_inverse(e.Q, "Q")))
    box = float(np.prod(2.0 * half))
    hits = 0
    for index, length in chunked(samples, SAMPLE_CHUNK * 16):
        rng = derive_rng(seed, "volume", index)
        points = e.center + half * rng.uniform(-1.0, 1.0, size=(length, e.dim))
        hits += int(np.count_nonzero(e.gauge(points) <= 1.0))
    fraction = hits / samples
    return box * fraction, box * np.sqrt(fraction * (1.0 - fraction) / samples)


def projection_residual(e: Ellipsoid, p: BlockPartition) -> float:
    """|(Q/Q_BB)^{-1} - (Q^{-1})_AA|_max, the Schur identity residual."""
    blocks = partition(e.Q, p)
    lhs = spd_inverse(schur(blocks, Side.B), "Q/Q_BB")
    full_inverse = spd_inverse(e.Q, "Q")
    rhs = full_inverse[np.ix_(p.a_indices, p.a_indices)]
    return norm_max(lhs - rhs)
