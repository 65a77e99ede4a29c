"""
Projections of symplectic balls.

For S in Sp(n) the ball S(B^{2n}(R)) is the ellipsoid {Mz.z <= R^2} with
M = (S S^T)^{-1}. Its shadow on the first n_A degrees of freedom has shape
M/M_BB and contains the symplectic ball S_A(B^{2n_A}(R)), where S_A comes
from the Williamson form of M/M_BB. The shadow is itself a symplectic ball
exactly when S splits as S_A (+) S_B.
"""

import dataclasses
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from .exceptions import DimensionMismatch
from .matcore import (
    DEFAULT_TOLERANCE,
    Tolerance,
    as_vector,
    condition_number,
    norm_max,
    sqrt_pd,
)
from .projection import (
    BlockPartition,
    Ellipsoid,
    PartitionedMatrix,
    Side,
    ball_volume,
    inverse_blocks,
    partition,
    project_ellipsoid,
    schur,
    spd_inverse,
    volume,
)
from .symplectic import (
    ComplexSubspace,
    is_symplectic,
    orthonormal_span,
    require_symplectic,
    standard_j,
    symplectic_inverse,
    symplectic_spectrum,
    unitary_reduction,
    williamson,
)

logger = logging.getLogger("sympball.balls")

# Slack for the inequalities that hold for every symplectic S.
INEQUALITY_SLACK = 1e-8

MACHINE_EPS = float(np.finfo(np.float64).eps)


class Verdict(Enum):
    EXACT = "exact"
    BORDERLINE = "borderline"
    NOT_EXACT = "not_exact"


def classify(value: float, exact: float, borderline: float) -> Verdict:
    """EXACT if value <= exact, BORDERLINE if below borderline, NOT_EXACT otherwise."""
    if value <= exact:
        return Verdict.EXACT
    if value < borderline:
        return Verdict.BORDERLINE
    return Verdict.NOT_EXACT


@dataclass(frozen=True)
class ExactnessThresholds:
    """
    Bands for the exactness measures.

    ``exact``/``borderline`` apply to measures that vanish linearly with the
    distance from a split matrix (relative |X|, commutator norm). The
    spectral deficit and the volume excess vanish quadratically; they are
    classified on the same bands through ``root_measure``, after removing
    their rounding noise ``noise_factor * eps * cond(M)``.
    """

    exact: float = 1e-8
    borderline: float = 1e-6
    noise_factor: float = 64.0

    @classmethod
    def from_config(cls, section: Dict[str, float]) -> "ExactnessThresholds":
        return cls(**{f.name: float(section[f.name]) for f in dataclasses.fields(cls)
                      if f.name in section})

    def noise_floor(self, m: np.ndarray) -> float:
        """Rounding noise of a quadratic measure computed from M."""
        return self.noise_factor * MACHINE_EPS * condition_number(m)


def root_measure(value: float, floor: float) -> float:
    """Square root of a quadratic measure above its noise floor."""
    return float(np.sqrt(max(value - floor, 0.0)))


DEFAULT_THRESHOLDS = ExactnessThresholds()


@dataclass(frozen=True)
class Criterion:
    name: str
    value: float
    verdict: Verdict

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "verdict": self.verdict.value}


@dataclass(frozen=True)
class ExactnessResult:
    """The four equivalent exactness criteria evaluated on one split."""

    criteria: Tuple[Criterion, ...]

    def __getitem__(self, name: str) -> Criterion:
        for criterion in self.criteria:
            if criterion.name == name:
                return criterion
        raise KeyError(name)

    @property
    def borderline(self) -> bool:
        return any(c.verdict is Verdict.BORDERLINE for c in self.criteria)

    @property
    def consistent(self) -> bool:
        """True iff no two non-borderline criteria disagree."""
        decided = {c.verdict for c in self.criteria if c.verdict is not Verdict.BORDERLINE}
        return len(decided) <= 1

    def to_dict(self) -> dict:
        return {c.name: c.to_dict() for c in self.criteria}


@dataclass(frozen=True)
class ProjectionAnalysis:
    """
    Result of projecting S(B^{2n}(R)) onto a complex subspace of dimension 2n_A.

    Ellipsoids are expressed in the coordinates of ``frame``, a 2n x 2n_A
    matrix with orthonormal columns spanning the subspace; ``embed`` maps
    these coordinates back to phase space.
    """

    n: int
    n_A: int
    R: float
    S_A: np.ndarray = field(repr=False)
    Lambda_A: np.ndarray
    exact: bool
    borderline: bool
    X_norm: float
    projected: Ellipsoid = field(repr=False)
    inscribed: Ellipsoid = field(repr=False)
    vol_projected: float
    vol_bound: float
    criteria: ExactnessResult = field(repr=False)
    frame: np.ndarray = field(repr=False)
    S_B: Optional[np.ndarray] = field(default=None, repr=False)
    projected_B: Optional[Ellipsoid] = field(default=None, repr=False)
    inscribed_B: Optional[Ellipsoid] = field(default=None, repr=False)
    identity_residual: float = 0.0

    @property
    def n_B(self) -> int:
        return self.n - self.n_A

    @property
    def vol_inscribed(self) -> float:
        return volume(self.inscribed)

    def embed(self, w) -> np.ndarray:
        """Map subspace coordinates (a vector or rows of vectors) to phase space."""
        return np.asarray(w, dtype=float) @ self.frame.T

    def to_dict(self) -> dict:
        data = {
            "n": self.n,
            "n_A": self.n_A,
            "R": self.R,
            "S_A": self.S_A.tolist(),
            "Lambda_A": [float(v) for v in self.Lambda_A],
            "exact": self.exact,
            "borderline": self.borderline,
            "X_norm": self.X_norm,
            "vol_projected": self.vol_projected,
            "vol_bound": self.vol_bound,
            "vol_inscribed": self.vol_inscribed,
            "projected": self.projected.to_dict(),
            "inscribed": self.inscribed.to_dict(),
            "criteria": self.criteria.to_dict(),
            "identity_residual": self.identity_residual,
            "frame": self.frame.tolist(),
            "S_B": None if self.S_B is None else self.S_B.tolist(),
        }
        if self.projected_B is not None:
            data["projected_B"] = self.projected_B.to_dict()
        if self.inscribed_B is not None:
            data["inscribed_B"] = self.inscribed_B.to_dict()
        return data


# ============================================================================
# HELPERS
# ============================================================================

def ball_shape(s: np.ndarray) -> np.ndarray:
    """M = (S S^T)^{-1}, the shape matrix of S(B), via the symplectic inverse."""
    s_inv = symplectic_inverse(s)
    m = s_inv.T @ s_inv
    return 0.5 * (m + m.T)


def _check_split(n: int, n_a: int) -> None:
    if not 1 <= n_a <= n:
        raise DimensionMismatch("n_A must satisfy 1 <= n_A <= n", expected=f"1..{n}", actual=n_a)


def image_commutator(s, subspace: ComplexSubspace, tol: Tolerance = DEFAULT_TOLERANCE) -> float:
    """
    |PJ - JP|_max for the orthogonal projector P onto S^T V.

    Raises:
        RankDeficient: If S^T V collapses to zero.
    """
    s = np.asarray(s, dtype=float)
    if s.shape != (2 * subspace.ambient_n, 2 * subspace.ambient_n):
        raise DimensionMismatch("S does not match the subspace",
                                expected=(2 * subspace.ambient_n,) * 2, actual=s.shape)
    q = orthonormal_span(s.T @ subspace.basis, tol)
    p = q @ q.T
    j = standard_j(subspace.ambient_n)
    return norm_max(p @ j - j @ p)


def complexity_of_image(s, subspace: ComplexSubspace, tol: Tolerance = DEFAULT_TOLERANCE,
                        thresholds: ExactnessThresholds = DEFAULT_THRESHOLDS) -> bool:
    """True iff S^T V is J-invariant (commutator norm within the exact band)."""
    return image_commutator(s, subspace, tol) <= thresholds.exact


def is_symplectic_ball(e: Ellipsoid, tol: Tolerance = DEFAULT_TOLERANCE,
                       atol: float = 1e-8) -> bool:
    """True iff every symplectic eigenvalue of the shape matrix equals 1."""
    spectrum = symplectic_spectrum(e.Q, e.dim // 2, tol).as_array()
    return bool(np.all(np.abs(spectrum - 1.0) <= atol))


def _off_diagonal_norm(blocks: PartitionedMatrix, s: np.ndarray,
                       tol: Tolerance) -> Tuple[float, PartitionedMatrix]:
    inverse = inverse_blocks(blocks, tol)
    scale = norm_max(s @ s.T)
    return norm_max(inverse.AB) / scale, inverse


def _identity_residual(inverse: PartitionedMatrix) -> float:
    """|X^T J_A X + (M/M_AA)^{-1} J_B (M/M_AA)^{-1} - J_B|_max."""
    part = inverse.partition
    j_a, j_b = standard_j(part.n_A), standard_j(part.n_B)
    lhs = inverse.AB.T @ j_a @ inverse.AB + inverse.BB @ j_b @ inverse.BB
    return norm_max(lhs - j_b)


def _criteria(x_norm: float, lambda_a: np.ndarray, commutator: float,
              vol_projected: float, vol_bound: float, floor: float,
              thresholds: ExactnessThresholds) -> ExactnessResult:
    deficit = float(np.max(np.abs(1.0 - lambda_a)))
    excess = abs(vol_projected / vol_bound - 1.0)

    def linear(value: float) -> Verdict:
        return classify(value, thresholds.exact, thresholds.borderline)

    return ExactnessResult(criteria=(
        Criterion("off_diagonal", x_norm, linear(x_norm)),
        Criterion("spectrum", deficit, linear(root_measure(deficit, floor))),
        Criterion("complex_image", commutator, linear(commutator)),
        Criterion("volume", excess, linear(root_measure(excess, floor))),
    ))


# ============================================================================
# COORDINATE SPLITS
# ============================================================================

def exactness_check(s, n_a: int, tol: Tolerance = DEFAULT_TOLERANCE,
                    thresholds: ExactnessThresholds = DEFAULT_THRESHOLDS) -> Tuple[bool, float]:
    """
    Decide whether the shadow of S(B) on the first n_A degrees of freedom is
    a symplectic ball.

    Returns:
        (exact, |X|_max / |M^{-1}|_max) with X the off-diagonal block of M^{-1}.

    Raises:
        NotSymplectic: If S is not symplectic.
    """
    s = require_symplectic(s, tol=tol)
    n = s.shape[0] // 2
    _check_split(n, n_a)
    if n_a == n:
        return True, 0.0
    blocks = partition(ball_shape(s), BlockPartition.from_sizes(n, n_a), tol)
    x_norm, _ = _off_diagonal_norm(blocks, s, tol)
    return x_norm <= thresholds.exact, x_norm


def exactness_criteria(s, n_a: int, R: float = 1.0, tol: Tolerance = DEFAULT_TOLERANCE,
                       thresholds: ExactnessThresholds = DEFAULT_THRESHOLDS) -> ExactnessResult:
    """Evaluate the four equivalent exactness criteria of a split."""
    return analyze_split(s, n_a, R, tol=tol, thresholds=thresholds).criteria


def _trivial_analysis(s: np.ndarray, m: np.ndarray, R: float, center: np.ndarray,
                      tol: Tolerance, thresholds: ExactnessThresholds) -> ProjectionAnalysis:
    n = s.shape[0] // 2
    ellipsoid = Ellipsoid(Q=m, R=R, center=center)
    lam = symplectic_spectrum(m, n, tol).as_array()
    vol = volume(ellipsoid)
    bound = ball_volume(2 * n, R)
    return ProjectionAnalysis(
        n=n, n_A=n, R=R, S_A=s, Lambda_A=lam, exact=True, borderline=False, X_norm=0.0,
        projected=ellipsoid, inscribed=ellipsoid, vol_projected=vol, vol_bound=bound,
        criteria=_criteria(0.0, lam, 0.0, vol, bound, thresholds.noise_floor(m), thresholds),
        frame=np.eye(2 * n),
    )


def analyze_split(s, n_a: int, R: float = 1.0, center=None,
                  tol: Tolerance = DEFAULT_TOLERANCE,
                  thresholds: ExactnessThresholds = DEFAULT_THRESHOLDS) -> ProjectionAnalysis:
    """
    Analyze the projection of S(B^{2n}(center, R)) onto the first n_A
    degrees of freedom.

    Args:
        s: 2n x 2n symplectic matrix.
        n_a: Degrees of freedom kept, 1 <= n_A <= n.
        R: Radius of the source ball.
        center: Center of the image ball (global ordering); origin if omitted.
        tol: Numerical tolerance.
        thresholds: Exactness bands.

    Returns:
        ProjectionAnalysis with the true projection, the inscribed
        symplectic ball and the exactness verdicts.

    Raises:
        NotSymplectic: If S is not symplectic.
        DimensionMismatch: If n_A is out of range.
    """
    s = require_symplectic(s, tol=tol)
    n = s.shape[0] // 2
    _check_split(n, n_a)
    center = np.zeros(2 * n) if center is None else as_vector(center, 2 * n, "center")
    m = ball_shape(s)
    if n_a == n:
        return _trivial_analysis(s, m, R, center, tol, thresholds)

    p = BlockPartition.from_sizes(n, n_a)
    source = Ellipsoid(Q=m, R=R, center=center)
    blocks = partition(m, p, tol)
    schur_b = schur(blocks, Side.B, tol)
    decomposition = williamson(schur_b, n_a, tol)
    lam = decomposition.Lambda
    if lam[-1] > 1.0 + INEQUALITY_SLACK:
        logger.warning(f"Symplectic eigenvalue of M/M_BB above 1: {lam[-1]:.12g}")

    projected = project_ellipsoid(source, p, Side.A, tol)
    vol_projected = volume(projected)
    vol_bound = ball_volume(2 * n_a, R)
    if vol_projected < vol_bound * (1.0 - INEQUALITY_SLACK):
        logger.warning(f"Projected volume {vol_projected:.12g} below bound {vol_bound:.12g}")

    x_norm, inverse = _off_diagonal_norm(blocks, s, tol)
    commutator = image_commutator(s, ComplexSubspace.coordinate(n, n_a), tol)
    criteria = _criteria(x_norm, lam, commutator, vol_projected, vol_bound,
                         thresholds.noise_floor(m), thresholds)
    if not criteria.consistent:
        logger.warning(f"Exactness criteria disagree for n={n}, n_A={n_a}: {criteria.to_dict()}")
    exact = criteria["off_diagonal"].verdict is Verdict.EXACT

    # M/M_BB = W^T D_A W with S_A = W^{-1}
    s_a = symplectic_inverse(decomposition.S)
    s_b = projected_b = inscribed_b = None
    center_a, center_b = p.split(center)
    if exact:
        s_a, s_b = _split_factors(blocks, schur_b, s_a, n_a, tol)
        projected_b = project_ellipsoid(source, p, Side.B, tol)
        inscribed_b = Ellipsoid(Q=spd_inverse(s_b @ s_b.T, "S_B S_B^T"), R=R, center=center_b)
    inscribed = Ellipsoid(Q=spd_inverse(s_a @ s_a.T, "S_A S_A^T"), R=R, center=center_a)

    logger.debug(f"analyze_split n={n} n_A={n_a}: Lambda_A={lam}, X_norm={x_norm:.3e}")
    return ProjectionAnalysis(
        n=n, n_A=n_a, R=float(R), S_A=s_a, Lambda_A=lam, exact=exact,
        borderline=criteria.borderline, X_norm=x_norm,
        projected=projected, inscribed=inscribed,
        vol_projected=vol_projected, vol_bound=vol_bound, criteria=criteria,
        frame=np.eye(2 * n)[:, p.a_indices],
        S_B=s_b, projected_B=projected_b, inscribed_B=inscribed_b,
        identity_residual=_identity_residual(inverse),
    )


def _split_factors(blocks: PartitionedMatrix, schur_b: np.ndarray, williamson_factor: np.ndarray,
                   n_a: int, tol: Tolerance) -> Tuple[np.ndarray, np.ndarray]:
    """
    Canonical S_A and S_B of a split matrix.

    Both are the positive definite square roots of the inverted Schur
    complements; the Williamson factor is kept for S_A when the square root
    misses Sp(n_A) by more than the tolerance.
    """
    n_b = blocks.partition.n_B
    s_a = sqrt_pd(spd_inverse(schur_b, "M/M_BB"), tol)
    if not is_symplectic(s_a, n_a, tol):
        logger.debug("Square root of (M/M_BB)^{-1} is not symplectic; keeping Williamson factor")
        s_a = williamson_factor
    schur_a = schur(blocks, Side.A, tol)
    spectrum_b = symplectic_spectrum(schur_a, n_b, tol).as_array()
    if np.max(np.abs(spectrum_b - 1.0)) > INEQUALITY_SLACK:
        logger.warning(f"Symplectic spectrum of M/M_AA differs from 1: {spectrum_b}")
    s_b = sqrt_pd(spd_inverse(schur_a, "M/M_AA"), tol)
    return s_a, s_b


# ============================================================================
# COMPLEX SUBSPACES
# ============================================================================

def analyze_subspace(s, subspace: ComplexSubspace, R: float = 1.0, center=None,
                     tol: Tolerance = DEFAULT_TOLERANCE,
                     thresholds: ExactnessThresholds = DEFAULT_THRESHOLDS) -> ProjectionAnalysis:
    """
    Analyze the orthogonal projection of S(B^{2n}(center, R)) onto a complex
    subspace V.

    With U orthogonal and symplectic mapping R^{2k} (+) 0 onto V, the
    projection onto V is U Pi_A U^T, so the split analysis of U^T S gives
    the answer in the coordinates of the frame U restricted to R^{2k} (+) 0.

    Raises:
        NotComplex: If V is not J-invariant.
        NotSymplectic: If S is not symplectic.
    """
    s = require_symplectic(s, tol=tol)
    n = s.shape[0] // 2
    if subspace.ambient_n != n:
        raise DimensionMismatch("Subspace does not live in the phase space of S",
                                expected=n, actual=subspace.ambient_n)
    u = unitary_reduction(subspace, tol)
    center = np.zeros(2 * n) if center is None else as_vector(center, 2 * n, "center")
    result = analyze_split(u.T @ s, subspace.k, R, center=u.T @ center,
                           tol=tol, thresholds=thresholds)
    a = BlockPartition.from_sizes(n, subspace.k).a_indices
    return dataclasses.replace(result, frame=u[:, a])

