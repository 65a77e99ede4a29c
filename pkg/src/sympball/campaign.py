"""
Randomized verification campaigns.

A campaign generates symplectic matrices of three kinds (generic, split as
S_A (+) S_B, and split matrices perturbed by a small symplectic factor) and
runs every numerical property of the library on each of them. All
randomness is derived from the master seed and the case index, so reports
are reproducible and independent of the number of worker threads.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .balls import (
    DEFAULT_THRESHOLDS,
    ExactnessThresholds,
    ProjectionAnalysis,
    analyze_split,
    analyze_subspace,
    ball_shape,
    complexity_of_image,
)
from .config import Config
from .exceptions import SympballError, ValidationError
from .matcore import DEFAULT_TOLERANCE, Tolerance, norm_max
from .projection import (
    BlockPartition,
    Ellipsoid,
    Side,
    contains,
    lift_to_boundary,
    project_ellipsoid,
    projection_residual,
    sample_boundary,
    sample_interior,
    spd_inverse,
)
from .symplectic import (
    ComplexSubspace,
    direct_sum,
    dof_indices,
    embedding_spectrum_pattern,
    inverse_spectrum_check,
    lemma1_check,
    random_orthosymplectic,
    random_spd,
    random_symplectic,
    spectrum_dominates,
    standard_j,
    symplectic_spectrum,
    unitary_reduction,
    williamson,
)
from .utils import derive_rng, derive_seed

logger = logging.getLogger("sympball.campaign")

PERTURBATIONS = (1e-4, 1e-7)
# Spread cap for the split base of perturbed cases.
PERTURBED_MAX_SPREAD = 1.0

INTERIOR_POINTS = 2000
LIFT_POINTS = 200

CHECK_ATOL = 1e-8
AGREEMENT_RTOL = 1e-9
BRIDGE_TOLERANCE = Tolerance(rel=1e-8, abs=1e-12)


class CaseKind(Enum):
    GENERIC = "generic"
    EXACT = "exact"
    PERTURBED = "perturbed"


@dataclass(frozen=True)
class CampaignSettings:
    """Scale and seeding of a campaign."""

    sizes: List[int]
    cases: int
    spreads: List[float]
    seed: int
    samples: int
    max_workers: int = 4
    max_n: int = 10
    R: float = 1.0

    def __post_init__(self) -> None:
        if not self.sizes or any(n < 1 for n in self.sizes):
            raise ValidationError("Sizes must be positive", field="n", value=self.sizes)
        if max(self.sizes) > self.max_n:
            raise ValidationError(f"n must not exceed {self.max_n}", field="n",
                                  value=max(self.sizes))
        if not self.spreads or any(not s > 0 for s in self.spreads):
            raise ValidationError("Spreads must be positive", field="spread", value=self.spreads)
        if self.cases < 0:
            raise ValidationError("Case count must be non-negative", field="cases", value=self.cases)
        if self.samples < 0:
            raise ValidationError("Sample count must be non-negative",
                                  field="samples", value=self.samples)
        if self.max_workers < 1:
            raise ValidationError("max_workers must be positive",
                                  field="max_workers", value=self.max_workers)

    @classmethod
    def from_config(cls, config: Config) -> "CampaignSettings":
        verify = config.verify
        return cls(
            sizes=[int(n) for n in verify['n']],
            cases=int(verify['cases']),
            spreads=[float(s) for s in verify['spread']],
            seed=int(verify['seed']),
            samples=int(verify['samples']),
            max_workers=int(verify['max_workers']),
            max_n=int(verify['max_n']),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": list(self.sizes),
            "cases": self.cases,
            "spread": list(self.spreads),
            "seed": self.seed,
            "samples": self.samples,
            "R": self.R,
        }


@dataclass(frozen=True)
class CaseSpec:
    index: int
    kind: CaseKind
    n: int
    n_A: int
    spread: float
    epsilon: Optional[float] = None


@dataclass
class CaseRecord:
    """Outcome of one campaign case."""

    spec: CaseSpec
    checks: Dict[str, bool] = field(default_factory=dict)
    Lambda_A: List[float] = field(default_factory=list)
    X_norm: Optional[float] = None
    exact: Optional[bool] = None
    borderline: bool = False
    vol_projected: Optional[float] = None
    vol_bound: Optional[float] = None
    containment: Optional[bool] = None
    error: Optional[str] = None

    @property
    def failures(self) -> List[str]:
        return sorted(name for name, ok in self.checks.items() if not ok)

    @property
    def passed(self) -> bool:
        return self.error is None and not self.failures

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.spec.index,
            "kind": self.spec.kind.value,
            "epsilon": self.spec.epsilon,
            "n": self.spec.n,
            "n_A": self.spec.n_A,
            "spread": self.spec.spread,
            "Lambda_A": self.Lambda_A,
            "X_norm": self.X_norm,
            "exact": self.exact,
            "borderline": self.borderline,
            "vol_projected": self.vol_projected,
            "vol_bound": self.vol_bound,
            "containment": self.containment,
            "checks": dict(sorted(self.checks.items())),
            "failures": self.failures,
            "error": self.error,
        }


@dataclass
class CampaignReport:
    """Aggregated campaign result; records are ordered by case index."""

    settings: CampaignSettings
    records: List[CaseRecord]
    wall_time: float = 0.0

    @property
    def seed(self) -> int:
        return self.settings.seed

    @property
    def counts(self) -> Dict[str, int]:
        passed = sum(1 for r in self.records if r.passed)
        return {
            "run": len(self.records),
            "passed": passed,
            "failed": len(self.records) - passed,
            "borderline": sum(1 for r in self.records if r.borderline),
        }

    @property
    def ok(self) -> bool:
        return self.counts["failed"] == 0

    def body(self) -> Dict[str, Any]:
        """Deterministic part of the report (everything but the wall time)."""
        return {
            "seed": self.seed,
            "settings": self.settings.to_dict(),
            "counts": self.counts,
            "cases": [r.to_dict() for r in self.records],
        }

    def to_dict(self) -> Dict[str, Any]:
        data = self.body()
        data["wall_time"] = self.wall_time
        return data


# ============================================================================
# CASE PLANNING
# ============================================================================

def plan_cases(settings: CampaignSettings) -> List[CaseSpec]:
    """
    Stratify ``cases`` cases per size.

    Kinds cycle generic, exact, perturbed (only generic for n = 1), the
    kept block size cycles through the admissible values of each kind and
    the spread cycles through the configured list.

    For n = 1 the only complex subspace of positive dimension is the whole
    phase space, so every n = 1 case has n_A = n: the projection checks
    degenerate to the ball itself and those cases exercise the matrix
    checks (Williamson, positivity routes, inverse spectrum, monotonicity,
    Schur identity) and the unit spectrum of (S S^T)^{-1}.
    """
    specs = []
    index = 0
    for n in settings.sizes:
        kinds = [CaseKind.GENERIC] if n == 1 else list(CaseKind)
        for i in range(settings.cases):
            kind = kinds[i % len(kinds)]
            round_ = i // len(kinds)
            spread = settings.spreads[i % len(settings.spreads)]
            epsilon = None
            if kind is CaseKind.GENERIC:
                n_a = 1 + round_ % n
            else:
                n_a = 1 + round_ % (n - 1)
            if kind is CaseKind.PERTURBED:
                epsilon = PERTURBATIONS[round_ % len(PERTURBATIONS)]
            specs.append(CaseSpec(index=index, kind=kind, n=n, n_A=n_a,
                                  spread=spread, epsilon=epsilon))
            index += 1
    return specs


def build_matrix(spec: CaseSpec, seed: int) -> np.ndarray:
    """The symplectic matrix of a case."""
    n, n_a = spec.n, spec.n_A
    if spec.kind is CaseKind.GENERIC:
        return random_symplectic(n, spec.spread, derive_seed(seed, "generic", spec.index))
    spread = spec.spread
    if spec.kind is CaseKind.PERTURBED:
        spread = min(spread, PERTURBED_MAX_SPREAD)
    s_a = random_symplectic(n_a, spread, derive_seed(seed, "block-a", spec.index))
    s_b = random_symplectic(n - n_a, spread, derive_seed(seed, "block-b", spec.index))
    s = direct_sum(s_a, s_b)
    if spec.kind is CaseKind.PERTURBED:
        s = s @ random_symplectic(n, spec.epsilon, derive_seed(seed, "perturbation", spec.index))
    return s


# ============================================================================
# CHECKS
# ============================================================================

def _straddling_spd(n: int, seed: int, index: int, tol: Tolerance) -> np.ndarray:
    """Random SPD matrix whose smallest symplectic eigenvalue lies in [0.7, 1.3]."""
    m = random_spd(n, derive_seed(seed, "spd", index))
    target = derive_rng(seed, "spd-scale", index).uniform(0.7, 1.3)
    return m * (target / symplectic_spectrum(m, n, tol).min)


def _matrix_checks(record: CaseRecord, m: np.ndarray, seed: int, tol: Tolerance) -> None:
    spec = record.spec
    n = spec.n
    decomposition = williamson(m, n, tol)
    residuals = decomposition.residuals(m)
    record.checks["williamson"] = (
        residuals["reconstruction"] <= CHECK_ATOL * norm_max(m)
        and residuals["symplectic"] <= CHECK_ATOL * max(1.0, norm_max(decomposition.S) ** 2)
    )
    record.checks["positivity_routes"] = lemma1_check(m, n, tol).agree
    pattern = embedding_spectrum_pattern(m, n, tol)
    record.checks["embedding_pattern"] = (pattern.max_deviation <= CHECK_ATOL * max(1.0, pattern.expected[-1])
                                          and pattern.inertia_matches)
    record.checks["inverse_spectrum"] = inverse_spectrum_check(m, n, tol)

    g = derive_rng(seed, "monotonicity", spec.index).standard_normal((2 * n, 2 * n))
    record.checks["monotonicity"] = spectrum_dominates(m, m + 0.25 * g @ g.T, n, tol=tol)

    p = BlockPartition.from_sizes(n, spec.n_A)
    source = Ellipsoid(Q=m)
    record.checks["schur_identity"] = (
        projection_residual(source, p) <= AGREEMENT_RTOL * norm_max(spd_inverse(m))
    )
    if p.n_B:
        projected = project_ellipsoid(source, p, Side.A, tol)
        interior = sample_interior(source, INTERIOR_POINTS, derive_seed(seed, "interior", spec.index))
        z_a, _ = p.split(interior)
        record.checks["projection_sound"] = bool(np.all(projected.contains_point(z_a)))
        edge = sample_boundary(projected, LIFT_POINTS, derive_seed(seed, "lift", spec.index))
        lifted = lift_to_boundary(source, p, edge)
        record.checks["projection_sharp"] = bool(np.all(np.abs(source.gauge(lifted) - 1.0) <= 1e-9))


def _projection_checks(record: CaseRecord, s: np.ndarray, analysis: ProjectionAnalysis,
                    settings: CampaignSettings, tol: Tolerance) -> None:
    spec = record.spec
    record.checks["unit_spectrum"] = bool(np.all(
        np.abs(symplectic_spectrum(ball_shape(s), spec.n, tol).as_array() - 1.0) <= CHECK_ATOL))
    record.checks["spectral_inequality"] = bool(analysis.Lambda_A[-1] <= 1.0 + CHECK_ATOL)
    record.checks["volume_bound"] = analysis.vol_projected >= analysis.vol_bound * (1.0 - AGREEMENT_RTOL)
    record.checks["inscribed_volume"] = bool(
        abs(analysis.vol_inscribed / analysis.vol_bound - 1.0) <= AGREEMENT_RTOL)
    record.checks["criteria_agree"] = analysis.criteria.consistent
    record.checks["block_identity"] = (
        analysis.identity_residual <= CHECK_ATOL * max(1.0, norm_max(s @ s.T)) ** 2)

    containment = contains(analysis.projected, analysis.inscribed, settings.samples,
                           derive_seed(settings.seed, "contains", spec.index))
    record.containment = containment
    record.checks["containment"] = containment

    bridge = lemma1_check(spd_inverse(analysis.projected.Q), spec.n_A, BRIDGE_TOLERANCE)
    record.checks["schur_bridge"] = bridge.psd

    if spec.kind is CaseKind.EXACT:
        record.checks["expected_verdict"] = analysis.exact
    elif spec.kind is CaseKind.GENERIC and spec.n_A < spec.n:
        record.checks["expected_verdict"] = not analysis.exact


def _subspace_checks(record: CaseRecord, s: np.ndarray, analysis: ProjectionAnalysis,
                     settings: CampaignSettings, tol: Tolerance,
                     thresholds: ExactnessThresholds) -> None:
    spec = record.spec
    n, k = spec.n, spec.n_A
    rotation = random_orthosymplectic(n, derive_seed(settings.seed, "subspace", spec.index))
    a, _ = dof_indices(n, k)
    subspace = ComplexSubspace(ambient_n=n, basis=rotation[:, a])

    u = unitary_reduction(subspace, tol)
    j = standard_j(n)
    record.checks["unitary_frame"] = bool(
        norm_max(u.T @ u - np.eye(2 * n)) <= 1e-9
        and norm_max(u.T @ j @ u - j) <= 1e-9)

    # The generating rotation and the reduction frame differ by a unitary
    # acting inside V and its complement, which leaves the analysis invariant.
    reduced = analyze_subspace(s, subspace, settings.R, tol=tol, thresholds=thresholds)
    conjugated = analyze_split(rotation.T @ s, k, settings.R, tol=tol, thresholds=thresholds)
    record.checks["subspace_conjugation"] = bool(
        np.allclose(reduced.Lambda_A, conjugated.Lambda_A, rtol=AGREEMENT_RTOL, atol=AGREEMENT_RTOL)
        and np.isclose(reduced.vol_projected, conjugated.vol_projected, rtol=AGREEMENT_RTOL)
        and np.isclose(reduced.vol_bound, conjugated.vol_bound, rtol=AGREEMENT_RTOL))
    if not reduced.borderline:
        record.checks["subspace_complexity"] = (
            complexity_of_image(s, subspace, tol, thresholds) == reduced.exact)

    # Coordinate subspace: the subspace path must reproduce the split path.
    coordinate = analyze_subspace(s, ComplexSubspace.coordinate(n, k), settings.R,
                                  tol=tol, thresholds=thresholds)
    record.checks["coordinate_subspace"] = bool(
        np.allclose(coordinate.Lambda_A, analysis.Lambda_A, rtol=AGREEMENT_RTOL, atol=AGREEMENT_RTOL)
        and np.isclose(coordinate.vol_projected, analysis.vol_projected, rtol=AGREEMENT_RTOL))


def run_case(spec: CaseSpec, settings: CampaignSettings, tol: Tolerance = DEFAULT_TOLERANCE,
             thresholds: ExactnessThresholds = DEFAULT_THRESHOLDS) -> CaseRecord:
    """Run every check on one case; numerical breakdowns become the record's error."""
    record = CaseRecord(spec=spec)
    try:
        s = build_matrix(spec, settings.seed)
        analysis = analyze_split(s, spec.n_A, settings.R, tol=tol, thresholds=thresholds)
        record.Lambda_A = [float(v) for v in analysis.Lambda_A]
        record.X_norm = analysis.X_norm
        record.exact = analysis.exact
        record.borderline = analysis.borderline
        record.vol_projected = analysis.vol_projected
        record.vol_bound = analysis.vol_bound

        _projection_checks(record, s, analysis, settings, tol)
        _matrix_checks(record, _straddling_spd(spec.n, settings.seed, spec.index, tol),
                       settings.seed, tol)
        _subspace_checks(record, s, analysis, settings, tol, thresholds)
    except (SympballError, np.linalg.LinAlgError) as e:
        record.error = f"{type(e).__name__}: {e}"
        logger.warning(f"Case {spec.index} ({spec.kind.value}, n={spec.n}) failed: {record.error}")
    if record.failures:
        logger.warning(f"Case {spec.index} failed checks: {', '.join(record.failures)}")
    return record


# ============================================================================
# CAMPAIGN
# ============================================================================

def run_campaign(settings: CampaignSettings, tol: Tolerance = DEFAULT_TOLERANCE,
                 thresholds: ExactnessThresholds = DEFAULT_THRESHOLDS,
                 progress: Optional[Callable[[CaseRecord], None]] = None) -> CampaignReport:
    """
    Run a verification campaign.

    Cases run concurrently; the report is assembled by case index so its
    body does not depend on scheduling.
    """
    specs = plan_cases(settings)
    logger.info(f"Running {len(specs)} cases (seed {settings.seed}, "
                f"{settings.max_workers} workers)")
    start = time.monotonic()
    records: Dict[int, CaseRecord] = {}

    with ThreadPoolExecutor(max_workers=settings.max_workers) as executor:
        futures = {
            executor.submit(run_case, spec, settings, tol, thresholds): spec
            for spec in specs
        }
        for future in as_completed(futures):
            spec = futures[future]
            try:
                record = future.result()
            except Exception as e:
                logger.warning(f"Case {spec.index} raised {type(e).__name__}: {e}")
                record = CaseRecord(spec=spec, error=f"{type(e).__name__}: {e}")
            records[spec.index] = record
            if progress:
                progress(record)

    report = CampaignReport(settings=settings,
                            records=[records[i] for i in sorted(records)],
                            wall_time=time.monotonic() - start)
    counts = report.counts
    logger.info(f"Campaign finished: {counts['passed']}/{counts['run']} passed, "
                f"{counts['borderline']} borderline, {report.wall_time:.1f}s")
    return report
