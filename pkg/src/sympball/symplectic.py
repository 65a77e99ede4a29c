"""
Symplectic linear algebra.

The symplectic form, symplecticity checks, symplectic spectra, Williamson
diagonalization, the positivity criterion for M + iJ, random symplectic
generators and complex (J-invariant) subspaces.

Coordinates are always ordered (x_1, ..., x_n, p_1, ..., p_n) and
J = [[0, I], [-I, 0]], so that sigma(z, z') = Jz . z'.
"""

import functools
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg

from .exceptions import (
    DegenerateClusterFailure,
    DimensionMismatch,
    GramSchmidtBreakdown,
    NotComplex,
    NotSymplectic,
    PairingFailed,
    RankDeficient,
    ValidationError,
)
from .matcore import (
    DEFAULT_TOLERANCE,
    Tolerance,
    as_matrix,
    inv,
    inv_sqrt_pd,
    is_psd,
    norm_max,
    require_symmetric,
    sqrt_pd,
    sym_eig,
)

logger = logging.getLogger("sympball.symplectic")

# Relative width of a cluster of repeated symplectic eigenvalues.
CLUSTER_REL = 1e-7
# Williamson postconditions, relative to |M|_max and max(1, |S|_max^2).
WILLIAMSON_CHECK = 1e-8
# Singular values below this fraction of the largest count as zero.
RANK_REL = 1e-10
# Frames of unitary_reduction are accepted at this accuracy.
FRAME_CHECK = 1e-9
# Number of squarings tried by random_symplectic, in order.
EXPM_SQUARINGS = (0, 4, 8)


# ============================================================================
# SYMPLECTIC FORM
# ============================================================================

@functools.lru_cache(maxsize=32)
def standard_j(n: int) -> np.ndarray:
    """
    Standard symplectic matrix J = [[0, I_n], [-I_n, 0]] (read-only).

    Raises:
        ValidationError: If n < 1.
    """
    if n < 1:
        raise ValidationError("Degrees of freedom must be >= 1", field="n", value=n)
    eye = np.eye(n)
    zero = np.zeros((n, n))
    j = np.block([[zero, eye], [-eye, zero]])
    j.setflags(write=False)
    return j


@dataclass(frozen=True)
class SymplecticForm:
    """The standard symplectic form on R^{2n}."""

    n: int

    def __post_init__(self) -> None:
        standard_j(self.n)

    @property
    def J(self) -> np.ndarray:
        return standard_j(self.n)

    def omega(self, z, z_prime) -> float:
        """sigma(z, z') = Jz . z'"""
        return float(np.dot(self.J @ np.asarray(z, dtype=float), np.asarray(z_prime, dtype=float)))


def phase_dimension(m: np.ndarray, name: str = "matrix") -> int:
    """Return n for a 2n x 2n matrix or raise DimensionMismatch."""
    rows, cols = m.shape
    if rows != cols or rows % 2:
        raise DimensionMismatch(f"{name} must be 2n x 2n", expected="even square", actual=m.shape)
    return rows // 2


def _require_phase_matrix(m, n: Optional[int], name: str) -> Tuple[np.ndarray, int]:
    m = as_matrix(m, name)
    size = phase_dimension(m, name)
    if n is not None and size != n:
        raise DimensionMismatch(f"{name} has wrong size", expected=(2 * n, 2 * n), actual=m.shape)
    return m, size


def dof_indices(n: int, n_a: int) -> Tuple[List[int], List[int]]:
    """
    Global indices of the first n_a degrees of freedom and of the rest.

    Returns:
        (A indices ordered x_A then p_A, B indices ordered x_B then p_B).
    """
    if not 0 <= n_a <= n:
        raise DimensionMismatch("Block size out of range", expected=f"0..{n}", actual=n_a)
    a = list(range(n_a)) + list(range(n, n + n_a))
    b = list(range(n_a, n)) + list(range(n + n_a, 2 * n))
    return a, b


def symplectic_residual(s) -> float:
    """|S^T J S - J|_max"""
    s, n = _require_phase_matrix(s, None, "S")
    j = standard_j(n)
    return norm_max(s.T @ j @ s - j)


def is_symplectic(s, n: int, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """
    Test S^T J S = J.

    Returns:
        True iff |S^T J S - J|_max <= abs + rel * |S|_max^2.

    Raises:
        DimensionMismatch: If S is not 2n x 2n.
    """
    s, _ = _require_phase_matrix(s, n, "S")
    return symplectic_residual(s) <= tol.bound(norm_max(s) ** 2)


def require_symplectic(s, n: Optional[int] = None,
                       tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Validate a symplectic matrix, raising NotSymplectic otherwise."""
    s, size = _require_phase_matrix(s, n, "S")
    if not is_symplectic(s, size, tol):
        raise NotSymplectic("Matrix is not symplectic", residual=symplectic_residual(s))
    return s


def symplectic_inverse(s) -> np.ndarray:
    """Inverse of a symplectic matrix, S^{-1} = -J S^T J."""
    s, n = _require_phase_matrix(s, None, "S")
    j = standard_j(n)
    return j.T @ s.T @ j


def direct_sum(s_a, s_b) -> np.ndarray:
    """
    S_A (+) S_B in global (x, p) ordering.

    S_A acts on the first n_A degrees of freedom and S_B on the remaining
    n_B; either factor may be symplectic or an arbitrary 2n_X x 2n_X block.
    """
    s_a, n_a = _require_phase_matrix(s_a, None, "S_A")
    s_b, n_b = _require_phase_matrix(s_b, None, "S_B")
    n = n_a + n_b
    a, b = dof_indices(n, n_a)
    out = np.zeros((2 * n, 2 * n))
    out[np.ix_(a, a)] = s_a
    out[np.ix_(b, b)] = s_b
    return out


# ============================================================================
# SYMPLECTIC SPECTRUM
# ============================================================================

@dataclass(frozen=True)
class SymplecticSpectrum:
    """Ascending, strictly positive symplectic eigenvalues."""

    values: Tuple[float, ...]

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ValidationError("Symplectic spectrum is empty", field="values")
        if any(v <= 0 for v in values):
            raise ValidationError("Symplectic eigenvalues must be positive",
                                  field="values", value=values)
        if any(b < a for a, b in zip(values, values[1:])):
            raise ValidationError("Symplectic spectrum must be ascending",
                                  field="values", value=values)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, index):
        return self.values[index]

    @property
    def min(self) -> float:
        return self.values[0]

    @property
    def max(self) -> float:
        return self.values[-1]

    def as_array(self) -> np.ndarray:
        return np.array(self.values)


def _pair_moduli(squares: np.ndarray, tol: Tolerance) -> np.ndarray:
    """Collapse the doubled eigenvalues of -K^2 into one modulus per pair."""
    squares = np.clip(squares, 0.0, None)
    low, high = squares[0::2], squares[1::2]
    allowed = CLUSTER_REL * squares[-1] + tol.abs
    gaps = np.abs(high - low)
    if np.any(gaps > allowed):
        worst = int(np.argmax(gaps))
        raise PairingFailed(
            "Eigenvalues of -K^2 do not come in pairs",
            details=f"pair {worst}: {low[worst]:.6e} vs {high[worst]:.6e}",
        )
    return np.sqrt(0.5 * (low + high))


def symplectic_spectrum(m, n: int, tol: Tolerance = DEFAULT_TOLERANCE) -> SymplecticSpectrum:
    """
    Symplectic spectrum of a positive definite matrix.

    The moduli of the eigenvalues +-i lambda_j of JM, computed from the
    symmetric matrix -K^2 with K = M^{1/2} J M^{1/2}.

    Args:
        m: 2n x 2n symmetric positive definite matrix.
        n: Degrees of freedom.
        tol: Numerical tolerance.

    Returns:
        Ascending spectrum of length n.

    Raises:
        NotPositiveDefinite: If M is not positive definite.
        PairingFailed: If the spectrum of -K^2 is not doubled.
    """
    m, _ = _require_phase_matrix(m, n, "M")
    root = sqrt_pd(m, tol)
    k = root @ standard_j(n) @ root
    k = 0.5 * (k - k.T)
    squares, _ = sym_eig(k.T @ k, tol)
    return SymplecticSpectrum(tuple(_pair_moduli(squares, tol)))


def spectrum_dominates(m, m_upper, n: int, slack: float = 1e-10,
                       tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """True iff lambda_j(M) <= lambda_j(N) + slack for every j (M <= N implies it)."""
    low = symplectic_spectrum(m, n, tol).as_array()
    high = symplectic_spectrum(m_upper, n, tol).as_array()
    return bool(np.all(low <= high + slack))


def inverse_spectrum_check(m, n: int, tol: Tolerance = DEFAULT_TOLERANCE,
                           rtol: float = 1e-8) -> bool:
    """
    Check that the spectrum of M^{-1} is the reciprocal of that of M.

    The ascending spectrum of M^{-1} is paired with the descending spectrum
    of M: lambda_j(M^{-1}) = 1 / lambda_{n-j+1}(M).
    """
    forward = symplectic_spectrum(m, n, tol).as_array()
    backward = symplectic_spectrum(inv(m), n, tol).as_array()
    expected = 1.0 / forward[::-1]
    return bool(np.allclose(backward, expected, rtol=rtol, atol=tol.abs))


# ============================================================================
# WILLIAMSON DIAGONALIZATION
# ============================================================================

@dataclass(frozen=True)
class WilliamsonDecomposition:
    """M = S^T D S with S symplectic and D = diag(Lambda, Lambda)."""

    S: np.ndarray
    Lambda: np.ndarray

    @property
    def n(self) -> int:
        return len(self.Lambda)

    @property
    def D(self) -> np.ndarray:
        return np.diag(np.concatenate([self.Lambda, self.Lambda]))

    @property
    def spectrum(self) -> SymplecticSpectrum:
        return SymplecticSpectrum(tuple(self.Lambda))

    def reconstruct(self) -> np.ndarray:
        return self.S.T @ self.D @ self.S

    def residuals(self, m) -> dict:
        """Reconstruction and symplecticity residuals (max norm)."""
        return {
            "reconstruction": norm_max(self.reconstruct() - np.asarray(m, dtype=float)),
            "symplectic": symplectic_residual(self.S),
        }


def _clusters(values: np.ndarray) -> List[List[int]]:
    """Group indices of sorted values whose neighbours lie within CLUSTER_REL."""
    width = CLUSTER_REL * max(float(np.max(np.abs(values))), np.finfo(float).tiny)
    groups: List[List[int]] = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[i - 1] <= width:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def _canonical_pairs(kp: np.ndarray, cluster: np.ndarray,
                     chosen: List[np.ndarray]) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    Pick (u, v = -K'u / |K'u|) pairs spanning one eigenspace cluster of -K'^2.

    Pivoted Gram-Schmidt: the candidate column with the largest component
    outside the span chosen so far is taken first.
    """
    dim = cluster.shape[1]
    if dim % 2:
        raise DegenerateClusterFailure("Cluster of -K'^2 has odd dimension",
                                       details=f"dimension {dim}")
    pairs = []
    for _ in range(dim // 2):
        frame = np.column_stack(chosen) if chosen else np.zeros((kp.shape[0], 0))
        residual = cluster - frame @ (frame.T @ cluster)
        residual = residual - frame @ (frame.T @ residual)
        norms = np.linalg.norm(residual, axis=0)
        best = int(np.argmax(norms))
        if norms[best] < 0.5 / np.sqrt(dim):
            raise DegenerateClusterFailure("Cluster basis exhausted",
                                           details=f"residual {norms[best]:.3e}")
        u = residual[:, best] / norms[best]
        kv = kp @ u
        v = -kv / np.linalg.norm(kv)
        v = v - frame @ (frame.T @ v) - u * np.dot(u, v)
        v = v / np.linalg.norm(v)
        pairs.append((u, v))
        chosen.extend([u, v])
    return pairs


def williamson(m, n: int, tol: Tolerance = DEFAULT_TOLERANCE) -> WilliamsonDecomposition:
    """
    Williamson symplectic diagonalization M = S^T D S.

    With K' = M^{-1/2} J M^{-1/2} an orthogonal O is built so that
    O^T K' O = [[0, Lambda^{-1}], [-Lambda^{-1}, 0]], then
    S = D^{-1/2} O^T M^{1/2}.

    Args:
        m: 2n x 2n symmetric positive definite matrix.
        n: Degrees of freedom.
        tol: Numerical tolerance.

    Returns:
        Decomposition with Lambda ascending.

    Raises:
        NotPositiveDefinite: If M is not positive definite.
        DegenerateClusterFailure: If the canonical frame cannot be built or
            the postconditions fail.
    """
    m, _ = _require_phase_matrix(m, n, "M")
    m = require_symmetric(m, tol, "M")
    root = sqrt_pd(m, tol)
    inv_root = inv_sqrt_pd(m, tol)
    kp = inv_root @ standard_j(n) @ inv_root
    kp = 0.5 * (kp - kp.T)

    mu, vecs = sym_eig(kp.T @ kp, tol)
    chosen: List[np.ndarray] = []
    pairs: List[Tuple[np.ndarray, np.ndarray]] = []
    groups = _clusters(mu)
    for group in groups:
        pairs.extend(_canonical_pairs(kp, vecs[:, group], chosen))
    logger.debug(f"Williamson: {len(groups)} clusters for n={n}")

    lam = np.array([1.0 / float(u @ kp @ v) for u, v in pairs])
    if np.any(lam <= 0) or not np.all(np.isfinite(lam)):
        raise DegenerateClusterFailure("Non-positive symplectic eigenvalue in frame")
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    o = np.column_stack([pairs[i][0] for i in order] + [pairs[i][1] for i in order])

    orthogonality = norm_max(o.T @ o - np.eye(2 * n))
    if orthogonality > WILLIAMSON_CHECK:
        raise DegenerateClusterFailure("Williamson frame is not orthogonal",
                                       details=f"|O^T O - I|_max = {orthogonality:.3e}")

    d_half = np.sqrt(np.concatenate([lam, lam]))
    s = (o.T @ root) / d_half[:, None]
    decomposition = WilliamsonDecomposition(S=s, Lambda=lam)

    residuals = decomposition.residuals(m)
    if residuals["reconstruction"] > WILLIAMSON_CHECK * max(norm_max(m), 1.0):
        raise DegenerateClusterFailure("Williamson reconstruction failed",
                                       details=f"|S^T D S - M|_max = {residuals['reconstruction']:.3e}")
    if residuals["symplectic"] > WILLIAMSON_CHECK * max(1.0, norm_max(s) ** 2):
        raise DegenerateClusterFailure("Williamson factor is not symplectic",
                                       details=f"|S^T J S - J|_max = {residuals['symplectic']:.3e}")
    return decomposition


# ============================================================================
# POSITIVITY OF M + iJ
# ============================================================================

@dataclass(frozen=True)
class PositivityResult:
    """Both routes of the M + iJ >= 0 test."""

    psd: bool
    min_spec: float
    embedding_psd: bool

    @property
    def agree(self) -> bool:
        return self.psd == self.embedding_psd

    def __iter__(self):
        return iter((self.psd, self.min_spec))


def hermitian_embedding(m, n: Optional[int] = None) -> np.ndarray:
    """Real embedding [[M, -J], [J, M]] of the Hermitian matrix M + iJ."""
    m, size = _require_phase_matrix(m, n, "M")
    j = standard_j(size)
    return np.block([[m, -j], [j, m]])


def lemma1_check(m, n: int, tol: Tolerance = DEFAULT_TOLERANCE) -> PositivityResult:
    """
    Decide M + iJ >= 0.

    The primary route compares the smallest symplectic eigenvalue with 1;
    the cross-check tests the real embedding for positive semi-definiteness.
    Both use the threshold abs + rel * max(|M|_max, 1).

    Raises:
        NotPositiveDefinite: If M is not positive definite.
    """
    m, _ = _require_phase_matrix(m, n, "M")
    spectrum = symplectic_spectrum(m, n, tol)
    threshold = tol.bound(max(norm_max(m), 1.0))
    psd = spectrum.min >= 1.0 - threshold
    embedding_psd = is_psd(hermitian_embedding(m, n), tol)
    if psd != embedding_psd:
        logger.warning(f"M + iJ positivity routes disagree (min spectrum {spectrum.min:.12g})")
    return PositivityResult(psd=bool(psd), min_spec=spectrum.min, embedding_psd=bool(embedding_psd))


@dataclass(frozen=True)
class EmbeddingPattern:
    """Eigenvalue pattern of the real embedding of D + iJ and inertia of M + iJ."""

    observed: np.ndarray
    expected: np.ndarray
    inertia: Tuple[int, int, int]
    normal_form_inertia: Tuple[int, int, int]

    @property
    def max_deviation(self) -> float:
        return float(np.max(np.abs(self.observed - self.expected)))

    @property
    def inertia_matches(self) -> bool:
        return self.inertia == self.normal_form_inertia


def _inertia(values: np.ndarray, threshold: float) -> Tuple[int, int, int]:
    return (int(np.sum(values < -threshold)),
            int(np.sum(np.abs(values) <= threshold)),
            int(np.sum(values > threshold)))


def embedding_spectrum_pattern(m, n: int, tol: Tolerance = DEFAULT_TOLERANCE,
                               zero_rel: float = 1e-8) -> EmbeddingPattern:
    """
    Compare the embedding spectra with the multiset {lambda_j +- 1}.

    D + iJ has eigenvalues lambda_j +- 1 (each doubled by the real
    embedding). M + iJ is congruent to D + iJ, so it shares the inertia but
    not the eigenvalues.
    """
    decomposition = williamson(m, n, tol)
    lam = decomposition.Lambda
    expected = np.sort(np.concatenate([lam - 1.0, lam - 1.0, lam + 1.0, lam + 1.0]))
    observed, _ = sym_eig(hermitian_embedding(decomposition.D, n), tol)

    direct, _ = sym_eig(hermitian_embedding(m, n), tol)
    threshold_m = zero_rel * max(norm_max(m), 1.0)
    threshold_d = zero_rel * max(float(lam[-1]), 1.0)
    return EmbeddingPattern(
        observed=observed,
        expected=expected,
        inertia=_inertia(direct, threshold_m),
        normal_form_inertia=_inertia(observed, threshold_d),
    )


# ============================================================================
# RANDOM GENERATORS
# ============================================================================

def random_symplectic(n: int, spread: float = 1.0, seed: int = 0,
                      tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """
    Random symplectic matrix exp(J H).

    H is a symmetric Gaussian matrix with entries scaled by
    spread / sqrt(2n), so that the norm of H is of order spread for every n.

    Deterministic for a given (n, spread, seed).

    Raises:
        ValidationError: If n < 1 or spread <= 0.
    """
    if n < 1:
        raise ValidationError("Degrees of freedom must be >= 1", field="n", value=n)
    if not spread > 0:
        raise ValidationError("Spread must be positive", field="spread", value=spread)
    rng = np.random.default_rng(seed)
    h = rng.standard_normal((2 * n, 2 * n))
    h = 0.5 * (h + h.T) * (spread / np.sqrt(2 * n))
    generator = standard_j(n) @ h

    best, best_residual = None, np.inf
    for squarings in EXPM_SQUARINGS:
        s = scipy.linalg.expm(generator / 2.0 ** squarings)
        for _ in range(squarings):
            s = s @ s
        residual = symplectic_residual(s)
        if residual <= tol.bound(norm_max(s) ** 2):
            return s
        logger.debug(f"expm with {squarings} squarings: residual {residual:.3e}")
        if residual < best_residual:
            best, best_residual = s, residual
    logger.warning(f"random_symplectic(n={n}, spread={spread}, seed={seed}) "
                   f"residual {best_residual:.3e} above tolerance")
    return best


def complex_to_real(u: np.ndarray) -> np.ndarray:
    """Real representation [[X, -Y], [Y, X]] of X + iY acting on x + ip."""
    return np.block([[u.real, -u.imag], [u.imag, u.real]])


def random_orthosymplectic(n: int, seed: int = 0) -> np.ndarray:
    """Element of Sp(n) and O(2n) from a Haar-random unitary matrix."""
    if n < 1:
        raise ValidationError("Degrees of freedom must be >= 1", field="n", value=n)
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return complex_to_real(q * phases)


def random_spd(n: int, seed: int = 0, condition: Optional[float] = None) -> np.ndarray:
    """
    Random 2n x 2n symmetric positive definite matrix.

    Without ``condition`` returns A^T A + I with Gaussian A; otherwise the
    eigenvalues are log-spaced between 1 and ``condition`` in a random basis.
    """
    if n < 1:
        raise ValidationError("Degrees of freedom must be >= 1", field="n", value=n)
    rng = np.random.default_rng(seed)
    dim = 2 * n
    if condition is None:
        a = rng.standard_normal((dim, dim))
        m = a.T @ a + np.eye(dim)
    else:
        if not condition >= 1:
            raise ValidationError("Condition number must be >= 1",
                                  field="condition", value=condition)
        q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
        eigenvalues = np.logspace(0.0, np.log10(condition), dim)
        m = (q * eigenvalues) @ q.T
    return 0.5 * (m + m.T)


# ============================================================================
# COMPLEX SUBSPACES
# ============================================================================

@dataclass(frozen=True)
class ComplexSubspace:
    """A J-invariant subspace of R^{2n} given by an orthonormal basis (2n x 2k)."""

    ambient_n: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        basis = np.array(self.basis, dtype=np.float64)
        if basis.ndim != 2 or basis.shape[0] != 2 * self.ambient_n:
            raise DimensionMismatch("Subspace basis has wrong shape",
                                    expected=f"({2 * self.ambient_n}, 2k)", actual=basis.shape)
        if basis.shape[1] == 0 or basis.shape[1] % 2:
            raise DimensionMismatch("Subspace basis must have an even, positive number of columns",
                                    expected="2k", actual=basis.shape[1])
        basis.setflags(write=False)
        object.__setattr__(self, "basis", basis)

    @property
    def k(self) -> int:
        return self.basis.shape[1] // 2

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def commutator_norm(self) -> float:
        """|PJ - JP|_max for the orthogonal projector P."""
        p = self.projector
        j = standard_j(self.ambient_n)
        return norm_max(p @ j - j @ p)

    @classmethod
    def coordinate(cls, n: int, k: int) -> "ComplexSubspace":
        """R^{2k} (+) 0: the first k x-axes and the first k p-axes."""
        if not 1 <= k <= n:
            raise DimensionMismatch("Subspace dimension out of range", expected=f"1..{n}", actual=k)
        a, _ = dof_indices(n, k)
        return cls(ambient_n=n, basis=np.eye(2 * n)[:, a])

    def symplectic_complement(self) -> Optional["ComplexSubspace"]:
        """
        The symplectic orthocomplement V^sigma.

        For a J-invariant V it coincides with the orthogonal complement.
        Returns None when V is the whole space.
        """
        if self.k == self.ambient_n:
            return None
        full, _, _ = scipy.linalg.svd(self.basis)
        return ComplexSubspace(ambient_n=self.ambient_n, basis=full[:, self.dim:])


def orthonormal_span(vectors: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """
    Orthonormal basis of the column span.

    Raises:
        RankDeficient: If the vectors span only the zero subspace.
    """
    u, s, _ = scipy.linalg.svd(vectors, full_matrices=False)
    if s.size == 0 or not s[0] > tol.abs:
        raise RankDeficient("Vectors span the zero subspace")
    rank = int(np.sum(s > RANK_REL * s[0]))
    return u[:, :rank]


def complex_subspace_from_span(vectors, tol: Tolerance = DEFAULT_TOLERANCE) -> ComplexSubspace:
    """
    Build a ComplexSubspace from spanning vectors (2n x m).

    Raises:
        RankDeficient: If the vectors are all zero.
        NotComplex: If the span has odd dimension or is not J-invariant.
    """
    v = as_matrix(vectors, "vectors")
    if v.shape[0] % 2:
        raise DimensionMismatch("Vectors must live in an even-dimensional space",
                                expected="2n rows", actual=v.shape)
    n = v.shape[0] // 2
    q = orthonormal_span(v, tol)
    if q.shape[1] % 2:
        raise NotComplex("Span has odd dimension", details=f"dimension {q.shape[1]}")
    subspace = ComplexSubspace(ambient_n=n, basis=q)
    commutator = subspace.commutator_norm()
    if commutator > tol.bound(1.0):
        raise NotComplex("Span is not invariant under J",
                         details=f"|PJ - JP|_max = {commutator:.3e}")
    return subspace


def unitary_reduction(subspace: ComplexSubspace, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """
    Symplectic orthogonal U mapping R^{2k} (+) 0 onto V.

    The basis of V is read as complex vectors x + ip (on which J acts as
    multiplication by -i); a unitary basis whose first k columns span V is
    taken from the complex SVD and turned into its real representation, so
    that the x-axis j goes to e_j and the p-axis j to -J e_j.

    Raises:
        NotComplex: If the complex span is larger than k.
        GramSchmidtBreakdown: If the frame loses rank or fails its checks.
    """
    n, k = subspace.ambient_n, subspace.k
    c = subspace.basis[:n] + 1j * subspace.basis[n:]
    w, s, _ = scipy.linalg.svd(c)
    if s.size < k or not s[k - 1] > RANK_REL * s[0]:
        raise GramSchmidtBreakdown("Complex span has lower dimension than expected",
                                   details=f"singular values {s}")
    if s.size > k and s[k] > RANK_REL * s[0]:
        raise NotComplex("Complex span exceeds the subspace dimension",
                         details=f"singular value {s[k]:.3e}")

    u = complex_to_real(w)
    j = standard_j(n)
    a, _ = dof_indices(n, k)
    errors = {
        "orthogonal": norm_max(u.T @ u - np.eye(2 * n)),
        "symplectic": norm_max(u.T @ j @ u - j),
        "projector": norm_max(subspace.projector - u[:, a] @ u[:, a].T),
    }
    failed = {key: value for key, value in errors.items() if value > FRAME_CHECK}
    if failed:
        raise GramSchmidtBreakdown("Unitary frame failed its checks", details=failed)
    logger.debug(f"unitary_reduction n={n} k={k}: {errors}")
    return u

