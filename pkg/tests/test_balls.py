"""
Tests for projections of symplectic balls and the exactness criteria.
"""

import pytest
import sys
from pathlib import Path

import numpy as np

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / 'src'))

from sympball.balls import (
    DEFAULT_THRESHOLDS,
    ExactnessThresholds,
    Verdict,
    analyze_split,
    analyze_subspace,
    ball_shape,
    classify,
    complexity_of_image,
    exactness_check,
    exactness_criteria,
    image_commutator,
    is_symplectic_ball,
    root_measure,
)
from sympball.exceptions import DimensionMismatch, NotSymplectic
from sympball.projection import Ellipsoid, contains
from sympball.symplectic import (
    ComplexSubspace,
    complex_subspace_from_span,
    direct_sum,
    dof_indices,
    is_symplectic,
    random_orthosymplectic,
    random_symplectic,
)

C = np.array([[0.0, 1.0], [1.0, 0.0]])
SHEAR = np.block([[np.eye(2), np.zeros((2, 2))], [C, np.eye(2)]])


def random_cases(count, seed=0, sizes=(2, 3, 4), spreads=(0.25, 1.0, 2.0)):
    """Yield (s, n, n_a) for random symplectic matrices and splits."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.choice(sizes))
        n_a = int(rng.integers(1, n))
        spread = float(rng.choice(spreads))
        yield random_symplectic(n, spread, int(rng.integers(1 << 31))), n, n_a


class TestClassification:
    """Tests for verdict bands and thresholds."""

    def test_classify(self):
        assert classify(0.0, 1e-8, 1e-6) is Verdict.EXACT
        assert classify(1e-8, 1e-8, 1e-6) is Verdict.EXACT
        assert classify(1e-7, 1e-8, 1e-6) is Verdict.BORDERLINE
        assert classify(1e-6, 1e-8, 1e-6) is Verdict.NOT_EXACT

    def test_thresholds_from_config(self):
        thresholds = ExactnessThresholds.from_config({"exact": 1e-9, "unrelated": 3})
        assert thresholds.exact == 1e-9
        assert thresholds.borderline == DEFAULT_THRESHOLDS.borderline
        assert thresholds.noise_factor == DEFAULT_THRESHOLDS.noise_factor

    def test_root_measure(self):
        assert root_measure(1e-12, 0.0) == pytest.approx(1e-6)
        assert root_measure(3.6e-11, 1e-13) == pytest.approx(np.sqrt(3.59e-11))
        assert root_measure(1e-15, 1e-14) == 0.0

    def test_noise_floor_scales_with_condition(self):
        eps = np.finfo(np.float64).eps
        assert DEFAULT_THRESHOLDS.noise_floor(np.eye(4)) == pytest.approx(64 * eps)
        wide = np.diag([100.0, 1.0, 1.0, 0.01])
        assert DEFAULT_THRESHOLDS.noise_floor(wide) == pytest.approx(64 * eps * 1e4)


class TestShearExample:
    """The hand-derived shear S = [[I, 0], [C, I]] with n = 2, n_A = 1."""

    def test_shear_is_symplectic(self):
        assert is_symplectic(SHEAR, 2)

    def test_analysis(self):
        analysis = analyze_split(SHEAR, 1)
        assert analysis.n == 2
        assert analysis.n_B == 1
        np.testing.assert_allclose(analysis.projected.Q, np.diag([1.0, 0.5]), atol=1e-12)
        assert analysis.Lambda_A[0] == pytest.approx(1 / np.sqrt(2), abs=1e-9)
        assert analysis.vol_projected == pytest.approx(np.pi * np.sqrt(2), abs=1e-9)
        assert analysis.vol_bound == pytest.approx(np.pi, abs=1e-12)
        assert not analysis.exact
        assert analysis.S_B is None
        assert analysis.X_norm == pytest.approx(0.5, abs=1e-12)

    def test_exactness_check(self):
        exact, x_norm = exactness_check(SHEAR, 1)
        assert not exact
        assert x_norm > 0.1

    def test_inscribed_ball(self):
        analysis = analyze_split(SHEAR, 1)
        assert is_symplectic(analysis.S_A, 1)
        assert is_symplectic_ball(analysis.inscribed)
        assert analysis.vol_inscribed == pytest.approx(np.pi, rel=1e-9)
        assert contains(analysis.projected, analysis.inscribed, samples=5000)

    def test_image_is_not_complex(self):
        subspace = ComplexSubspace.coordinate(2, 1)
        assert image_commutator(SHEAR, subspace) > 0.1
        assert not complexity_of_image(SHEAR, subspace)

    def test_criteria_agree(self):
        criteria = exactness_criteria(SHEAR, 1)
        assert criteria.consistent
        assert not criteria.borderline
        for name in ("off_diagonal", "spectrum", "complex_image", "volume"):
            assert criteria[name].verdict is Verdict.NOT_EXACT
        with pytest.raises(KeyError):
            criteria["missing"]


class TestSplitMatrices:
    """Tests for block-diagonal S = S_A (+) S_B."""

    def test_block_diagonal_is_exact(self):
        for seed in range(20):
            s_a = random_symplectic(1 + seed % 2, 1.0, seed)
            s_b = random_symplectic(1 + seed % 3, 1.0, seed + 100)
            s = direct_sum(s_a, s_b)
            n_a = s_a.shape[0] // 2
            analysis = analyze_split(s, n_a, R=1.5)
            assert analysis.exact
            assert not analysis.borderline
            assert analysis.X_norm <= 1e-12
            np.testing.assert_allclose(analysis.Lambda_A, np.ones(n_a), atol=1e-9)
            assert analysis.vol_projected == pytest.approx(analysis.vol_bound, rel=1e-9)
            assert analysis.criteria.consistent
            assert analysis.S_B is not None
            assert is_symplectic(analysis.S_A, n_a)
            assert is_symplectic(analysis.S_B, analysis.n_B)
            np.testing.assert_allclose(analysis.inscribed.Q, analysis.projected.Q, atol=1e-8)
            np.testing.assert_allclose(analysis.inscribed_B.Q, analysis.projected_B.Q, atol=1e-8)

    def test_split_factors_reproduce_s(self):
        s_a = random_symplectic(1, 0.5, seed=1)
        s_b = random_symplectic(2, 0.5, seed=2)
        analysis = analyze_split(direct_sum(s_a, s_b), 1)
        np.testing.assert_allclose(analysis.S_A @ analysis.S_A.T, s_a @ s_a.T, atol=1e-9)
        np.testing.assert_allclose(analysis.S_B @ analysis.S_B.T, s_b @ s_b.T, atol=1e-9)

    def test_whole_space(self):
        s = random_symplectic(2, 1.0, seed=4)
        analysis = analyze_split(s, 2)
        assert analysis.exact
        assert analysis.X_norm == 0.0
        np.testing.assert_array_equal(analysis.frame, np.eye(4))
        np.testing.assert_allclose(analysis.projected.Q, ball_shape(s))
        assert exactness_check(s, 2) == (True, 0.0)

    def test_empty_block_rejected(self):
        with pytest.raises(DimensionMismatch):
            analyze_split(np.eye(4), 0)
        with pytest.raises(DimensionMismatch):
            analyze_split(np.eye(4), 3)

    def test_not_symplectic_rejected(self):
        with pytest.raises(NotSymplectic):
            analyze_split(np.diag([2.0, 2.0, 1.0, 1.0]), 1)

    def test_center_and_radius(self):
        center = np.array([1.0, 2.0, 3.0, 4.0])
        analysis = analyze_split(SHEAR, 1, R=2.0, center=center)
        np.testing.assert_array_equal(analysis.projected.center, [1.0, 3.0])
        np.testing.assert_array_equal(analysis.inscribed.center, [1.0, 3.0])
        assert analysis.vol_bound == pytest.approx(4 * np.pi)
        assert analysis.vol_projected == pytest.approx(4 * np.pi * np.sqrt(2))


class TestPerturbedSplits:
    """Split matrices composed with exp(eps J H): the criteria must never contradict each other."""

    @staticmethod
    def perturbed(n, n_a, epsilon, seed):
        s_a = random_symplectic(n_a, 1.0, seed)
        s_b = random_symplectic(n - n_a, 1.0, seed + 1000)
        return direct_sum(s_a, s_b) @ random_symplectic(n, epsilon, seed + 2000)

    @pytest.mark.parametrize("epsilon", [1e-4, 1e-7])
    def test_criteria_agree(self, epsilon):
        for seed in range(60):
            n = 2 + seed % 3
            n_a = 1 + (seed // 3) % (n - 1)
            analysis = analyze_split(self.perturbed(n, n_a, epsilon, seed), n_a)
            assert analysis.criteria.consistent, analysis.criteria.to_dict()

    def test_quadratic_measures_follow_off_diagonal_block(self):
        # relative |X| of a few 1e-6 pairs with a deficit of a few 1e-11
        for seed in range(30):
            analysis = analyze_split(self.perturbed(2, 1, 1e-4, seed), 1)
            if analysis.criteria["off_diagonal"].verdict is Verdict.NOT_EXACT:
                assert analysis.criteria["spectrum"].verdict is not Verdict.EXACT
                assert analysis.criteria["volume"].verdict is not Verdict.EXACT

    def test_small_perturbation_is_not_flagged_inexact(self):
        for seed in range(30):
            analysis = analyze_split(self.perturbed(3, 1, 1e-7, seed), 1)
            assert analysis.criteria["spectrum"].verdict is not Verdict.NOT_EXACT
            assert analysis.criteria["volume"].verdict is not Verdict.NOT_EXACT


class TestInequalities:
    """Properties that hold for every symplectic S and every split."""

    def test_spectrum_below_one(self):
        for s, n, n_a in random_cases(100, seed=1):
            analysis = analyze_split(s, n_a)
            assert np.all(analysis.Lambda_A <= 1.0 + 1e-8)

    def test_volume_chain(self):
        for s, n, n_a in random_cases(100, seed=2):
            analysis = analyze_split(s, n_a, R=0.7)
            assert analysis.vol_inscribed == pytest.approx(analysis.vol_bound, rel=1e-9)
            assert analysis.vol_projected >= analysis.vol_bound * (1.0 - 1e-9)

    def test_inscribed_is_contained(self):
        for s, n, n_a in random_cases(10, seed=3, spreads=(0.25, 1.0)):
            analysis = analyze_split(s, n_a)
            assert contains(analysis.projected, analysis.inscribed, samples=5000, seed=n)

    def test_identity_residual(self):
        for s, n, n_a in random_cases(50, seed=4):
            analysis = analyze_split(s, n_a)
            scale = max(1.0, np.max(np.abs(s)) ** 4)
            assert analysis.identity_residual <= 1e-8 * scale

    def test_criteria_consistent(self):
        for s, n, n_a in random_cases(50, seed=5):
            analysis = analyze_split(s, n_a)
            assert analysis.criteria.consistent
            if not analysis.borderline:
                assert analysis.exact == (analysis.criteria["spectrum"].verdict is Verdict.EXACT)

    def test_to_dict(self):
        document = analyze_split(SHEAR, 1).to_dict()
        assert document["exact"] is False
        assert document["S_B"] is None
        assert set(document["criteria"]) == {"off_diagonal", "spectrum", "complex_image", "volume"}
        assert "projected_B" not in document


class TestSubspaces:
    """Tests for projections onto arbitrary complex subspaces."""

    def test_coordinate_subspace_matches_split(self):
        for seed in range(20):
            s = random_symplectic(3, 1.0, seed)
            k = 1 + seed % 2
            by_split = analyze_split(s, k)
            by_subspace = analyze_subspace(s, ComplexSubspace.coordinate(3, k))
            np.testing.assert_allclose(by_subspace.Lambda_A, by_split.Lambda_A, rtol=1e-8)
            assert by_subspace.vol_projected == pytest.approx(by_split.vol_projected, rel=1e-8)
            assert by_subspace.exact == by_split.exact

    def test_rotated_subspace(self):
        for seed in range(20):
            n, k = 3, 1
            u = random_orthosymplectic(n, seed)
            a, _ = dof_indices(n, k)
            subspace = complex_subspace_from_span(u[:, a])
            s = random_symplectic(n, 1.0, seed + 50)
            analysis = analyze_subspace(s, subspace, R=1.0)
            assert analysis.frame.shape == (6, 2)
            np.testing.assert_allclose(analysis.frame.T @ analysis.frame, np.eye(2), atol=1e-9)
            assert analysis.vol_projected >= np.pi - 1e-9
            assert np.all(analysis.Lambda_A <= 1.0 + 1e-8)

    def test_subspace_projection_is_sharp(self):
        s = random_symplectic(2, 1.0, seed=9)
        u = random_orthosymplectic(2, seed=3)
        subspace = complex_subspace_from_span(u[:, dof_indices(2, 1)[0]])
        analysis = analyze_subspace(s, subspace)
        source = Ellipsoid(Q=ball_shape(s))
        points = analysis.embed(analysis.projected.boundary_points(np.eye(2)))
        # points on the shadow boundary are never inside the source
        assert np.all(source.gauge(points) >= 1.0 - 1e-9)

    def test_image_of_split_matrix_is_complex(self):
        s = direct_sum(random_symplectic(1, 1.0, 1), random_symplectic(1, 1.0, 2))
        assert complexity_of_image(s, ComplexSubspace.coordinate(2, 1))

    def test_subspace_dimension_check(self):
        with pytest.raises(DimensionMismatch):
            analyze_subspace(np.eye(4), ComplexSubspace.coordinate(3, 1))


class TestSymplecticBalls:
    """Tests for the symplectic-ball predicate."""

    def test_image_of_ball(self):
        s = random_symplectic(2, 1.0, seed=6)
        assert is_symplectic_ball(Ellipsoid.ball(4).transform(s))

    def test_squeezed_ellipsoid(self):
        assert not is_symplectic_ball(Ellipsoid(Q=np.diag([4.0, 1.0])))
        assert is_symplectic_ball(Ellipsoid(Q=np.diag([4.0, 0.25])))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
