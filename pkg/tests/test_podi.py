"""POD basis extraction and coefficient interpolation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hemoflow.errors import (DegenerateInputError, ExtrapolationError,
                             InvalidArgumentError)
from hemoflow.podi import (SnapshotSet, cumulative_energy, pod_basis, train)


def random_snapshots(n, ns, seed, weighted=False):
    rng = np.random.default_rng(seed)
    S = rng.standard_normal((n, ns))
    w = rng.uniform(0.5, 2.0, n) if weighted else None
    params = np.linspace(0.0, 1.0, ns)
    return SnapshotSet(S, params, weight=w)


class TestCumulativeEnergy:
    def test_hand_value(self):
        assert np.allclose(cumulative_energy([2.0, 1.0]), [0.8, 1.0])

    def test_ascending_input_is_refused(self):
        with pytest.raises(InvalidArgumentError):
            cumulative_energy([3.0, 4.0])

    def test_empty_input_is_refused(self):
        with pytest.raises(InvalidArgumentError):
            cumulative_energy([])

    def test_negative_input_is_refused(self):
        with pytest.raises(InvalidArgumentError):
            cumulative_energy([2.0, -1.0])


class TestPodBasis:
    def test_singular_values_match_dense_svd(self):
        for seed in range(20):
            snaps = random_snapshots(50, 8, seed)
            basis = pod_basis(snaps, energy_threshold=1.0)
            ref = np.linalg.svd(snaps.S, compute_uv=False)
            assert np.allclose(basis.singular_values, ref,
                               rtol=1e-8, atol=1e-8 * ref[0])

    def test_weighted_singular_values_match_scaled_svd(self):
        snaps = random_snapshots(60, 7, seed=3, weighted=True)
        basis = pod_basis(snaps, energy_threshold=1.0)
        ref = np.linalg.svd(np.sqrt(snaps.weight)[:, None] * snaps.S,
                            compute_uv=False)
        assert np.allclose(basis.singular_values, ref, rtol=1e-8)

    def test_rank_one_matrix_keeps_one_mode(self):
        u = np.arange(1.0, 31.0)
        S = np.outer(u, [1.0, 2.0, 3.0])
        basis = pod_basis(SnapshotSet(S, [0.0, 1.0, 2.0]),
                          energy_threshold=0.999)
        assert basis.k == 1
        assert basis.singular_values[1] <= 1e-12 * basis.singular_values[0]

    def test_modes_are_orthonormal_in_weighted_inner_product(self):
        snaps = random_snapshots(80, 10, seed=5, weighted=True)
        basis = pod_basis(snaps, energy_threshold=1.0)
        gram = basis.modes.T @ (snaps.weight[:, None] * basis.modes)
        assert np.abs(gram - np.eye(basis.k)).max() < 1e-10

    def test_truncation_error_matches_discarded_energy(self):
        snaps = random_snapshots(40, 9, seed=7, weighted=True)
        for threshold in (0.9, 0.99, 0.9999):
            basis = pod_basis(snaps, energy_threshold=threshold)
            resid = snaps.S - basis.modes @ basis.project(snaps.S)
            resid_norm = np.sqrt(np.sum(snaps.weight[:, None] * resid**2))
            expected = np.sqrt(np.sum(basis.singular_values[basis.k:] ** 2))
            assert resid_norm == pytest.approx(expected, rel=1e-8,
                                               abs=1e-8 * basis.singular_values[0])

    def test_retained_modes_grow_with_threshold(self):
        snaps = random_snapshots(40, 9, seed=11)
        ks = [pod_basis(snaps, energy_threshold=t).k
              for t in (0.5, 0.9, 0.999, 1.0)]
        assert ks == sorted(ks)
        assert ks[-1] == 9

    def test_threshold_is_validated(self):
        snaps = random_snapshots(10, 3, seed=0)
        for bad in (0.0, -0.5, 1.5):
            with pytest.raises(InvalidArgumentError):
                pod_basis(snaps, energy_threshold=bad)

    def test_zero_matrix_is_degenerate(self):
        with pytest.raises(DegenerateInputError):
            pod_basis(SnapshotSet(np.zeros((5, 2)), [0.0, 1.0]))

    def test_sign_convention_is_deterministic(self):
        snaps = random_snapshots(30, 5, seed=13)
        a = pod_basis(snaps, energy_threshold=1.0)
        b = pod_basis(SnapshotSet(snaps.S.copy(), snaps.params.copy()),
                      energy_threshold=1.0)
        assert np.array_equal(a.modes, b.modes)


class TestSnapshotSetValidation:
    def test_duplicate_parameters_are_refused(self):
        with pytest.raises(InvalidArgumentError):
            SnapshotSet(np.ones((4, 2)), [1.0, 1.0])

    def test_column_count_must_match_parameters(self):
        with pytest.raises(InvalidArgumentError):
            SnapshotSet(np.ones((4, 3)), [1.0, 2.0])

    def test_weights_must_be_positive(self):
        with pytest.raises(InvalidArgumentError):
            SnapshotSet(np.ones((2, 2)), [0.0, 1.0],
                        weight=np.array([1.0, 0.0]))


class TestRomModel:
    @staticmethod
    def smooth_snapshots(ns=11, weighted=True):
        """Fields varying smoothly in the parameter, exactly rank 3."""
        x = np.linspace(0.0, 1.0, 200)
        params = np.linspace(3.0, 5.0, ns)
        S = np.column_stack([np.sin(np.pi * x) * pi
                             + np.cos(np.pi * x) * pi**2
                             + x * np.exp(-pi) for pi in params])
        w = np.full(200, 0.005) if weighted else None
        return SnapshotSet(S, params, weight=w), x

    def test_training_points_reproduce_truncated_projection(self):
        snaps, _ = self.smooth_snapshots()
        model = train(snaps, energy_threshold=0.99)
        U = model.basis
        for j, pi in enumerate(snaps.params):
            s = snaps.S[:, j]
            proj = U.modes @ U.project(s)
            scale = np.abs(s).max()
            assert np.abs(model.predict(pi) - proj).max() < 1e-9 * scale

    def test_interpolation_error_small_between_training_points(self):
        snaps, x = self.smooth_snapshots(ns=21)
        model = train(snaps, energy_threshold=1.0)
        pi = 4.35
        exact = (np.sin(np.pi * x) * pi + np.cos(np.pi * x) * pi**2
                 + x * np.exp(-pi))
        err = np.abs(model.predict(pi) - exact).max()
        assert err < 1e-3 * np.abs(exact).max()

    def test_rbf_interpolation_also_works(self):
        snaps, x = self.smooth_snapshots(ns=11)
        model = train(snaps, energy_threshold=1.0,
                      interpolation_kind="rbf")
        pi = 3.45
        exact = (np.sin(np.pi * x) * pi + np.cos(np.pi * x) * pi**2
                 + x * np.exp(-pi))
        err = np.abs(model.predict(pi) - exact).max()
        assert err < 1e-2 * np.abs(exact).max()

    def test_extrapolation_is_refused_by_default(self):
        snaps, _ = self.smooth_snapshots()
        model = train(snaps)
        with pytest.raises(ExtrapolationError):
            model.predict(10.0)

    def test_extrapolation_opt_in_clamps_linear_models(self):
        snaps, _ = self.smooth_snapshots()
        model = train(snaps)
        edge = model.predict(5.0)
        out = model.predict(10.0, allow_extrapolation=True)
        assert np.allclose(out, edge)

    def test_single_snapshot_cannot_be_interpolated(self):
        with pytest.raises(InvalidArgumentError):
            train(SnapshotSet(np.ones((5, 1)), [3.0]))

    def test_unknown_interpolation_kind_is_refused(self):
        snaps, _ = self.smooth_snapshots()
        with pytest.raises(InvalidArgumentError):
            train(snaps, interpolation_kind="spline")

    @given(seed=st.integers(0, 100))
    @settings(max_examples=20, deadline=None)
    def test_full_threshold_reconstructs_training_data(self, seed):
        snaps = random_snapshots(60, 6, seed, weighted=True)
        model = train(snaps, energy_threshold=1.0)
        for j, pi in enumerate(snaps.params):
            err = np.abs(model.predict(pi) - snaps.S[:, j]).max()
            assert err < 1e-8 * np.abs(snaps.S).max()
