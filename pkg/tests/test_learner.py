import numpy as np
import pytest

from fbplearn import (
    DivergenceError,
    GridSpec,
    Image,
    ScanGeometry,
    SpectralFilter,
    TrainConfig,
    auto_learning_rate,
    default_geometry,
    grad_check,
    gradient,
    make_training_set,
    modified_ramp_filter,
    objective,
    prepare_samples,
    ramlak_filter,
    train,
)
from fbplearn.learner import _step_rule


@pytest.fixture
def small_setup():
    grid = GridSpec(32)
    geom = default_geometry(grid, num_angles=24)
    samples = prepare_samples(make_training_set(grid, 3), geom)
    return grid, geom, samples


def zero_sample(grid, geom):
    img = Image(grid, np.zeros((grid.size, grid.size)))
    return prepare_samples([img], geom)[0]


class TestObjective:
    def test_zero_residual_is_zero(self, small_setup):
        grid, geom, _ = small_setup
        filt = ramlak_filter(geom)
        assert objective(filt, [zero_sample(grid, geom)], grid) == 0.0

    def test_zero_filter_gives_half_energy(self, small_setup):
        grid, geom, samples = small_setup
        zero = SpectralFilter(geom.pad_length, geom.bin_spacing, np.zeros(geom.pad_length))
        expected = np.mean([0.5 * np.sum(s.image.values**2) for s in samples])
        assert objective(zero, samples, grid) == pytest.approx(expected, rel=1e-12)

    def test_ramlak_beats_widened_zero_band(self, small_setup):
        grid, geom, samples = small_setup
        assert objective(ramlak_filter(geom), samples, grid) < objective(
            modified_ramp_filter(geom), samples, grid
        )

    def test_empty_samples(self, small_setup):
        grid, geom, _ = small_setup
        with pytest.raises(ValueError):
            objective(ramlak_filter(geom), [], grid)


class TestGradient:
    def test_zero_residual_gives_zero_gradient(self, small_setup):
        grid, geom, _ = small_setup
        g = gradient(ramlak_filter(geom), zero_sample(grid, geom), grid)
        assert not g.any()

    def test_symmetric(self, small_setup):
        grid, geom, samples = small_setup
        g = gradient(modified_ramp_filter(geom), samples[-1], grid)
        n = geom.pad_length
        for k in range(1, n):
            assert g[k] == g[n - k]

    def test_grid_mismatch(self, small_setup):
        grid, geom, samples = small_setup
        with pytest.raises(ValueError):
            gradient(ramlak_filter(geom), samples[0], GridSpec(16))


class TestAutoLearningRate:
    def test_step_rule_scalings(self):
        base = _step_rule(0.5, 100.0)
        assert _step_rule(0.5, 1000.0) == pytest.approx(base * 0.1)
        assert _step_rule(1.0, 100.0) == pytest.approx(base * 2.0)

    def test_gradient_scaling_end_to_end(self, small_setup):
        grid, geom, samples = small_setup
        filt = modified_ramp_filter(geom)
        eta1 = auto_learning_rate(filt, samples, grid)
        # Scaling every image by sqrt(10) (sinograms regenerated) scales the
        # gradient by 10 and therefore the step by 0.1.
        scaled_imgs = [
            Image(grid, np.sqrt(10.0) * s.image.values) for s in samples
        ]
        scaled = prepare_samples(scaled_imgs, geom)
        eta2 = auto_learning_rate(filt, scaled, grid)
        assert eta2 == pytest.approx(eta1 * 0.1, rel=1e-9)

    def test_zero_gradient_fallback(self, small_setup):
        grid, geom, _ = small_setup
        filt = modified_ramp_filter(geom)
        eta = auto_learning_rate(filt, [zero_sample(grid, geom)], grid)
        assert eta == 1.0

    def test_positive_and_finite(self, small_setup):
        grid, geom, samples = small_setup
        eta = auto_learning_rate(modified_ramp_filter(geom), samples, grid)
        assert np.isfinite(eta) and eta > 0


class TestTrain:
    def config(self, grid, geom, **kw):
        defaults = dict(grid=grid, geom=geom, epochs=2, shuffle_seed=7)
        defaults.update(kw)
        return TrainConfig(**defaults)

    def test_validation(self, small_setup):
        grid, geom, _ = small_setup
        with pytest.raises(ValueError):
            TrainConfig(grid=grid, geom=geom, epochs=0)
        with pytest.raises(ValueError):
            TrainConfig(grid=grid, geom=geom, learning_rate=-1.0)
        with pytest.raises(ValueError):
            TrainConfig(grid=grid, geom=geom, init="hann")

    def test_history_shape_and_decrease(self, small_setup):
        grid, geom, samples = small_setup
        history = train(self.config(grid, geom, epochs=3), samples)
        assert len(history.objectives) == 3
        assert len(history.snapshots) == 3
        assert history.final is history.snapshots[-1]
        assert history.objectives[-1] < history.objectives[0]

    def test_deterministic(self, small_setup):
        grid, geom, samples = small_setup
        h1 = train(self.config(grid, geom), samples)
        h2 = train(self.config(grid, geom), samples)
        assert h1.objectives == h2.objectives
        for a, b in zip(h1.snapshots, h2.snapshots):
            np.testing.assert_array_equal(a.coeffs, b.coeffs)

    def test_zero_gradient_keeps_filter(self, small_setup):
        grid, geom, _ = small_setup
        samples = [zero_sample(grid, geom)]
        history = train(self.config(grid, geom, epochs=3), samples)
        init = modified_ramp_filter(geom).coeffs
        for snap in history.snapshots:
            np.testing.assert_array_equal(snap.coeffs, init)
        assert history.objectives == (0.0, 0.0, 0.0)

    def test_symmetry_preserved(self, small_setup):
        grid, geom, samples = small_setup
        history = train(self.config(grid, geom), samples)
        coeffs = history.final.coeffs
        np.testing.assert_array_equal(coeffs[1:], coeffs[1:][::-1])

    def test_divergence_aborts_with_diagnostics(self, small_setup):
        grid, geom, samples = small_setup
        config = self.config(grid, geom, epochs=5, learning_rate=1e30)
        with pytest.raises(DivergenceError) as exc_info:
            train(config, samples)
        err = exc_info.value
        assert err.learning_rate == 1e30
        assert str(err.epoch) in str(err)
        assert "1e+30" in str(err)

    def test_scale_consistency(self, small_setup):
        # Scaling all images by alpha (sinograms regenerated) leaves the
        # auto-rate SGD trajectory unchanged up to rounding.
        grid, geom, samples = small_setup
        alpha = 3.7
        scaled = prepare_samples(
            [Image(grid, alpha * s.image.values) for s in samples], geom
        )
        h1 = train(self.config(grid, geom), samples)
        h2 = train(self.config(grid, geom), scaled)
        a, b = h1.final.coeffs, h2.final.coeffs
        assert np.abs(a - b).max() <= 1e-8 * np.abs(a).max()

    def test_geometry_mismatch(self, small_setup):
        grid, geom, samples = small_setup
        other = default_geometry(grid, num_angles=12)
        with pytest.raises(ValueError):
            train(self.config(grid, other), samples)

    def test_default_samples(self):
        grid = GridSpec(16)
        geom = default_geometry(grid, num_angles=8)
        history = train(TrainConfig(grid=grid, geom=geom, epochs=1))
        assert len(history.objectives) == 1


class TestGradCheck:
    def test_passes_matched_mode(self):
        grid = GridSpec(16)
        geom = default_geometry(grid, num_angles=12)
        report = grad_check(grid, geom, tolerance=1e-5, num_bins=24, seed=3)
        assert report.passed
        assert report.max_rel_error < 1e-5
        assert len(report.bins) == 24

    def test_zero_tolerance_fails(self):
        grid = GridSpec(16)
        geom = default_geometry(grid, num_angles=12)
        report = grad_check(grid, geom, tolerance=0.0, num_bins=20, seed=3)
        assert not report.passed

    def test_deterministic(self):
        grid = GridSpec(16)
        geom = default_geometry(grid, num_angles=12)
        r1 = grad_check(grid, geom, seed=11)
        r2 = grad_check(grid, geom, seed=11)
        assert r1 == r2

    def test_grid_guard(self):
        grid = GridSpec(64)
        geom = default_geometry(grid, num_angles=12)
        with pytest.raises(ValueError):
            grad_check(grid, geom)
