import numpy as np
import pytest

from fbplearn import GridSpec, make_disc, make_held_out, make_training_set


class TestMakeDisc:
    def test_zero_radius_is_empty(self):
        img = make_disc(GridSpec(64), 0.0)
        assert not img.values.any()

    def test_membership(self):
        img = make_disc(GridSpec(512), 100.0, value=1.0)
        assert img.values[256, 256] == 1.0  # center
        assert img.values[0, 0] == 0.0  # corner

    def test_pixel_sum_matches_area(self):
        # Brute-force pixel count against the continuous disc area.
        img = make_disc(GridSpec(512), 100.0, value=1.0)
        area = np.pi * 100.0**2
        assert abs(img.values.sum() - area) / area < 0.02

    def test_radius_bounds(self):
        with pytest.raises(ValueError):
            make_disc(GridSpec(64), -1.0)
        with pytest.raises(ValueError):
            make_disc(GridSpec(64), 33.0)
        make_disc(GridSpec(64), 32.0)  # exactly half-extent is fine

    def test_custom_value_and_spacing(self):
        img = make_disc(GridSpec(32, spacing=2.0), 10.0, value=0.5)
        assert img.values.max() == 0.5
        # pixel at world (2, 0) lies inside radius 10
        assert img.values[16, 17] == 0.5

    @pytest.mark.parametrize("r1,r2", [(3.0, 9.0), (0.0, 5.0), (10.0, 30.0)])
    def test_monotone_in_radius(self, r1, r2):
        grid = GridSpec(64)
        a = make_disc(grid, r1)
        b = make_disc(grid, r2)
        assert np.all(a.values <= b.values)

    def test_quarter_turn_invariance(self):
        img = make_disc(GridSpec(65), 20.0)
        np.testing.assert_array_equal(np.rot90(img.values), img.values)
        img_even = make_disc(GridSpec(64), 20.0)
        np.testing.assert_array_equal(np.rot90(img_even.values), img_even.values)


class TestMakeTrainingSet:
    def test_radii_schedule(self):
        grid = GridSpec(512)
        discs = make_training_set(grid, 10)
        # recover each radius from the pixel areas
        radii = [np.sqrt(d.values.sum() / np.pi) for d in discs]
        expected = [256.0 * i / 11 for i in range(1, 11)]
        np.testing.assert_allclose(radii, expected, rtol=0.02)
        assert all(r2 > r1 for r1, r2 in zip(radii, radii[1:]))

    def test_single_disc(self):
        (disc,) = make_training_set(GridSpec(128), 1)
        radius = np.sqrt(disc.values.sum() / np.pi)
        assert radius == pytest.approx(32.0, rel=0.05)

    def test_shared_grid(self):
        grid = GridSpec(64, spacing=0.5)
        assert all(d.grid == grid for d in make_training_set(grid, 4))

    def test_count_validation(self):
        with pytest.raises(ValueError):
            make_training_set(GridSpec(64), 0)


class TestMakeHeldOut:
    def test_intensity_range(self):
        img = make_held_out(GridSpec(256))
        assert img.values.max() <= 1.0
        assert img.values.min() >= 0.0
        assert img.values.max() > 0.5  # actually has content

    def test_deterministic(self):
        a = make_held_out(GridSpec(256))
        b = make_held_out(GridSpec(256))
        np.testing.assert_array_equal(a.values, b.values)

    def test_differs_from_every_training_disc(self):
        grid = GridSpec(256)
        held = make_held_out(grid)
        for disc in make_training_set(grid, 10):
            assert np.linalg.norm(held.values - disc.values) > 0.0

    def test_not_rotationally_symmetric(self):
        img = make_held_out(GridSpec(256))
        assert not np.array_equal(np.rot90(img.values), img.values)
