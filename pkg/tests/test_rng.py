import numpy as np
import pytest

from qnbench import rng


class TestStreams:
    def test_same_seed_same_stream(self):
        assert np.array_equal(rng.normals(7, 100), rng.normals(7, 100))
        assert np.array_equal(rng.uniforms(7, 100), rng.uniforms(7, 100))

    def test_different_seeds_differ(self):
        assert not np.array_equal(rng.normals(7, 100), rng.normals(8, 100))

    def test_counter_based_slicing(self):
        # any slice of a uniform stream can be produced independently
        whole = rng.uniforms(3, 50)
        tail = rng.uniforms(3, 30, start=20)
        assert np.array_equal(whole[20:], tail)

    def test_uniforms_in_unit_interval(self):
        u = rng.uniforms(11, 10_000)
        assert np.all(u >= 0.0)
        assert np.all(u < 1.0)
        assert abs(u.mean() - 0.5) < 0.02

    def test_normals_moments(self):
        z = rng.normals(13, 200_000)
        assert abs(z.mean()) < 0.01
        assert abs(z.std() - 1.0) < 0.01
        assert abs(np.mean(z ** 3)) < 0.03  # symmetric
        assert abs(np.mean(z ** 4) - 3.0) < 0.1  # Gaussian kurtosis

    def test_normals_odd_count(self):
        assert rng.normals(5, 7).shape == (7,)

    def test_rejects_negative_count(self):
        with pytest.raises(ValueError):
            rng.normals(1, -1)


class TestDeriveSeed:
    def test_deterministic(self):
        assert rng.derive_seed(9, 1, 2) == rng.derive_seed(9, 1, 2)

    def test_tag_order_matters(self):
        assert rng.derive_seed(9, 1, 2) != rng.derive_seed(9, 2, 1)

    def test_derived_streams_decorrelated(self):
        a = rng.normals(rng.derive_seed(9, 0), 5000)
        b = rng.normals(rng.derive_seed(9, 1), 5000)
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.05


class TestUnitVector:
    def test_unit_norm(self):
        for d in (1, 2, 10):
            v = rng.unit_vector(d, seed=21)
            assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)

    def test_direction_varies_with_seed(self):
        assert not np.array_equal(rng.unit_vector(4, 1), rng.unit_vector(4, 2))
