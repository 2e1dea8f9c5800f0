import numpy as np
import pytest

from softadapt import BENCHMARKS, beale, check_gradient, rosenbrock


def rosenbrock_direct(x, y):
    return (1.0 - x) ** 2 + 100.0 * (y - x * x) ** 2


def beale_direct(x, y):
    return (
        (1.5 - x + x * y) ** 2
        + (2.25 - x + x * y**2) ** 2
        + (2.625 - x + x * y**3) ** 2
    )


class TestRosenbrock:
    def test_losses_at_minimum(self):
        spec = rosenbrock()
        losses, _ = spec.problem.eval(np.array([1.0, 1.0]))
        np.testing.assert_array_equal(losses, [0.0, 0.0])

    def test_losses_and_gradients_at_origin(self):
        spec = rosenbrock()
        losses, grads = spec.problem.eval(np.array([0.0, 0.0]))
        np.testing.assert_array_equal(losses, [1.0, 0.0])
        np.testing.assert_array_equal(grads, [[-2.0, 0.0], [0.0, 0.0]])

    def test_losses_off_parabola(self):
        spec = rosenbrock()
        losses, _ = spec.problem.eval(np.array([1.0, 2.0]))
        np.testing.assert_array_equal(losses, [0.0, 100.0])

    def test_components_sum_to_direct_value(self):
        spec = rosenbrock()
        rng = np.random.default_rng(31)
        for _ in range(200):
            x = rng.uniform(-2.0, 2.0, 2)
            losses, _ = spec.problem.eval(x)
            assert losses.sum() == pytest.approx(
                rosenbrock_direct(*x), rel=1e-12, abs=1e-12
            )


class TestBeale:
    def test_losses_at_minimum(self):
        spec = beale()
        losses, _ = spec.problem.eval(np.array([3.0, 0.5]))
        np.testing.assert_array_equal(losses, [0.0, 0.0, 0.0])

    def test_losses_at_origin(self):
        spec = beale()
        losses, _ = spec.problem.eval(np.array([0.0, 0.0]))
        np.testing.assert_allclose(losses, [2.25, 5.0625, 6.890625], rtol=1e-15)

    def test_components_sum_to_direct_value(self):
        spec = beale()
        rng = np.random.default_rng(32)
        for _ in range(200):
            x = rng.uniform(-4.5, 4.5, 2)
            losses, _ = spec.problem.eval(x)
            assert losses.sum() == pytest.approx(beale_direct(*x), rel=1e-12)

    def test_gradients_match_central_differences(self):
        spec = beale()
        rng = np.random.default_rng(33)
        for _ in range(100):
            x = rng.uniform(-4.5, 4.5, 2)
            assert check_gradient(spec.problem, x) < 1e-5


class TestCheckGradient:
    def test_rosenbrock_at_interior_point(self):
        assert check_gradient(rosenbrock().problem, np.array([0.5, 0.5])) < 1e-6

    def test_rejects_nonpositive_h(self):
        with pytest.raises(ValueError):
            check_gradient(rosenbrock().problem, np.array([0.0, 0.0]), h=0.0)

    @pytest.mark.parametrize("name", sorted(BENCHMARKS))
    def test_stationary_at_known_minimum(self, name):
        spec = BENCHMARKS[name]()
        losses, grads = spec.problem.eval(spec.known_minimum)
        assert losses.sum() <= 1e-12
        assert np.linalg.norm(grads.sum(axis=0)) < 1e-6


@pytest.mark.parametrize("name", sorted(BENCHMARKS))
class TestCertification:
    def test_minimum_value(self, name):
        spec = BENCHMARKS[name]()
        losses, _ = spec.problem.eval(spec.known_minimum)
        assert losses.sum() <= 1e-12
        assert spec.minimum_value == 0.0

    def test_minimum_gradient_norm(self, name):
        spec = BENCHMARKS[name]()
        _, grads = spec.problem.eval(spec.known_minimum)
        assert np.linalg.norm(grads) < 1e-10

    def test_gradients_everywhere_sampled(self, name):
        spec = BENCHMARKS[name]()
        rng = np.random.default_rng(34)
        for _ in range(100):
            x = rng.uniform(-4.5, 4.5, 2)
            assert check_gradient(spec.problem, x) < 1e-5

    def test_default_x0_in_domain(self, name):
        spec = BENCHMARKS[name]()
        assert spec.default_x0.shape == (2,)
        losses, _ = spec.problem.eval(spec.default_x0)
        assert np.isfinite(losses).all()
