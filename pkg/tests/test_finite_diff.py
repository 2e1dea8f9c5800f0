import math

import numpy as np
import pytest

from softadapt.finite_diff import (
    MAX_ORDER,
    InsufficientHistoryError,
    backward_coefficients,
    estimate_slope,
)


def taylor_coefficients(order: int) -> np.ndarray:
    """Independent derivation: solve the Taylor system for the stencil.

    Sample points {0, -1, ..., -order}; row k of the system matches the
    k-th Taylor coefficient, with the first derivative on the right-hand
    side.
    """
    pts = -np.arange(order + 1, dtype=float)
    system = np.vstack([pts**k / math.factorial(k) for k in range(order + 1)])
    rhs = np.zeros(order + 1)
    rhs[1] = 1.0
    return np.linalg.solve(system, rhs)


@pytest.mark.parametrize("order", range(1, MAX_ORDER + 1))
def test_coefficients_match_taylor_system(order):
    expected = taylor_coefficients(order)
    got = backward_coefficients(order)
    assert got.shape == (order + 1,)
    np.testing.assert_allclose(got, expected, rtol=1e-12, atol=1e-12)


def test_first_order_coefficients():
    np.testing.assert_array_equal(backward_coefficients(1), [1.0, -1.0])


def test_second_order_coefficients():
    np.testing.assert_allclose(backward_coefficients(2), [1.5, -2.0, 0.5], rtol=1e-15)


def test_third_order_coefficients():
    np.testing.assert_allclose(
        backward_coefficients(3), [11.0 / 6.0, -3.0, 1.5, -1.0 / 3.0], rtol=1e-15
    )


@pytest.mark.parametrize("order", range(1, MAX_ORDER + 1))
def test_coefficients_sum_to_zero(order):
    assert abs(backward_coefficients(order).sum()) < 1e-12


@pytest.mark.parametrize("order", [0, -1, 6, 100])
def test_coefficients_reject_unsupported_order(order):
    with pytest.raises(ValueError, match=r"\[1, 5\]"):
        backward_coefficients(order)


def test_slope_of_two_samples_is_first_difference():
    assert estimate_slope([1.0, 2.0], 1) == 1.0


def test_slope_of_constant_history_is_zero():
    for c in (0.0, -3.5, 1e6):
        assert estimate_slope([c, c, c], 2) == 0.0


def test_slope_exact_on_quadratic():
    # t^2 sampled at t = 0, 1, 2; derivative at the newest sample is 4.
    assert estimate_slope([0.0, 1.0, 4.0], 2) == pytest.approx(4.0, abs=1e-12)


def test_slope_requires_two_samples():
    with pytest.raises(InsufficientHistoryError):
        estimate_slope([1.0], 1)
    with pytest.raises(InsufficientHistoryError):
        estimate_slope([], 3)


def test_slope_rejects_nonpositive_order():
    with pytest.raises(ValueError, match="order"):
        estimate_slope([1.0, 2.0], 0)


@pytest.mark.parametrize("order", range(1, MAX_ORDER + 1))
def test_exact_on_degree_matched_polynomials(order):
    rng = np.random.default_rng(100 + order)
    t = np.arange(order + 1, dtype=float)
    for _ in range(100):
        coeffs = rng.uniform(-10.0, 10.0, order + 1)
        poly = np.polynomial.Polynomial(coeffs)
        samples = poly(t)
        expected = poly.deriv()(t[-1])
        got = estimate_slope(samples, order)
        assert abs(got - expected) <= 1e-9 * max(1.0, abs(expected))


def test_clamps_order_to_history_length():
    rng = np.random.default_rng(7)
    for n in (2, 3, 4, 5):
        samples = rng.uniform(-5, 5, n)
        assert estimate_slope(samples, 10) == estimate_slope(samples, n - 1)


def test_clamps_order_to_table_maximum():
    rng = np.random.default_rng(8)
    samples = rng.uniform(-5, 5, 9)
    assert estimate_slope(samples, 8) == estimate_slope(samples, MAX_ORDER)


def test_linearity():
    rng = np.random.default_rng(9)
    for _ in range(50):
        n = rng.integers(2, 8)
        order = int(rng.integers(1, 6))
        u = rng.uniform(-4, 4, n)
        v = rng.uniform(-4, 4, n)
        a, b = rng.uniform(-3, 3, 2)
        combined = estimate_slope(a * u + b * v, order)
        separate = a * estimate_slope(u, order) + b * estimate_slope(v, order)
        assert abs(combined - separate) < 1e-12 * max(1.0, abs(separate))
