"""
Kernel Tests
Tests the sin/versine/cos kernels across the three branches
"""

import math

import numpy as np
import pytest

from trimode.numerics import cos_kernel, sin_kernel, versine_kernel


def test_trigonometric_values():
    """Closed forms for positive w2"""
    assert sin_kernel(1.0, math.pi / 2) == pytest.approx(1.0, abs=1e-15)
    assert versine_kernel(1.0, math.pi) == pytest.approx(2.0, abs=1e-15)
    assert cos_kernel(1.0, math.pi) == pytest.approx(-1.0, abs=1e-15)
    assert sin_kernel(4.0, 1.0) == pytest.approx(math.sin(2.0) / 2.0, rel=1e-14)


def test_hyperbolic_values():
    """Negative w2 continues through sinh/cosh"""
    assert sin_kernel(-1.0, 1.0) == pytest.approx(math.sinh(1.0), rel=1e-14)
    assert versine_kernel(-1.0, 1.0) == pytest.approx(math.cosh(1.0) - 1.0, rel=1e-14)
    assert cos_kernel(-1.0, 1.0) == pytest.approx(math.cosh(1.0), rel=1e-14)


def test_degenerate_limits():
    """w2 = 0 gives the polynomial limits"""
    assert sin_kernel(0.0, 2.0) == pytest.approx(2.0)
    assert versine_kernel(0.0, 2.0) == pytest.approx(2.0)
    assert cos_kernel(0.0, 2.0) == pytest.approx(1.0)


@pytest.mark.parametrize("w2", [1e-14, -1e-14, 1e-9, -1e-9])
def test_continuity_across_branch_point(w2):
    """Tiny |w2| on either side matches the w2 = 0 limit"""
    t = 2.0
    assert sin_kernel(w2, t) == pytest.approx(sin_kernel(0.0, t), rel=1e-8)
    assert versine_kernel(w2, t) == pytest.approx(versine_kernel(0.0, t), rel=1e-8)


def test_versine_has_no_cancellation():
    """Small arguments keep full relative accuracy"""
    w2, t = 1.0, 1e-5
    assert versine_kernel(w2, t) == pytest.approx(t * t / 2.0, rel=1e-9)


def test_array_inputs():
    w2 = np.array([-1.0, 0.0, 1.0])
    values = versine_kernel(w2, 1.0)
    assert isinstance(values, np.ndarray)
    np.testing.assert_allclose(values, [math.cosh(1.0) - 1.0, 0.5, 1.0 - math.cos(1.0)], rtol=1e-14)
    assert isinstance(sin_kernel(1.0, 1.0), float)
