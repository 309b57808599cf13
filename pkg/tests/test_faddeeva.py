import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qshutter.faddeeva import FaddeevaOverflowError, wofz, wofz_derivative, wofz_scaled

mpmath.mp.dps = 40


def w_mp(z):
    z = mpmath.mpc(z)
    return complex(mpmath.exp(-z * z) * mpmath.erfc(-1j * z))


coord = st.floats(min_value=-60, max_value=60, allow_nan=False)
upper = st.floats(min_value=0, max_value=60, allow_nan=False)


def test_origin():
    assert wofz(0.0) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("y, expected", [(1.0, 0.42758357615580700), (100.0, 0.0056416137829894)])
def test_imaginary_axis_reference(y, expected):
    # w(iy) = exp(y^2) erfc(y), evaluated independently via scipy's scaled erfc
    from scipy.special import erfcx

    assert erfcx(y) == pytest.approx(expected, rel=1e-12)
    assert complex(wofz(1j * y)) == pytest.approx(erfcx(y), rel=1e-13)


@settings(max_examples=300, deadline=None)
@given(coord, upper)
def test_upper_half_plane_vs_mpmath(x, y):
    z = complex(x, y)
    ref = w_mp(z)
    assert abs(wofz(z) - ref) <= 1e-12 * abs(ref)


@settings(max_examples=200, deadline=None)
@given(st.floats(-6, 6), st.floats(-5, 0))
def test_lower_half_plane_vs_mpmath(x, y):
    z = complex(x, y)
    ref = w_mp(z)
    # reflection inherits the conditioning of exp(-z^2)
    cond = 1 + abs(cmath.exp(-z * z)) / max(abs(ref), 1e-300)
    assert abs(wofz(z) - ref) <= 1e-13 * cond * abs(ref)


@pytest.mark.parametrize("z", [1e7 + 1j, 3e8j, 9.0 + 0.5j, 7.9 + 0.1j, 8.0 + 0j, 1e-12 + 1e-12j,
                               0.5 + 1e-9j, 20 - 0.0j])
def test_region_boundaries(z):
    ref = w_mp(z)
    assert abs(wofz(z) - ref) <= 1e-12 * abs(ref)


@settings(max_examples=100, deadline=None)
@given(coord, st.floats(-4, 4))
def test_conjugation_symmetry(x, y):
    z = complex(x, y)
    # w(-conj z) = conj w(z)
    a = complex(wofz(-z.conjugate()))
    b = complex(wofz(z)).conjugate()
    assert abs(a - b) <= 1e-13 * max(abs(b), 1e-300)


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5), st.floats(0, 5))
def test_reflection_identity(x, y):
    z = complex(x, y)
    lhs = complex(wofz(-z)) + complex(wofz(z))
    rhs = 2 * cmath.exp(-z * z)
    assert abs(lhs - rhs) <= 1e-13 * max(abs(rhs), abs(complex(wofz(z))))


@settings(max_examples=100, deadline=None)
@given(st.floats(-30, 30))
def test_real_axis(x):
    w = complex(wofz(x))
    # imaginary part is 2 Dawson(x)/sqrt(pi)
    ref = complex(math.exp(-x * x), float(2 / mpmath.sqrt(mpmath.pi) * _dawson(x)))
    assert abs(w - ref) <= 1e-13 * abs(ref)


def _dawson(x):
    x = mpmath.mpf(x)
    return mpmath.sqrt(mpmath.pi) / 2 * mpmath.exp(-x * x) * mpmath.erfi(x)


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10), st.floats(0.1, 10))
def test_derivative_matches_finite_difference(x, y):
    z = complex(x, y)
    h = 1e-5
    fd = (complex(wofz(z + h)) - complex(wofz(z - h))) / (2 * h)
    assert abs(complex(wofz_derivative(z)) - fd) <= 1e-7 * max(1.0, abs(fd))


def test_array_in_array_out():
    z = np.array([[0.1, 1j], [3 + 2j, -1 - 1j]])
    out = wofz(z)
    assert out.shape == z.shape
    for zz, ww in zip(z.ravel(), out.ravel()):
        assert ww == pytest.approx(w_mp(zz), rel=1e-12)


def test_scaled_merges_overflowing_prefactor():
    # exp(-z^2) alone overflows here, but the scaled product is moderate
    z = complex(5.0, -30.0)
    s = z * z
    val = complex(wofz_scaled(z, s))
    ref = 2 - complex(mpmath.exp(s) * (mpmath.mpc(w_mp(-z))))
    assert val == pytest.approx(ref, rel=1e-12)


def test_overflow_raises_with_exponent():
    with pytest.raises(FaddeevaOverflowError) as info:
        wofz(complex(0.0, -40.0))
    assert info.value.exponent > 700
    assert isinstance(info.value, OverflowError)


@pytest.mark.parametrize("bad", [complex(float("nan"), 0), complex(0, float("inf")), float("nan")])
def test_nonfinite_input_rejected(bad):
    with pytest.raises(ValueError):
        wofz(bad)
