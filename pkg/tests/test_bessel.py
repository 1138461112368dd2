import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbkg.bessel import SERIES_LIMIT, bessel_k0, bessel_k1
from pbkg.errors import InvalidParameterError

REL = 1e-13

positive = st.floats(min_value=1e-6, max_value=600.0, allow_nan=False)


def ref(nu, z, scaled=False):
    val = mpmath.besselk(nu, z)
    if scaled:
        val *= mpmath.exp(z)
    return float(val)


@settings(max_examples=200, deadline=None)
@given(positive)
def test_k0_matches_mpmath(z):
    assert bessel_k0(z, scaled=True) == pytest.approx(ref(0, z, True), rel=REL)


@settings(max_examples=200, deadline=None)
@given(positive)
def test_k1_matches_mpmath(z):
    assert bessel_k1(z, scaled=True) == pytest.approx(ref(1, z, True), rel=REL)


@pytest.mark.parametrize("fn,nu", [(bessel_k0, 0), (bessel_k1, 1)])
def test_continuous_across_series_switch(fn, nu):
    below = fn(np.nextafter(SERIES_LIMIT, 0))
    above = fn(np.nextafter(SERIES_LIMIT, 3))
    assert below == pytest.approx(above, rel=1e-13)
    assert above == pytest.approx(ref(nu, SERIES_LIMIT), rel=1e-13)


def test_array_input_matches_scalar_calls():
    z = np.array([0.01, 0.5, 2.0, 7.5, 40.0])
    np.testing.assert_allclose(bessel_k0(z), [bessel_k0(v) for v in z], rtol=0)
    np.testing.assert_allclose(bessel_k1(z), [bessel_k1(v) for v in z], rtol=0)


def test_small_argument_asymptotics():
    z = 1e-6
    assert bessel_k0(z) == pytest.approx(-math.log(z / 2) - 0.5772156649015329, rel=1e-10)
    assert z * bessel_k1(z) == pytest.approx(1.0, rel=1e-10)


def test_wronskian_like_recurrence():
    # K_1' = -K_0 - K_1/z, checked by central differences
    z, h = 1.7, 1e-5
    deriv = (bessel_k1(z + h) - bessel_k1(z - h)) / (2 * h)
    assert deriv == pytest.approx(-bessel_k0(z) - bessel_k1(z) / z, rel=1e-8)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_rejects_non_positive_or_non_finite(bad):
    with pytest.raises(InvalidParameterError):
        bessel_k0(bad)
    with pytest.raises(InvalidParameterError):
        bessel_k1(bad)
