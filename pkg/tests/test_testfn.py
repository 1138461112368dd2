import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbkg import testfn as tf
from pbkg.correlators import g2_oracle
from pbkg.errors import CoverageError, InvalidParameterError
from pbkg.quadrature import QuadSpec, integrate_interval


def test_bump_mass_matches_mpmath():
    ref = mpmath.quad(lambda u: mpmath.exp(-1 / (1 - u * u)), [-1, 0, 1])
    assert tf.bump_mass() == pytest.approx(float(ref), rel=1e-13)


@pytest.mark.parametrize("f", [tf.TestFunction.gaussian(0.3, 0.2), tf.TestFunction.bump(-0.4, 0.5, 2.0)],
                         ids=["gaussian", "bump"])
def test_integral_property(f):
    a, b = f.support
    num = integrate_interval(f, a, b, QuadSpec(extended=False), n_panels=64).value
    assert num == pytest.approx(f.integral, rel=1e-12)


def test_bump_vanishes_outside_support():
    f = tf.TestFunction.bump(1.0, 0.25)
    assert f(np.array([0.74, 1.26, 5.0])).tolist() == [0.0, 0.0, 0.0]
    assert f(1.0) > 0


def test_validation():
    with pytest.raises(InvalidParameterError):
        tf.TestFunction("lorentzian")
    with pytest.raises(InvalidParameterError):
        tf.TestFunction.bump(0.0, 0.0)


@settings(max_examples=20, deadline=None)
@given(p=st.floats(-30, 30), c=st.floats(-1, 1), w=st.floats(0.1, 1.0))
def test_gaussian_hat_analytic_vs_numeric(p, c, w):
    f = tf.TestFunction.gaussian(c, w)
    assert tf.fourier_hat(f, p) == pytest.approx(tf.fourier_hat_numeric(f, p), abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(p=st.floats(-60, 60), c=st.floats(-1, 1), w=st.floats(0.1, 1.0))
def test_bump_hat_vs_direct_quadrature(p, c, w):
    f = tf.TestFunction.bump(c, w)
    assert tf.fourier_hat(f, p) == pytest.approx(tf.fourier_hat_numeric(f, p), abs=1e-12)


def test_hat_at_zero_is_scaled_integral():
    f = tf.TestFunction.bump(0.3, 0.4, 1.5)
    assert tf.fourier_hat(f, 0.0) == pytest.approx(1.5 / math.sqrt(2 * math.pi), rel=1e-13)


def test_delta_sequence_members():
    seq = tf.DeltaSequence(tf.standard_mother(), 8)
    member = tf.delta_member(seq)
    assert member.support == (-0.125, 0.125)
    assert member.integral == pytest.approx(1.0)
    assert member(0.0) == pytest.approx(8 * tf.standard_mother()(0.0))


@pytest.mark.parametrize("kw", [dict(n=0), dict(n=2.5)])
def test_delta_sequence_rejects_bad_n(kw):
    with pytest.raises(InvalidParameterError):
        tf.DeltaSequence(tf.standard_mother(), **kw)


@pytest.mark.parametrize("mother", [tf.TestFunction.gaussian(0.0, 0.2), tf.TestFunction.bump(0.1, 0.5),
                                    tf.TestFunction.bump(0.0, 1.0, 2.0)])
def test_delta_sequence_rejects_bad_mother(mother):
    with pytest.raises(InvalidParameterError):
        tf.DeltaSequence(mother, 4)


def test_convolve_against_linear_kernel():
    # f * (a + b x) = a integral + b (y integral - first moment); bump is even about its center
    f = tf.TestFunction.bump(0.2, 0.3)
    kernel = tf.GridKernel.sample(lambda x: 2.0 + 3.0 * x, -2.0, 2.0, 41)
    y = 0.5
    assert tf.convolve(kernel, f, y) == pytest.approx(2.0 + 3.0 * (y - 0.2), rel=1e-10)


def test_convolve_coverage():
    kernel = tf.GridKernel.sample(np.cos, -1.0, 1.0, 11)
    with pytest.raises(CoverageError):
        tf.convolve(kernel, tf.TestFunction.bump(0.0, 0.5), 0.8)


def test_grid_kernel_validation():
    with pytest.raises(InvalidParameterError):
        tf.GridKernel(np.array([0.0, 0.0, 1.0]), np.zeros(3))


def test_fourier_and_position_smearing_agree():
    f = tf.TestFunction.bump(0.2, 0.3)
    a = tf.smear_g2(f, 1.0, 1.0)
    b = tf.smear_g2_position(f, 1.0, 1.0)
    assert abs(a - b) / abs(a) <= 1e-8
    with pytest.raises(InvalidParameterError):
        tf.smear_g2_position(f, 0.3, 1.0)


def _convolved_oracle(f, y, m):
    # int f(u) G(y - u) du with the closed-form kernel, valid while y is outside supp f
    a, b = f.support
    mpmath.mp.dps = 20
    kern = lambda u: f(float(u)) * (g2_oracle(y - float(u), m)).imag  # noqa: E731
    return 1j * float(mpmath.quad(kern, np.linspace(a, b, 9).tolist()))


def test_smearing_matches_convolved_closed_form():
    f = tf.TestFunction.bump(0.1, 0.4)
    assert tf.smear_g2(f, 1.2, 1.0) == pytest.approx(_convolved_oracle(f, 1.2, 1.0), rel=1e-9)


def test_narrow_gaussian_smearing_value():
    # sigma = 0.1 at y = 1 sits about 8% above K1(2)/(4 pi); the convolution explains the gap
    f = tf.TestFunction.gaussian(0.0, 0.1)
    mpmath.mp.dps = 20
    ref = mpmath.quad(lambda u: f(float(u)) * mpmath.besselk(1, 2 * (1 - u)) / (4 * mpmath.pi * (1 - u)),
                      [-0.9, -0.3, 0, 0.3, 0.9])
    v = tf.smear_g2(f, 1.0, 1.0)
    assert v == pytest.approx(1j * float(ref), rel=1e-9)
    assert v.imag == pytest.approx(0.0120159425825, rel=1e-10)
    assert abs(v - g2_oracle(1.0, 1.0)) / abs(g2_oracle(1.0, 1.0)) == pytest.approx(0.0796, abs=1e-3)


@pytest.mark.parametrize("y", [0.5, 1.0, 2.0])
def test_delta_sequence_smearing_converges(y):
    oracle = g2_oracle(y, 1.0)
    vals = [tf.smear_g2(tf.delta_member(tf.DeltaSequence(tf.standard_mother(), n)), y, 1.0) for n in (4, 8, 16, 32)]
    incs = [abs(b - a) for a, b in zip(vals, vals[1:])]
    assert incs[0] > incs[1] > incs[2]
    # second order in 1/n: increments shrink by about four
    assert incs[1] / incs[2] == pytest.approx(4.0, rel=0.1)
    assert abs(vals[-1] - oracle) / abs(oracle) <= 1e-2
    assert all(abs(v.real) <= 1e-12 for v in vals)
