"""Continuum correlators of the deformed Klein-Gordon field.

All momentum integrals run over ``k in R`` with measure ``dk / (4 pi omega_k)``
and are folded onto ``[0, inf)`` before being handed to
:mod:`pbkg.quadrature`.  Two facts organize the module:

* ``int_0^inf cos(b k) / omega_k dk = K_0(m b)`` for ``b > 0``, so every
  equal-time two-point function is a combination of ``K_0`` values;
* at coincident arguments that integral diverges like ``ln(Lambda)``.
  Divergent quantities are never returned as numbers.  They raise
  :class:`~pbkg.errors.DivergenceError` whose ``scan`` hook measures the
  divergence rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_k0, bessel_k1
from .errors import DivergenceError, InsufficientDataError, InvalidParameterError
from .field import alpha_beta
from .pseudoboson import as_theta
from .quadrature import (
    DEFAULT_EPS_SCHEDULE,
    QuadSpec,
    fit_log_divergence,
    integrate_interval,
    integrate_oscillatory,
    oscillatory_schedule,
    regulated_limit,
    richardson_extrapolate,
    integrate_regulated,
)

TWO_PI = 2 * math.pi
DEFAULT_CUTOFF_FACTORS = (10, 20, 40, 80, 160, 320)
REGULARIZED_LABEL = "regularized, derived"


@dataclass(frozen=True)
class CorrelatorResult:
    """Value of a continuum integral with its error estimate and provenance.

    Attributes
    ----------
    value : complex
    abs_error_estimate : float
    method : str
        Quadrature route that produced the value.
    regulator : tuple or float or None
        The eps schedule or cutoff, when one was used.
    converged : bool
        ``True`` only if ``abs_error_estimate`` is within the requested tolerance.
    note : str
    """

    value: complex
    abs_error_estimate: float
    method: str
    regulator: object = None
    converged: bool = True
    note: str = ""


@dataclass(frozen=True)
class DivergenceScan:
    """Cutoff dependence of a log-divergent quantity, fitted as ``slope ln(Lambda) + intercept``."""

    cutoffs: tuple
    values: tuple
    slope: float
    intercept: float
    fit_residual: float
    theta: float = 0.0
    x: float = 0.0
    m: float = 1.0


def _amp_inverse_omega(m):
    m2 = m * m

    def amp(k):
        return 1.0 / np.sqrt(k * k + m2)

    return amp


def bessel_integral(b, m, quad=None):
    """``int_0^inf cos(b k) / sqrt(k^2 + m^2) dk`` by oscillatory quadrature."""
    quad = quad or QuadSpec()
    return integrate_oscillatory(_amp_inverse_omega(m), abs(b), "cos", quad, scale=max(m, 1.0 / abs(b)))


def _result(res, quad, factor=1.0, **kw):
    value = factor * res.value
    err = abs(factor) * res.err
    return CorrelatorResult(value=complex(value), abs_error_estimate=err, method=res.method,
                            converged=err <= quad.abs_tol * max(1.0, abs(factor)), **kw)


def _log_scan_hook(theta, x, m):
    return lambda: divergence_scan(theta, x, m)


def delta_plus(x, y, t, s, m, quad=None):
    """``int dk / (4 pi omega) exp(i k (x - y) - i omega (t - s))``.

    Equal times use the between-zeros engine and equal ``(1/2pi) K_0(m|x-y|)``;
    unequal times are evaluated with the exponential regulator.
    """
    quad = quad or QuadSpec()
    delta, tau = abs(x - y), t - s
    if delta == 0 and tau == 0:
        raise DivergenceError("coincident points: the two-point function diverges logarithmically",
                              scan=_log_scan_hook(0.0, x, m))
    if tau == 0:
        res = bessel_integral(delta, m, quad)
        return _result(res, quad, 1 / TWO_PI)
    if delta == abs(tau):
        raise DivergenceError("light-cone separation: the two-point function diverges logarithmically")
    m2 = m * m

    def integrand(k):
        om = np.sqrt(k * k + m2)
        return np.cos(delta * k) * np.exp(-1j * tau * om) / om

    slow = abs(delta - abs(tau))
    schedule = oscillatory_schedule(slow, quad)
    ext = regulated_limit(integrand, delta + abs(tau), quad, scale=max(m, 1.0 / slow), schedule=schedule)
    return CorrelatorResult(value=complex(ext.limit) / TWO_PI, abs_error_estimate=ext.err / TWO_PI,
                            method="exp-regulator+richardson", regulator=schedule,
                            converged=ext.err / TWO_PI <= max(quad.abs_tol, 1e-7))


def f2_equal_time(theta, x, y, m, quad=None):
    """Equal-time ``<e0, Phi_theta(x,0) Phi_theta(y,0) e0>`` in the continuum.

    The mode integrand ``alpha_theta(x) beta_theta(y)`` splits exactly into

        cos(2 theta) e^{i k (x-y)} + i sin(2 theta) cos(k (x+y))   (after k -> -k symmetrization)

    so the result is ``[cos 2theta K_0(m|x-y|) + i sin 2theta K_0(m|x+y|)] / (2 pi)``.
    A piece whose Bessel argument vanishes diverges unless its prefactor is
    exactly zero.
    """
    quad = quad or QuadSpec()
    th = as_theta(theta)
    total, err, methods = 0j, 0.0, []
    pieces = ((th.cos2, abs(x - y), 1.0), (th.sin2, abs(x + y), 1j))
    for coeff, b, unit in pieces:
        if coeff == 0.0:
            continue
        if b == 0.0:
            raise DivergenceError(
                f"coincident-point F2 at theta={th.theta!r}: coefficient {coeff!r} multiplies a "
                "logarithmically divergent integral",
                scan=_log_scan_hook(th.theta, x, m),
            )
        res = bessel_integral(b, m, quad)
        total += unit * coeff * res.value / TWO_PI
        err += abs(coeff) * res.err / TWO_PI
        methods.append(res.method)
    note = "finite part only" if th.cos2 == 0.0 else ""
    return CorrelatorResult(value=complex(total), abs_error_estimate=err, method=" + ".join(methods) or "trivial",
                            converged=err <= quad.abs_tol, note=note)


@dataclass(frozen=True)
class F2Pi4:
    quadrature: CorrelatorResult
    oracle: complex
    rel_diff: float


def f2_pi4(x, m, quad=None):
    """``(i / 2pi) int_0^inf cos(2 k x) / omega_k dk`` against ``(i / 2pi) K_0(2 m |x|)``."""
    quad = quad or QuadSpec()
    if x == 0:
        raise DivergenceError("K0(2m|x|) diverges as x -> 0", scan=_log_scan_hook(math.pi / 4, 0.0, m))
    res = bessel_integral(2 * abs(x), m, quad)
    q = _result(res, quad, 1j / TWO_PI)
    oracle = 1j * bessel_k0(2 * m * abs(x)) / TWO_PI
    return F2Pi4(quadrature=q, oracle=oracle, rel_diff=abs(q.value - oracle) / abs(oracle))


def _check_cutoffs(cutoffs, m):
    cutoffs = tuple(float(c) for c in cutoffs)
    if len(cutoffs) < 4:
        raise InsufficientDataError(f"need >= 4 cutoffs, got {len(cutoffs)}")
    if any(a >= b for a, b in zip(cutoffs, cutoffs[1:])):
        raise InvalidParameterError("cutoffs must be strictly increasing")
    if cutoffs[0] < 10 * m * (1 - 1e-12):
        raise InvalidParameterError(f"cutoffs must be >= 10 m = {10 * m}")
    return cutoffs


def divergence_scan(theta, x, m, cutoffs=None, quad=None):
    """Real part of the equal-point F2 with ``|k| <= Lambda``, fitted against ``ln(Lambda)``.

    The integrand is the literal ``Re[alpha_theta(k;x,0) beta_theta(k;x,0)] / (4 pi omega)``,
    integrated numerically; the expected slope is ``cos(2 theta) / (2 pi)``.
    """
    quad = quad or QuadSpec()
    if cutoffs is None:
        cutoffs = [m * f for f in DEFAULT_CUTOFF_FACTORS]
    cutoffs = _check_cutoffs(cutoffs, m)
    th = as_theta(theta)
    m2 = m * m

    def integrand(k):
        kf = np.asarray(k, dtype=float)
        a, b = alpha_beta(th, kf, x, 0.0, m)
        ap, bp = alpha_beta(th, -kf, x, 0.0, m)
        return (np.real(a * b) + np.real(ap * bp)) / (4 * np.pi * np.sqrt(kf * kf + m2))

    values = []
    lower = 0.0
    running = 0.0
    for lam in cutoffs:
        # panels no wider than the oscillation period of cos(2 k x)
        width = min(math.pi / max(abs(x), 1e-12), max(m, 1.0))
        n = max(1, int(math.ceil((lam - lower) / width)))
        running += integrate_interval(integrand, lower, lam, quad.replace(extended=False), n_panels=n).value
        values.append(running)
        lower = lam
    fit = fit_log_divergence(cutoffs, values)
    return DivergenceScan(cutoffs=cutoffs, values=tuple(values), slope=fit.slope, intercept=fit.intercept,
                          fit_residual=fit.residual, theta=th.theta, x=x, m=m)


@dataclass(frozen=True)
class RegularizedG2:
    values: tuple
    extrapolated: complex
    err: float
    oracle: complex
    label: str = REGULARIZED_LABEL

    @property
    def rel_diff(self):
        return abs(self.extrapolated - self.oracle) / abs(self.oracle)


def g2_oracle(x, m):
    """``i m K_1(2 m |x|) / (4 pi |x|)``: the regularized momentum two-point value."""
    return 1j * m * bessel_k1(2 * m * abs(x)) / (4 * math.pi * abs(x))


def g2_pi4_regularized(x, m, eps_schedule=DEFAULT_EPS_SCHEDULE, quad=None):
    """``-(i/2pi) int_0^inf omega_k e^{-eps k} cos(2 k x) dk`` extrapolated to ``eps -> 0``."""
    quad = quad or QuadSpec()
    if x == 0:
        raise DivergenceError("momentum two-point function diverges quadratically at x = 0", order="quadratic")
    eps_schedule = tuple(float(e) for e in eps_schedule)
    b = 2 * abs(x)
    m2 = m * m

    def integrand(k):
        return np.sqrt(k * k + m2) * np.cos(b * k)

    values = []
    for eps in eps_schedule:
        res = integrate_regulated(integrand, eps, b, quad, scale=max(m, 1.0 / b))
        values.append((eps, -1j * res.value / TWO_PI))
    ext = richardson_extrapolate(values)
    return RegularizedG2(values=tuple(values), extrapolated=complex(ext.limit), err=ext.err, oracle=g2_oracle(x, m))


@dataclass(frozen=True)
class CommKernels:
    """Equal-time commutator kernels of ``Phi`` and ``Pi`` with their adjoints.

    ``invariant_*`` use the translation-invariant argument ``x - y``; ``derived_*``
    integrate the literal mode-algebra integrand, which depends on ``x + y``.
    """

    invariant_phi: complex
    derived_phi: complex
    invariant_pi: complex
    derived_pi: complex
    err: float


def _fold(f):
    def folded(k):
        return f(k) + f(-k)

    return folded


def _regulated_over_r(f, freqs, quad, m):
    """Abel-regulated ``int_R f`` with ``freqs`` the oscillation frequencies present."""
    fast = max(freqs)
    slow = min(v for v in freqs if v > 0)
    schedule = oscillatory_schedule(slow, quad)
    ext = regulated_limit(_fold(f), fast, quad, scale=max(m, 1.0 / slow), schedule=schedule)
    return complex(ext.limit), ext.err


def comm_kernels(theta, x, y, t, m, quad=None):
    """``[Phi, Phi^dagger]`` and ``[Pi, Pi^dagger]`` kernels at equal time ``t``.

    Every integral is defined by the exponential regulator and Richardson
    extrapolation.  Frequencies ``|x -+ y| - 2|t|`` equal to zero put the
    point on the light cone, where the kernels are not finite.
    """
    quad = (quad or QuadSpec()).replace(extended=False)
    th = as_theta(theta)
    if t == 0:
        return CommKernels(0j, 0j, 0j, 0j, 0.0)
    m2 = m * m
    delta, sigma, tt = x - y, x + y, 2 * abs(t)
    for arg in (abs(delta), abs(sigma)):
        if abs(arg - tt) < 1e-12:
            raise DivergenceError(f"light-cone configuration |argument| = 2|t| = {tt}")
    cth = as_theta(-th.theta)
    pref = th.sin2 / TWO_PI

    def invariant(weight):
        def f(k):
            om = np.sqrt(k * k + m2)
            return weight(om) * np.cos(delta * k) * np.sin(2 * om * t)
        return f

    def derived(weight, first, second):
        def f(k):
            om = np.sqrt(k * k + m2)
            ax, bx = alpha_beta(first, k, x, t, m)
            ay, by = alpha_beta(second, k, y, t, m)
            return weight(om) / (4 * np.pi) * (ax * by - bx * ay)
        return f

    inv, lin = (lambda om: 1.0 / om), (lambda om: om)
    freq_invariant = (abs(delta) + tt, abs(abs(delta) - tt))
    freq_derived = (abs(sigma) + tt, abs(abs(sigma) - tt), abs(delta))
    out, err = [], 0.0
    for fn, freqs, factor in (
        (invariant(inv), freq_invariant, -pref),
        (derived(inv, th, cth), freq_derived, 1.0),
        (invariant(lin), freq_invariant, pref),
        (derived(lin, cth, th), freq_derived, 1.0),
    ):
        if factor == 0.0:
            out.append(0j)
            continue
        value, e = _regulated_over_r(fn, freqs, quad, m)
        out.append(factor * value)
        err = max(err, abs(factor) * e)
    return CommKernels(invariant_phi=out[0], derived_phi=out[1], invariant_pi=out[2], derived_pi=out[3], err=err)
