"""Test functions, delta-sequences and smearing of the momentum two-point kernel.

Fourier transforms use the unitary convention

    f_hat(p) = (2 pi)^{-1/2} int f(u) exp(-i p u) du,

under which smearing ``G(x) = -(i / 4 pi) int omega_k exp(2 i k x) dk`` against
``f`` becomes ``-(i / (2 sqrt(2 pi))) int omega_k f_hat(2k) exp(2 i k y) dk``.

Every family here is a real, even profile translated to ``center``, so
``f_hat(p) = exp(-i p center) h(p)`` with ``h`` real and even.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import CoverageError, InvalidParameterError
from .quadrature import QuadSpec, gauss_legendre, integrate_oscillatory, integrate_interval, regulated_limit

SQRT_2PI = math.sqrt(2 * math.pi)
FAMILIES = ("gaussian", "bump")
# composite Gauss rule on [-1, 1] for bump transforms; resolves |q| up to ~1500
_BUMP_PANELS = 128


def _bump_profile(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


@lru_cache(maxsize=None)
def _bump_rule():
    nodes, weights = gauss_legendre(24, extended=False)
    edges = np.linspace(-1.0, 1.0, _BUMP_PANELS + 1)
    half = np.diff(edges) / 2
    mids = (edges[:-1] + edges[1:]) / 2
    u = (mids[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel() * _bump_profile(u)
    keep = w > 0
    return u[keep], w[keep]


@lru_cache(maxsize=None)
def bump_mass():
    """``int_{-1}^{1} exp(-1 / (1 - u^2)) du`` (about 0.443994)."""
    return float(integrate_interval(_bump_profile, -1.0, 1.0, QuadSpec(extended=False), n_panels=64).value)


@dataclass(frozen=True)
class TestFunction:
    """Gaussian or compactly supported bump, translated and scaled.

    ``gaussian``: ``normalization * exp(-(x - center)^2 / (2 width^2))``.
    ``bump``: ``normalization * phi((x - center) / width) / width`` with
    ``phi`` the unit-mass ``exp(-1/(1 - u^2))`` profile on ``(-1, 1)``,
    so its integral is ``normalization``.
    """

    __test__ = False  # not a pytest class

    family: str
    center: float = 0.0
    width: float = 1.0
    normalization: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParameterError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if not self.width > 0:
            raise InvalidParameterError(f"width must be positive, got {self.width}")

    @classmethod
    def gaussian(cls, center=0.0, width=1.0, normalization=None):
        """Gaussian; unit integral unless ``normalization`` (the peak value) is given."""
        if normalization is None:
            normalization = 1.0 / (width * SQRT_2PI)
        return cls("gaussian", center, width, normalization)

    @classmethod
    def bump(cls, center=0.0, width=1.0, normalization=1.0):
        return cls("bump", center, width, normalization)

    @property
    def support(self):
        """Closed interval outside which ``f`` vanishes (to rounding for Gaussians)."""
        if self.family == "bump":
            return self.center - self.width, self.center + self.width
        reach = 40.0 * self.width  # exp(-800) underflows
        return self.center - reach, self.center + reach

    @property
    def has_analytic_hat(self):
        return self.family == "gaussian"

    @property
    def integral(self):
        if self.family == "gaussian":
            return self.normalization * self.width * SQRT_2PI
        return self.normalization

    def __call__(self, x):
        u = (np.asarray(x, dtype=float) - self.center) / self.width
        if self.family == "gaussian":
            return self.normalization * np.exp(-0.5 * u * u)
        return self.normalization * _bump_profile(u) / (bump_mass() * self.width)

    def profile_hat(self, p):
        """Real even part ``h(p) = exp(i p center) f_hat(p)``."""
        p = np.asarray(p, dtype=float)
        if self.family == "gaussian":
            return self.normalization * self.width * np.exp(-0.5 * (self.width * p) ** 2)
        u, w = _bump_rule()
        q = (p * self.width).ravel()
        out = np.empty_like(q)
        for start in range(0, q.size, 4096):
            chunk = q[start:start + 4096]
            out[start:start + 4096] = np.cos(np.outer(chunk, u)) @ w
        return (self.normalization / (bump_mass() * SQRT_2PI)) * out.reshape(p.shape)


def fourier_hat(f, p):
    """``f_hat(p)`` in the unitary ``exp(-i p u)`` convention."""
    p = np.asarray(p, dtype=float)
    return np.exp(-1j * p * f.center) * f.profile_hat(p)


def fourier_hat_numeric(f, p, n_panels=256):
    """``f_hat(p)`` by direct quadrature over the support (no closed forms)."""
    a, b = f.support
    spec = QuadSpec(extended=False)
    re = integrate_interval(lambda u: f(u) * np.cos(p * u), a, b, spec, n_panels).value
    im = integrate_interval(lambda u: f(u) * np.sin(p * u), a, b, spec, n_panels).value
    return complex(re, -im) / SQRT_2PI


@dataclass(frozen=True)
class DeltaSequence:
    """``delta_n(x) = n * mother(n x)`` for a centered unit-mass bump mother."""

    mother: TestFunction
    n: int

    def __post_init__(self):
        mo = self.mother
        if mo.family != "bump" or mo.center != 0.0 or mo.width > 1.0:
            raise InvalidParameterError("mother must be a bump centered at 0 with support inside [-1, 1]")
        if abs(mo.integral - 1.0) > 1e-10:
            raise InvalidParameterError(f"mother must have unit integral, got {mo.integral}")
        if int(self.n) != self.n or self.n < 1:
            raise InvalidParameterError(f"n must be a positive integer, got {self.n}")


def standard_mother():
    return TestFunction.bump(0.0, 1.0, 1.0)


def delta_member(seq):
    """The ``n``-th member as a :class:`TestFunction` (support ``[-w/n, w/n]``)."""
    mo = seq.mother
    return TestFunction.bump(mo.center, mo.width / seq.n, mo.normalization)


@dataclass(frozen=True)
class GridKernel:
    """Kernel sampled on a uniform grid, linearly interpolated between samples."""

    x: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        v = np.asarray(self.values)
        if x.ndim != 1 or x.shape != v.shape or x.size < 2 or np.any(np.diff(x) <= 0):
            raise InvalidParameterError("kernel grid must be 1-d, increasing, and match its values")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)

    @classmethod
    def sample(cls, kernel, a, b, n):
        x = np.linspace(a, b, n)
        return cls(x, kernel(x))

    def __call__(self, x):
        if np.iscomplexobj(self.values):
            return np.interp(x, self.x, self.values.real) + 1j * np.interp(x, self.x, self.values.imag)
        return np.interp(x, self.x, self.values)


def convolve(kernel, f, y):
    """``int f(y - x) kernel(x) dx`` over the overlap of ``f``'s support with the grid.

    The overlap is split at every grid node so each panel sees a linear
    kernel times a smooth ``f``.

    Raises
    ------
    CoverageError
        If the grid does not cover ``y - support(f)``.
    """
    lo, hi = y - f.support[1], y - f.support[0]
    if lo < kernel.x[0] - 1e-12 or hi > kernel.x[-1] + 1e-12:
        raise CoverageError(f"kernel grid [{kernel.x[0]}, {kernel.x[-1]}] does not cover [{lo}, {hi}]")
    inner_nodes = kernel.x[(kernel.x > lo) & (kernel.x < hi)]
    edges = np.concatenate([[lo], inner_nodes, [hi]])
    nodes, weights = gauss_legendre(24, extended=False)
    half = np.diff(edges) / 2
    mids = (edges[:-1] + edges[1:]) / 2
    xs = mids[:, None] + half[:, None] * nodes[None, :]
    vals = f(y - xs) * kernel(xs)
    return complex(np.sum(vals @ weights * half)) if np.iscomplexobj(vals) else float(np.sum(vals @ weights * half))


def smear_g2(f, y, m, quad=None):
    """``-(i / (2 sqrt(2 pi))) int_R omega_k f_hat(2k) exp(2 i k y) dk``.

    With ``f_hat(p) = exp(-i p c) h(p)`` and ``h`` even this is
    ``-(i / sqrt(2 pi)) int_0^inf omega_k h(2k) cos(2 k (y - c)) dk``.
    """
    quad = quad or QuadSpec()
    m2 = m * m

    def amplitude(k):
        kf = np.asarray(k, dtype=float)
        return np.sqrt(kf * kf + m2) * f.profile_hat(2 * kf)

    res = integrate_oscillatory(amplitude, 2 * (y - f.center), "cos", quad.replace(extended=False),
                                scale=max(m, 1.0 / f.width))
    return complex(-1j * res.value / SQRT_2PI)


def smear_g2_position(f, y, m, quad=None, n_panels=16):
    """Position-space counterpart of :func:`smear_g2`.

    Convolves ``f`` with the exponentially regulated kernel
    ``-(i/2pi) int_0^inf omega_k e^{-eps k} cos(2 k x) dk`` and extrapolates
    ``eps -> 0``.  Independent of any Fourier transform of ``f``; used to
    check that the two forms agree.
    """
    quad = (quad or QuadSpec()).replace(extended=False)
    a, b = f.support
    if a <= y <= b:
        raise InvalidParameterError("position-space smearing needs y outside the support of f")
    nodes, weights = gauss_legendre(24, extended=False)
    edges = np.linspace(a, b, n_panels + 1)
    half = np.diff(edges) / 2
    u = ((edges[:-1] + edges[1:])[:, None] / 2 + half[:, None] * nodes[None, :]).ravel()
    wu = ((half[:, None] * weights[None, :]).ravel()) * f(u)
    keep = wu != 0
    u, wu = u[keep], wu[keep]
    # int f(u) G(y - u) du with G(x) = -(i/2pi) int omega cos(2 k x)
    dist = 2 * (y - u)
    m2 = m * m

    def integrand(k):
        kk = np.asarray(k, dtype=float)
        om = np.sqrt(kk * kk + m2)
        return om * (np.cos(np.multiply.outer(kk, dist)) @ wu)

    slow = float(np.min(np.abs(dist)))
    schedule = tuple(slow * e for e in (0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125, 0.0015625))
    ext = regulated_limit(integrand, float(np.max(np.abs(dist))), quad, scale=max(m, 1.0 / slow), schedule=schedule)
    return complex(-1j * ext.limit / (2 * math.pi))
