"""Quadrature for semi-infinite oscillatory and regulated integrals.

Two tail strategies are provided for ``int_0^inf a(k) cos(b k) dk`` (or
``sin``):

``between_zeros_acceleration``
    Integrate exactly between consecutive zeros of the trigonometric factor
    (zeros are known in closed form), form the partial sums and accelerate
    them with Wynn's epsilon algorithm (iterated Shanks transform).
``exp_regulator_extrapolation``
    Damp with ``exp(-eps k)``, integrate to where the damping is negligible,
    and extrapolate ``eps -> 0`` with a polynomial (Richardson) fit.

Panel sums are accumulated in ``numpy.longdouble`` by default.  Oscillatory
integrals whose value is exponentially small compared with the integrand
(``K0(20)`` is about ``6e-10`` while single half-periods contribute ``~0.1``)
lose their last significant digits to cancellation in double precision; the
extended accumulator buys three more decimal digits on x86-64.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    ConvergenceError,
    DivergenceError,
    FitError,
    InsufficientDataError,
    InvalidParameterError,
)

TAIL_METHODS = ("between_zeros_acceleration", "exp_regulator_extrapolation")
DEFAULT_EPS_SCHEDULE = (0.2, 0.1, 0.05, 0.025, 0.0125)

# exp(-REGULATOR_DEPTH) is far below every tolerance used in the package
REGULATOR_DEPTH = 40.0


@dataclass(frozen=True)
class QuadSpec:
    """Tolerances and strategy for :func:`integrate_oscillatory`.

    ``finite_cutoff`` is a lower bound for where tail handling starts; the
    integrators also start no earlier than ten characteristic scales.
    """

    abs_tol: float = 1e-10
    finite_cutoff: float = 0.0
    tail_method: str = "between_zeros_acceleration"
    max_subdivisions: int = 50_000
    acceleration_depth: int = 12
    gauss_order: int = 24
    eps_schedule: tuple = DEFAULT_EPS_SCHEDULE
    extended: bool = True

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise InvalidParameterError("abs_tol must be positive")
        if self.tail_method not in TAIL_METHODS:
            raise InvalidParameterError(f"tail_method must be one of {TAIL_METHODS}")
        if self.acceleration_depth < 3:
            raise InvalidParameterError("acceleration_depth must be >= 3")
        if self.finite_cutoff < 0:
            raise InvalidParameterError("finite_cutoff must be non-negative")
        if self.gauss_order < 4:
            raise InvalidParameterError("gauss_order must be >= 4")
        eps = tuple(float(e) for e in self.eps_schedule)
        if len(eps) < 4 or any(e <= 0 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
            raise InvalidParameterError("eps_schedule needs >= 4 strictly decreasing positive values")
        object.__setattr__(self, "eps_schedule", eps)

    @property
    def dtype(self):
        return np.longdouble if self.extended else np.float64

    def replace(self, **changes):
        fields = {k: getattr(self, k) for k in self.__dataclass_fields__}
        fields.update(changes)
        return QuadSpec(**fields)


@dataclass(frozen=True)
class QuadResult:
    value: float
    err: float
    method: str = ""
    n_panels: int = 0


@dataclass(frozen=True)
class Extrapolation:
    limit: complex
    err: float


@dataclass(frozen=True)
class LogFit:
    slope: float
    intercept: float
    residual: float


_PI_LD = np.longdouble("3.141592653589793238462643383279502884")


def _pi(dtype):
    return dtype(_PI_LD) if dtype is np.longdouble else math.pi


@lru_cache(maxsize=None)
def gauss_legendre(n, extended=True):
    """Nodes and weights on ``[-1, 1]``; Newton-polished in ``longdouble``."""
    x, w = np.polynomial.legendre.leggauss(n)
    if not extended:
        return x, w
    x = x.astype(np.longdouble)
    for _ in range(3):
        p, dp = _legendre_with_derivative(n, x)
        x = x - p / dp
    _, dp = _legendre_with_derivative(n, x)
    w = 2 / ((1 - x * x) * dp * dp)
    return x, w


def _legendre_with_derivative(n, x):
    p0, p1 = np.ones_like(x), x.copy()
    for k in range(2, n + 1):
        p0, p1 = p1, ((2 * k - 1) * x * p1 - (k - 1) * p0) / k
    dp = n * (x * p1 - p0) / (x * x - 1)
    return p1, dp


def _gauss_panels(f, a, b, nodes, weights):
    half = (b - a) / 2
    k = (a + b)[:, None] / 2 + half[:, None] * nodes[None, :]
    vals = np.asarray(f(k))
    return half * (vals @ weights)


def panel_integrals(f, edges, spec=None, max_depth=12):
    """Integrals of ``f`` over consecutive panels with adaptive bisection.

    Returns ``(values, errors)`` with one entry per panel of ``edges``.  Each
    panel is compared with the sum over its two halves; panels that disagree
    beyond tolerance are bisected recursively.
    """
    spec = spec or QuadSpec()
    dt = spec.dtype
    nodes, weights = gauss_legendre(spec.gauss_order, spec.extended)
    edges = np.asarray(edges, dtype=dt)
    owner = np.arange(len(edges) - 1)
    a, b = edges[:-1], edges[1:]
    whole = _gauss_panels(f, a, b, nodes, weights)
    values = np.zeros(len(owner), dtype=whole.dtype)
    errors = np.zeros(len(owner), dtype=float)
    eps = float(np.finfo(dt).eps)
    for depth in range(max_depth + 1):
        mid = (a + b) / 2
        left = _gauss_panels(f, a, mid, nodes, weights)
        right = _gauss_panels(f, mid, b, nodes, weights)
        halves = left + right
        diff = np.abs(halves - whole).astype(float)
        local_tol = np.maximum(spec.abs_tol * 1e-3, 64 * eps * np.abs(halves).astype(float))
        done = (diff <= local_tol) | (depth == max_depth)
        np.add.at(values, owner[done], halves[done])
        np.add.at(errors, owner[done], diff[done])
        if done.all():
            break
        keep = ~done
        owner = np.concatenate([owner[keep], owner[keep]])
        a, b = np.concatenate([a[keep], mid[keep]]), np.concatenate([mid[keep], b[keep]])
        whole = np.concatenate([left[keep], right[keep]])
    return values, errors


def integrate_interval(f, a, b, spec=None, n_panels=1):
    """Adaptive Gauss-Legendre integral of a smooth ``f`` over ``[a, b]``."""
    spec = spec or QuadSpec()
    edges = np.linspace(a, b, n_panels + 1, dtype=spec.dtype)
    vals, errs = panel_integrals(f, edges, spec)
    return QuadResult(value=vals.sum(), err=float(errs.sum()), method="gauss-legendre", n_panels=n_panels)


def wynn_epsilon(partial_sums):
    """Accelerated limit of a sequence by Wynn's epsilon algorithm.

    Returns ``(estimate, error)``.  The estimate is the even-column entry with
    the smallest change from its predecessor; that change is the error.
    """
    s = list(partial_sums)
    if len(s) < 3:
        raise InsufficientDataError("epsilon algorithm needs at least 3 terms")
    zero = s[0] * 0
    prev = [zero] * (len(s) + 1)
    cur = s[:]
    estimates = [cur[-1]]
    col = 0
    while len(cur) > 1:
        nxt = []
        for i in range(len(cur) - 1):
            diff = cur[i + 1] - cur[i]
            if diff == 0:
                nxt = None
                break
            nxt.append(prev[i + 1] + 1 / diff)
        if nxt is None:
            # exact stagnation: the even column already holds the limit
            if col % 2 == 0:
                estimates.append(cur[-1])
            break
        prev, cur = cur, nxt
        col += 1
        if col % 2 == 0:
            estimates.append(cur[-1])
    if len(estimates) == 1:
        return estimates[0], abs(s[-1] - s[-2])
    diffs = [abs(estimates[i] - estimates[i - 1]) for i in range(1, len(estimates))]
    best = int(np.argmin(diffs))
    return estimates[best + 1], float(diffs[best])


def _trig(phase, dtype):
    if phase == "cos":
        return np.cos
    if phase == "sin":
        return np.sin
    raise InvalidParameterError(f"phase must be 'cos' or 'sin', got {phase!r}")


def _oscillation_zeros(b, phase, count, start, dtype):
    n = np.arange(start, start + count, dtype=dtype)
    if phase == "cos":
        n = n + dtype(0.5)
    else:
        n = n + 1
    return n * _pi(dtype) / dtype(b)


def integrate_oscillatory(amplitude, b, phase="cos", spec=None, scale=1.0):
    """``int_0^inf amplitude(k) * cos(b k)`` (or ``sin``) ``dk``.

    ``amplitude`` must accept numpy arrays (``longdouble`` when ``spec.extended``
    is set) and should be eventually monotone.  ``scale`` is the
    characteristic width of the amplitude; tail handling starts beyond ten
    of them.
    """
    spec = spec or QuadSpec()
    trig = _trig(phase, spec.dtype)
    b = float(b)
    if b == 0.0:
        if phase == "sin":
            return QuadResult(0.0, 0.0, "trivial", 0)
        return _integrate_decaying(amplitude, spec, scale)
    sign = -1.0 if (b < 0 and phase == "sin") else 1.0
    b = abs(b)
    if spec.tail_method == "exp_regulator_extrapolation":
        res = regulated_limit(
            lambda k: amplitude(k) * trig(b * k),
            max_frequency=b,
            spec=spec,
            scale=scale,
            schedule=oscillatory_schedule(b, spec),
        )
        return QuadResult(sign * float(np.real(res.limit)), res.err, "exp-regulator+richardson", 0)
    res = _between_zeros(lambda k: amplitude(k) * trig(spec.dtype(b) * k), b, phase, spec, scale)
    return QuadResult(sign * res.value, res.err, res.method, res.n_panels)


def oscillatory_schedule(b, spec, n=8):
    """Regulator values for a frequency-``b`` integrand.

    The regulated value is analytic in ``eps`` within radius ``b``, so the
    schedule is ``b`` times the configured one, continued by halving to ``n``
    points.
    """
    eps = [b * e for e in spec.eps_schedule]
    while len(eps) < n:
        eps.append(eps[-1] / 2)
    return tuple(eps)


def _between_zeros(f, b, phase, spec, scale):
    dt = spec.dtype
    cutoff = max(spec.finite_cutoff, 10.0 * scale)
    period = math.pi / b
    n_finite = max(1, int(math.ceil(cutoff / period)) + 1)
    n_tail = 2 * spec.acceleration_depth + 2
    while n_finite + n_tail <= spec.max_subdivisions:
        total = n_finite + n_tail
        zeros = _oscillation_zeros(b, phase, total, 0, dt)
        edges = np.concatenate([np.zeros(1, dtype=dt), zeros])
        vals, errs = panel_integrals(f, edges, spec)
        partial = vals[:n_finite].sum() + np.cumsum(vals[n_finite:])
        panel_err = float(errs.sum())
        last = float(np.max(np.abs(vals[-4:])))
        if last <= 1e-6 * spec.abs_tol:
            # terms already negligible: plain summation is exact to tolerance
            return QuadResult(float(partial[-1]), panel_err + 4 * last, "between-zeros direct sum", total)
        window = partial[-(2 * spec.acceleration_depth + 1):]
        estimate, acc_err = wynn_epsilon(window)
        shorter, _ = wynn_epsilon(window[:-2])
        err = max(acc_err, float(abs(estimate - shorter))) + panel_err
        if err <= spec.abs_tol:
            return QuadResult(float(estimate), err, "between-zeros + epsilon", total)
        n_tail *= 2
    raise ConvergenceError(f"oscillatory tail did not converge within {spec.max_subdivisions} panels")


def _integrate_decaying(f, spec, scale, max_doublings=256, chunk=16):
    # panels [0, s], [s, 2s], [2s, 4s], ... until contributions are negligible
    dt = spec.dtype
    total, err = 0, 0.0
    edges = [0.0] + [scale * 2.0**i for i in range(chunk)]
    done = 0
    while done < max_doublings:
        vals, errs = panel_integrals(f, np.asarray(edges, dtype=dt), spec)
        total = total + vals.sum()
        err += float(errs.sum())
        tail = float(np.max(np.abs(vals[-3:])))
        if tail <= 1e-3 * spec.abs_tol:
            return QuadResult(float(total), err + tail, "geometric panels", done + len(edges) - 1)
        done += chunk
        edges = [edges[-1] * 2.0**i for i in range(chunk + 1)]
    raise DivergenceError("amplitude does not decay: the non-oscillatory integral is not finite")


def integrate_regulated(integrand, eps, max_frequency, spec=None, scale=1.0):
    """``int_0^inf exp(-eps k) integrand(k) dk`` with panels resolving ``max_frequency``.

    The upper limit is set where ``exp(-eps k)`` drops below ``exp(-40)``;
    integrands are assumed to grow at most polynomially.
    """
    spec = spec or QuadSpec()
    if not eps > 0:
        raise InvalidParameterError("regulator eps must be positive")
    dt = spec.dtype
    upper = REGULATOR_DEPTH / eps + 10.0 * scale
    # two full periods per panel: 24-point Gauss error ~ (2 pi)^48 / 48!
    width = min(4 * math.pi / max(max_frequency, 1e-12), max(scale, 1.0 / eps) / 4, upper)
    n = int(math.ceil(upper / width))
    if n > spec.max_subdivisions:
        raise ConvergenceError(f"regulated integral needs {n} panels (limit {spec.max_subdivisions})")
    edges = np.linspace(0.0, upper, n + 1, dtype=dt)
    epsd = dt(eps)
    vals, errs = panel_integrals(lambda k: np.exp(-epsd * k) * integrand(k), edges, spec)
    value = vals.sum()
    return QuadResult(complex(value) if np.iscomplexobj(value) else float(value), float(errs.sum()), "exp-regulated", n)


def regulated_limit(integrand, max_frequency, spec=None, scale=1.0, schedule=None, order=None):
    """Regulated integrals over an ``eps`` schedule, extrapolated to ``eps = 0``.

    The head ``[0, 10 scale]`` is integrated adaptively for every ``eps``.
    On the tail the integrand is evaluated once, on panels sized for the
    smallest ``eps``, and reweighted by ``exp(-eps k)`` per schedule entry;
    each tail panel is integrated whole and as two halves, and the
    difference enters the error.  Returns an :class:`Extrapolation` with the
    raw ``(eps, value)`` pairs attached as ``samples``.
    """
    spec = spec or QuadSpec()
    schedule = tuple(float(e) for e in (spec.eps_schedule if schedule is None else schedule))
    if not all(e > 0 for e in schedule):
        raise InvalidParameterError("regulator eps must be positive")
    dt = spec.dtype
    period_cap = 4 * math.pi / max(max_frequency, 1e-12)
    head = 10.0 * scale
    upper = head + REGULATOR_DEPTH / min(schedule)
    # Gauss-24 integrates exp(-eps k) to rounding while eps * width <= 10
    width = min(period_cap, 10.0 / max(schedule))
    n = int(math.ceil((upper - head) / width))
    if n > spec.max_subdivisions * 4:
        raise ConvergenceError(f"regulated tail needs {n} panels")
    nodes, weights = gauss_legendre(spec.gauss_order, spec.extended)
    edges = np.linspace(head, upper, n + 1, dtype=dt)
    mids = (edges[:-1] + edges[1:]) / 2
    rules = []
    for a, b in ((edges[:-1], edges[1:]),
                 (np.concatenate([edges[:-1], mids]), np.concatenate([mids, edges[1:]]))):
        half = (b - a) / 2
        k = (a + b)[:, None] / 2 + half[:, None] * nodes[None, :]
        rules.append((k, np.asarray(integrand(k)) * (half[:, None] * weights[None, :])))
    head_edges = np.linspace(0.0, head, int(math.ceil(head / min(period_cap, scale))) + 1, dtype=dt)
    samples, worst = [], 0.0
    for eps in schedule:
        epsd = dt(eps)
        hv, he = panel_integrals(lambda k: np.exp(-epsd * k) * integrand(k), head_edges, spec)
        coarse, fine = (np.sum(np.exp(-epsd * k) * fw) for k, fw in rules)
        total = hv.sum() + fine
        samples.append((eps, complex(total) if np.iscomplexobj(total) else float(total)))
        worst = max(worst, float(he.sum()) + float(abs(fine - coarse)))
    ext = richardson_extrapolate(samples, order)
    ext = Extrapolation(limit=ext.limit, err=ext.err + worst)
    object.__setattr__(ext, "samples", tuple(samples))
    return ext


def richardson_extrapolate(samples, order=None):
    """Polynomial extrapolation of ``(eps, value)`` samples to ``eps = 0``.

    The limit uses a degree-``order`` polynomial through the ``order + 1``
    smallest-``eps`` samples (Neville's scheme); the error is the change
    against the same fit shifted one sample towards larger ``eps``.
    """
    samples = [(float(e), v) for e, v in samples]
    if len(samples) < 4:
        raise InsufficientDataError(f"need >= 4 samples, got {len(samples)}")
    eps = [e for e, _ in samples]
    if any(a <= b for a, b in zip(eps, eps[1:])) or eps[-1] <= 0:
        raise InvalidParameterError("eps must be positive and strictly decreasing")
    order = len(samples) - 2 if order is None else int(order)
    if not 1 <= order <= len(samples) - 2:
        raise InvalidParameterError(f"order must lie in [1, {len(samples) - 2}]")
    last = _neville_at_zero(samples[-(order + 1):])
    previous = _neville_at_zero(samples[-(order + 2):-1])
    return Extrapolation(limit=last, err=float(abs(last - previous)))


def _neville_at_zero(samples):
    xs = [e for e, _ in samples]
    p = [v for _, v in samples]
    n = len(xs)
    for level in range(1, n):
        for i in range(n - level):
            j = i + level
            p[i] = (xs[j] * p[i] - xs[i] * p[i + 1]) / (xs[j] - xs[i])
    return p[0]


def fit_log_divergence(cutoffs, values):
    """Least-squares ``values ~ slope * ln(cutoff) + intercept``; residual is RMS."""
    x = np.asarray(cutoffs, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidParameterError("cutoffs and values must be 1-d and equally long")
    if len(x) < 4:
        raise InsufficientDataError(f"need >= 4 cutoffs, got {len(x)}")
    if np.any(x <= 0):
        raise InvalidParameterError("cutoffs must be positive")
    if np.ptp(x) == 0:
        raise FitError("all cutoffs are equal")
    design = np.column_stack([np.log(x), np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    misfit = y - design @ np.array([slope, intercept])
    return LogFit(slope=float(slope), intercept=float(intercept), residual=float(np.sqrt(np.mean(misfit**2))))
