"""Lattice field operators and their exact vacuum algebra.

On a :class:`~pbkg.modespace.ModeLattice` with weights ``w_j`` the field and
its momentum are the finite ladder sums

    Phi_theta(x, t) = sum_j sqrt(w_j / (4 pi omega_j)) [alpha_theta c_j + beta_theta c_j^dagger]
    Pi_theta(x, t)  = -i sum_j sqrt(w_j omega_j / (4 pi)) [alpha_-theta c_j - beta_-theta c_j^dagger]

with the plane-wave mixtures returned by :func:`alpha_beta`.  Everything
here is evaluated exactly (to rounding) on truncated Fock spaces, either on
the whole lattice or block by block when the lattice is too large for one
dense vector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from .errors import AliasingError, DimensionError, InternalConsistencyError, InvalidParameterError, TruncationEdgeError
from .modespace import ModeLattice, annihilator, apply_ladder_sum, apply_local, basis_state, inner, vacuum
from .pseudoboson import as_theta, pb_transform

FIELD_KINDS = ("phi", "pi", "phi_dagger", "pi_dagger")
ROUTE_TOLERANCE = 1e-10


def alpha_beta(theta, k, x, t, m):
    """Plane-wave mixtures ``(alpha_theta, beta_theta)`` at momenta ``k``.

    ``alpha = cos(theta) e^{i u} + i sin(theta) e^{-i u}`` and
    ``beta = cos(theta) e^{-i u} + i sin(theta) e^{i u}`` with
    ``u = k x - omega_k t``.
    """
    th = as_theta(theta).theta
    k = np.asarray(k, dtype=float)
    u = k * x - np.sqrt(k * k + m * m) * t
    plus = np.exp(1j * u)
    minus = plus.conj()
    c, s = math.cos(th), math.sin(th)
    return c * plus + 1j * s * minus, c * minus + 1j * s * plus


@dataclass(frozen=True)
class FieldOperator:
    """``Phi``, ``Pi`` or their adjoints at one space-time point.

    The operator is stored as two length-``M`` coefficient arrays, one for
    the annihilators and one for the creators.
    """

    lattice: ModeLattice
    theta: object
    kind: str = "phi"
    x: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise InvalidParameterError(f"kind must be one of {FIELD_KINDS}, got {self.kind!r}")
        object.__setattr__(self, "theta", as_theta(self.theta))

    @cached_property
    def coefficients(self):
        """``(a, b)`` such that the operator is ``sum_j a_j c_j + b_j c_j^dagger``."""
        lat = self.lattice
        k, w, om = lat.modes, lat.weights, lat.omegas
        base = "phi" if self.kind.startswith("phi") else "pi"
        if base == "phi":
            alpha, beta = alpha_beta(self.theta, k, self.x, self.t, lat.m)
            amp = np.sqrt(w / (4 * np.pi * om))
            a, b = amp * alpha, amp * beta
        else:
            alpha, beta = alpha_beta(-self.theta, k, self.x, self.t, lat.m)
            amp = np.sqrt(w * om / (4 * np.pi))
            a, b = -1j * amp * alpha, 1j * amp * beta
        if self.kind.endswith("dagger"):
            a, b = b.conj(), a.conj()
        a.flags.writeable = False
        b.flags.writeable = False
        return a, b

    @property
    def table(self):
        """All ``2M`` ladder weights, annihilators first."""
        return np.concatenate(self.coefficients)

    def adjoint(self):
        flip = {"phi": "phi_dagger", "phi_dagger": "phi", "pi": "pi_dagger", "pi_dagger": "pi"}
        return FieldOperator(self.lattice, self.theta, flip[self.kind], self.x, self.t)


def phi(lattice, theta, x, t=0.0):
    return FieldOperator(lattice, theta, "phi", x, t)


def pi(lattice, theta, x, t=0.0):
    return FieldOperator(lattice, theta, "pi", x, t)


def apply_field(op, state):
    """Apply ``op`` to a state living on the lattice or on one of its blocks."""
    if state.lattice != op.lattice:
        raise DimensionError("field operator and state belong to different lattices")
    a, b = op.coefficients
    return apply_ladder_sum(state, a, b)


def vacuum_expectation(op):
    """``<e0, op e0>`` summed block by block (exactly zero for a ladder sum)."""
    total = 0j
    for blk in op.lattice.blocks():
        e0 = vacuum(blk)
        total += inner(e0, apply_field(op, e0))
    return total


def _block_pair(first, second, blk):
    e0 = vacuum(blk)
    p = inner(e0, apply_field(first, e0))
    q = inner(e0, apply_field(second, e0))
    pq = inner(e0, apply_field(first, apply_field(second, e0)))
    return pq, p, q


def vacuum_product(first, second):
    """``<e0, first second e0>`` through explicit state vectors.

    Different blocks commute and the vacuum factorizes, so the product
    splits into in-block terms plus products of block one-point functions.
    """
    if first.lattice != second.lattice:
        raise DimensionError("operators belong to different lattices")
    diag = 0j
    ps, qs = [], []
    for blk in first.lattice.blocks():
        pq, p, q = _block_pair(first, second, blk)
        diag += pq
        ps.append(p)
        qs.append(q)
    ps, qs = np.array(ps), np.array(qs)
    return complex(diag + ps.sum() * qs.sum() - np.sum(ps * qs))


def contraction(first, second):
    """``<e0, first second e0>`` from coefficients: ``sum_j a_j(first) b_j(second)``."""
    a, _ = first.coefficients
    _, b = second.coefficients
    return complex(np.sum(a * b))


@dataclass(frozen=True)
class TwoPointRoutes:
    state_vector: complex
    contraction: complex

    @property
    def discrepancy(self):
        return abs(self.state_vector - self.contraction)


def two_point_routes(theta, x, t, y, s, lattice):
    """Both evaluations of ``<e0, Phi(x,t) Phi(y,s) e0>``."""
    first = phi(lattice, theta, x, t)
    second = phi(lattice, theta, y, s)
    return TwoPointRoutes(vacuum_product(first, second), contraction(first, second))


def two_point(theta, x, t, y, s, lattice):
    """Vacuum two-point function on the lattice.

    Raises
    ------
    InternalConsistencyError
        If the state-vector and contraction routes disagree beyond 1e-10.
    """
    routes = two_point_routes(theta, x, t, y, s, lattice)
    if routes.discrepancy > ROUTE_TOLERANCE:
        raise InternalConsistencyError(
            f"two-point routes disagree by {routes.discrepancy:.3e} "
            f"(state {routes.state_vector!r}, contraction {routes.contraction!r})"
        )
    return routes.state_vector


def lattice_delta(lattice, delta):
    """``D_M(delta) = sum_j w_j / (2 pi) e^{i k_j delta}``, real on a symmetric grid."""
    return float(np.sum(lattice.weights * np.cos(lattice.modes * delta)) / (2 * np.pi))


def phi_phidag_kernel(theta, x, y, t, lattice):
    """Mode sum ``sum_j w_j/(4 pi omega_j) (alpha_t(x) beta_-t(y) - beta_t(x) alpha_-t(y))``."""
    k, w, om, m = lattice.modes, lattice.weights, lattice.omegas, lattice.m
    ax, bx = alpha_beta(theta, k, x, t, m)
    ay, by = alpha_beta(-as_theta(theta), k, y, t, m)
    return complex(np.sum(w / (4 * np.pi * om) * (ax * by - bx * ay)))


def _probes(blk, with_quanta):
    yield None, vacuum(blk)
    if with_quanta:
        for j in blk.indices:
            yield j, basis_state(blk, {j: 1})


def commutator_on_probes(first, second, with_quanta=None):
    """Scalar value of ``[first, second]`` on the vacuum and one-quantum probes.

    Returns ``(values, residual)``.  ``values[0]`` is the vacuum value and the
    rest follow one-quantum probes in mode order; ``residual`` is the largest
    norm of the part of ``[first, second] psi`` not parallel to ``psi``.
    One-quantum probes need ``d >= 3`` to stay clear of the truncated level
    and are used by default exactly then.
    """
    lat = first.lattice
    if with_quanta is None:
        with_quanta = lat.d >= 3
    blocks = lat.blocks()
    vac_vals = []
    quanta = {}
    residual = 0.0
    for blk in blocks:
        for j, psi in _probes(blk, with_quanta):
            out = apply_field(first, apply_field(second, psi)) - apply_field(second, apply_field(first, psi))
            c = inner(psi, out)
            residual = max(residual, (out - c * psi).norm())
            if j is None:
                vac_vals.append(c)
            else:
                quanta[j] = (blk, c)
    total_vac = complex(sum(vac_vals))
    values = [total_vac]
    for j in sorted(quanta):
        blk, c = quanta[j]
        idx = blocks.index(blk)
        values.append(total_vac - vac_vals[idx] + c)
    return np.array(values), residual


@dataclass(frozen=True)
class CommutatorReport:
    """Equal-time commutators measured on probe states.

    ``phi_pi`` is compared against ``i D_M(x - y)``; ``phi_phi`` should vanish;
    ``phi_phidag`` is the measured scalar of ``[Phi, Phi^dagger]`` and
    ``phi_phidag_kernel`` the mode-sum prediction for it.
    """

    phi_pi: complex
    phi_pi_expected: complex
    phi_phi: complex
    phi_phidag: complex
    phi_phidag_kernel: complex
    probe_spread: float
    residual: float

    @property
    def phi_pi_defect(self):
        return abs(self.phi_pi - self.phi_pi_expected)


def equal_time_commutator_check(theta, x, y, t, lattice):
    fx = phi(lattice, theta, x, t)
    fy = phi(lattice, theta, y, t)
    py = pi(lattice, theta, y, t)
    spread = 0.0
    residual = 0.0
    results = []
    for a, b in ((fx, py), (fx, fy), (fx, fy.adjoint())):
        vals, res = commutator_on_probes(a, b)
        spread = max(spread, float(np.max(np.abs(vals - vals[0]))))
        residual = max(residual, res)
        results.append(complex(vals[0]))
    return CommutatorReport(
        phi_pi=results[0],
        phi_pi_expected=1j * lattice_delta(lattice, x - y),
        phi_phi=results[1],
        phi_phidag=results[2],
        phi_phidag_kernel=phi_phidag_kernel(theta, x, y, t, lattice),
        probe_spread=spread,
        residual=residual,
    )


@dataclass(frozen=True)
class HamiltonianExpectation:
    pseudo: complex
    bosonic: complex


def hamiltonian_expectation(theta, lattice, probe):
    """``<probe, H probe>`` in pseudo-bosonic and in bosonic form.

    ``probe`` may live on a block; modes outside it are in their vacuum and
    contribute their zero-point term.
    """
    if probe.lattice != lattice:
        raise DimensionError("probe belongs to a different lattice")
    d = lattice.d
    blk = probe.space
    for j in blk.indices:
        if probe.occupation_profile(j)[d - 1] > 0:
            raise TruncationEdgeError(f"probe populates the truncated level {d - 1} of mode {j}")
    p = pb_transform(theta, d)
    pseudo_local = p.B.conj().T @ p.B + p.A.conj().T @ p.A
    c = annihilator(d)
    boson_local = c @ c.conj().T + c.conj().T @ c
    w, om = lattice.weights, lattice.omegas
    outside = np.ones(lattice.M, dtype=bool)
    outside[blk.start:blk.stop] = False
    norm2 = inner(probe, probe)
    values = []
    for local in (pseudo_local, boson_local):
        total = complex(np.sum(w[outside] * om[outside]) * local[0, 0] * norm2)
        for j in blk.indices:
            total += w[j] * om[j] * inner(probe, apply_local(probe, j, local))
        values.append(total)
    return HamiltonianExpectation(pseudo=complex(values[0]), bosonic=complex(values[1]))


def zero_point_sum(lattice):
    return float(np.sum(lattice.weights * lattice.omegas))


def periodic_grid(lattice, n_points=None, x0=None):
    """Uniform grid of ``n_points`` (default ``M``) covering one period ``2 pi / dk``."""
    length = 2 * np.pi / lattice.dk
    n = lattice.M if n_points is None else int(n_points)
    start = -0.5 * length if x0 is None else x0
    return start + length * np.arange(n) / n


def _check_grid(lattice, xgrid):
    xgrid = np.asarray(xgrid, dtype=float)
    length = 2 * np.pi / lattice.dk
    n = xgrid.size
    if n < lattice.M:
        raise AliasingError(f"{n} grid points cannot resolve {lattice.M} modes")
    dx = np.diff(xgrid)
    if n < 2 or np.ptp(dx) > 1e-9 * abs(dx[0]) or abs(n * dx[0] - length) > 1e-9 * length:
        raise AliasingError("x grid must be uniform and span one period 2*pi/dk")
    return xgrid, float(dx[0]), length


@dataclass(frozen=True)
class ExtractionResult:
    """Recovered ``A_theta(k_j)`` and ``B_theta(k_j)`` against their definitions.

    Defects are Hilbert-Schmidt norms of the ladder-coefficient difference.
    ``prefactor_4pi_defect`` measures the relative deviation produced by the
    prefactor ``1/(4 pi omega_k)``, expressed in continuum normalization.
    """

    A_coefficients: tuple = dc_field(repr=False)
    B_coefficients: tuple = dc_field(repr=False)
    A_defect: float = 0.0
    B_defect: float = 0.0
    prefactor_4pi_defect: float = 0.0


def extraction_coefficients(theta, j, t, lattice, xgrid=None, sign=+1):
    """Ladder coefficients of the discrete inverse transform at mode ``j``.

    ``sign=+1`` recovers ``A`` from ``omega Phi + i Pi`` weighted by
    ``e^{-i k x + i omega t}``; ``sign=-1`` recovers ``B`` from
    ``omega Phi - i Pi`` with the conjugate phase.  The prefactor
    ``1 / (L sqrt(w_j omega_j / pi))`` makes the round trip exact.
    """
    xgrid = periodic_grid(lattice) if xgrid is None else xgrid
    xgrid, dx, length = _check_grid(lattice, xgrid)
    kj, wj, oj = lattice.modes[j], lattice.weights[j], lattice.omegas[j]
    acc_a = np.zeros(lattice.M, dtype=complex)
    acc_b = np.zeros(lattice.M, dtype=complex)
    for x in xgrid:
        fa, fb = phi(lattice, theta, x, t).coefficients
        pa, pb = pi(lattice, theta, x, t).coefficients
        phase = np.exp(sign * (-1j * kj * x + 1j * oj * t)) * dx
        acc_a += phase * (oj * fa + sign * 1j * pa)
        acc_b += phase * (oj * fb + sign * 1j * pb)
    norm = length * math.sqrt(wj * oj / math.pi)
    return acc_a / norm, acc_b / norm


def pseudo_ladder(theta, j, lattice, which="A"):
    """Coefficients of ``A_theta(k_j)`` or ``B_theta(k_j)`` in the ``c, c^dagger`` basis."""
    th = as_theta(theta).theta
    a = np.zeros(lattice.M, dtype=complex)
    b = np.zeros(lattice.M, dtype=complex)
    if which == "A":
        a[j], b[j] = math.cos(th), 1j * math.sin(th)
    else:
        a[j], b[j] = 1j * math.sin(th), math.cos(th)
    return a, b


def extract_mode(theta, j, t, lattice, xgrid=None):
    if not 0 <= j < lattice.M:
        raise IndexError(f"mode {j} outside lattice of {lattice.M} modes")
    got_a = extraction_coefficients(theta, j, t, lattice, xgrid, +1)
    got_b = extraction_coefficients(theta, j, t, lattice, xgrid, -1)

    def defect(got, want):
        return float(math.sqrt(sum(np.sum(np.abs(g - w) ** 2) for g, w in zip(got, want))))

    # continuum normalization: exact prefactor 1/(2 sqrt(pi omega)) against 1/(4 pi omega)
    oj = lattice.omegas[j]
    ratio_4pi = (1 / (4 * math.pi * oj)) / (1 / (2 * math.sqrt(math.pi * oj)))
    return ExtractionResult(
        A_coefficients=got_a,
        B_coefficients=got_b,
        A_defect=defect(got_a, pseudo_ladder(theta, j, lattice, "A")),
        B_defect=defect(got_b, pseudo_ladder(theta, j, lattice, "B")),
        prefactor_4pi_defect=abs(1.0 - ratio_4pi),
    )
