"""Swanson-model pseudo-bosons as truncated single-mode matrices.

``A = cos(t) C + i sin(t) C^dagger`` and ``B = cos(t) C^dagger + i sin(t) C``
with ``C`` the truncated annihilator.  For ``|t| < pi/4`` the vacua of ``A``
and ``B^dagger`` are normalizable and generate biorthonormal families
``phi_n = B^n phi_0 / sqrt(n!)`` and ``Psi_n = (A^dagger)^n Psi_0 / sqrt(n!)``.

Truncation only touches the highest kept level, and the vacuum coefficients
decay like ``|tan t|^(n/2)``, so every identity checked here holds up to a tail
of order ``|tan t|^(d/2)``.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidParameterError,
    NonNormalizableVacuumError,
    SingularFrequencyError,
    TruncationBudgetError,
)
from .modespace import annihilator

QUARTER_PI = math.pi / 4
_BOUNDARY_ATOL = 8 * np.finfo(float).eps

_PI_SUFFIX = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*\*?\s*pi\s*$")


@dataclass(frozen=True)
class ThetaParam:
    """Deformation angle with its regime.

    ``bosonic`` for 0, ``regular`` for ``0 < |theta| < pi/4``, ``boundary`` at
    ``|theta| = pi/4`` and ``outside`` beyond.
    """

    theta: float

    @classmethod
    def parse(cls, text):
        """Accept raw radians (``"0.3"``) or multiples of pi (``"0.25pi"``, ``"pi/4"``)."""
        if isinstance(text, (int, float)):
            return cls(float(text))
        s = str(text).strip().lower()
        if "/" in s and "pi" in s:
            num, den = s.split("/", 1)
            return cls(cls.parse(num).theta / float(den))
        match = _PI_SUFFIX.match(s)
        if match:
            coeff = match.group(1)
            return cls((1.0 if coeff in (None, "", "+") else float(coeff)) * math.pi)
        try:
            return cls(float(s))
        except ValueError:
            raise InvalidParameterError(f"cannot parse angle {text!r}") from None

    @property
    def regime(self):
        a = abs(self.theta)
        if a == 0.0:
            return "bosonic"
        if abs(a - QUARTER_PI) <= _BOUNDARY_ATOL:
            return "boundary"
        return "regular" if a < QUARTER_PI else "outside"

    @property
    def cos2(self):
        """``cos(2 theta)``, exactly zero on the boundary."""
        return 0.0 if self.regime == "boundary" else math.cos(2 * self.theta)

    @property
    def sin2(self):
        if self.regime == "boundary":
            return math.copysign(1.0, self.theta)
        return math.sin(2 * self.theta)

    def __neg__(self):
        return ThetaParam(-self.theta)

    def __float__(self):
        return float(self.theta)


def as_theta(theta):
    if isinstance(theta, ThetaParam):
        return theta
    if isinstance(theta, str):
        return ThetaParam.parse(theta)
    return ThetaParam(float(theta))


@dataclass(frozen=True, eq=False)
class PBMatrices:
    A: np.ndarray
    B: np.ndarray
    theta: ThetaParam
    d: int


def pb_transform(theta, d):
    """Truncated ``A_theta`` and ``B_theta``."""
    if d < 2:
        raise InvalidParameterError(f"d must be >= 2, got {d}")
    th = as_theta(theta)
    c = annihilator(d)
    cd = c.conj().T
    cos, sin = math.cos(th.theta), math.sin(th.theta)
    return PBMatrices(A=cos * c + 1j * sin * cd, B=cos * cd + 1j * sin * c, theta=th, d=d)


@dataclass(frozen=True, eq=False)
class CommutatorCheck:
    AB_defect: np.ndarray
    AAneg_coeff: complex


def pb_commutator_check(theta, d):
    """Defect of ``[A, B] = 1`` away from the top level, and ``[A_t, A_-t]_{00}``."""
    if d < 3:
        raise InvalidParameterError(f"d must be >= 3, got {d}")
    th = as_theta(theta)
    p, q = pb_transform(th, d), pb_transform(-th, d)
    ab = p.A @ p.B - p.B @ p.A
    defect = (ab - np.eye(d))[: d - 1, : d - 1]
    aa = p.A @ q.A - q.A @ p.A
    return CommutatorCheck(AB_defect=defect, AAneg_coeff=complex(aa[0, 0]))


def _require_normalizable(th):
    if th.regime in ("boundary", "outside"):
        raise NonNormalizableVacuumError(
            f"theta={th.theta!r} ({th.regime}): vacuum coefficients do not decay for |tan(theta)| >= 1"
        )


def _even_recursion(d, ratio):
    # v_{n+1} = ratio * sqrt(n/(n+1)) * v_{n-1}; odd levels stay empty
    v = np.zeros(d, dtype=complex)
    v[0] = 1.0
    for n in range(1, d - 1, 2):
        v[n + 1] = ratio * math.sqrt(n / (n + 1)) * v[n - 1]
    return v


@dataclass(frozen=True, eq=False)
class PBVacua:
    phi0: np.ndarray
    psi0: np.ndarray


def pb_vacua(theta, d):
    """Vacua of ``A_theta`` and ``B_theta^dagger``.

    ``phi0`` is normalized with a positive real first component and
    ``<phi0, psi0> = 1`` fixes ``psi0``.
    """
    th = as_theta(theta)
    _require_normalizable(th)
    t = math.tan(th.theta)
    phi = _even_recursion(d, -1j * t)
    psi = _even_recursion(d, 1j * t)
    phi /= np.linalg.norm(phi)
    psi /= np.vdot(phi, psi)
    return PBVacua(phi0=phi, psi0=psi)


def tail_bound(theta, d):
    """Size of the truncation tail, ``|tan theta|^(d/2)``."""
    return abs(math.tan(as_theta(theta).theta)) ** (d / 2)


@dataclass(frozen=True, eq=False)
class BiorthogonalFamily:
    phis: np.ndarray
    psis: np.ndarray
    theta: ThetaParam
    d: int
    nmax: int

    def gram(self):
        """``G[n, m] = <phi_n, Psi_m>``."""
        return self.phis.conj() @ self.psis.T

    def gram_defect(self):
        return float(np.max(np.abs(self.gram() - np.eye(self.nmax + 1))))

    def ladder_residuals(self):
        """Largest violation of the four lowering/raising relations."""
        p = pb_transform(self.theta, self.d)
        A, B = p.A, p.B
        Ad, Bd = A.conj().T, B.conj().T
        worst = 0.0
        for n in range(self.nmax + 1):
            lower_phi = A @ self.phis[n] - (math.sqrt(n) * self.phis[n - 1] if n else 0)
            lower_psi = Bd @ self.psis[n] - (math.sqrt(n) * self.psis[n - 1] if n else 0)
            worst = max(worst, np.linalg.norm(lower_phi), np.linalg.norm(lower_psi))
            if n < self.nmax:
                raise_phi = B @ self.phis[n] - math.sqrt(n + 1) * self.phis[n + 1]
                raise_psi = Ad @ self.psis[n] - math.sqrt(n + 1) * self.psis[n + 1]
                worst = max(worst, np.linalg.norm(raise_phi), np.linalg.norm(raise_psi))
        return float(worst)


def pb_family(theta, d, nmax):
    th = as_theta(theta)
    _require_normalizable(th)
    if nmax < 0 or 4 * nmax > d:
        raise TruncationBudgetError(f"nmax={nmax} exceeds d/4 for d={d}")
    vac = pb_vacua(th, d)
    p = pb_transform(th, d)
    Ad = p.A.conj().T
    phis = np.empty((nmax + 1, d), dtype=complex)
    psis = np.empty((nmax + 1, d), dtype=complex)
    phis[0], psis[0] = vac.phi0, vac.psi0
    for n in range(1, nmax + 1):
        phis[n] = p.B @ phis[n - 1] / math.sqrt(n)
        psis[n] = Ad @ psis[n - 1] / math.sqrt(n)
    return BiorthogonalFamily(phis=phis, psis=psis, theta=th, d=d, nmax=nmax)


@dataclass(frozen=True, eq=False)
class MetricOperators:
    S_phi: np.ndarray
    S_psi: np.ndarray


def metric_ops(family):
    """Finite-rank ``sum |phi_n><phi_n|`` and ``sum |Psi_n><Psi_n|``."""
    S_phi = family.phis.T @ family.phis.conj()
    S_psi = family.psis.T @ family.psis.conj()
    return MetricOperators(S_phi=S_phi, S_psi=S_psi)


def swanson_frequency(theta):
    th = as_theta(theta)
    if th.cos2 == 0.0:
        raise SingularFrequencyError(f"cos(2 theta) = 0 at theta={th.theta!r}")
    return 1.0 / th.cos2


def swanson_hamiltonian(theta, d):
    """``omega_theta (B A + 1/2)`` with ``omega_theta = 1/cos(2 theta)``."""
    w = swanson_frequency(theta)
    p = pb_transform(theta, d)
    return w * (p.B @ p.A + 0.5 * np.eye(d))


def eigen_residuals(family):
    """``||H phi_n - omega (n + 1/2) phi_n||`` for each member."""
    w = swanson_frequency(family.theta)
    H = swanson_hamiltonian(family.theta, family.d)
    return np.array(
        [np.linalg.norm(H @ family.phis[n] - w * (n + 0.5) * family.phis[n]) for n in range(family.nmax + 1)]
    )


def intertwining_residual(theta, d, nmax):
    """``max_n ||(S_Psi N - N^dagger S_Psi) phi_n||`` with ``N = B A``."""
    fam = pb_family(theta, d, nmax)
    S_psi = metric_ops(fam).S_psi
    p = pb_transform(theta, d)
    N = p.B @ p.A
    L = S_psi @ N - N.conj().T @ S_psi
    return float(max(np.linalg.norm(L @ fam.phis[n]) for n in range(nmax + 1)))
