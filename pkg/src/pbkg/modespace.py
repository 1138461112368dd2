"""Momentum lattice, truncated Fock spaces and matrix-free ladder operators.

The continuum of field modes is replaced by a symmetric grid of ``M`` momenta
``k_j = (j - (M-1)/2) * dk``.  Each mode carries a Fock space truncated to the
lowest ``d`` number states, and a state of (a contiguous block of) the lattice
is a dense complex vector over the tensor product of these local spaces.

Operators are never stored as ``d**M`` matrices.  A local ``d x d`` matrix is
applied to one tensor factor by reshaping the amplitude vector to
``(left, d, right)``, so the cost of one application is ``O(d * dim)``.

Discrete modes obey ``[c_j, c_l^dagger] = delta_jl``; the continuum
``delta(k - q)`` corresponds to ``delta_jl / w_j`` with ``w_j`` the quadrature
weight of mode ``j`` (see :attr:`ModeLattice.weights`).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError, InvalidParameterError, MemoryBudgetError

DEFAULT_MAX_DIM = 2**22

QUADRATURE_RULES = ("trapezoid", "riemann")


def omega(k, m):
    """Relativistic dispersion ``sqrt(k**2 + m**2)``; works on arrays."""
    if not np.all(np.asarray(m) > 0):
        raise InvalidParameterError(f"mass must be positive, got {m!r}")
    return np.sqrt(np.square(k) + np.square(m))


def annihilator(d):
    """Truncated annihilation operator in the number basis (``d x d``)."""
    if d < 1:
        raise InvalidParameterError(f"local dimension must be >= 1, got {d}")
    return np.diag(np.sqrt(np.arange(1, d, dtype=float)), 1).astype(complex)


def single_mode_commutator(d):
    """``C C^dagger - C^dagger C`` for the ``d``-level truncation.

    Equals ``diag(1, ..., 1, 1 - d)``: truncation only spoils the top level.
    """
    if d < 2:
        raise InvalidParameterError(f"local dimension must be >= 2, got {d}")
    c = annihilator(d)
    cd = c.conj().T
    return c @ cd - cd @ c


@dataclass(frozen=True)
class ModeLattice:
    """Symmetric momentum grid with mass and per-mode Fock truncation.

    Parameters
    ----------
    M : int
        Number of modes; must be odd so that ``k = 0`` is a grid point.
    dk : float
        Lattice spacing in momentum.
    m : float
        Field mass.
    d : int
        Local Fock dimension (>= 2).
    rule : {"trapezoid", "riemann"}
        Quadrature weights used to turn mode sums into momentum integrals.
        ``"riemann"`` gives every mode weight ``dk``; ``"trapezoid"`` halves
        the two edge modes, which makes refinement at fixed ``k_max`` second
        order.
    max_dim : int
        Largest dense state dimension any :class:`FockBlock` may allocate.
    """

    M: int
    dk: float
    m: float
    d: int = 2
    rule: str = "trapezoid"
    max_dim: int = DEFAULT_MAX_DIM

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1 or self.M % 2 == 0:
            raise InvalidParameterError(f"M must be a positive odd integer, got {self.M}")
        if not self.dk > 0:
            raise InvalidParameterError(f"dk must be positive, got {self.dk}")
        if not self.m > 0:
            raise InvalidParameterError(f"mass must be positive, got {self.m}")
        if int(self.d) != self.d or self.d < 2:
            raise InvalidParameterError(f"local dimension d must be an integer >= 2, got {self.d}")
        if self.rule not in QUADRATURE_RULES:
            raise InvalidParameterError(f"rule must be one of {QUADRATURE_RULES}, got {self.rule!r}")
        if self.max_dim < self.d:
            raise InvalidParameterError("max_dim must allow at least one mode")

    @classmethod
    def from_window(cls, k_max, dk, m, d=2, **kwargs):
        """Lattice covering ``[-k_max, k_max]`` with spacing ``dk``."""
        n = 2.0 * k_max / dk
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise InvalidParameterError(f"2*k_max/dk = {n} is not an integer")
        return cls(M=int(round(n)) + 1, dk=dk, m=m, d=d, **kwargs)

    @property
    def k_max(self):
        return 0.5 * (self.M - 1) * self.dk

    @property
    def dim(self):
        return self.d**self.M

    @cached_property
    def modes(self):
        offsets = np.arange(self.M) - (self.M - 1) // 2
        k = offsets * self.dk
        k.flags.writeable = False
        return k

    @cached_property
    def omegas(self):
        w = omega(self.modes, self.m)
        w.flags.writeable = False
        return w

    @cached_property
    def weights(self):
        w = np.full(self.M, float(self.dk))
        if self.rule == "trapezoid" and self.M > 1:
            w[0] = w[-1] = 0.5 * self.dk
        w.flags.writeable = False
        return w

    def mirror(self, j):
        """Index of the mode with momentum ``-k_j``."""
        return self.M - 1 - j

    def block(self, start=0, stop=None):
        """Dense Fock space over modes ``start <= j < stop``."""
        return FockBlock(self, start, self.M if stop is None else stop)

    @property
    def space(self):
        """Dense Fock space of the whole lattice (subject to ``max_dim``)."""
        return self.block()

    def block_size(self, limit=None):
        """Largest number of modes whose dense block fits ``limit``."""
        limit = self.max_dim if limit is None else min(limit, self.max_dim)
        n = 1
        while self.d ** (n + 1) <= limit and n < self.M:
            n += 1
        return n

    def blocks(self, n_modes=None):
        """Partition the lattice into consecutive dense blocks."""
        n_modes = self.block_size(2**12) if n_modes is None else n_modes
        return [self.block(s, min(s + n_modes, self.M)) for s in range(0, self.M, n_modes)]


@dataclass(frozen=True)
class FockBlock:
    """Tensor product of the truncated Fock spaces of a contiguous mode range."""

    lattice: ModeLattice
    start: int
    stop: int

    def __post_init__(self):
        if not 0 <= self.start < self.stop <= self.lattice.M:
            raise InvalidParameterError(
                f"invalid block [{self.start}, {self.stop}) for M={self.lattice.M}"
            )
        if self.lattice.d**self.n_modes > self.lattice.max_dim:
            raise MemoryBudgetError(
                f"dense state of {self.n_modes} modes at d={self.lattice.d} has dimension "
                f"{self.lattice.d}**{self.n_modes}, above the budget {self.lattice.max_dim}"
            )

    @property
    def n_modes(self):
        return self.stop - self.start

    @property
    def d(self):
        return self.lattice.d

    @property
    def dim(self):
        return self.d**self.n_modes

    @property
    def indices(self):
        return range(self.start, self.stop)

    @property
    def is_full(self):
        return self.start == 0 and self.stop == self.lattice.M

    def local(self, j):
        """Position of global mode ``j`` inside this block."""
        if not self.start <= j < self.stop:
            raise IndexError(f"mode {j} outside block [{self.start}, {self.stop})")
        return j - self.start

    def index_of(self, occupations):
        """Flat amplitude index of an occupation tuple (first mode most significant)."""
        occ = tuple(occupations)
        if len(occ) != self.n_modes or any(not 0 <= n < self.d for n in occ):
            raise InvalidParameterError(f"bad occupation tuple {occ} for {self.n_modes} modes, d={self.d}")
        return int(np.ravel_multi_index(occ, (self.d,) * self.n_modes))


def _as_space(space):
    if isinstance(space, ModeLattice):
        return space.space
    if isinstance(space, FockBlock):
        return space
    raise TypeError(f"expected ModeLattice or FockBlock, got {type(space).__name__}")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Dense complex amplitudes over a :class:`FockBlock`."""

    amplitudes: np.ndarray
    space: FockBlock

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.space.dim,):
            raise DimensionError(f"expected {self.space.dim} amplitudes, got shape {amps.shape}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def lattice(self):
        return self.space.lattice

    def _check(self, other):
        if not isinstance(other, StateVector) or other.space != self.space:
            raise DimensionError("states live on different Fock spaces")

    def __add__(self, other):
        self._check(other)
        return StateVector(self.amplitudes + other.amplitudes, self.space)

    def __sub__(self, other):
        self._check(other)
        return StateVector(self.amplitudes - other.amplitudes, self.space)

    def __mul__(self, scalar):
        return StateVector(scalar * self.amplitudes, self.space)

    __rmul__ = __mul__

    def __neg__(self):
        return StateVector(-self.amplitudes, self.space)

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def occupation_profile(self, j):
        """Probability weight of each local level of mode ``j``."""
        jl = self.space.local(j)
        psi = _split(self.amplitudes, self.space, jl)
        return np.sum(np.abs(psi) ** 2, axis=(0, 2))


def vacuum(space):
    """Number vacuum: amplitude 1 at the all-zero occupation."""
    space = _as_space(space)
    amps = np.zeros(space.dim, dtype=complex)
    amps[0] = 1.0
    return StateVector(amps, space)


def basis_state(space, occupations):
    """Normalized number state; ``occupations`` maps global mode index to level."""
    space = _as_space(space)
    occ = [0] * space.n_modes
    for j, n in dict(occupations).items():
        occ[space.local(j)] = n
    amps = np.zeros(space.dim, dtype=complex)
    amps[space.index_of(occ)] = 1.0
    return StateVector(amps, space)


def random_state(space, rng, max_level=None):
    """Random normalized state; levels above ``max_level`` are left empty."""
    space = _as_space(space)
    shape = (space.d,) * space.n_modes
    psi = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    if max_level is not None:
        keep = np.ones(shape, dtype=bool)
        for axis in range(space.n_modes):
            idx = [slice(None)] * space.n_modes
            idx[axis] = slice(max_level + 1, None)
            keep[tuple(idx)] = False
        psi = psi * keep
    psi = psi.reshape(-1)
    return StateVector(psi / np.linalg.norm(psi), space)


def _split(amplitudes, space, jl):
    d = space.d
    return amplitudes.reshape(d**jl, d, d ** (space.n_modes - jl - 1))


def apply_local(state, j, matrix):
    """Apply a ``d x d`` matrix to the tensor factor of mode ``j``."""
    space = state.space
    jl = space.local(j)
    matrix = np.asarray(matrix)
    if matrix.shape != (space.d, space.d):
        raise DimensionError(f"local operator must be {space.d}x{space.d}, got {matrix.shape}")
    psi = _split(state.amplitudes, space, jl)
    out = np.einsum("ab,ibk->iak", matrix, psi)
    return StateVector(out.reshape(-1), space)


def apply_annihilate(state, j):
    """``c_j`` acting on ``state``: ``|n> -> sqrt(n) |n-1>`` in mode ``j``."""
    space = state.space
    psi = _split(state.amplitudes, space, space.local(j))
    out = np.zeros_like(psi)
    root = np.sqrt(np.arange(1, space.d, dtype=float))[None, :, None]
    out[:, :-1, :] = root * psi[:, 1:, :]
    return StateVector(out.reshape(-1), space)


def apply_create(state, j):
    """``c_j^dagger`` acting on ``state``; the top level ``d-1`` is mapped to zero."""
    space = state.space
    psi = _split(state.amplitudes, space, space.local(j))
    out = np.zeros_like(psi)
    root = np.sqrt(np.arange(1, space.d, dtype=float))[None, :, None]
    out[:, 1:, :] = root * psi[:, :-1, :]
    return StateVector(out.reshape(-1), space)


def apply_ladder_sum(state, annihilate_coeffs, create_coeffs):
    """``sum_j (a_j c_j + b_j c_j^dagger)`` over the modes of the state's block.

    Coefficient arrays are indexed by global mode number and must have length
    ``M`` of the lattice.
    """
    space = state.space
    d = space.d
    root = np.sqrt(np.arange(1, d, dtype=float))[None, :, None]
    out = np.zeros(space.dim, dtype=complex)
    for j in space.indices:
        a, b = annihilate_coeffs[j], create_coeffs[j]
        if a == 0 and b == 0:
            continue
        jl = j - space.start
        psi = _split(state.amplitudes, space, jl)
        acc = _split(out, space, jl)
        if a != 0:
            acc[:, :-1, :] += (a * root) * psi[:, 1:, :]
        if b != 0:
            acc[:, 1:, :] += (b * root) * psi[:, :-1, :]
    return StateVector(out, space)


def inner(a, b):
    """Scalar product, conjugate-linear in ``a``."""
    if a.space != b.space:
        raise DimensionError("states live on different Fock spaces")
    return complex(np.vdot(a.amplitudes, b.amplitudes))
