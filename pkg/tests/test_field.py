import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbkg import field, modespace as ms
from pbkg.errors import AliasingError, InvalidParameterError, TruncationEdgeError
from pbkg.quadrature import QuadSpec, integrate_interval

LAT = ms.ModeLattice(M=9, dk=0.5, m=1.0, d=2)
LAT3 = ms.ModeLattice(M=5, dk=0.5, m=1.0, d=3)

angles = st.floats(min_value=-0.78, max_value=0.78)
coords = st.floats(min_value=-3.0, max_value=3.0)


def test_alpha_beta_theta_zero_are_plane_waves():
    k = np.array([-1.0, 0.0, 2.0])
    a, b = field.alpha_beta(0.0, k, 0.4, 0.3, 1.0)
    u = k * 0.4 - np.sqrt(k * k + 1) * 0.3
    np.testing.assert_allclose(a, np.exp(1j * u))
    np.testing.assert_allclose(b, np.exp(-1j * u))


@pytest.mark.parametrize("kind", ["phi", "pi"])
def test_dagger_tables_equal_minus_theta(kind):
    op = field.FieldOperator(LAT, 0.37, kind, 0.2, 0.9)
    np.testing.assert_array_equal(op.adjoint().table, field.FieldOperator(LAT, -0.37, kind, 0.2, 0.9).table)
    assert op.adjoint().adjoint() == op


def test_bad_kind():
    with pytest.raises(InvalidParameterError):
        field.FieldOperator(LAT, 0.1, "chi")


@settings(max_examples=25, deadline=None)
@given(angles, coords, coords)
def test_one_point_functions_vanish(theta, x, t):
    assert abs(field.vacuum_expectation(field.phi(LAT, theta, x, t))) <= 1e-14
    assert abs(field.vacuum_expectation(field.pi(LAT, theta, x, t))) <= 1e-14


@settings(max_examples=25, deadline=None)
@given(angles, coords, coords, coords, coords)
def test_two_point_routes_agree(theta, x, t, y, s):
    assert field.two_point_routes(theta, x, t, y, s, LAT).discrepancy <= 1e-12


def test_block_route_matches_single_block():
    big = ms.ModeLattice(M=13, dk=0.4, m=1.0, d=2)
    first, second = field.phi(big, 0.3, 0.1, 0.2), field.phi(big, 0.3, -0.5, 0.0)
    e0 = ms.vacuum(big)
    whole = ms.inner(e0, field.apply_field(first, field.apply_field(second, e0)))
    assert len(big.blocks()) > 1
    assert field.vacuum_product(first, second) == pytest.approx(whole, abs=1e-14)


@settings(max_examples=15, deadline=None)
@given(angles, coords, coords, st.integers(0, 2**32 - 1))
def test_field_adjoint_is_minus_theta(theta, x, t, seed):
    rng = np.random.default_rng(seed)
    a, b = ms.random_state(LAT, rng), ms.random_state(LAT, rng)
    lhs = ms.inner(a, field.apply_field(field.phi(LAT, theta, x, t), b))
    rhs = ms.inner(field.apply_field(field.phi(LAT, -theta, x, t), a), b)
    assert abs(lhs - rhs) <= 1e-14


def test_theta_zero_two_point_is_windowed_integral():
    # the lattice is a trapezoid rule for the integral over [-k_max, k_max]
    spec = QuadSpec(extended=False)
    windowed = integrate_interval(lambda k: np.cos(1.5 * k) / np.sqrt(k * k + 1), 0.0, 40.0, spec, 64).value
    windowed /= 2 * math.pi
    errors = []
    for dk in (0.1, 0.05):
        lat = ms.ModeLattice.from_window(40.0, dk, 1.0)
        val = field.contraction(field.phi(lat, 0.0, 0.0, 0.0), field.phi(lat, 0.0, 1.5, 0.0))
        assert abs(val.imag) <= 1e-15
        errors.append(abs(val.real - windowed))
    assert errors[1] / windowed < 1e-4
    assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.05)


@pytest.mark.parametrize("t", [0.0, 0.5])
@pytest.mark.parametrize("lat", [LAT, LAT3], ids=["d2", "d3"])
def test_equal_time_commutators(lat, t):
    rep = field.equal_time_commutator_check(math.pi / 4, 0.3, -0.4, t, lat)
    assert abs(rep.phi_phi) <= 1e-12
    assert rep.phi_pi_defect <= 1e-10
    assert abs(rep.phi_phidag - rep.phi_phidag_kernel) <= 1e-12
    assert rep.probe_spread <= 1e-12
    assert rep.residual <= 1e-12
    if t == 0.0:
        assert abs(rep.phi_phidag) <= 1e-12


def test_phi_phidag_nonzero_off_equal_time():
    rep = field.equal_time_commutator_check(math.pi / 4, 0.3, 0.3, 0.5, LAT)
    assert abs(rep.phi_phidag) > 1e-3


def test_lattice_delta_peaks_at_zero():
    assert field.lattice_delta(LAT, 0.0) == pytest.approx(np.sum(LAT.weights) / (2 * math.pi))
    assert field.lattice_delta(LAT, 0.7) == pytest.approx(field.lattice_delta(LAT, -0.7))


@pytest.mark.parametrize("theta", [0.0, 0.3, math.pi / 4, 0.7])
def test_hamiltonian_theta_independent(theta):
    probe = ms.vacuum(LAT.block(0, 8))
    h = field.hamiltonian_expectation(theta, LAT, probe)
    assert isinstance(h.pseudo, complex)
    assert h.pseudo == pytest.approx(field.zero_point_sum(LAT), abs=1e-12)
    assert h.bosonic == pytest.approx(h.pseudo, abs=1e-12)


def test_hamiltonian_excited_probe():
    probe = ms.basis_state(LAT3, {2: 1})
    ref = field.hamiltonian_expectation(0.0, LAT3, probe).pseudo
    for th in (0.2, math.pi / 4):
        assert field.hamiltonian_expectation(th, LAT3, probe).pseudo == pytest.approx(ref, abs=1e-12)
    assert ref.real == pytest.approx(field.zero_point_sum(LAT3) + 2 * LAT3.weights[2] * LAT3.omegas[2])


def test_hamiltonian_rejects_edge_population():
    with pytest.raises(TruncationEdgeError):
        field.hamiltonian_expectation(0.3, LAT, ms.basis_state(LAT, {0: 1}))


@pytest.mark.parametrize("j", [0, 4, 6])
@pytest.mark.parametrize("theta", [0.0, 0.3, math.pi / 4])
def test_mode_extraction_round_trip(theta, j):
    ext = field.extract_mode(theta, j, 0.7, LAT)
    assert ext.A_defect <= 1e-12
    assert ext.B_defect <= 1e-12


def test_4pi_prefactor_defect_value():
    ext = field.extract_mode(0.3, LAT.M // 2, 0.0, LAT)
    assert LAT.omegas[LAT.M // 2] == 1.0
    assert ext.prefactor_4pi_defect == pytest.approx(1 - 1 / (2 * math.sqrt(math.pi)))


def test_extraction_needs_full_period_grid():
    with pytest.raises(AliasingError):
        field.extract_mode(0.3, 2, 0.0, LAT, xgrid=np.linspace(-1, 1, 20))
    with pytest.raises(AliasingError):
        field.extract_mode(0.3, 2, 0.0, LAT, xgrid=field.periodic_grid(LAT, LAT.M - 2))
    fine = field.extract_mode(0.3, 2, 0.0, LAT, xgrid=field.periodic_grid(LAT, 3 * LAT.M, x0=0.3))
    assert fine.A_defect <= 1e-12
