import math

import numpy as np
import pytest

from oracles import diagonal_levels
from spinres.spin_algebra import (
    FieldVector,
    SpinSystem,
    basis_labels,
    build_hamiltonian,
    spin_operators,
    trace_check,
)
from spinres.units import CODATA

TABLE_SYSTEM = SpinSystem.from_wavenumbers(
    g_par=2.322, g_perp=2.053, a_par_cm=-174.6e-4, a_perp_cm=13.4e-4, p_par_cm=12.3e-4
)


def test_jz_half():
    ops = spin_operators(0.5)
    np.testing.assert_array_equal(np.diag(ops.jz).real, [0.5, -0.5])


def test_jz_three_halves():
    ops = spin_operators(1.5)
    np.testing.assert_array_equal(np.diag(ops.jz).real, [1.5, 0.5, -0.5, -1.5])


def test_jplus_superdiagonal():
    # ladder formula sqrt(j(j+1) - m(m+1)) evaluated by hand for j=3/2
    ops = spin_operators(1.5)
    super_diag = np.diag(ops.jplus, k=1).real
    np.testing.assert_allclose(super_diag, [math.sqrt(3.0), 2.0, math.sqrt(3.0)], rtol=1e-15)


@pytest.mark.parametrize("j", [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.5])
def test_operator_algebra(j):
    ops = spin_operators(j)
    comm = ops.jx @ ops.jy - ops.jy @ ops.jx
    np.testing.assert_allclose(comm, 1j * ops.jz, atol=1e-13)
    comm = ops.jy @ ops.jz - ops.jz @ ops.jy
    np.testing.assert_allclose(comm, 1j * ops.jx, atol=1e-13)
    comm = ops.jz @ ops.jx - ops.jx @ ops.jz
    np.testing.assert_allclose(comm, 1j * ops.jy, atol=1e-13)
    casimir = ops.jx @ ops.jx + ops.jy @ ops.jy + ops.jz @ ops.jz
    np.testing.assert_allclose(casimir, j * (j + 1) * np.eye(ops.dim), atol=1e-13)


def test_operators_hermitian_and_adjoint():
    ops = spin_operators(2.5)
    for matrix in (ops.jx, ops.jy, ops.jz):
        np.testing.assert_array_equal(matrix, matrix.conj().T)
    np.testing.assert_array_equal(ops.jplus, ops.jminus.conj().T)


def test_bad_spin_rejected():
    with pytest.raises(ValueError):
        spin_operators(0.7)
    with pytest.raises(ValueError):
        spin_operators(-0.5)


def test_two_level_zeeman():
    system = SpinSystem(g_par=2.0, g_perp=2.0, s=0.5, i=0.0)
    h = build_hamiltonian(system, FieldVector(0.0, 0.0, 1.0))
    values = np.sort(np.linalg.eigvalsh(h))
    beta = CODATA.bohr_magneton_beta
    np.testing.assert_allclose(values, [-beta, beta], rtol=1e-12)


def test_commutes_with_sz_for_axial_field():
    system = SpinSystem(g_par=2.3, g_perp=2.1, s=0.5, i=1.5)
    h = build_hamiltonian(system, FieldVector(0.0, 0.0, 0.31))
    sz_full = np.kron(spin_operators(0.5).jz, np.eye(4))
    np.testing.assert_allclose(h @ sz_full - sz_full @ h, np.zeros_like(h), atol=1e-30)


def test_hermitian_exactly():
    h = build_hamiltonian(TABLE_SYSTEM, FieldVector(0.013, -0.002, 0.27))
    assert np.max(np.abs(h - h.conj().T)) == 0.0


def test_table_system_gap_window_at_026():
    # the four strong gaps must bracket the 9.072 GHz mode quantum
    h = build_hamiltonian(TABLE_SYSTEM, FieldVector(0.0, 0.0, 0.26))
    values = np.sort(np.linalg.eigvalsh(h))
    gaps = [values[7 - k] - values[k] for k in range(4)]
    target = CODATA.planck_h * 9.072e9
    assert min(gaps) < target < max(gaps)
    assert h.shape == (8, 8)


def test_diagonal_closed_form():
    rng = np.random.default_rng(11)
    for _ in range(20):
        system = SpinSystem(
            g_par=float(rng.uniform(1.5, 3.0)),
            g_perp=float(rng.uniform(1.5, 3.0)),
            a_par=float(rng.uniform(-4e-25, 4e-25)),
            a_perp=0.0,
            p_par=float(rng.uniform(-3e-26, 3e-26)),
            gi_par=float(rng.uniform(-2e-3, 2e-3)),
        )
        bz = float(rng.uniform(0.05, 0.8))
        h = build_hamiltonian(system, FieldVector(0.0, 0.0, bz))
        np.testing.assert_allclose(np.max(np.abs(h - np.diag(np.diag(h)))), 0.0, atol=1e-40)
        expected = diagonal_levels(
            system.g_par, system.a_par, system.p_par, system.gi_par, 0.5, 1.5, bz
        )
        got = np.sort(np.linalg.eigvalsh(h))
        np.testing.assert_allclose(got, expected, rtol=1e-13, atol=1e-36)


def test_scaling_linearity():
    field = FieldVector(0.01, 0.0, 0.27)
    h1 = build_hamiltonian(TABLE_SYSTEM, field)
    scale = 3.0
    scaled_system = SpinSystem(
        g_par=TABLE_SYSTEM.g_par,
        g_perp=TABLE_SYSTEM.g_perp,
        a_par=scale * TABLE_SYSTEM.a_par,
        a_perp=scale * TABLE_SYSTEM.a_perp,
        p_par=scale * TABLE_SYSTEM.p_par,
        gi_par=TABLE_SYSTEM.gi_par,
    )
    h2 = build_hamiltonian(scaled_system, field.scaled(scale))
    # shared g means Zeeman scales with the field; couplings scale directly
    np.testing.assert_allclose(
        np.sort(np.linalg.eigvalsh(h2)), scale * np.sort(np.linalg.eigvalsh(h1)), rtol=1e-12
    )


def test_trace_is_zero():
    h = build_hamiltonian(TABLE_SYSTEM, FieldVector(0.004, 0.0, 0.27))
    assert abs(trace_check(h)) <= 1e-12 * np.max(np.abs(h))


def test_quadrupole_diagonal_pattern():
    p = 2.4e-26
    system = SpinSystem(g_par=2.0, g_perp=2.0, p_par=p, s=0.5, i=1.5)
    h = build_hamiltonian(system, FieldVector(0.0, 0.0, 0.0))
    np.testing.assert_allclose(np.diag(h).real, p * np.array([1, -1, -1, 1, 1, -1, -1, 1]), rtol=1e-15)


def test_zero_system_zero_matrix():
    system = SpinSystem(g_par=2.0, g_perp=2.0)
    h = build_hamiltonian(system, FieldVector(0.0, 0.0, 0.0))
    assert np.max(np.abs(h)) == 0.0
    assert trace_check(h) == 0.0


def test_trace_check_rejects_non_hermitian():
    bad = np.array([[0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(ValueError, match="asymmetry"):
        trace_check(bad)


def test_basis_label_order():
    labels = basis_labels(SpinSystem(g_par=2.0, g_perp=2.0, s=0.5, i=1.5))
    assert labels[0] == (0.5, 1.5)
    assert labels[3] == (0.5, -1.5)
    assert labels[4] == (-0.5, 1.5)
    assert labels[-1] == (-0.5, -1.5)


def test_system_validation():
    with pytest.raises(ValueError):
        SpinSystem(g_par=-2.0, g_perp=2.0)
    with pytest.raises(ValueError):
        SpinSystem(g_par=2.0, g_perp=2.0, s=0.4)
    with pytest.raises(ValueError):
        FieldVector(float("nan"), 0.0, 0.0)
