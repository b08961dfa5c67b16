import numpy as np
import pytest

from bonft.errors import DivergenceError, NumericalFailure
from bonft.hardy import HardyVector, Potential, involute
from bonft.lax import (assemble_lax, gaps, neumann_resolvent, riesz_validator,
                       spectrum, symmetry_audit)
from oracles import lax_matrix, perturbative_gamma1, perturbative_lambda0

PERTURB_TOL = 2e-4


def test_matrix_matches_oracle():
    coeffs = {1: 0.3 - 0.2j, -2: 0.1, 2: 0.05j}
    u = Potential(0.5, 2, coeffs)
    got = assemble_lax(u, 6)
    assert np.array_equal(got.entries, lax_matrix(coeffs, 6))
    # multiplication part alone carries the coefficients without the diagonal
    assert got.toeplitz_part()[1, 0] == coeffs[1]


def test_zero_potential_spectrum_is_integers():
    sd = spectrum(Potential(0.5, 1, {}, real=True), 16)
    assert np.max(np.abs(sd.lambdas - np.arange(17))) == 0.0
    assert sd.hermitian


def test_single_mode_perturbation_matches_second_order():
    eps = 0.1
    u = Potential(0.5, 1, {1: eps}, real=True)
    sd = spectrum(u, 48)
    assert sd.lambdas[0] - 0.0 == pytest.approx(perturbative_lambda0(eps), abs=PERTURB_TOL)
    gam = gaps(sd)
    assert gam[0].real == pytest.approx(perturbative_gamma1(eps), abs=PERTURB_TOL)


def test_gaps_nonnegative_for_real_potential():
    rng = np.random.default_rng(5)
    coeffs = {n: 0.05 * (rng.standard_normal() + 1j * rng.standard_normal())
              for n in range(1, 4)}
    sd = spectrum(Potential(0.5, 3, coeffs, real=True), 32)
    assert np.all(gaps(sd).real >= -1e-12)


def test_hermitian_and_general_paths_agree():
    """A real potential stored without the real flag must give the same spectrum."""
    coeffs = {1: 0.02 + 0.01j, 2: -0.015j}
    u = Potential(0.5, 2, coeffs, real=True)
    full = dict(coeffs)
    full.update({-n: np.conj(v) for n, v in coeffs.items()})
    v = Potential(0.5, 2, full, real=False)
    a = spectrum(u, 24)
    b = spectrum(v, 24)
    assert np.max(np.abs(a.lambdas - b.lambdas)) < 1e-11
    for n in range(5):
        ha, hb = a.h[n].coeffs, b.h[n].coeffs
        assert np.max(np.abs(ha - hb)) < 1e-9


def test_projected_columns_match_contour_quadrature():
    u = Potential(0.5, 2, {1: 0.03, 2: 0.01j}, real=True)
    sd = spectrum(u, 24, k_use=4)
    for n in range(3):
        ref = riesz_validator(u, 24, n)
        got = sd.project(n, np.eye(25)[n])
        scale = got[np.argmax(np.abs(ref.coeffs))] / ref.coeffs[np.argmax(np.abs(ref.coeffs))]
        assert abs(abs(scale) - 1) < 1e-8
        assert np.max(np.abs(got - scale * ref.coeffs)) < 1e-10


def test_simplicity_guard_fires():
    u = Potential(0.5, 1, {1: 0.01}, real=True)
    with pytest.raises(NumericalFailure):
        spectrum(u, 16, tol_simple=10.0)


def test_h_normalization():
    """The projected basis columns satisfy h_n(n) adjusted so <h_n, e_n> pairing is 1."""
    u = Potential(0.5, 2, {1: 0.02, 2: -0.01}, real=True)
    sd = spectrum(u, 32, k_use=5)
    for n in range(6):
        proj = sd.project(n, np.eye(33)[n])
        assert proj[n] == pytest.approx(sd.h[n].coeffs[n], abs=1e-12)


def test_neumann_resolvent_matches_dense_solve():
    u = Potential(0.5, 2, {1: 0.05, 2: 0.02j}, real=True)
    lam = 0.5 + 0.4j
    rhs = np.zeros(17, dtype=complex)
    rhs[0] = 1.0
    vec, last = neumann_resolvent(u, lam, HardyVector(rhs), 200)
    L = assemble_lax(u, 16).entries
    ref = np.linalg.solve(L - lam * np.eye(17), rhs)
    assert np.max(np.abs(vec.coeffs - ref)) < 1e-12
    assert last < 1e-14


def test_neumann_rejects_lattice_adjacent_point():
    u = Potential(0.5, 1, {1: 0.05}, real=True)
    rhs = np.zeros(9, dtype=complex)
    rhs[0] = 1.0
    with pytest.raises(ValueError):
        neumann_resolvent(u, 1.0 + 1e-6j, HardyVector(rhs), 50)


def test_neumann_diverges_outside_contraction():
    u = Potential(0.5, 1, {1: 3.0}, real=True)
    rhs = np.zeros(9, dtype=complex)
    rhs[0] = 1.0
    with pytest.raises(DivergenceError):
        neumann_resolvent(u, 0.5 + 0.4j, HardyVector(rhs), 400)


def test_symmetry_audit_small_for_complex_potential():
    u = Potential(0.5, 2, {1: 0.04 + 0.01j, -1: 0.02, 2: -0.03j})
    audit = symmetry_audit(u, 24)
    assert audit["minus_vs_star"] < 1e-11
    assert audit["conj_equivariance"] < 1e-11
    assert audit["imag_real_u"] is None


def test_star_spectrum_equals_transpose_spectrum():
    u = Potential(0.5, 2, {1: 0.05 + 0.02j, -2: 0.01 - 0.03j})
    a = spectrum(u, 20)
    b = spectrum(involute(u, "star"), 20)
    assert np.max(np.abs(a.lambdas - b.lambdas)) < 1e-11
