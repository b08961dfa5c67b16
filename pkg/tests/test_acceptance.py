"""End-to-end acceptance checks, one test per shipped guarantee.

Every tolerance is pinned here as a module constant; nothing is derived
from observed output.  Under pytest -v each check reports its own
pass/fail line.
"""

import math

import numpy as np
import pytest

from bonft.birkhoff import (birkhoff_forward, canonical_bracket_table, d0_phi,
                            eigen_chain, observables, scaling_constants)
from bonft.continuity import ContinuityConfig, ratio_slope, sweep
from bonft.flow import FlowConfig, frequencies, invert, solve_trajectory
from bonft.hardy import Potential, sobolev_norm
from bonft.lax import spectrum, symmetry_audit
from bonft.pde import IntegratorConfig, integrate, isospectral_audit
from bonft.residues import delta_series, sweep_combi, sweep_vanishing

pytestmark = pytest.mark.filterwarnings(
    "ignore::bonft.errors.TruncationWarning")

FIXED_POINT_TOL = 1e-12          # lattice values at the zero potential
LINEARIZATION_MIN_ORDER = 1.9    # observed order under step halving
LINEARIZATION_FINAL_TOL = 1e-7   # Jacobian column deviation at the last step
ROUND_TRIP_REL_TOL = 1e-8        # inverse-then-forward relative error
FLOW_L2_TOL = 1e-6               # route disagreement per sample time
ISOSPECTRAL_TOL = 1e-8           # eigenvalue drift along the direct run
FREQUENCY_REL_TOL = 1e-4         # fitted angle slope vs predicted frequency
HAMILTONIAN_TOL = 1e-6           # energy read in both coordinate systems
BRACKET_TOL = 1e-4               # canonical relation deviation
DELTA_SERIES_TOL = 1e-6          # spectral defect vs truncated series
DELTA_L1_CAP = 0.1               # summability of the defect sequence
GAP_REL_TOL = 1e-12              # measured vs closed-form frequency gap
SLOPE_REL_TOL = 0.05             # log-log separation growth rate
SYMMETRY_TOL = 1e-10             # spectral symmetry deviations


def scaled_potential(coeffs, N, target_norm, s=0.5):
    u = Potential(s, N, coeffs, real=True)
    factor = target_norm / sobolev_norm(u, s)
    return Potential(s, N, {n: factor * v for n, v in coeffs.items()}, real=True)


@pytest.fixture(scope="module")
def flow_bundle():
    """Shared data for the dynamics checks: one smooth initial state,
    its direct trajectory on [0, 1], the coordinate route at three times,
    and the deep transform of the initial state."""
    coeffs = {1: 0.0076 + 0.0038j, 2: 0.00475 - 0.00285j,
              3: 0.00285 + 0.0019j, 4: -0.0019j, 5: 0.001425, 6: 0.00095j}
    u0 = Potential(0.5, 6, coeffs, real=True)
    assert sobolev_norm(u0, 0.5) <= 0.02
    traj = integrate(u0, IntegratorConfig(grid_size=256, dt=2.5e-4, T=1.0,
                                          store_every=100))
    samples, diag = solve_trajectory(u0, FlowConfig(
        t_grid=(0.25, 0.5, 1.0), lax={"M": 96, "K_use": 32}, warm_start=True))
    assert max(diag["residuals"]) < 1e-10
    z0 = birkhoff_forward(u0, M=96, k_use=48)
    return {"u0": u0, "traj": traj, "samples": samples, "z0": z0}


def test_criterion_01_vanishing_identity_exact():
    counts, random_checked, violations = sweep_vanishing(
        4, 6, random_count=10 ** 4, rng=np.random.default_rng(2026))
    assert counts == {1: 13, 2: 169, 3: 2197, 4: 28561}
    assert random_checked == 10 ** 4
    assert violations == []


def test_criterion_02_partition_count_identity():
    counts, violations = sweep_combi(8)
    assert counts == {d: math.comb(2 * d, d - 1) for d in range(1, 9)}
    assert violations == []


def test_criterion_03_zero_potential_fixed_points():
    u = Potential(0.5, 1, {}, real=True)
    sd = spectrum(u, 32, k_use=8)
    ns = np.arange(sd.K_use + 1)
    assert np.max(np.abs(sd.lambdas[: sd.K_use + 1] - ns)) < FIXED_POINT_TOL
    kappa, mu, _ = scaling_constants(sd)
    assert abs(kappa[0] - 1.0) < FIXED_POINT_TOL
    assert np.max(np.abs(ns[1:] * kappa[1:] - 1.0)) < FIXED_POINT_TOL
    assert np.max(np.abs(mu[1:] - 1.0)) < FIXED_POINT_TOL
    _, scal = eigen_chain(u, sd)
    assert np.max(np.abs(scal.delta[1:])) < FIXED_POINT_TOL
    z = birkhoff_forward(u, M=32, k_use=8)
    assert np.max(np.abs(z.plus)) < FIXED_POINT_TOL
    assert np.max(np.abs(z.minus)) < FIXED_POINT_TOL


def test_criterion_04_linearization_at_zero():
    k_use = 8

    def fd_column(k, direction, eps):
        hi = birkhoff_forward(Potential(0.5, k, {k: direction * eps},
                                        real=True), M=48, k_use=k_use)
        lo = birkhoff_forward(Potential(0.5, k, {k: -direction * eps},
                                        real=True), M=48, k_use=k_use)
        return (np.concatenate([hi.plus, hi.minus])
                - np.concatenate([lo.plus, lo.minus])) / (2.0 * eps)

    for k in (1, 2, 3, 4):
        for direction in (1.0, 1j):
            lin = d0_phi(Potential(0.5, k, {k: direction}, real=True))
            target = np.concatenate([np.pad(lin.plus, (0, k_use - k)),
                                     np.pad(lin.minus, (0, k_use - k))])
            devs = [float(np.max(np.abs(fd_column(k, direction, eps) - target)))
                    for eps in (2e-3, 1e-3, 5e-4, 2.5e-4)]
            orders = [np.log2(a / b) for a, b in zip(devs, devs[1:])]
            assert min(orders) >= LINEARIZATION_MIN_ORDER, (k, direction, orders)
            assert devs[-1] < LINEARIZATION_FINAL_TOL, (k, direction, devs)


def test_criterion_05_round_trip_on_seeded_ball():
    for i in range(20):
        rng = np.random.default_rng(1000 + i)
        raw = {n: (rng.standard_normal() + 1j * rng.standard_normal()) / n
               for n in range(1, 9)}
        u = scaled_potential(raw, 8, 0.04)
        z = birkhoff_forward(u, M=64, k_use=8)
        back = invert(z, FlowConfig(lax={"M": 64}))
        diff = Potential(0.5, 8, {n: back.coeff(n) - u.coeff(n)
                                  for n in range(1, 9)}, real=True)
        rel = sobolev_norm(diff, 0.5) / sobolev_norm(u, 0.5)
        assert rel < ROUND_TRIP_REL_TOL, (i, rel)


def test_criterion_06_flow_routes_agree(flow_bundle):
    traj = flow_bundle["traj"]
    for t, u_b in flow_bundle["samples"]:
        i = int(round(t / 0.025))
        assert abs(traj.times[i] - t) < 1e-12
        u_d = traj.potential_at(i)
        band = max(u_b.N, u_d.N)
        total = 0.0
        for n in range(1, band + 1):
            b = u_b.coeff(n) if n <= u_b.N else 0.0
            total += abs(b - u_d.coeff(n)) ** 2
        assert math.sqrt(2.0 * total) < FLOW_L2_TOL, t


def test_criterion_07_direct_run_is_isospectral(flow_bundle):
    drift = isospectral_audit(flow_bundle["traj"], 128, k_max=10)
    assert drift < ISOSPECTRAL_TOL


def test_criterion_08_angle_slopes_match_frequencies(flow_bundle):
    traj = flow_bundle["traj"]
    om = frequencies(flow_bundle["z0"])[0][:5]
    args = np.empty((len(traj), 5))
    for i in range(len(traj)):
        zi = birkhoff_forward(traj.potential_at(i), M=96, k_use=12)
        args[i] = np.angle(zi.plus[:5])
    for n in range(1, 6):
        slope = np.polyfit(traj.times, np.unwrap(args[:, n - 1]), 1)[0]
        rel = abs(slope - om[n - 1]) / abs(om[n - 1])
        assert rel < FREQUENCY_REL_TOL, (n, slope, om[n - 1])


def test_criterion_09_energy_agrees_across_coordinates(flow_bundle):
    h_phys = observables(flow_bundle["u0"])["H_phys"]
    h_b = observables(flow_bundle["z0"])["H_B"]
    assert abs(h_phys - h_b) < HAMILTONIAN_TOL


def test_criterion_10_canonical_relations():
    u = Potential(0.5, 2, {1: 0.009 + 0.004j, 2: 0.003 - 0.005j}, real=True)
    pm, pp = canonical_bracket_table(u, 3)
    assert np.max(np.abs(pm + 1j * np.eye(3))) < BRACKET_TOL
    assert np.max(np.abs(pp)) < BRACKET_TOL


def test_criterion_11_defect_series_and_summability():
    rng = np.random.default_rng(23)
    raw = {n: (rng.standard_normal() + 1j * rng.standard_normal()) / n ** 2
           for n in range(1, 5)}
    u = scaled_potential(raw, 4, 0.01)
    sd = spectrum(u, 128, k_use=56)
    _, scal = eigen_chain(u, sd)
    for n in range(1, 9):
        series, _ = delta_series(u, n, 3)
        assert abs(series - scal.delta[n]) < DELTA_SERIES_TOL, n
    assert float(np.sum(np.abs(scal.delta[1:51]))) < DELTA_L1_CAP


def test_criterion_12_continuity_defeats_uniformity():
    cfg = ContinuityConfig(s=-0.45, k=8, max_m=4000)
    rows = sweep(cfg)
    assert len(rows) >= 5
    delta = cfg.delta_value()
    for row in rows:
        m = row["m"]
        gap_closed = 2.0 * delta ** 2 * m ** (-cfg.s)
        assert abs(row["omega_gap_meas"] - gap_closed) <= GAP_REL_TOL * gap_closed
        assert abs(row["d0"] - delta * m ** (cfg.s / 2.0)) <= 1e-12 * row["d0"]
        bound = (math.sqrt(1.0 + m ** cfg.s) - m ** (cfg.s / 2.0)) * delta
        assert row["dt"] >= bound * (1.0 - 1e-12)
    slope = ratio_slope(rows)
    want = -cfg.s / 2.0
    assert abs(slope - want) <= SLOPE_REL_TOL * want, (slope, want)


def test_criterion_13_spectral_symmetries():
    u = Potential(0.5, 3, {1: 0.04 + 0.02j, 2: -0.03j, 3: 0.015}, real=True)
    report = symmetry_audit(u, 64)
    assert report["minus_vs_star"] < SYMMETRY_TOL
    assert report["conj_equivariance"] < SYMMETRY_TOL
    uc = Potential(0.5, 2, {1: 0.03 + 0.01j}, real=False)  # complex data too
    report_c = symmetry_audit(uc, 48)
    assert report_c["minus_vs_star"] < SYMMETRY_TOL
    assert report_c["conj_equivariance"] < SYMMETRY_TOL
