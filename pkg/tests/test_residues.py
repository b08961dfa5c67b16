from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bonft.hardy import Potential
from bonft.lax import spectrum
from bonft.residues import (PartitionInstance, combi_check, delta_series,
                            iter_partition_instances, psi_series, residue_A,
                            sweep_combi, sweep_vanishing, vanishing_D)
from oracles import contour_residue_quadrature, vanishing_sum_quadrature

QUAD_TOL = 1e-10


def test_residue_examples():
    assert residue_A((2,)) == Fraction(1, 2)
    assert residue_A((0,)) == 0
    assert residue_A((2,), extra_mu_power=1) == Fraction(1, 4)


def test_residue_zero_factors_flip_sign():
    # each vanishing entry contributes a -1/mu factor
    assert residue_A((0, 2)) == -residue_A((2,), extra_mu_power=1)


def test_residue_matches_quadrature():
    rng = np.random.default_rng(17)
    for _ in range(100):
        d = int(rng.integers(1, 5))
        ls = tuple(int(v) for v in rng.integers(-8, 9, size=d))
        extra = int(rng.integers(0, 2))
        exact = residue_A(ls, extra_mu_power=extra)
        quad = contour_residue_quadrature(ls, extra)
        assert abs(complex(exact) - quad) < QUAD_TOL, (ls, extra)


def test_vanishing_examples():
    assert vanishing_D((2,)) == 0
    assert vanishing_D((0,)) == 0
    assert vanishing_D((1, 5, -3)) == 0


def test_vanishing_matches_quadrature_structure():
    for ls in ((3,), (1, -2), (4, 0, -1), (2, 2, -5, 1)):
        assert vanishing_D(ls) == 0
        assert abs(vanishing_sum_quadrature(ls)) < QUAD_TOL


@given(st.lists(st.integers(min_value=-8, max_value=8), min_size=1, max_size=4))
@settings(max_examples=150, deadline=None)
def test_vanishing_holds_everywhere(ls):
    assert vanishing_D(tuple(ls)) == 0


def test_partition_instance_validation():
    with pytest.raises(ValueError):
        PartitionInstance(2, frozenset({1}), frozenset({1, 2}), (1, 1))
    with pytest.raises(ValueError):
        PartitionInstance(2, frozenset({1, 2}), frozenset(), ())


def test_combi_forced_single_element():
    p = PartitionInstance(1, frozenset(), frozenset({1}), ((1, 1),))
    j_ad, k_ad, ok = combi_check(p)
    assert (j_ad, k_ad, ok) == (0, 1, True)


def test_combi_d2_example():
    p = PartitionInstance(2, frozenset({2}), frozenset({1}), ((1, 2),))
    j_ad, k_ad, ok = combi_check(p)
    assert ok and k_ad == j_ad + 1


def test_instance_counts_are_central_binomials():
    import math
    for d in range(1, 6):
        count = sum(1 for _ in iter_partition_instances(d))
        assert count == math.comb(2 * d, d - 1)


def test_sweeps_are_clean_and_parallel_consistent():
    counts1, rc1, v1 = sweep_vanishing(2, 3, random_count=25,
                                       rng=np.random.default_rng(9), workers=1)
    counts2, rc2, v2 = sweep_vanishing(2, 3, random_count=25,
                                       rng=np.random.default_rng(9), workers=2)
    assert counts1 == counts2 == {1: 7, 2: 49}
    assert rc1 == rc2 == 25
    assert v1 == v2 == []
    counts, violations = sweep_combi(4)
    assert counts == {1: 1, 2: 4, 3: 15, 4: 56}
    assert violations == []


def test_delta_series_zero_potential():
    u = Potential(0.5, 1, {}, real=True)
    value, tail = delta_series(u, 3, 4)
    assert value == 0
    assert tail == 0


def test_delta_series_leading_order_single_mode():
    """With one positive mode the n=1 defect starts at degree four."""
    eps = 0.01
    u = Potential(0.5, 1, {1: eps}, real=True)
    v2, _ = delta_series(u, 1, 2)
    v4, _ = delta_series(u, 1, 4)
    assert v2 == 0
    assert v4 == pytest.approx(eps ** 4, rel=1e-12)


def test_delta_series_matches_spectral_delta():
    coeffs = {1: 0.004 + 0.002j, 2: 0.003 - 0.001j}
    u = Potential(0.5, 2, coeffs, real=True)
    sd = spectrum(u, 96, k_use=8)
    from bonft.birkhoff import eigen_chain
    _, scal = eigen_chain(u, sd)
    for n in range(1, 8):
        series, tail = delta_series(u, n, 4)
        assert abs(series - scal.delta[n]) < 1e-9, n


def test_psi_series_decays_by_degree():
    u = Potential(0.5, 1, {1: 0.01}, real=True)
    value, per_degree = psi_series(u, 2, 5)
    mags = [m for m in per_degree if m > 0]
    assert all(b < a for a, b in zip(mags, mags[1:]))
