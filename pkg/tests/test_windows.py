import math

import numpy as np
import pytest

from helpers import random_short_window, random_signal, rng_for
from stftpr.errors import EmptySupport, StftprError
from stftpr.spectral import CyclicSignal, ambiguity
from stftpr.windows import (
    canonical_anchor,
    classify_window,
    construct_line_difference_window,
    construct_punctured_center_window,
    construct_punctured_dc_window,
    construct_power_window,
    difference_set,
    line_difference_positions,
    lstar,
    omega_L_d,
    omega_mask,
    real_window_feasibility,
)


def test_omega_mask_delta_row():
    mask = omega_mask(CyclicSignal.delta(4))
    assert mask.full_rows() == (0,)
    assert not mask.mask[1:].any()


def test_omega_mask_rejects_zero_window():
    with pytest.raises(EmptySupport):
        omega_mask(CyclicSignal.zeros(4))


def test_omega_mask_symmetry_under_negation():
    rng = rng_for("mask-sym")
    for d in (4, 7, 10):
        g = random_signal(rng, d, support=[j for j in range(d) if rng.uniform() < 0.7] or [0])
        m = omega_mask(g).mask
        for k in range(d):
            for l in range(d):
                assert m[k, l] == m[(-k) % d, (-l) % d]


def test_omega_band_shapes():
    m = omega_L_d(8, 3)
    assert m.full_rows() == (0, 1, 2, 3, 5, 6, 7)
    assert not m.mask[4].any()
    assert omega_L_d(6, 0).full_rows() == (0,)
    assert omega_L_d(5, 2).all_true


def test_omega_band_range_check():
    with pytest.raises(StftprError):
        omega_L_d(8, 4)


def test_difference_set_examples():
    assert difference_set({0}).members == frozenset({0})
    block = difference_set(range(4))
    assert block.members == frozenset(range(-3, 4))
    cyc = difference_set(range(3), d=5)
    assert cyc.members == frozenset({0, 1, 2, 3, 4})
    assert cyc.covers_all


def test_difference_set_negation_closure():
    rng = rng_for("dg")
    for trial in range(50):
        supp = sorted(set(rng.integers(0, 30, size=5).tolist()))
        dg = difference_set(supp)
        assert all(-k in dg.members for k in dg.members)


def test_difference_set_full_block_covers_odd_cycle():
    for d in (5, 9, 13):
        L = (d - 1) // 2
        assert difference_set(range(L + 1), d=d).covers_all


def test_power_window_full_band_when_odd_and_maximal():
    assert omega_mask(construct_power_window(7, 3)).all_true
    assert omega_mask(construct_power_window(8, 3)).same_mask(omega_L_d(8, 3))


def test_power_window_small_case_row_nonzero():
    g = construct_power_window(4, 1)
    assert np.allclose(g.entries, [1, 2, 0, 0])
    A = ambiguity(g).values
    assert np.abs(A[1]).min() > 0.1


def test_power_window_range_check():
    with pytest.raises(StftprError):
        construct_power_window(8, 4)


def test_punctured_center_single_hole_even_range():
    for d in range(4, 34, 2):
        g = construct_punctured_center_window(d)
        assert omega_mask(g).false_entries() == ((d // 2, d // 2),)


def test_punctured_center_d8_row_identity():
    # even-l entries of the center row collapse to 2(-1 - e^(-2 pi i l/8)), l not in {0, 4}
    A = ambiguity(construct_punctured_center_window(8)).values
    for l in (2, 6):
        expected = 2 * (-1 - np.exp(-2j * np.pi * l / 8))
        assert abs(A[4, l] - expected) < 1e-9
    assert abs(A[4, 4]) < 1e-9 * np.abs(A).max()


def test_punctured_center_rejects_odd():
    with pytest.raises(StftprError):
        construct_punctured_center_window(7)


def test_punctured_center_certifiable_ceiling():
    g = construct_punctured_center_window(50)
    assert omega_mask(g).false_entries() == ((25, 25),)
    with pytest.raises(StftprError):
        construct_punctured_center_window(52)


def test_lstar_values_and_arithmetic():
    assert lstar(6) == 2
    assert lstar(9) == 4
    assert lstar(12) == 5
    assert lstar(14) == 5
    with pytest.raises(StftprError):
        lstar(4)
    for d in range(5, 1001):
        ls = lstar(d)
        assert d / 4 < ls < 3 * d / 4
        if d != 6:
            assert math.gcd(ls, d) == 1


def test_punctured_dc_hole_pair_range():
    for d in range(5, 25):
        g = construct_punctured_dc_window(d, seed=1000 + d)
        ls = lstar(d)
        assert set(omega_mask(g).false_entries()) == {(0, ls), (0, (d - ls) % d)}
        supp = g.support()
        assert max(supp) <= d // 2 and min(supp) == 0 and len(supp) == d // 2 + 1


def test_punctured_dc_polynomial_coefficients_positive():
    from stftpr.windows import _positive_coeffs

    for d in range(5, 17):
        coeffs = _positive_coeffs(d, lstar(d))
        assert coeffs.min() > 0
        # expansion check against direct polynomial multiplication
        ls = lstar(d)
        poly = np.array([1.0 + 0.0j])
        for root in (np.exp(-2j * np.pi * ls / d), np.exp(2j * np.pi * ls / d)):
            poly = np.convolve(poly, np.array([-root, 1.0]))
        for _ in range(d // 2 - 2):
            poly = np.convolve(poly, np.array([2.0, 1.0]))
        assert np.abs(poly.imag).max() < 1e-12
        assert np.abs(poly.real - coeffs).max() < 1e-9 * coeffs.max()


def test_punctured_dc_is_seed_deterministic():
    a = construct_punctured_dc_window(9, seed=5)
    b = construct_punctured_dc_window(9, seed=5)
    assert np.array_equal(a.entries, b.entries)


def test_line_difference_positions_prefix():
    assert line_difference_positions(9) == [0, 2, 3, 14, 18, 46, 51, 114, 120]


def test_line_difference_uniqueness_over_prefix():
    pos = line_difference_positions(8)
    seen = {}
    for m in pos:
        for l in pos:
            k = m - l
            if k > 0:
                assert k not in seen, f"difference {k} repeats"
                seen[k] = (m, l)
    # the first 8 positions cover 1..5 contiguously; 6 arrives with the 9th
    run = 0
    while run + 1 in seen:
        run += 1
    assert run == 5


def test_line_difference_window_rejects_zero_coefficient():
    with pytest.raises(StftprError):
        construct_line_difference_window(3, [1.0, 0.0, 2.0])


def test_real_window_feasibility():
    even = real_window_feasibility(6)
    assert not even.feasible
    assert even.forced_zeros == ((3, 1), (3, 3), (3, 5))
    rng = rng_for("real-zero")
    g = CyclicSignal(6, rng.uniform(0.5, 1.5, 6).astype(complex))
    A = ambiguity(g).values
    for l in (1, 3, 5):
        assert abs(A[3, l]) < 1e-9 * np.abs(A).max()

    odd = real_window_feasibility(7)
    assert odd.feasible
    assert omega_mask(odd.witness).all_true
    assert not real_window_feasibility(2).feasible


def test_generic_fraction_of_random_short_windows():
    # deviations are possible on a measure-zero set; log-only, never asserted zero
    for d, L in ((8, 3), (11, 4), (16, 7)):
        band = omega_L_d(d, L)
        hits = 0
        for trial in range(200):
            rng = rng_for("generic", d, L, trial)
            if omega_mask(random_short_window(rng, d, L)).same_mask(band):
                hits += 1
        assert hits >= 199, f"(d={d}, L={L}): only {hits}/200 generic"


def test_canonical_anchor_rotates_support_to_zero():
    rng = rng_for("anchor")
    g = random_signal(rng, 10, support=[4, 5, 6])
    anchored, shift = canonical_anchor(g)
    assert shift == 4
    assert anchored.support() == (0, 1, 2)
    assert np.allclose(anchored.shifted(shift).entries, g.entries)


def test_classify_window_report_fields():
    rng = rng_for("classify")
    g = random_signal(rng, 10, support=[4, 5, 6])
    rep = classify_window(g)
    assert rep.short_L == 2 and rep.canonical_shift == 4
    assert rep.is_generic_short == rep.omega.same_mask(omega_L_d(10, 2))
    full = classify_window(construct_power_window(7, 3))
    assert full.is_full and full.dg.covers_all
    assert full.real_valued
