"""Rate accounting: claimed composite rates, exact chain-rule columns,
superposition inequality, sweep invariants, and the claim interval search."""

import numpy as np
import pytest

from ocbsim import rates
from ocbsim.awgn_info import mi_bpsk, mi_qpsk
from ocbsim.rates import CSV_COLUMNS, SweepSpec

# quadrature value of the exact axis-stream rate at gamma = 1, cross-checked
# against an independent Monte Carlo run (0.095005 +- 1.53e-4, one se)
W1_QUAD = 0.09501607258470601


# ---------------------------------------------------------------------------
# claimed rates


def test_claimed_rates_vanish_at_zero_snr():
    assert rates.rate_ocb_claimed(0.0) == 0.0
    assert rates.rate_c1_claimed(0.0) == 0.0
    assert rates.rate_c2(0.0) == 0.0


def test_claimed_rate_saturates_at_two_bits():
    assert rates.rate_ocb_claimed(1e4) == pytest.approx(2.0, abs=1e-4)


def test_claimed_axis_rate_is_bpsk_at_half_snr():
    # mi_qpsk(g) = 2 mi_bpsk(g/2), so r_c1_claimed(2) must equal mi_bpsk(1)
    assert rates.rate_c1_claimed(2.0) == pytest.approx(mi_bpsk(1.0), abs=1e-9)


# ---------------------------------------------------------------------------
# exact chain-rule accounting


def test_exact_accounting_at_zero_and_negative_snr():
    assert rates.rate_ocb_exact(0.0) == (0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        rates.rate_ocb_exact(-1.0)


@pytest.mark.parametrize("gamma", np.geomspace(0.02, 80.0, 15).tolist())
def test_exact_total_is_the_qpsk_rate(gamma):
    _, _, total = rates.rate_ocb_exact(gamma)
    assert abs(total - mi_qpsk(gamma)) < 1e-6


def test_exact_sign_stream_rate_is_bpsk():
    for gamma in (0.3, 1.0, 5.0):
        _, i_v2, _ = rates.rate_ocb_exact(gamma)
        assert i_v2 == pytest.approx(mi_bpsk(gamma), abs=1e-12)


def test_axis_stream_rate_at_unit_snr():
    i_v1, _, _ = rates.rate_ocb_exact(1.0)
    assert i_v1 == pytest.approx(W1_QUAD, abs=1e-9)


# ---------------------------------------------------------------------------
# superposition inequality


ENERGIES = (0.5, 1.0, 2.0, 4.0)


@pytest.mark.parametrize("modulation", ["bpsk", "qpsk"])
def test_superposition_is_strict_for_positive_energies(modulation):
    for e1 in ENERGIES:
        for e2 in ENERGIES:
            lhs, rhs, holds = rates.check_superposition_inequality(e1, e2, 1.0, modulation)
            assert holds and lhs < rhs


def test_superposition_collapses_when_one_energy_vanishes():
    lhs, rhs, holds = rates.check_superposition_inequality(2.0, 0.0, 1.0, "bpsk")
    assert abs(lhs - rhs) < 1e-9
    assert not holds


def test_superposition_is_symmetric_in_the_energies():
    a = rates.check_superposition_inequality(0.7, 2.3, 0.8, "qpsk")
    b = rates.check_superposition_inequality(2.3, 0.7, 0.8, "qpsk")
    assert a[0] == b[0] and a[1] == b[1]


def test_superposition_input_validation():
    with pytest.raises(ValueError):
        rates.check_superposition_inequality(-1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        rates.check_superposition_inequality(1.0, 1.0, 1.0, "8psk")


# ---------------------------------------------------------------------------
# sweep grid and rows


def test_gamma_grid_hits_both_endpoints():
    g = rates.gamma_grid(SweepSpec(gamma_min=0.01, gamma_max=100.0, points=60))
    assert g.size == 60
    assert g[0] == pytest.approx(0.01, rel=1e-12)
    assert g[-1] == pytest.approx(100.0, rel=1e-12)


def test_gamma_grid_linear_spacing():
    g = rates.gamma_grid(SweepSpec(gamma_min=1.0, gamma_max=5.0, points=5, spacing="linear"))
    assert np.allclose(g, [1.0, 2.0, 3.0, 4.0, 5.0])


def test_gamma_grid_single_point():
    g = rates.gamma_grid(SweepSpec(gamma_min=2.0, gamma_max=2.0, points=1))
    assert g.tolist() == [2.0]


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(gamma_min=0.0),
        dict(gamma_min=2.0, gamma_max=1.0),
        dict(gamma_min=1.0, gamma_max=2.0, points=1),
        dict(spacing="cubic"),
    ],
)
def test_sweep_spec_validation(kwargs):
    with pytest.raises(ValueError):
        SweepSpec(**kwargs)


def test_csv_columns_match_row_layout():
    row = rates.rate_row(1.0)
    vals = row.as_csv_values()
    assert len(vals) == len(CSV_COLUMNS)
    assert vals[CSV_COLUMNS.index("gamma")] == 1.0
    assert vals[CSV_COLUMNS.index("i_bpsk")] == row.i_bpsk
    assert vals[CSV_COLUMNS.index("sum_exact")] == row.sum_exact


def test_sweep_row_invariants():
    rows = rates.sweep(SweepSpec())
    assert len(rows) == 60
    for row in rows:
        # the claimed total is the literal sum of its two parts
        assert row.r_j_claimed == row.r_c1_claimed + row.r_c2
        # exact accounting reproduces the four-point joint rate
        assert abs(row.sum_exact - row.i_qpsk) < 1e-6
        # chain rule sandwich: 0 <= i_v1 <= min(1, i_qpsk), i_v1 >= i_qpsk - 1;
        # slack matches the quadrature agreement between the two integrals
        assert 0.0 <= row.i_v1_exact <= min(1.0, row.i_qpsk) + 1e-6
        assert row.i_v1_exact >= row.i_qpsk - 1.0 - 1e-6
        # the accounting discrepancy is carried entirely by the axis stream
        lhs = row.r_j_claimed - row.sum_exact
        rhs = row.r_c1_claimed - row.i_v1_exact
        assert abs(lhs - rhs) < 1e-12
        assert row.r_c2 == pytest.approx(row.i_v2_exact, abs=1e-12)


def test_sweep_curves_are_monotone_and_ordered():
    rows = rates.sweep(SweepSpec())
    for prev, cur in zip(rows, rows[1:]):
        assert cur.i_bpsk >= prev.i_bpsk
        assert cur.i_qpsk >= prev.i_qpsk
        assert cur.c_gauss_complex >= prev.c_gauss_complex
    for row in rows:
        assert row.c_gauss_complex >= row.i_qpsk - 1e-9


# ---------------------------------------------------------------------------
# claimed-vs-exact gap and the claim interval


def test_claimed_gap_agrees_with_the_direct_difference():
    for g in np.geomspace(0.05, 50.0, 12):
        direct = rates.rate_ocb_claimed(g) - mi_qpsk(g)
        assert rates.claimed_gap(g) == pytest.approx(direct, abs=1e-9)


def test_claimed_gap_is_positive_at_positive_snr():
    for g in np.geomspace(0.01, 100.0, 25):
        assert rates.claimed_gap(g) > 0.0


def test_claim_interval_structure():
    ci = rates.find_claim_interval(threshold=0.01)
    assert 0.0 < ci.gamma_lo < ci.gamma_peak < ci.gamma_hi
    assert ci.peak_gap > ci.threshold
    # endpoints sit on the threshold contour
    assert rates.claimed_gap(ci.gamma_lo) == pytest.approx(0.01, abs=1e-9)
    assert rates.claimed_gap(ci.gamma_hi) == pytest.approx(0.01, abs=1e-9)
    # the peak is a local max relative to the endpoints
    assert ci.peak_gap >= rates.claimed_gap(ci.gamma_lo)
    assert ci.peak_gap >= rates.claimed_gap(ci.gamma_hi)


def test_claim_interval_unreachable_threshold():
    with pytest.raises(ValueError):
        rates.find_claim_interval(threshold=0.5)


def test_claim_interval_requires_a_bracketing_scan():
    with pytest.raises(ValueError):
        rates.find_claim_interval(threshold=0.01, gamma_lo=1.0, gamma_hi=4.0, scan_points=20)
