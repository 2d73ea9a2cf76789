import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bandedge_fluorescence import (
    FrequencyGrid,
    ModelParams,
    compute_spectra,
    detect_squeezing,
    fluctuation_spectra,
    intensity_spectrum,
    peak_analysis,
    quadrature_spectrum,
)
from bandedge_fluorescence.bloch import MINUS, PLUS
from bandedge_fluorescence.errors import NumericalError
from bandedge_fluorescence.spectra import _real

bandgap = st.builds(
    ModelParams.bandgap,
    st.floats(20.0, 200.0),
    st.floats(0.05, 5.0),
    st.floats(0.01, 2.0),
)
markovian = st.builds(ModelParams.markovian, st.floats(0.2, 5.0), st.floats(0.0, 20.0))
any_params = st.one_of(bandgap, markovian)
theta = st.floats(0.0, 2 * math.pi)


def grid_for(p, n=201):
    span = 3.0 * (p.rabi + (p.gamma or 0.3)) + 0.5
    return np.linspace(-span, span, n) + 1e-7


@settings(max_examples=60, deadline=None)
@given(any_params, theta)
def test_theta_periodicity(p, th):
    w = grid_for(p)
    a = quadrature_spectrum(th, p, w)
    b = quadrature_spectrum(th + math.pi, p, w)
    assert np.abs(a - b).max() <= 1e-10 * max(np.abs(a).max(), 1e-300)


@settings(max_examples=60, deadline=None)
@given(any_params)
def test_quadrature_sum_rule(p):
    w = grid_for(p)
    full = fluctuation_spectra(w, p)
    C = full[:, PLUS, MINUS].real
    C_neg = fluctuation_spectra(-w, p)[:, PLUS, MINUS].real
    total = quadrature_spectrum(0.0, p, w) + quadrature_spectrum(math.pi / 2, p, w)
    # the anomalous terms cancel in the sum, leaving their round-off
    scale = max(np.abs(C).max(), np.abs(full[:, MINUS, MINUS]).max(), 1e-300)
    assert np.abs(total - 0.5 * (C + C_neg)).max() <= 1e-10 * scale


@settings(max_examples=60, deadline=None)
@given(markovian, st.sampled_from([0.0, math.pi / 2]))
def test_markovian_quadratures_are_symmetric(p, th):
    w = grid_for(p)
    s = quadrature_spectrum(th, p, w)
    s_mirror = quadrature_spectrum(th, p, -w)
    assert np.abs(s - s_mirror).max() <= 1e-10 * max(np.abs(s).max(), 1e-300)


@settings(max_examples=60, deadline=None)
@given(markovian, theta)
def test_markovian_vacuum_floor(p, th):
    # normally ordered variance density cannot fall below the vacuum level
    s = quadrature_spectrum(th, p, grid_for(p, 401))
    assert p.gamma * s.min() >= -0.25 - 1e-12


@settings(max_examples=40, deadline=None)
@given(bandgap)
def test_gap_nulling(p):
    w = np.linspace(-p.offset - 5.0, -p.offset, 200, endpoint=False)
    values, _ = intensity_spectrum(p, w)
    reference, _ = intensity_spectrum(p, grid_for(p))
    assert np.all(np.abs(values) <= 1e-12 * reference.max())


def test_mollow_triplet_heights():
    p = ModelParams.markovian(1.0, 10.0)
    w = np.linspace(-15, 15, 6001)
    s, weight = intensity_spectrum(p, w)
    peaks = peak_analysis(w, s, min_height=0.05 * s.max())
    assert [round(pk.omega, 1) for pk in peaks] == [-9.9, 0.0, 9.9]
    side = 0.5 * (peaks[0].height + peaks[2].height)
    assert peaks[1].height / side == pytest.approx(3.0, rel=0.02)
    assert weight == pytest.approx(100 / (201**2), rel=1e-12)


def test_squeezing_threshold_at_rabi_equal_gamma():
    # out-of-phase density at line centre changes sign exactly at Omega = Gamma
    for om, negative in ((0.99, True), (1.01, False)):
        s0 = quadrature_spectrum(math.pi / 2, ModelParams.markovian(1.0, om), [0.0])[0]
        assert bool(s0 < 0) is negative


def test_bandgap_sideband_asymmetry():
    p = ModelParams.bandgap(100.0, 0.5, 0.25)
    w = np.linspace(-1, 1, 4001)
    s, _ = intensity_spectrum(p, w)
    low, centre, high = peak_analysis(w, s, min_height=1e-3 * s.max())
    assert low.omega == pytest.approx(-high.omega, abs=1e-3)
    assert high.height > low.height


def test_compute_spectra_matches_single_calls():
    p = ModelParams.bandgap(100.0, 1.0, 0.25)
    grid = FrequencyGrid(-1.0, 1.0, 101)
    table = compute_spectra(p, grid, thetas=[0.0, math.pi / 2])
    np.testing.assert_array_equal(table.intensity, intensity_spectrum(p, grid)[0])
    np.testing.assert_array_equal(table.quadratures[0.0], quadrature_spectrum(0.0, p, grid))
    assert table.coherent_weight == pytest.approx(abs(table.steady.s_minus) ** 2)


def test_detect_squeezing_intervals():
    w = np.linspace(-1, 1, 11)
    values = np.array([1, -1, -2, 1, 1, 1, 1, -0.5, 1, 1, -3], dtype=float)
    found = detect_squeezing(w, values)
    assert [(iv.omega_start, iv.omega_end, iv.min_value) for iv in found] == [
        pytest.approx((-0.8, -0.6, -2.0)),
        pytest.approx((0.4, 0.4, -0.5)),
        pytest.approx((1.0, 1.0, -3.0)),
    ]
    assert detect_squeezing(w, np.abs(values)) == []
    # tiny negative round-off relative to the scale is not squeezing
    assert detect_squeezing(w, np.where(values > 0, 1.0, -1e-14)) == []


def test_peak_analysis_refines_position():
    w = np.linspace(-1, 1, 21)
    y = np.exp(-((w - 0.0321) ** 2) / 0.05)
    (peak,) = peak_analysis(w, y)
    assert peak.omega == pytest.approx(0.0321, abs=2e-3)
    assert peak.height == pytest.approx(1.0, abs=1e-2)
    with pytest.raises(ValueError):
        peak_analysis(w[:2], y[:2])


def test_imaginary_residue_is_reported():
    with pytest.raises(NumericalError):
        _real(np.array([1.0 + 1e-3j]), "probe")
    assert _real(np.array([1.0 + 1e-14j]), "probe")[0] == 1.0


def test_anomalous_densities_are_hermitian_partners():
    p = ModelParams.bandgap(100.0, 0.7, 0.4)
    w = np.linspace(-1, 1, 51) + 1e-7
    C = fluctuation_spectra(w, p)
    np.testing.assert_allclose(C[:, PLUS, PLUS], np.conj(C[:, MINUS, MINUS]), atol=1e-12)
