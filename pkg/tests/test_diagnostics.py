import numpy as np
import pytest

from qshutter.diagnostics import (DensityTimeSeries, NoInteriorPeakError, UndefinedFrequencyError,
                                  bandwidth, density_series, diagnose, find_peak, local_frequency,
                                  log_derivative, mean_energy, transmission_split)
from qshutter.propagator import PacketParams, TransmittedWave
from qshutter.units import CONSTANTS


@pytest.fixture(scope="module")
def cutoff_wave(params, k0, table):
    return TransmittedWave(params, PacketParams(k0), table)


def test_series_rejects_bad_grid(cutoff_wave, t_f):
    with pytest.raises(ValueError):
        density_series(cutoff_wave, [0.0, 1.0])
    with pytest.raises(ValueError):
        DensityTimeSeries(4.0, np.array([2.0, 1.0]), t_f, np.zeros(2, complex), "cutoff")


def test_minimal_series(cutoff_wave, t_f):
    s = density_series(cutoff_wave, [0.1 * t_f, 0.2 * t_f])
    assert len(s.density) == 2
    np.testing.assert_allclose(s.t_over_tf, [0.1, 0.2])


def test_peak_is_density_maximum(cutoff_wave, t_f):
    s = density_series(cutoff_wave, np.linspace(0.02, 3, 300) * t_f)
    peak = find_peak(s, cutoff_wave)
    a, b = peak.bracket
    assert a <= peak.t_p <= b and b - a <= 1e-4 * t_f
    assert peak.peak_density >= s.density.max()
    h = 1e-3 * t_f
    assert cutoff_wave.density(peak.t_p - h) < peak.peak_density
    assert cutoff_wave.density(peak.t_p + h) < peak.peak_density
    # the bandwidth vanishes at a density extremum
    assert float(bandwidth(cutoff_wave, peak.t_p)) < 1e-10 * float(
        local_frequency(cutoff_wave, peak.t_p))


def test_monotone_series_has_no_interior_peak(cutoff_wave, t_f):
    s = density_series(cutoff_wave, np.linspace(0.02, 0.25, 20) * t_f)
    with pytest.raises(NoInteriorPeakError):
        find_peak(s, cutoff_wave)


def test_frequency_tends_to_incident_energy(cutoff_wave, k0, params, t_f):
    # long after the transient only the stationary component oscillates
    E0 = CONSTANTS.hbar2_over_2me * k0 ** 2 / params.m_ratio
    omega = float(local_frequency(cutoff_wave, 200 * t_f))
    assert omega == pytest.approx(E0 / CONSTANTS.hbar, rel=1e-2)


def test_log_derivative_detects_zero():
    class Zero:
        def psi_and_dt(self, t, x=None):
            return np.zeros(1, complex), np.ones(1, complex)

    with pytest.raises(UndefinedFrequencyError):
        log_derivative(Zero(), np.array([1.0]))


@pytest.mark.parametrize("ratio, expected", [(0.75, 0.015625), (4.0, 0.17), (0.0, 0.01)])
def test_mean_energy(k0, ratio, expected):
    assert mean_energy(PacketParams(k0, ratio * k0), 0.067) == pytest.approx(expected, rel=1e-12)


def test_transmission_split_bounds(params, k0):
    split = transmission_split(PacketParams(k0, 0.75 * k0), params)
    assert 0 < split.p_under < 1 and 0 < split.p_over < 1
    assert split.tail_bound <= 1e-6 * (split.p_under + split.p_over)
    with pytest.raises(ValueError):
        transmission_split(PacketParams(k0), params)


def test_split_over_thin_barrier_approaches_unity():
    from qshutter.barrier import BarrierParams

    weak = BarrierParams(1e-4, 0.1, 0.067)
    pk = PacketParams(0.13, 0.5 * 0.13)
    split = transmission_split(pk, weak)
    # only the right-moving half of the momentum weight reaches the barrier
    from scipy import integrate

    from qshutter.propagator import phi_k

    right = integrate.quad(lambda k: abs(phi_k(k, pk)) ** 2, 0, np.inf, limit=400)[0]
    assert split.p_under + split.p_over == pytest.approx(right, rel=1e-3)


def test_diagnose_keys(cutoff_wave, params, k0, table, t_f):
    grid = np.linspace(0.02, 3, 200) * t_f
    rep = diagnose(cutoff_wave, grid)
    assert rep["mode"] == "cutoff" and "p_under" not in rep
    assert rep["regime"] == "tunneling"
    rep = diagnose(TransmittedWave(params, PacketParams(k0, 4 * k0), table), grid)
    assert "asymptotic_density" not in rep
    assert rep["regime"] == "non-tunneling"
