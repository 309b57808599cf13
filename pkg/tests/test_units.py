import math

import pytest

from qshutter.units import (CONSTANTS, energy_from_wavenumber, free_passage_time, hbar_over_m,
                            wavenumber_from_energy)


def test_constants_values():
    assert CONSTANTS.hbar == pytest.approx(0.6582119569, rel=1e-12)
    assert CONSTANTS.hbar2_over_2me == pytest.approx(0.0380998, rel=1e-6)


def test_energy_roundtrip():
    for E in (1e-4, 0.01, 0.3, 5.0):
        k = wavenumber_from_energy(E, 0.067)
        assert energy_from_wavenumber(k, 0.067) == pytest.approx(E, rel=1e-14)


def test_gaas_baseline_numbers():
    k0 = wavenumber_from_energy(0.01, 0.067)
    assert k0 == pytest.approx(0.13261, rel=1e-4)
    assert free_passage_time(4.0, k0, 0.067) == pytest.approx(17.457, rel=1e-4)


def test_velocity_consistency():
    # hbar k / m times t_f returns d
    k0 = wavenumber_from_energy(0.02, 0.1)
    assert hbar_over_m(0.1) * k0 * free_passage_time(3.0, k0, 0.1) == pytest.approx(3.0)


def test_free_electron_wavenumber():
    # 1 eV free electron: k = sqrt(1/0.0380998) nm^-1
    assert wavenumber_from_energy(1.0, 1.0) == pytest.approx(math.sqrt(1 / 0.0380998))


@pytest.mark.parametrize("bad", [(-1.0, 0.067), (0.01, 0.0), (0.01, -2.0), (float("nan"), 1.0)])
def test_domain_errors(bad):
    with pytest.raises(ValueError):
        wavenumber_from_energy(*bad)


def test_passage_time_rejects_nonpositive():
    with pytest.raises(ValueError):
        free_passage_time(4.0, 0.0, 0.067)
    with pytest.raises(ValueError):
        free_passage_time(-1.0, 0.1, 0.067)
