import numpy as np
import pytest

from qshutter.oracles import (BoxTooSmallError, CNGrid, CrankNicolson, GridState,
                              crank_nicolson_density, m_quadrature, spectral_psi)
from qshutter.propagator import PacketParams, psi_packet
from qshutter.units import hbar_over_m

M_RATIO = 0.067
HM = hbar_over_m(M_RATIO)


def _gaussian_state(sigma=2.0, kc=0.5, L=150.0, dx=0.02, dt=0.01):
    n = int(round(2 * L / dx)) + 1
    x = np.linspace(-L, L, n)
    psi = (2 * np.pi * sigma ** 2) ** -0.25 * np.exp(-x ** 2 / (4 * sigma ** 2) + 1j * kc * x)
    return GridState(-L, L, n, dt, psi.astype(complex))


def test_cn_conserves_norm():
    st = _gaussian_state()
    pot = np.where(np.abs(st.x) < 2, 0.2, 0.0)
    solver = CrankNicolson(st, pot, M_RATIO)
    n0 = st.norm()
    solver.step(500)
    assert st.norm() == pytest.approx(n0, rel=1e-12)
    assert solver.t == pytest.approx(5.0)


def test_cn_free_gaussian_spreading():
    sigma, kc = 2.0, 0.5
    st = _gaussian_state(sigma, kc)
    solver = CrankNicolson(st, np.zeros(st.n_points), M_RATIO)
    solver.step(1000)
    t = solver.t
    rho = np.abs(st.psi) ** 2 * st.dx
    mean = np.sum(st.x * rho)
    width = np.sqrt(np.sum((st.x - mean) ** 2 * rho))
    expected = sigma * np.sqrt(1 + (HM * t / (2 * sigma ** 2)) ** 2)
    assert mean == pytest.approx(HM * kc * t, rel=1e-3)
    assert width == pytest.approx(expected, rel=1e-3)


def test_spectral_matches_series(params, k0, t_f, table):
    pk = PacketParams(k0, 0.75 * k0)
    val, err = spectral_psi(params.d + 2, 0.6 * t_f, pk, params, full_output=True)
    ref = complex(psi_packet(params.d + 2, 0.6 * t_f, params, pk, table))
    assert abs(val - ref) <= max(err, 1e-7 * abs(ref))
    assert err < 1e-6 * abs(ref)


def test_m_quadrature_free_plane_wave_limit():
    # far behind the shutter at short time, the kernel is the plane wave
    q = 0.3 - 0.001j
    x, t = -400.0, 1e-4
    z = abs(x) / np.sqrt(2 * HM * t)
    pw = np.exp(1j * q * x - 0.5j * HM * q * q * t)
    # the remainder decays like 1 / (2 sqrt(pi) |z|)
    assert abs(pw) > 0.5
    assert abs(m_quadrature(x, q, t, M_RATIO) - pw) < 1.5 / (2 * np.sqrt(np.pi) * z)


def test_m_quadrature_rejects_real_pole():
    with pytest.raises(ValueError):
        m_quadrature(1.0, 0.5, 1.0, M_RATIO)


def test_cn_box_guard(params, k0, t_f):
    pk = PacketParams(k0, 0.75 * k0)
    with pytest.raises(BoxTooSmallError):
        crank_nicolson_density(params.d, [t_f], pk, params, CNGrid(x_min=-60.0, x_max=30.0))


def test_cn_requires_packet(params, k0, t_f):
    with pytest.raises(ValueError):
        crank_nicolson_density(params.d, [t_f], PacketParams(k0), params)


@pytest.mark.slow
def test_cn_coarse_grid_tracks_series(params, k0, t_f, table):
    pk = PacketParams(k0, 0.75 * k0)
    ts = np.linspace(0.1, 1.0, 6) * t_f
    cn = crank_nicolson_density(params.d, ts, pk, params, CNGrid(0.04, 0.01))
    ref = np.abs(psi_packet(params.d, cn.times, params, pk, table)) ** 2
    assert np.max(np.abs(cn.density - ref)) / ref.max() < 0.01
