"""Observables of the transmitted wave: density curves, the time-domain
resonance peak, under/over-barrier transmission, and instantaneous frequency."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .barrier import transmission_amplitude
from .propagator import phi_k
from .units import CONSTANTS, energy_from_wavenumber, free_passage_time

__all__ = [
    "DensityTimeSeries",
    "ResonancePeak",
    "TransmissionSplit",
    "NoInteriorPeakError",
    "IntegrationError",
    "UndefinedFrequencyError",
    "density_series",
    "find_peak",
    "transmission_split",
    "log_derivative",
    "local_frequency",
    "bandwidth",
    "mean_energy",
    "diagnose",
]

_GOLDEN = (math.sqrt(5) - 1) / 2


class NoInteriorPeakError(ValueError):
    pass


class IntegrationError(RuntimeError):
    def __init__(self, message, estimate=None, error=None):
        self.estimate = estimate
        self.error = error
        super().__init__(f"{message} (estimate={estimate}, error={error})")


class UndefinedFrequencyError(ArithmeticError):
    pass


@dataclass(frozen=True)
class DensityTimeSeries:
    x: float
    times: np.ndarray  # fs
    t_f: float
    psi: np.ndarray
    mode: str

    def __post_init__(self):
        if len(self.times) > 1 and not (np.diff(self.times) > 0).all():
            raise ValueError("time grid must be strictly increasing")

    @property
    def density(self):
        return np.abs(self.psi) ** 2

    @property
    def t_over_tf(self):
        return self.times / self.t_f


@dataclass(frozen=True)
class ResonancePeak:
    t_p: float
    t_p_over_tf: float
    peak_density: float
    refinement_width: float
    bracket: tuple


@dataclass(frozen=True)
class TransmissionSplit:
    p_under: float
    p_over: float
    k_max: float
    tail_bound: float


def _t_f(wave):
    p = wave.params
    return free_passage_time(p.d, wave.packet.k0, p.m_ratio)


def density_series(wave, t_grid, x=None):
    """Sample Psi(x, t) on ``t_grid`` (fs); ``x`` defaults to the barrier exit."""
    x = wave.params.d if x is None else x
    t_grid = np.asarray(t_grid, dtype=float)
    if (t_grid <= 0).any():
        raise ValueError("time grid must lie in (0, inf)")
    return DensityTimeSeries(x, t_grid, _t_f(wave), np.atleast_1d(wave.psi(t_grid, x)),
                             wave.mode)


def _golden_max(f, a, b, fa, fb, fm, m, tol):
    # maximize f on [a, b] given an interior point m with f(m) >= f(a), f(b)
    while b - a > tol:
        if m - a > b - m:
            x = m - (1 - _GOLDEN) * (m - a)
            fx = f(x)
            if fx > fm:
                b, fb, m, fm = m, fm, x, fx
            else:
                a, fa = x, fx
        else:
            x = m + (1 - _GOLDEN) * (b - m)
            fx = f(x)
            if fx > fm:
                a, fa, m, fm = m, fm, x, fx
            else:
                b, fb = x, fx
    return a, b, m, fm, fa, fb


def find_peak(series, wave, rel_width=1e-4):
    """Refine the largest density sample of ``series`` to a bracket of width
    ``rel_width * t_f`` by golden-section search on the analytic density."""
    dens = series.density
    i = int(np.argmax(dens))
    if i == 0 or i == len(dens) - 1:
        raise NoInteriorPeakError(
            f"density maximum at grid boundary t = {series.times[i]:.6g} fs")
    x = series.x

    def f(t):
        return float(np.abs(wave.psi(t, x)) ** 2)

    a, b = series.times[i - 1], series.times[i + 1]
    tol = rel_width * series.t_f
    a, b, m, fm, fa, fb = _golden_max(f, a, b, dens[i - 1], dens[i + 1], dens[i],
                                      series.times[i], tol)

    # polish: d|Psi|^2/dt = 2 |Psi|^2 Re(Psi'/Psi) changes sign at the peak
    def slope(t):
        p, dp = wave.psi_and_dt(t, x)
        return float(np.real(dp / p))

    sa, sb = slope(a), slope(b)
    if sa > 0 > sb:
        m = optimize.brentq(slope, a, b, xtol=1e-14 * b, rtol=1e-15)
        fm = f(m)
    return ResonancePeak(t_p=m, t_p_over_tf=m / series.t_f, peak_density=fm,
                         refinement_width=b - a, bracket=(a, b))


def _lorentzian_tail_bound(packet, K):
    # |phi|^2 <= 8 pi A^2 k0^2 / (k - k0)^4 for k > k0, and |T| <= 1
    return 8 * np.pi * packet.A ** 2 * packet.k0 ** 2 / (3 * (K - packet.k0) ** 3)


def transmission_split(packet, params, rtol=1e-6):
    """P_under = int_0^kV |T|^2 |phi|^2 dk and P_over = int_kV^inf (same).

    The upper limit is doubled until the rigorous Lorentzian tail bound is
    below ``rtol`` times the total.
    """
    if not packet.delta > 0:
        raise ValueError("transmission split needs a normalizable packet (delta > 0)")
    kV = params.k_V

    def f(k):
        return abs(complex(transmission_amplitude(k, params))) ** 2 * abs(complex(phi_k(k, packet))) ** 2

    def quad(a, b, pts=None, scale=None):
        val, err, info = integrate.quad(f, a, b, points=pts, limit=2000,
                                        epsabs=1e-15, epsrel=1e-11, full_output=1)[:3]
        # tail segments are judged against the running total, not themselves
        if err > 1e-8 * max(abs(val) if scale is None else scale, 1e-12):
            raise IntegrationError("transmission integral did not converge", val, err)
        return val

    k0 = packet.k0
    inner = [k0] if 0 < k0 < kV else None
    p_under = quad(0.0, kV, inner)
    K = max(2 * kV, k0 + 50 * packet.delta)
    p_over = quad(kV, K, [k0] if kV < k0 < K else None)
    while _lorentzian_tail_bound(packet, K) > rtol * (p_under + p_over):
        p_over += quad(K, 2 * K, scale=p_under + p_over)
        K *= 2
    return TransmissionSplit(p_under, p_over, K, _lorentzian_tail_bound(packet, K))


def log_derivative(wave, t, x=None):
    """(1/Psi) dPsi/dt with the analytic time derivative."""
    psi, dpsi = wave.psi_and_dt(t, x)
    if (np.abs(psi) < 1e-150).any():
        raise UndefinedFrequencyError("Psi vanishes; frequency undefined")
    return dpsi / psi


def local_frequency(wave, t, x=None):
    """omega_av = -Im[(1/Psi) dPsi/dt] in fs^-1."""
    return -np.imag(log_derivative(wave, t, x))


def bandwidth(wave, t, x=None):
    """sigma = |Re[(1/Psi) dPsi/dt]| in fs^-1."""
    return np.abs(np.real(log_derivative(wave, t, x)))


def mean_energy(packet, m_ratio):
    """<E> = (1 + (delta/k0)^2) E0 in eV."""
    E0 = energy_from_wavenumber(packet.k0, m_ratio)
    return (1 + (packet.delta / packet.k0) ** 2) * E0


def diagnose(wave, t_grid, x=None):
    """Collect the peak, frequency, and transmission observables in a dict."""
    series = density_series(wave, t_grid, x)
    peak = find_peak(series, wave)
    L = complex(log_derivative(wave, peak.t_p, series.x))
    omega = -L.imag
    omega_V0 = wave.params.V0 / CONSTANTS.hbar
    report = {
        "mode": wave.mode,
        "t_p_fs": peak.t_p,
        "t_p_over_tf": peak.t_p_over_tf,
        "peak_density": peak.peak_density,
        "omega_av_at_tp": omega,
        "omega_ratio": omega / omega_V0,
        "sigma_at_tp": abs(L.real),
        "mean_energy_eV": mean_energy(wave.packet, wave.params.m_ratio),
    }
    if wave.packet.delta > 0:
        split = transmission_split(wave.packet, wave.params)
        report["p_under"] = split.p_under
        report["p_over"] = split.p_over
        tunneling = split.p_under > split.p_over and omega / omega_V0 < 1
    else:
        T0 = complex(transmission_amplitude(wave.packet.k0, wave.params))
        report["asymptotic_density"] = abs(T0) ** 2
        tunneling = omega / omega_V0 < 1
    report["regime"] = "tunneling" if tunneling else "non-tunneling"
    return report
