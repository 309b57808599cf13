"""Transmitted wave function for the quantum shutter problem.

Two initial conditions are supported, selected by ``PacketParams.delta``:

* ``delta == 0``: the cutoff plane wave 2i sin(k0 x) for x < 0;
* ``delta > 0``: the Lorentzian packet 4 pi A exp(delta x) sin(k0 x) for x < 0.

In the transmitted region x >= d both are finite combinations of free
kernels M(x, q; t) at q = +-k0 (shifted by -i delta for the packet) plus a
series over the poles k_n of T(k). The pole series is summed over pairs
(n, -n) in ascending n with compensated accumulation.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .barrier import transmission_amplitude
from .faddeeva import FaddeevaOverflowError, wofz_scaled
from .summation import compensated_sum
from .units import hbar_over_m

__all__ = [
    "PacketParams",
    "EvaluationPoint",
    "IllConditionedTermWarning",
    "IllConditionedTermError",
    "m_function",
    "m_function_dt",
    "psi_cutoff",
    "psi_packet",
    "TransmittedWave",
    "initial_packet",
    "phi_k",
    "delta_limit_check",
]

_SQRT_PI = np.sqrt(np.pi)
_EXP_LIMIT = np.log(np.finfo(float).max)
_CHUNK = 128


class IllConditionedTermWarning(RuntimeWarning):
    pass


class IllConditionedTermError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PacketParams:
    """Incident wavenumber ``k0`` and Lorentzian width ``delta`` (nm^-1)."""

    k0: float
    delta: float = 0.0

    def __post_init__(self):
        if not self.k0 > 0:
            raise ValueError(f"k0 must be positive, got {self.k0}")
        if not self.delta >= 0:
            raise ValueError(f"delta must be non-negative, got {self.delta}")

    @property
    def mode(self):
        return "packet" if self.delta > 0 else "cutoff"

    @property
    def A(self):
        if self.delta == 0:
            raise ValueError("the cutoff plane wave has no normalization constant")
        return np.sqrt(self.delta * (1 + (self.delta / self.k0) ** 2)) / (2 * np.pi)


@dataclass(frozen=True)
class EvaluationPoint:
    x: float
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError(f"t must be positive, got {self.t}")


def _kernel_parts(x, q, t, m_ratio):
    hm = hbar_over_m(m_ratio)
    t = np.asarray(t, dtype=float)
    if (t <= 0).any():
        raise ValueError("M(x, q; t) requires t > 0")
    q = np.asarray(q, dtype=complex)
    phase = 1j * x * x / (2 * hm * t)
    # z = i y_q,  y_q = exp(-i pi/4) sqrt(m / 2 hbar t) (x - hbar q t / m)
    z = np.exp(1j * np.pi / 4) * (x - hm * q * t) / np.sqrt(2 * hm * t)
    return hm, t, q, phase, z


def _m_from_parts(x, hm, t, q, phase, z):
    phase, z, q, t = np.broadcast_arrays(phase, z, q, t)
    out = np.empty(z.shape, dtype=complex)
    upper = z.imag >= 0
    try:
        if upper.any():
            out[upper] = 0.5 * wofz_scaled(z[upper], phase[upper])
        lower = ~upper
        if lower.any():
            ql, tl = q[lower], t[lower]
            # exp(phase - z**2) written out exactly: the free plane wave
            pw = 1j * ql * x - 0.5j * hm * ql * ql * tl
            if (pw.real > _EXP_LIMIT).any():
                raise FaddeevaOverflowError(pw.real.max())
            out[lower] = np.exp(pw) - 0.5 * wofz_scaled(-z[lower], phase[lower])
    except FaddeevaOverflowError as exc:
        raise FaddeevaOverflowError(
            exc.exponent, f"M(x={x}, q, t) with q in [{q.ravel()[0]}, ...]") from exc
    return out


def m_function(x, q, t, m_ratio):
    """Free transient kernel M(x, q; t) = exp(i m x^2 / 2 hbar t) w(i y_q) / 2.

    ``q`` and ``t`` broadcast against each other; ``t`` in fs, must be > 0.
    Arguments with ``Im(i y_q) < 0`` use the reflection of w, written as the
    plane wave exp(iqx - i hbar q^2 t / 2m) minus a bounded remainder.
    """
    hm, t, q, phase, z = _kernel_parts(x, q, t, m_ratio)
    out = _m_from_parts(x, hm, t, q, phase, z)
    return out[()] if out.ndim == 0 else out


def _m_and_dt(x, q, t, m_ratio):
    hm, t, q, phase, z = _kernel_parts(x, q, t, m_ratio)
    M = _m_from_parts(x, hm, t, q, phase, z)
    dphase = -1j * x * x / (2 * hm * t * t)
    # dz/dt for z = e^{i pi/4} [x (2 hm t)^{-1/2} - q (hm t / 2)^{1/2}]
    dz = np.exp(1j * np.pi / 4) * (-0.5 * x / np.sqrt(2 * hm) * t ** -1.5
                                   - 0.5 * q * np.sqrt(hm / 2) / np.sqrt(t))
    dM = dphase * M + dz * (-2 * z * M + 1j * np.exp(phase) / _SQRT_PI)
    return M, dM


def m_function_dt(x, q, t, m_ratio):
    """Analytic dM/dt via w'(z) = -2 z w(z) + 2i/sqrt(pi)."""
    dM = _m_and_dt(x, q, t, m_ratio)[1]
    return dM[()] if dM.ndim == 0 else dM


def _check_point(x, t, params):
    if x < params.d:
        raise ValueError(f"x = {x} nm lies outside the transmitted region x >= {params.d}")
    if (np.asarray(t) <= 0).any():
        raise ValueError("t must be positive")


def _series(x, t, m_ratio, sources, source_coef, kn, pole_coef, derivative):
    """sum_j a_j M(x, s_j; t) + sum_n c_n M(x, k_n; t) over a 1-d time array.

    ``kn``/``pole_coef`` hold n = 1..N followed by n = -1..-N; terms n and
    -n are added first, then pairs are accumulated in ascending n.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    N = len(kn) // 2
    psi = np.empty(t.shape, dtype=complex)
    dpsi = np.empty(t.shape, dtype=complex) if derivative else None
    for start in range(0, len(t), _CHUNK):
        tc = t[start:start + _CHUNK]
        Ms, dMs = _m_and_dt(x, sources[:, None], tc[None, :], m_ratio)
        Mp, dMp = _m_and_dt(x, kn[:, None], tc[None, :], m_ratio)
        terms = pole_coef[:, None] * Mp
        pairs = terms[:N] + terms[N:]
        psi[start:start + len(tc)] = (source_coef @ Ms) + compensated_sum(pairs)
        if derivative:
            dterms = pole_coef[:, None] * dMp
            dpsi[start:start + len(tc)] = (source_coef @ dMs
                                           + compensated_sum(dterms[:N] + dterms[N:]))
    return psi, dpsi


def _cutoff_terms(params, k0, table):
    kn, rn = table.all_poles()
    denom = k0 * k0 - kn * kn
    near = np.abs(denom) < 1e-12 * k0 * k0
    if near.any():
        warnings.warn(f"k0 nearly coincides with pole(s) {np.flatnonzero(near)}",
                      IllConditionedTermWarning, stacklevel=3)
    sources = np.array([k0, -k0], dtype=complex)
    coef = np.array([transmission_amplitude(k0, params),
                     -transmission_amplitude(-k0, params)])
    return sources, coef, kn, -2 * k0 * rn / denom


def _packet_terms(params, packet, table):
    k0, delta = packet.k0, packet.delta
    kn, rn = table.all_poles()
    denom = k0 * k0 - (kn + 1j * delta) ** 2
    near = np.abs(denom) < 1e-12 * k0 * k0
    if near.any():
        bad = int(np.flatnonzero(near)[0])
        n = bad + 1 if bad < len(kn) // 2 else -(bad - len(kn) // 2 + 1)
        raise IllConditionedTermError(f"(k_n + i delta)^2 = k0^2 for pole n={n}")
    pref = -1j * np.sqrt(delta * (1 + (delta / k0) ** 2))
    sources = np.array([k0 - 1j * delta, -k0 - 1j * delta])
    coef = pref * np.array([transmission_amplitude(sources[0], params),
                            -transmission_amplitude(sources[1], params)])
    return sources, coef, kn, pref * (-2 * k0 * rn / denom)


def _squeeze_t(t, v):
    return v[0] if np.ndim(t) == 0 else v


def psi_cutoff(x, t, params, k0, table):
    """Transmitted wave for the cutoff plane wave 2i sin(k0 x), x < 0.

    Psi = T(k0) M(k0) - T(-k0) M(-k0) - 2 k0 sum_n r_n M(k_n) / (k0^2 - k_n^2)
    """
    _check_point(x, t, params)
    src, a, kn, c = _cutoff_terms(params, k0, table)
    return _squeeze_t(t, _series(x, t, params.m_ratio, src, a, kn, c, False)[0])


def psi_packet(x, t, params, packet, table):
    """Transmitted wave for the normalized Lorentzian packet (delta > 0)."""
    if not packet.delta > 0:
        raise ValueError("psi_packet requires delta > 0; use psi_cutoff")
    _check_point(x, t, params)
    src, a, kn, c = _packet_terms(params, packet, table)
    return _squeeze_t(t, _series(x, t, params.m_ratio, src, a, kn, c, False)[0])


@dataclass(frozen=True)
class TransmittedWave:
    """Psi(x, t) for x >= d, dispatching on the packet mode.

    Coefficients are computed once; evaluation is vectorized over ``t``.
    """

    params: object
    packet: PacketParams
    table: object

    def __post_init__(self):
        if self.packet.delta > 0:
            terms = _packet_terms(self.params, self.packet, self.table)
        else:
            terms = _cutoff_terms(self.params, self.packet.k0, self.table)
        object.__setattr__(self, "_terms", terms)

    @property
    def mode(self):
        return self.packet.mode

    def psi(self, t, x=None):
        x = self.params.d if x is None else x
        _check_point(x, t, self.params)
        return _squeeze_t(t, _series(x, t, self.params.m_ratio, *self._terms, False)[0])

    def psi_and_dt(self, t, x=None):
        """(Psi, dPsi/dt) with the time derivative taken analytically."""
        x = self.params.d if x is None else x
        _check_point(x, t, self.params)
        p, dp = _series(x, t, self.params.m_ratio, *self._terms, True)
        return _squeeze_t(t, p), _squeeze_t(t, dp)

    def density(self, t, x=None):
        return np.abs(self.psi(t, x)) ** 2


def initial_packet(x, packet):
    """4 pi A exp(delta x) sin(k0 x) for x < 0, zero for x >= 0."""
    x = np.asarray(x, dtype=float)
    xn = np.minimum(x, 0.0)
    val = 4 * np.pi * packet.A * np.exp(packet.delta * xn) * np.sin(packet.k0 * xn)
    out = np.where(x < 0, val, 0.0)
    return out[()] if out.ndim == 0 else out


def phi_k(k, packet):
    """Momentum-space packet sqrt(2 pi) A [1/(k-k0+i delta) - 1/(k+k0+i delta)]."""
    k = np.asarray(k, dtype=float)
    k0, dl = packet.k0, packet.delta
    out = np.sqrt(2 * np.pi) * packet.A * (1 / (k - k0 + 1j * dl) - 1 / (k + k0 + 1j * dl))
    return out[()] if out.ndim == 0 else out


def delta_limit_check(x, t, params, k0, table, delta_small):
    """((i/sqrt(delta)) psi_packet, psi_cutoff) at the same (x, t)."""
    if not delta_small > 0:
        raise ValueError("delta_small must be positive")
    pk = psi_packet(x, t, params, PacketParams(k0, delta_small), table)
    return 1j / np.sqrt(delta_small) * pk, psi_cutoff(x, t, params, k0, table)
