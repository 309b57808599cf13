"""Oracle-equivalence checks run by ``qshutter verify``."""

from dataclasses import dataclass

import numpy as np

from .barrier import (mittag_leffler_T, residue_eigenfunction, residue_from_derivative,
                      transmission_amplitude)
from .oracles import CNGrid, crank_nicolson_density, m_quadrature, spectral_psi
from .propagator import PacketParams, TransmittedWave, delta_limit_check, m_function

__all__ = ["Check", "run_checks"]


@dataclass(frozen=True)
class Check:
    name: str
    achieved: float
    required: float
    detail: str = ""

    @property
    def passed(self):
        return bool(self.achieved <= self.required)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        s = f"{status} {self.name}: achieved {self.achieved:.3e}, required <= {self.required:.0e}"
        return s + (f" ({self.detail})" if self.detail else "")


def _rel(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.abs(np.asarray(b))))


def check_residue_routes(table, count=20):
    k = table.k[:count]
    eig = np.array([residue_eigenfunction(kk, table.params) for kk in k])
    return Check("residues explicit vs eigenfunction", _rel(table.r[:count], eig), 1e-8,
                 f"first {len(k)} poles")


def check_residue_derivative(table):
    return Check("residues explicit vs exp(-ikd)/g'",
                 _rel(table.r, residue_from_derivative(table.k, table.params)), 1e-10,
                 f"all {table.count_per_quadrant} poles")


def check_argument_principle(table):
    cert = table.certificate
    found = cert.get("zeros_in_rectangle", -1)
    axis = cert.get("imaginary_axis_zeros", -1)
    mismatch = abs(found - table.count_per_quadrant) + abs(axis)
    return Check("argument-principle pole count", float(mismatch), 0.0,
                 f"{found} zeros in rectangle, {axis} on imaginary axis")


def check_m_quadrature(table, x, t, count=20):
    k = table.k[:count]
    m = table.params.m_ratio
    closed = np.array([m_function(x, q, t, m) for q in k])
    quad = np.array([m_quadrature(x, q, t, m) for q in k])
    return Check("M closed form vs contour quadrature", _rel(quad, closed), 1e-8,
                 f"{len(k)} pole arguments, t = {t:.4g} fs")


def check_mittag_leffler(table, k0):
    exact = complex(transmission_amplitude(k0, table.params))
    approx = complex(mittag_leffler_T(k0, table))
    err = abs(approx - exact) / abs(exact)
    N = table.count_per_quadrant
    return Check("Mittag-Leffler partial sum vs T(k0)", err, 1e-4,
                 f"N = {N}, abs error {abs(approx - exact):.2e}, N*rel error = {N * err:.3f}")


def check_delta_limit(table, k0, x, t, ratio=1e-4):
    scaled, cutoff = delta_limit_check(x, t, table.params, k0, table, ratio * k0)
    return Check("delta -> 0 limit of rescaled packet", abs(scaled - cutoff) / abs(cutoff),
                 1e-3, f"delta/k0 = {ratio:g}")


def check_spectral(table, packet, t_f, points=5):
    d = table.params.d
    wave = TransmittedWave(table.params, packet, table)
    ts = np.linspace(0.05, 3.0, points) * t_f
    xs = d + np.linspace(0.0, 10.0, points)
    worst = 0.0
    for x, t in zip(xs, ts):
        worst = max(worst, _rel(spectral_psi(x, t, packet, table.params), wave.psi(t, x)))
    return Check("packet series vs spectral quadrature", worst, 1e-6,
                 f"{points} points, delta/k0 = {packet.delta / packet.k0:g}")


def check_crank_nicolson(table, packet, t_f, grid=CNGrid()):
    d = table.params.d
    ts = np.linspace(0.05, 2.0, 40) * t_f
    cn = crank_nicolson_density(d, ts, packet, table.params, grid)
    wave = TransmittedWave(table.params, packet, table)
    exact = np.abs(wave.psi(cn.times)) ** 2
    return Check("Crank-Nicolson vs packet series", float(np.max(np.abs(cn.density - exact))
                                                          / exact.max()),
                 0.03, f"dx = {grid.dx} nm, dt = {grid.dt} fs, relative to peak")


def run_checks(config, table, include_grid=True):
    """All checks applicable to ``config``; packet-only checks need delta > 0."""
    k0 = config.packet.k0
    t_f = config.t_f
    x = config.x
    checks = [
        check_argument_principle(table),
        check_residue_routes(table),
        check_residue_derivative(table),
        check_m_quadrature(table, x, 0.3 * t_f),
        check_mittag_leffler(table, k0),
        check_delta_limit(table, k0, table.params.d, 0.3 * t_f),
    ]
    if config.packet.delta > 0:
        packet = PacketParams(k0, config.packet.delta)
        checks.append(check_spectral(table, packet, t_f))
        if include_grid:
            checks.append(check_crank_nicolson(table, packet, t_f))
    return checks
