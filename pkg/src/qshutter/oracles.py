"""Brute-force references for the pole-expansion results.

None of these call the Faddeeva function or use the poles of T(k):

* :func:`spectral_psi` integrates phi(k) T(k) exp(ikx - i hbar k^2 t / 2m)
  along the real k axis.
* :func:`m_quadrature` integrates the M-function integral along the
  steepest-descent line through the stationary point, adding the pole
  residue when the contour sweeps across it.
* :class:`CrankNicolson` evolves the packet on a grid.
"""

from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.sparse import diags
from scipy.sparse.linalg import splu

from .barrier import transmission_amplitude
from .diagnostics import DensityTimeSeries, IntegrationError
from .propagator import initial_packet, phi_k
from .units import hbar_over_m, free_passage_time, CONSTANTS

__all__ = [
    "spectral_psi",
    "m_quadrature",
    "GridState",
    "CNGrid",
    "CrankNicolson",
    "BoxTooSmallError",
    "crank_nicolson_density",
]

_GL20 = np.polynomial.legendre.leggauss(20)
_GL12 = np.polynomial.legendre.leggauss(12)


def _panel_edges(a, b, width):
    """March from a to b with panel width ``width(k)``."""
    edges = [a]
    k = a
    while k < b:
        k = min(k + width(k), b)
        edges.append(k)
    return np.array(edges)


def _gauss(f, edges, rule):
    x, w = rule
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo) + half * x).ravel()
    weights = (half * w).ravel()
    total = 0j
    step = 1 << 18
    for s in range(0, len(nodes), step):
        total += np.sum(weights[s:s + step] * f(nodes[s:s + step]))
    return total


def spectral_psi(x, t, packet, params, k_max=None, full_output=False, atol=1e-8):
    """Psi(x, t) = int dk/sqrt(2 pi) phi(k) T(k) exp(ikx - i hbar k^2 t/2m).

    The range |k| <= k_max (default k0 + 400 delta) is split into panels no
    wider than a fraction of the local oscillation period and of the widths
    of phi and T, each integrated with 20-point Gauss-Legendre. The two
    semi-infinite tails are added by two-term integration by parts. The
    returned error estimate is the 20- vs 12-point panel discrepancy plus the
    size of the first neglected tail term.
    """
    if not packet.delta > 0:
        raise ValueError("spectral representation needs delta > 0")
    if x < params.d:
        raise ValueError("spectral_psi is for the transmitted region x >= d")
    hm = hbar_over_m(params.m_ratio)
    k0, dl = packet.k0, packet.delta
    K = k0 + 400 * dl if k_max is None else k_max

    def f(k):
        return phi_k(k, packet) * transmission_amplitude(k, params) / np.sqrt(2 * np.pi)

    def phase(k):
        return k * x - 0.5 * hm * k * k * t

    def integrand(k):
        return f(k) * np.exp(1j * phase(k))

    feat = 0.5 * min(dl, 0.25, 1.0 / params.d)

    def width(k):
        osc = np.pi / max(abs(x - hm * k * t), 1e-300)
        near = min(abs(k - k0), abs(k + k0)) < 20 * dl
        return min(osc, feat if near else 0.25 / params.d, 0.5)

    edges = np.concatenate([_panel_edges(-K, 0.0, width)[:-1], _panel_edges(0.0, K, width)])
    body = _gauss(integrand, edges, _GL20)
    err = abs(body - _gauss(integrand, edges, _GL12))

    # tails: int_K^inf f e^{iS} = -e^{iS} [f/(iS') - (f/(iS'))'/(iS')] at K
    tails = 0j
    tail_err = 0.0
    h = 1e-4 * K
    for end, sign in ((K, -1.0), (-K, 1.0)):
        def u(k):
            return f(k) / (1j * (x - hm * k * t))

        u0 = u(end)
        du = (u(end + h) - u(end - h)) / (2 * h)
        ddu = (u(end + h) - 2 * u(end) + u(end - h)) / h ** 2
        iS1 = 1j * (x - hm * end * t)
        e = np.exp(1j * phase(end))
        tails += sign * e * (u0 - du / iS1)
        tail_err += abs(ddu / iS1 ** 2) + abs(u0) * 1e-6
    value = body + tails
    error = err + tail_err
    if error > atol and error > 1e-6 * abs(value):
        raise IntegrationError("spectral quadrature did not reach tolerance", value, error)
    return (value, error) if full_output else value


def m_quadrature(x, q, t, m_ratio, full_output=False):
    """(i/2pi) int dk exp(ikx - i hbar k^2 t/2m) / (k - q) for Im q != 0.

    The real axis is rotated onto k = ks + exp(-i pi/4) u through the
    stationary point ks = m x / (hbar t), where the integrand decays like a
    Gaussian. Sweeping the contour crosses the pole if q lies in the sector
    between the two lines; its residue is added with the orientation of the
    sweep (clockwise on the right of ks, counter-clockwise on the left).
    """
    q = complex(q)
    if q.imag == 0:
        raise ValueError("m_quadrature needs a pole off the real axis")
    if not t > 0:
        raise ValueError("t must be positive")
    hm = hbar_over_m(m_ratio)
    a = 0.5 * hm * t
    ks = x / (2 * a)
    rot = np.exp(-1j * np.pi / 4)

    def g(u):
        return np.exp(-a * u * u) / (ks + rot * u - q)

    # nearest point of the line to the pole, and the Gaussian cutoff
    ustar = ((q - ks) / rot).real
    U = np.sqrt(50.0 / a)
    pts = [p for p in (ustar,) if -U < p < U]
    opts = dict(limit=400, epsabs=1e-14, epsrel=1e-12, points=pts or None)
    re, ere = integrate.quad(lambda u: g(u).real, -U, U, **opts)
    im, eim = integrate.quad(lambda u: g(u).imag, -U, U, **opts)
    line = np.exp(1j * a * ks * ks) * rot * complex(re, im)

    arg = np.angle(q - ks)
    if -np.pi / 4 < arg < 0:
        line -= 2j * np.pi * np.exp(1j * q * x - 1j * a * q * q)
    elif 3 * np.pi / 4 < arg < np.pi:
        line += 2j * np.pi * np.exp(1j * q * x - 1j * a * q * q)
    value = 1j / (2 * np.pi) * line
    error = (abs(complex(ere, eim)) / (2 * np.pi)
             + np.exp(-50.0) * np.sqrt(np.pi / a) / abs(q.imag))
    return (value, error) if full_output else value


# ---------------------------------------------------------------------------
# Crank-Nicolson

class BoxTooSmallError(ValueError):
    pass


@dataclass
class GridState:
    x_min: float
    x_max: float
    n_points: int
    dt: float
    psi: np.ndarray

    @property
    def x(self):
        return np.linspace(self.x_min, self.x_max, self.n_points)

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.n_points - 1)

    def norm(self):
        return float(np.sum(np.abs(self.psi) ** 2) * self.dx)


@dataclass(frozen=True)
class CNGrid:
    """Production grid for the packet cross-check (nm, fs)."""

    dx: float = 0.02
    dt: float = 0.005
    x_min: float = None  # default: packet tail below 1e-13, and at least 400 nm
    x_max: float = None  # default: d + 400 nm


class CrankNicolson:
    """Unitary implicit stepper for i hbar dpsi/dt = -(hbar^2/2m) psi'' + V psi
    with psi = 0 at both ends of the box."""

    def __init__(self, state, potential, m_ratio):
        self.state = state
        n, dx, dt = state.n_points, state.dx, state.dt
        hm = hbar_over_m(m_ratio)
        kin = 0.5 * hm / dx ** 2
        diag = 2 * kin + np.asarray(potential, dtype=float) / CONSTANTS.hbar
        off = -kin * np.ones(n - 1)
        H = diags([off, diag, off], [-1, 0, 1], format="csc")
        eye = diags([np.ones(n)], [0], format="csc")
        self._lhs = splu((eye + 0.5j * dt * H).tocsc())
        self._rhs = (eye - 0.5j * dt * H).tocsr()
        self.steps_taken = 0

    @property
    def t(self):
        return self.steps_taken * self.state.dt

    def step(self, n=1):
        psi = self.state.psi
        for _ in range(n):
            psi = self._lhs.solve(self._rhs @ psi)
        self.state.psi = psi
        self.steps_taken += n
        return self


def _barrier_potential(x, dx, params):
    # cell-averaged potential, so the nodes at x = 0 and x = d carry V0/2
    lo = np.clip(x - dx / 2, 0.0, params.d)
    hi = np.clip(x + dx / 2, 0.0, params.d)
    return params.V0 * (hi - lo) / dx


def crank_nicolson_density(x_obs, t_grid, packet, params, grid=CNGrid(),
                           contamination_tol=1e-6):
    """|Psi(x_obs, t)|^2 for the Lorentzian packet from a grid solution.

    Output times are the requested ones rounded to multiples of ``grid.dt``.
    Raises :class:`BoxTooSmallError` if momentum components fast enough to
    reflect off a wall and return to ``x_obs`` by the last time carry more
    than ``contamination_tol`` of the packet probability.
    """
    if not packet.delta > 0:
        raise ValueError("grid evolution requires a normalizable packet (delta > 0)")
    t_grid = np.asarray(t_grid, dtype=float)
    dx, dt = grid.dx, grid.dt
    x_min = (grid.x_min if grid.x_min is not None
             else min(np.log(1e-13) / packet.delta, -400.0))
    x_max = grid.x_max if grid.x_max is not None else params.d + 400.0
    x_min = np.floor(x_min / dx) * dx
    n = int(round((x_max - x_min) / dx)) + 1
    x_max = x_min + (n - 1) * dx
    x = x_min + dx * np.arange(n)
    psi0 = initial_packet(x, packet).astype(complex)
    if abs(psi0[0]) > 1e-12:
        raise BoxTooSmallError(f"packet tail {abs(psi0[0]):.2e} at x_min = {x_min} nm")

    hm = hbar_over_m(params.m_ratio)
    t_end = t_grid.max()
    reach = 2 * min(x_max - x_obs, x_obs - x_min)
    k_c = reach / (hm * t_end)
    if k_c <= 2 * packet.k0:
        raise BoxTooSmallError(f"box too small: wall echoes reach x_obs for k > {k_c:.3g}")
    weight = 2 * 8 * np.pi * packet.A ** 2 * packet.k0 ** 2 / (3 * (k_c - packet.k0) ** 3)
    if weight > contamination_tol:
        raise BoxTooSmallError(
            f"wall echoes carry probability ~{weight:.2e} > {contamination_tol:.0e}")

    state = GridState(x_min, x_max, n, dt, psi0)
    solver = CrankNicolson(state, _barrier_potential(x, dx, params), params.m_ratio)
    i_obs = int(round((x_obs - x_min) / dx))
    steps = np.round(t_grid / dt).astype(int)
    if (np.diff(steps) <= 0).any() or steps[0] <= 0:
        raise ValueError("time grid must be increasing and resolvable by dt")
    psi_obs = np.empty(len(steps), dtype=complex)
    for j, s in enumerate(steps):
        solver.step(s - solver.steps_taken)
        psi_obs[j] = state.psi[i_obs]
    tf = free_passage_time(params.d, packet.k0, params.m_ratio)
    return DensityTimeSeries(x[i_obs], steps * dt, tf, psi_obs, "packet")
