"""Scattering off a rectangular barrier: T(k), its poles and residues.

The barrier occupies ``0 <= x <= d`` with height ``V0``. Everything is written
in terms of

    g(k) = exp(-ikd) / T(k) = cos(qd) - i (k**2 + q**2) / (2kq) sin(qd),
    q = sqrt(k**2 - kV**2),

an even function of ``q`` that is analytic for ``k != 0``. For ``|qd| < 1`` g
and g' are evaluated from power series in ``q**2``, which never touch the
branch cut. Elsewhere the equivalent exponential form

    g(k) = [(k + q)**2 exp(-iqd) - (k - q)**2 exp(iqd)] / (4kq)

is used with the branch fixed by ``Re(q conj(k)) >= 0`` and ``k - q`` computed
as ``kV**2 / (k + q)``. Deep in the lower half-plane cos(qd) and sin(qd) are
~exp(|Im qd|) while g itself is ~exp(-|Im qd|), so the trigonometric form
loses all significant digits there; the exponential form does not.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .summation import compensated_sum
from .units import wavenumber_from_energy

__all__ = [
    "BarrierParams",
    "Pole",
    "PoleTable",
    "PoleSearchError",
    "CompletenessError",
    "DegeneratePoleError",
    "ResonantState",
    "g_function",
    "g_derivative",
    "transmission_amplitude",
    "find_poles",
    "winding_number",
    "residue_explicit",
    "residue_from_derivative",
    "resonant_state",
    "residue_eigenfunction",
    "mittag_leffler_T",
    "mittag_leffler_convergence",
]

_SERIES_RADIUS = 1.0
_SERIES_TERMS = 18


class PoleSearchError(RuntimeError):
    """Newton refinement did not converge from the seed for pole ``n``."""

    def __init__(self, n, last_step):
        self.n = n
        self.last_step = last_step
        super().__init__(f"Newton iteration for pole n={n} did not converge "
                         f"(last |dk| = {last_step:.3e})")


class CompletenessError(RuntimeError):
    """Argument-principle count disagrees with the number of stored poles."""

    def __init__(self, expected, found, where=""):
        self.expected = expected
        self.found = found
        super().__init__(f"argument principle {where}: expected {expected} "
                         f"zeros of g, found {found}")


class DegeneratePoleError(ArithmeticError):
    pass


@dataclass(frozen=True)
class BarrierParams:
    """Rectangular barrier of height ``V0`` (eV) and width ``d`` (nm)."""

    V0: float
    d: float
    m_ratio: float

    def __post_init__(self):
        if not self.V0 > 0:
            raise ValueError(f"barrier height must be positive, got {self.V0}")
        if not self.d > 0:
            raise ValueError(f"barrier width must be positive, got {self.d}")
        if not self.m_ratio > 0:
            raise ValueError(f"mass ratio must be positive, got {self.m_ratio}")

    @property
    def k_V(self):
        return wavenumber_from_energy(self.V0, self.m_ratio)


# ---------------------------------------------------------------------------
# g(k), g'(k), T(k)

def _series_coefficients():
    # cos x, sin(x)/x, (cos x - sin(x)/x)/x**2 as power series in x**2
    c = [(-1) ** j / math.factorial(2 * j) for j in range(_SERIES_TERMS)]
    s = [(-1) ** j / math.factorial(2 * j + 1) for j in range(_SERIES_TERMS)]
    u = [(-1) ** (j + 1) * (2 * j + 2) / math.factorial(2 * j + 3)
         for j in range(_SERIES_TERMS)]
    return c[::-1], s[::-1], u[::-1]


_C_SER, _S_SER, _U_SER = _series_coefficients()


def _horner(coeffs, x):
    out = np.zeros_like(x)
    for a in coeffs:
        out = out * x + a
    return out


def _branch_q(k, kV):
    q = np.sqrt(k * k - kV * kV)
    return np.where((q * np.conj(k)).real < 0, -q, q)


def _prepare_k(k):
    k = np.asarray(k, dtype=complex)
    if (k == 0).any():
        raise ValueError("g(k) and T(k) are singular at k = 0")
    return k


def _g_and_derivative(k, params, want_derivative):
    kV, d = params.k_V, params.d
    shape = k.shape
    k = k.ravel()
    q2 = k * k - kV * kV
    g = np.empty_like(k)
    gp = np.empty_like(k) if want_derivative else None

    small = np.abs(q2) * d * d < _SERIES_RADIUS ** 2
    if small.any():
        ks = k[small]
        x2 = q2[small] * d * d
        C = _horner(_C_SER, x2)
        S = d * _horner(_S_SER, x2)
        beta = ks - kV * kV / (2 * ks)
        g[small] = C - 1j * beta * S
        if want_derivative:
            U = d ** 3 * _horner(_U_SER, x2)  # (d cos(qd) - sin(qd)/q) / q**2
            dbeta = 1 + kV * kV / (2 * ks * ks)
            gp[small] = -d * ks * S - 1j * dbeta * S - 1j * beta * ks * U

    big = ~small
    if big.any():
        kb = k[big]
        q = _branch_q(kb, kV)
        P = kb + q
        Mq = kV * kV / P
        em = np.exp(-1j * q * d)
        ep = np.exp(1j * q * d)
        A = P * P * em
        B = Mq * Mq * ep
        gb = (A - B) / (4 * kb * q)
        g[big] = gb
        if want_derivative:
            qq = q * q
            gp[big] = ((2 - 1j * d * kb) * (A + B) / (4 * kb * qq)
                       - gb * (qq + kb * kb) / (kb * qq))

    g = g.reshape(shape)
    if want_derivative:
        gp = gp.reshape(shape)
    return g, gp


def _squeeze(x):
    return x[()] if np.ndim(x) == 0 else x


def g_function(k, params):
    """g(k) = exp(-ikd)/T(k); entire in k apart from a simple pole at 0."""
    k = _prepare_k(k)
    return _squeeze(_g_and_derivative(k, params, False)[0])


def g_derivative(k, params):
    """Analytic dg/dk."""
    k = _prepare_k(k)
    return _squeeze(_g_and_derivative(k, params, True)[1])


def transmission_amplitude(k, params):
    """Transmission amplitude T(k) = exp(-ikd)/g(k) for complex ``k != 0``."""
    k = _prepare_k(k)
    g = _g_and_derivative(k, params, False)[0]
    return _squeeze(np.exp(-1j * k * params.d) / g)


# ---------------------------------------------------------------------------
# residues

def residue_from_derivative(k_n, params):
    """r_n = exp(-ik_n d) / g'(k_n)."""
    k_n = _prepare_k(k_n)
    return _squeeze(np.exp(-1j * k_n * params.d)
                    / _g_and_derivative(k_n, params, True)[1])


def residue_explicit(k_n, params):
    """Closed-form residue of T at a zero ``k_n`` of g.

    r = 4 k**2 q**3 exp(-ikd) / [kV**4 (kd + 2i) sin(qd)], with the same
    branch of q in ``q**3`` and ``sin(qd)`` so the ratio is branch-free.
    """
    k_n = _prepare_k(k_n)
    kV, d = params.k_V, params.d
    q = _branch_q(k_n, kV)
    s = np.sin(q * d)
    if (s == 0).any():
        raise DegeneratePoleError("sin(q d) vanishes at the pole")
    return _squeeze(4 * k_n ** 2 * q ** 3 * np.exp(-1j * k_n * d)
                    / (kV ** 4 * (k_n * d + 2j) * s))


@dataclass(frozen=True)
class ResonantState:
    """Resonant eigenfunction u(x) = C [exp(iqx) + D exp(-iqx)] on [0, d]."""

    k: complex
    q: complex
    C: complex
    D: complex
    d: float

    def u(self, x):
        x = np.asarray(x, dtype=float)
        return self.C * (np.exp(1j * self.q * x) + self.D * np.exp(-1j * self.q * x))

    def du(self, x):
        x = np.asarray(x, dtype=float)
        iq = 1j * self.q
        return self.C * iq * (np.exp(iq * x) - self.D * np.exp(-iq * x))

    def d2u(self, x):
        return -(self.q ** 2) * self.u(x)


def resonant_state(k_n, params):
    """Build the outgoing-wave resonant state at pole ``k_n``, normalized so
    that  int_0^d u**2 dx + i (u(0)**2 + u(d)**2) / (2 k_n) = 1."""
    k_n = complex(k_n)
    kV, d = params.k_V, params.d
    q = complex(_branch_q(np.asarray(k_n), kV))
    if q == k_n:
        raise DegeneratePoleError("q_n == k_n, D_n diverges")
    D = (q + k_n) / (q - k_n)
    ep = np.exp(1j * q * d)
    em = np.exp(-1j * q * d)
    # closed-form integral of (e^{iqx} + D e^{-iqx})^2 over [0, d]
    integral = (ep * ep - 1) / (2j * q) + 2 * D * d + D * D * (1 - em * em) / (2j * q)
    u0 = 1 + D
    ud = ep + D * em
    norm = integral + 1j * (u0 * u0 + ud * ud) / (2 * k_n)
    if norm == 0:
        raise DegeneratePoleError("resonant-state normalization vanishes")
    C = 1 / np.sqrt(norm)
    return ResonantState(k=k_n, q=q, C=complex(C), D=complex(D), d=d)


def residue_eigenfunction(k_n, params):
    """r_n = i u_n(0) u_n(d) exp(-ik_n d) from the normalized resonant state."""
    st = resonant_state(k_n, params)
    u0 = st.C * (1 + st.D)
    ud = st.C * (np.exp(1j * st.q * st.d) + st.D * np.exp(-1j * st.q * st.d))
    return complex(1j * u0 * ud * np.exp(-1j * st.k * st.d))


# ---------------------------------------------------------------------------
# poles

@dataclass(frozen=True)
class Pole:
    n: int
    k_n: complex
    r_n: complex
    g_residual: float


@dataclass(frozen=True)
class PoleTable:
    """Poles of T(k) in the fourth quadrant (n = 1..N) with mirror partners.

    Only the fourth-quadrant data is stored; pole ``-n`` is ``-conj(k_n)``
    with residue ``-conj(r_n)``.
    """

    params: BarrierParams
    k: np.ndarray
    r: np.ndarray
    g_residual: np.ndarray
    certificate: dict = field(default_factory=dict)

    @property
    def count_per_quadrant(self):
        return len(self.k)

    @property
    def poles(self):
        out = [Pole(n + 1, complex(k), complex(r), float(g))
               for n, (k, r, g) in enumerate(zip(self.k, self.r, self.g_residual))]
        out += [Pole(-p.n, -p.k_n.conjugate(), -p.r_n.conjugate(), p.g_residual)
                for p in out[:len(self.k)]]
        return out

    def all_poles(self):
        """(k, r) arrays for n = 1..N followed by n = -1..-N."""
        return (np.concatenate([self.k, -np.conj(self.k)]),
                np.concatenate([self.r, -np.conj(self.r)]))

    def truncated(self, count):
        if not 1 <= count <= len(self.k):
            raise ValueError(f"cannot truncate {len(self.k)} poles to {count}")
        cert = dict(self.certificate, truncated_from=len(self.k))
        return PoleTable(self.params, self.k[:count], self.r[:count],
                         self.g_residual[:count], cert)

    # -- serialization ---------------------------------------------------

    def header(self):
        return {
            "V0_eV": self.params.V0,
            "d_nm": self.params.d,
            "m_ratio": self.params.m_ratio,
            "count_per_quadrant": self.count_per_quadrant,
            "certificate": self.certificate,
        }

    def to_json(self):
        def f(x):
            return format(float(x), ".17g")

        rows = []
        for p in self.poles:
            rows.append(
                '{"n": %d, "k_re": %s, "k_im": %s, "r_re": %s, "r_im": %s, '
                '"g_residual": %s}' % (p.n, f(p.k_n.real), f(p.k_n.imag),
                                       f(p.r_n.real), f(p.r_n.imag), f(p.g_residual)))
        head = json.dumps(self.header(), sort_keys=True)
        return '{"header": %s,\n "poles": [\n  %s\n ]}\n' % (head, ",\n  ".join(rows))

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        h = data["header"]
        params = BarrierParams(h["V0_eV"], h["d_nm"], h["m_ratio"])
        recs = sorted((p for p in data["poles"] if p["n"] > 0), key=lambda p: p["n"])
        if [p["n"] for p in recs] != list(range(1, len(recs) + 1)):
            raise ValueError("pole table indices are not 1..N")
        k = np.array([complex(p["k_re"], p["k_im"]) for p in recs])
        r = np.array([complex(p["r_re"], p["r_im"]) for p in recs])
        g = np.array([p["g_residual"] for p in recs], dtype=float)
        if h["count_per_quadrant"] != len(k):
            raise ValueError("header count does not match stored poles")
        return cls(params, k, r, g, h.get("certificate", {}))


def _asymptotic_seed(n, params):
    kV, d = params.k_V, params.d
    qd = n * np.pi - 2j * np.log(2 * n * np.pi / (kV * d))
    return np.sqrt((qd / d) ** 2 + kV * kV)


def _newton(seeds, params, indices, max_iter, rtol):
    k = np.array(seeds, dtype=complex)
    active = np.ones(k.shape, dtype=bool)
    last = np.full(k.shape, np.inf)
    for _ in range(max_iter):
        if not active.any():
            break
        ka = k[active]
        g, gp = _g_and_derivative(ka, params, True)
        step = g / gp
        k[active] = ka - step
        last[active] = np.abs(step)
        active[active] = np.abs(step) > rtol * np.abs(ka)
    if active.any():
        bad = int(np.flatnonzero(active)[0])
        raise PoleSearchError(int(indices[bad]), float(last[bad]))
    # one polishing step; harmless once converged
    g, gp = _g_and_derivative(k, params, True)
    return k - g / gp


def winding_number(func, re_lo, re_hi, im_lo, im_hi, spacing, max_points=4_000_000):
    """Winding number of ``func`` around a counter-clockwise rectangle.

    The boundary is first sampled at ``spacing``, which must be small enough
    that no full turn of the phase fits between neighbouring samples. Segments
    whose phase increment exceeds pi/4 are then bisected until none do.
    Summing the principal increments equals integrating func'/func exactly
    on each segment.

    Returns ``(winding, n_points)``.
    """
    corners = [complex(re_lo, im_lo), complex(re_hi, im_lo),
               complex(re_hi, im_hi), complex(re_lo, im_hi), complex(re_lo, im_lo)]
    lengths = [abs(b - a) for a, b in zip(corners, corners[1:])]
    pts = []
    for a, b, L in zip(corners, corners[1:], lengths):
        m = max(8, int(math.ceil(L / spacing)))
        pts.append(a + (b - a) * np.arange(m) / m)
    z = np.concatenate(pts + [np.array([corners[0]])])
    f = np.asarray(func(z), dtype=complex)
    while True:
        dphi = np.angle(f[1:] / f[:-1])
        bad = np.abs(dphi) > np.pi / 4
        if not bad.any():
            break
        if len(z) + bad.sum() > max_points:
            raise RuntimeError("winding-number refinement exceeded point budget")
        idx = np.flatnonzero(bad)
        mid = 0.5 * (z[idx] + z[idx + 1])
        fmid = np.asarray(func(mid), dtype=complex)
        z = np.insert(z, idx + 1, mid)
        f = np.insert(f, idx + 1, fmid)
    w = dphi.sum() / (2 * np.pi)
    wi = int(round(w))
    if abs(w - wi) > 1e-6:
        raise RuntimeError(f"winding number {w} is not an integer")
    return wi, len(z)


def find_poles(params, count_per_quadrant=1000, max_iter=60, rtol=1e-13,
               continuation_below=None, certify=True):
    """Locate the first ``count_per_quadrant`` fourth-quadrant zeros of g.

    Poles with ``2 n pi / (kV d) >= 4`` start from the large-n asymptote
    ``q d = n pi - 2i ln(2 n pi / (kV d))``; lower ones are reached by
    continuation downward from n + 1, n + 2. All seeds are refined together
    by Newton iteration on g. With ``certify`` the argument principle is used
    to check that the rectangle enclosing the stored poles contains no
    others, and that no zero of g sits near the negative imaginary axis.
    """
    if count_per_quadrant < 1:
        raise ValueError("count_per_quadrant must be >= 1")
    N = int(count_per_quadrant)
    kV, d = params.k_V, params.d
    if continuation_below is None:
        continuation_below = int(math.ceil(4 * kV * d / (2 * np.pi)))
    n_top = N + 1  # one extra pole fixes the right edge of the certificate
    first = max(continuation_below, 1)
    idx = np.arange(first, n_top + 1)
    k_all = np.empty(n_top + 1, dtype=complex)
    k_all[first:] = _newton(_asymptotic_seed(idx, params), params, idx, max_iter, rtol)
    for n in range(first - 1, 0, -1):
        if n + 2 <= n_top:
            seed = 2 * k_all[n + 1] - k_all[n + 2]
        else:
            seed = _asymptotic_seed(n, params)
        try:
            k_all[n] = _newton([seed], params, [n], max_iter, rtol)[0]
        except PoleSearchError:
            k_all[n] = _newton([_asymptotic_seed(n, params)], params, [n], max_iter, rtol)[0]
    k = k_all[1:]
    order = np.argsort(k.real)
    if not np.array_equal(order, np.arange(len(k))):
        raise PoleSearchError(int(np.flatnonzero(order != np.arange(len(k)))[0]) + 1, 0.0)
    if (np.diff(k.real) <= 0).any() or (k.imag >= 0).any() or (k.real <= 0).any():
        raise CompletenessError(N, "duplicate or misplaced poles", "(seed refinement)")

    certificate = {}
    if certify:
        certificate = _certify(params, k, N)
    kk = k[:N]
    r = residue_explicit(kk, params)
    res = np.abs(g_function(kk, params))
    return PoleTable(params, kk, np.atleast_1d(r), np.atleast_1d(res), certificate)


def _certify(params, k, N):
    def g(z):
        return _g_and_derivative(np.asarray(z, dtype=complex), params, True)[0]

    re_lo = 0.5 * k[0].real
    re_hi = 0.5 * (k[N - 1].real + k[N].real)
    im_lo = 2.0 * k[:N].imag.min() - 1.0
    im_hi = 0.5 * params.k_V
    # phase of g advances by about 2d per unit length along the contour
    spacing = 0.05 / params.d
    wind, npts = winding_number(g, re_lo, re_hi, im_lo, im_hi, spacing)
    if wind != N:
        raise CompletenessError(N, wind, "(fourth quadrant)")
    # strip around the imaginary axis: contains the simple pole of g at k=0
    wind_axis, npts_axis = winding_number(g, -re_lo, re_lo, im_lo, im_hi, spacing)
    axis_zeros = wind_axis + 1
    return {
        "rectangle": [float(re_lo), float(re_hi), float(im_lo), float(im_hi)],
        "zeros_in_rectangle": int(wind),
        "imaginary_axis_zeros": int(axis_zeros),
        "contour_points": int(npts + npts_axis),
    }


# ---------------------------------------------------------------------------
# Mittag-Leffler expansion

def _ml_pair_terms(k, table, count):
    kn = table.k[:count]
    rn = table.r[:count]
    km = -np.conj(kn)
    rm = -np.conj(rn)
    k = np.asarray(k, dtype=complex)[..., None]
    pair = (rn / (k - kn) + rn / kn) + (rm / (k - km) + rm / km)
    return np.moveaxis(pair, -1, 0)


def mittag_leffler_T(k, table, count=None):
    """Symmetric partial sum of sum_n [r_n/(k - k_n) + r_n/k_n], |n| <= count.

    Terms n and -n are combined before a compensated accumulation in
    ascending n. The truncation error decays only like 1/count.
    """
    count = table.count_per_quadrant if count is None else count
    return _squeeze(compensated_sum(_ml_pair_terms(k, table, count)))


def mittag_leffler_convergence(k, table, counts):
    """Relative error of the partial sum against T(k) for each ``count``.

    Returns a list of ``(count, abs_error, rel_error)``.
    """
    exact = complex(transmission_amplitude(k, table.params))
    out = []
    for c in counts:
        v = complex(mittag_leffler_T(k, table, c))
        out.append((c, abs(v - exact), abs(v - exact) / abs(exact)))
    return out
