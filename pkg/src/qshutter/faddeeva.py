"""Faddeeva function w(z) = exp(-z**2) * erfc(-i z) over the whole complex plane.

The closed upper half-plane is split into three regions:

* ``|z| < 8``: Weideman's rational expansion in ``(L + iz)/(L - iz)`` with 40
  terms, which is uniformly accurate to a few ulps there.
* ``8 <= |z| < 1e7``: the Laplace continued fraction, evaluated bottom-up.
* ``|z| >= 1e7``: the first terms of the asymptotic series ``i/(sqrt(pi) z)``.

The lower half-plane is reached only through ``w(z) = 2 exp(-z**2) - w(-z)``.
``exp(-z**2)`` grows like ``exp(y**2 - x**2)``, so that branch checks for
overflow explicitly and raises :class:`FaddeevaOverflowError` instead of
returning ``inf``/``nan``. :func:`wofz_scaled` folds an exponential prefactor
into the reflection term, which keeps products like ``exp(a) * w(z)`` finite
whenever the product itself is representable.
"""

import numpy as np

__all__ = [
    "FaddeevaOverflowError",
    "wofz",
    "wofz_scaled",
    "wofz_derivative",
]

_SQRT_PI = np.sqrt(np.pi)
_CORE_RADIUS = 8.0
_ASYMPTOTIC_RADIUS = 1e7
_CF_TERMS = 24
_WEIDEMAN_TERMS = 40
# largest x with exp(x) finite in double precision
_EXP_LIMIT = np.log(np.finfo(float).max)


class FaddeevaOverflowError(OverflowError, ArithmeticError):
    """exp(-z**2) in the reflection branch is not representable."""

    def __init__(self, exponent, z=None):
        self.exponent = float(exponent)
        self.z = z
        msg = f"Faddeeva reflection overflows: |exp(.)| = e^{self.exponent:.6g}"
        if z is not None:
            msg += f" at z = {z!r}"
        super().__init__(msg)


def _weideman_coefficients(n):
    m = 2 * n
    L = np.sqrt(n / np.sqrt(2.0))
    k = np.arange(-m + 1, m)
    t = L * np.tan(k * np.pi / (2 * m))
    f = np.concatenate(([0.0], np.exp(-t * t) * (L * L + t * t)))
    a = np.real(np.fft.fft(np.fft.fftshift(f))) / (2 * m)
    return L, a[1:n + 1][::-1].copy()


_L, _A = _weideman_coefficients(_WEIDEMAN_TERMS)


def _w_core(z):
    denom = _L - 1j * z
    Z = (_L + 1j * z) / denom
    p = np.zeros_like(Z)
    for a in _A:
        p = p * Z + a
    return 2.0 * p / (denom * denom) + (1.0 / _SQRT_PI) / denom


def _w_contfrac(z):
    r = np.zeros_like(z)
    for j in range(_CF_TERMS, 0, -1):
        r = (0.5 * j) / (z - r)
    return (1j / _SQRT_PI) / (z - r)


def _w_asymptotic(z):
    u = 1.0 / z
    u2 = u * u
    return (1j / _SQRT_PI) * u * (1.0 + u2 * (0.5 + 0.75 * u2))


def _w_upper(z):
    """w(z) for Im z >= 0; ``z`` is a 1-d complex array."""
    out = np.empty_like(z)
    r = np.abs(z)
    core = r < _CORE_RADIUS
    far = r >= _ASYMPTOTIC_RADIUS
    mid = ~(core | far)
    if core.any():
        out[core] = _w_core(z[core])
    if mid.any():
        out[mid] = _w_contfrac(z[mid])
    if far.any():
        out[far] = _w_asymptotic(z[far])
    return out


def _prepare(z):
    z = np.asarray(z, dtype=complex)
    if np.isnan(z).any():
        raise ValueError("Faddeeva function undefined for NaN argument")
    if np.isinf(z).any():
        raise ValueError("Faddeeva function requires a finite argument")
    return z


def wofz_scaled(z, log_scale=0.0):
    """Return ``exp(log_scale) * w(z)`` elementwise.

    Parameters
    ----------
    z : complex or array_like
        Argument(s), anywhere in the finite complex plane.
    log_scale : complex or array_like
        Exponent of the prefactor; broadcast against ``z``.

    Raises
    ------
    FaddeevaOverflowError
        If the result (not just an intermediate) overflows.
    ValueError
        On NaN or infinite input.
    """
    z = _prepare(z)
    s = np.asarray(log_scale, dtype=complex)
    z, s = np.broadcast_arrays(z, s)
    shape = z.shape
    z = z.ravel()
    s = s.ravel()
    out = np.empty_like(z)

    upper = z.imag >= 0
    if upper.any():
        ex = s[upper].real
        if (ex > _EXP_LIMIT).any():
            raise FaddeevaOverflowError(ex.max())
        out[upper] = np.exp(s[upper]) * _w_upper(z[upper])
    lower = ~upper
    if lower.any():
        zl = z[lower]
        sl = s[lower]
        refl = sl - zl * zl
        worst = int(np.argmax(refl.real))
        if refl.real[worst] > _EXP_LIMIT - np.log(2.0):
            raise FaddeevaOverflowError(refl.real[worst], complex(zl[worst]))
        if (sl.real > _EXP_LIMIT).any():
            raise FaddeevaOverflowError(sl.real.max())
        out[lower] = 2.0 * np.exp(refl) - np.exp(sl) * _w_upper(-zl)
    out = out.reshape(shape)
    return out[()] if out.ndim == 0 else out


def wofz(z):
    """Faddeeva function w(z) = exp(-z**2) erfc(-iz).

    Accepts a scalar or an array. Relative accuracy is about 1e-15 in the
    closed upper half-plane; in the lower half-plane accuracy is limited by
    the conditioning of ``exp(-z**2)``.

    >>> abs(wofz(0.0) - 1.0) < 1e-15
    True
    """
    return wofz_scaled(z)


def wofz_derivative(z, w=None):
    """w'(z) = -2 z w(z) + 2i/sqrt(pi); pass ``w`` to reuse an evaluation."""
    z = np.asarray(z, dtype=complex)
    if w is None:
        w = wofz(z)
    out = -2.0 * z * w + 2j / _SQRT_PI
    return out[()] if np.ndim(out) == 0 else out
