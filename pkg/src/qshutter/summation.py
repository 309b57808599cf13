"""Compensated (Neumaier) summation along the leading axis of an array."""

import numpy as np


def _neumaier_real(x):
    s = np.zeros(x.shape[1:])
    c = np.zeros(x.shape[1:])
    for term in x:
        t = s + term
        big = np.abs(s) >= np.abs(term)
        c += np.where(big, (s - t) + term, (term - t) + s)
        s = t
    return s + c


def compensated_sum(terms):
    """Sum ``terms`` over axis 0 with Neumaier compensation.

    Works on real or complex input; real and imaginary parts are compensated
    independently. Other axes are summed in parallel.
    """
    x = np.asarray(terms)
    if x.shape[0] == 0:
        return np.zeros(x.shape[1:], dtype=x.dtype)[()]
    if np.iscomplexobj(x):
        out = _neumaier_real(x.real) + 1j * _neumaier_real(x.imag)
    else:
        out = _neumaier_real(x)
    return out[()] if np.ndim(out) == 0 else out
