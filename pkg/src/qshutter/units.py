"""Physical constants and conversions in the (eV, nm, fs) unit system.

Masses are always given as a ratio to the bare electron mass.
"""

import math
from dataclasses import dataclass

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "hbar_over_m",
    "wavenumber_from_energy",
    "energy_from_wavenumber",
    "free_passage_time",
]


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float  # eV fs
    hbar2_over_2me: float  # eV nm^2

    def __post_init__(self):
        if not (self.hbar > 0 and self.hbar2_over_2me > 0):
            raise ValueError("physical constants must be positive")


CONSTANTS = PhysicalConstants(hbar=0.6582119569, hbar2_over_2me=0.0380998)


def _check_mass(m_ratio):
    if not m_ratio > 0:
        raise ValueError(f"effective mass ratio must be positive, got {m_ratio}")


def hbar_over_m(m_ratio):
    """Return hbar/m in nm^2/fs for an effective mass ``m_ratio * m_e``."""
    _check_mass(m_ratio)
    return 2.0 * CONSTANTS.hbar2_over_2me / (m_ratio * CONSTANTS.hbar)


def wavenumber_from_energy(E, m_ratio):
    """Wavenumber (nm^-1) of a free particle of kinetic energy ``E`` (eV)."""
    _check_mass(m_ratio)
    if not E >= 0:
        raise ValueError(f"energy must be non-negative, got {E}")
    return math.sqrt(E * m_ratio / CONSTANTS.hbar2_over_2me)


def energy_from_wavenumber(k, m_ratio):
    """Kinetic energy (eV) of a free particle with wavenumber ``k`` (nm^-1)."""
    _check_mass(m_ratio)
    return CONSTANTS.hbar2_over_2me * k * k / m_ratio


def free_passage_time(d, k0, m_ratio):
    """Classical traversal time m d / (hbar k0) in fs."""
    _check_mass(m_ratio)
    if not d > 0:
        raise ValueError(f"barrier width must be positive, got {d}")
    if not k0 > 0:
        raise ValueError(f"wavenumber must be positive, got {k0}")
    return d * m_ratio * CONSTANTS.hbar / (2.0 * CONSTANTS.hbar2_over_2me * k0)
