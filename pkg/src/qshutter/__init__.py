"""Semi-analytic transient tunneling through a rectangular barrier.

The transmitted wave for quantum-shutter initial conditions (cutoff plane
wave, Lorentzian packet) is assembled from free transient kernels built on
the Faddeeva function and from the complex poles of the transmission
amplitude. Brute-force oracles live in :mod:`qshutter.oracles`.
"""

__version__ = "0.1.0"

from .units import (CONSTANTS, energy_from_wavenumber, free_passage_time,  # noqa: F401
                    wavenumber_from_energy)
from .faddeeva import wofz  # noqa: F401
from .barrier import (BarrierParams, PoleTable, find_poles,  # noqa: F401
                      transmission_amplitude)
from .propagator import PacketParams, TransmittedWave, psi_cutoff, psi_packet  # noqa: F401
