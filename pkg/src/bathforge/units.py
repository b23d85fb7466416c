"""SI-to-reduced-unit conversions used by the configuration layer.

Internally everything runs in reduced units Omega_R = 1, M = 1, hbar = 1;
the input layer converts Hz to rad/s (x 2 pi) and Kelvin to angular
frequency (x k_B/hbar) before dividing out the resonance scale.
"""

from __future__ import annotations

import math

K_BOLTZMANN = 1.380649e-23  # J/K (exact)
HBAR = 1.054571817e-34  # J s

__all__ = ["K_BOLTZMANN", "HBAR", "hz_to_angular", "kelvin_to_angular"]


def hz_to_angular(f_hz: float) -> float:
    return 2.0 * math.pi * f_hz


def kelvin_to_angular(t_kelvin: float) -> float:
    """k_B T / hbar in rad/s."""
    return K_BOLTZMANN * t_kelvin / HBAR
