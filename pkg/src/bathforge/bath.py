"""Globally admissible structured-bath spectral density and coupling function.

The model is a super-Ohmic (w^3) infrared law rolled over by an algebraic
crossover so that the local logarithmic slope at the observed mechanical
resonance equals a prescribed (typically negative) exponent k, while every
renormalization and fluctuation integral built on it stays finite:

    J_k(w) = A_k w^3 [1 + (w/Omega_R)^2]^(k-3),
    A_k    = 2^(3-k) J_k(Omega_R) / Omega_R^3.

All functions are pure and work in any consistent unit system; the CLI
layer feeds reduced units (Omega_R = 1, M = 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "BathSpec",
    "MicroscopicProfile",
    "AdmissibilityReport",
    "calibrate",
    "spectral_density",
    "log_slope",
    "peaks",
    "coupling_function",
    "admissibility",
    "bath_spec_to_json",
    "bath_spec_from_json",
]

K_MAX = 1.5  # stiffness renormalization diverges in the ultraviolet beyond this


@dataclass(frozen=True)
class BathSpec:
    """Calibrated spectral-density model.

    k        : local logarithmic slope at the resonance (dimensionless)
    omega_r  : observed mechanical resonance (rad/s, or 1 in reduced units)
    j_res    : on-resonance spectral density J_k(Omega_R)
    a_k      : derived prefactor 2^(3-k) j_res / omega_r^3
    s_ir     : infrared exponent (3 by construction)
    r_uv     : ultraviolet exponent 2k - 3
    """

    k: float
    omega_r: float
    j_res: float
    a_k: float

    @property
    def s_ir(self) -> int:
        return 3

    @property
    def r_uv(self) -> float:
        return 2.0 * self.k - 3.0


@dataclass(frozen=True)
class MicroscopicProfile:
    """Constant density-of-states and modal-mass choice for the continuum bath."""

    rho: float
    m_modal: float

    def __post_init__(self):
        if self.rho <= 0 or self.m_modal <= 0:
            raise DomainError("bath density of states and modal mass must be positive")


@dataclass(frozen=True)
class AdmissibilityReport:
    """Finiteness flags implied by the infrared/ultraviolet exponents alone."""

    delta_k_finite: bool
    delta_m_finite: bool
    sigma_q_finite: bool
    sigma_p_finite: bool
    stable: bool


def calibrate(k: float, omega_r: float, j_res: float) -> BathSpec:
    """Build a BathSpec from the slope and an on-resonance measurement."""
    k, omega_r, j_res = float(k), float(omega_r), float(j_res)
    if omega_r <= 0:
        raise DomainError(f"omega_r must be positive, got {omega_r:g}")
    if j_res <= 0:
        raise DomainError(f"j_res must be positive, got {j_res:g}")
    if k >= K_MAX:
        raise DomainError(
            f"k={k:g} >= 3/2 makes the stiffness renormalization ultraviolet-divergent"
        )
    a_k = 2.0 ** (3.0 - k) * j_res / omega_r**3
    return BathSpec(k=k, omega_r=omega_r, j_res=j_res, a_k=a_k)


def spectral_density(spec: BathSpec, omega):
    """J_k(omega) for omega >= 0 (scalar or array).

    The one-sided convention is canonical; callers needing a two-sided
    spectrum apply the even extension J(|omega|) explicitly.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise DomainError("spectral_density: omega must be >= 0 (use J(|omega|) explicitly)")
    x = w / spec.omega_r
    out = spec.a_k * w**3 * (1.0 + x * x) ** (spec.k - 3.0)
    return float(out) if np.isscalar(omega) else out


def log_slope(spec: BathSpec, omega):
    """Analytic d ln J / d ln omega = 3 + 2(k-3) x^2/(1+x^2), x = omega/Omega_R."""
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0):
        raise DomainError("log_slope: omega must be positive")
    x2 = (w / spec.omega_r) ** 2
    out = 3.0 + 2.0 * (spec.k - 3.0) * x2 / (1.0 + x2)
    return float(out) if np.isscalar(omega) else out


def peaks(spec: BathSpec):
    """Positions of the maxima of J_k and of the coupling function c_k.

    Returns ``(omega_j_max, omega_c_max)`` with
    omega_j_max = Omega_R sqrt(3/(3-2k)) and omega_c_max = Omega_R sqrt(2/(1-k)).
    """
    k = spec.k
    if k >= K_MAX:
        raise DomainError("peaks: requires k < 3/2")
    omega_j_max = spec.omega_r * math.sqrt(3.0 / (3.0 - 2.0 * k))
    if k >= 1.0:
        raise DomainError("peaks: coupling-function maximum requires k < 1")
    omega_c_max = spec.omega_r * math.sqrt(2.0 / (1.0 - k))
    return omega_j_max, omega_c_max


def coupling_function(spec: BathSpec, profile: MicroscopicProfile, omega):
    """Continuum coupling c_k(omega) for constant mode density and modal mass.

    Suppressed as omega^2 in the infrared; consistent with
    (pi/2) rho c_k^2 / (m omega) = J_k(omega).
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise DomainError("coupling_function: omega must be >= 0")
    amp = math.sqrt(
        2.0 ** (4.0 - spec.k)
        * profile.m_modal
        * spec.j_res
        / (math.pi * profile.rho * spec.omega_r**3)
    )
    x = w / spec.omega_r
    out = amp * w**2 * (1.0 + x * x) ** ((spec.k - 3.0) / 2.0)
    return float(out) if np.isscalar(omega) else out


def admissibility(s: float, r: float) -> AdmissibilityReport:
    """Finiteness of the renormalizations and variances from exponents alone.

    ``s`` is the infrared exponent (J ~ w^s as w -> 0) and ``r`` the
    ultraviolet one (J ~ w^r as w -> inf).  Integral conditions:

        delta K  = int J/w      : s > 0  and r < 0
        delta M  = int J/w^3    : s > 2  and r < 2
        sigma_Q^2 (Im chi ~ J)  : s > 0  and r < 3
        sigma_P^2 (w^2 weight)  : s > -2 and r < 1
    """
    s, r = float(s), float(r)
    dk = s > 0.0 and r < 0.0
    dm = s > 2.0 and r < 2.0
    sq = s > 0.0 and r < 3.0
    sp = s > -2.0 and r < 1.0
    return AdmissibilityReport(
        delta_k_finite=dk,
        delta_m_finite=dm,
        sigma_q_finite=sq,
        sigma_p_finite=sp,
        stable=dk and dm and sq and sp,
    )


def bath_spec_to_json(spec: BathSpec) -> dict:
    """JSON object with the resonance in Hz (the interchange convention)."""
    return {
        "k": spec.k,
        "omega_r_hz": spec.omega_r / (2.0 * math.pi),
        "j_res": spec.j_res,
    }


def bath_spec_from_json(obj: dict) -> BathSpec:
    try:
        k = float(obj["k"])
        omega_r_hz = float(obj["omega_r_hz"])
        j_res = float(obj["j_res"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"bath spec JSON missing or malformed field: {exc}") from exc
    return calibrate(k, 2.0 * math.pi * omega_r_hz, j_res)
