"""Complex self-energy, mechanical susceptibilities, and the resonance pole.

The regularized self-energy of the bath is

    Sigma(w) = (2/pi) PV int_0^inf J(w') [ w'/(w'^2 - w^2) - 1/w' ] dw' + i J(w),

whose real part vanishes at w = 0 and behaves as delta M w^2 + O(w^4) at
small w.  The susceptibility follows from

    chi^{-1}(w) = M Omega_0^2 - M w^2 - delta K - Sigma(w),

with the conjugate extension chi(-w) = chi*(w) for negative frequencies.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import renorm
from .bath import BathSpec, spectral_density
from .errors import (
    DomainError,
    NarrowbandWarning,
    NonConvergenceError,
    NoSignChangeError,
    StrongDampingWarning,
)
from .numerics import Tolerance, find_root, integrate_pv
from .renorm import Mode, Resonator

__all__ = [
    "SelfEnergy",
    "Susceptibility",
    "ResonanceSummary",
    "self_energy",
    "susceptibility",
    "local_susceptibility",
    "linewidth",
    "resonance_solve",
    "observed_resonance",
]


@dataclass(frozen=True)
class SelfEnergy:
    omega: float
    re: float  # dispersive part (PV integral)
    im: float  # dissipative part, equals J(|omega|)

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


@dataclass(frozen=True)
class Susceptibility:
    omega: float
    value: complex
    inverse: complex


@dataclass(frozen=True)
class ResonanceSummary:
    omega_r: float
    gamma: float
    q_factor: float
    m_r: float
    slow_variation_ok: bool


_SIGMA_TOL = Tolerance(rel=1e-11, abs=1e-15, max_evals=300_000)


def self_energy(spec: BathSpec, omega: float, tol: Tolerance | None = None) -> SelfEnergy:
    """Sigma(omega) for omega >= 0.

    The PV integral is computed in the reduced variable x = w'/Omega_R with
    the combined integrand x^2 (1+x^2)^(k-3) y^2/(x^2-y^2), which is both
    infrared-regular and ultraviolet-convergent; domain breakpoints sit at
    the crossover x = 1 and at 2y so the pole never lands on a panel edge.
    """
    omega = float(omega)
    if omega < 0:
        raise DomainError("self_energy: omega must be >= 0 (use conjugate symmetry)")
    j = spectral_density(spec, omega)
    if omega == 0.0:
        return SelfEnergy(omega=0.0, re=0.0, im=0.0)
    tol = tol or _SIGMA_TOL
    y = omega / spec.omega_r
    k = spec.k

    def integrand(x):
        x = np.asarray(x, dtype=float)
        return x * x * (1.0 + x * x) ** (k - 3.0) * y * y / (x * x - y * y)

    try:
        pv = integrate_pv(
            integrand,
            pole=y,
            tol=tol,
            breakpoints=(1.0, 2.0 * y),
            knee=max(1.0, 2.0 * y),
        )
    except NonConvergenceError as exc:
        raise NonConvergenceError(
            f"self-energy dispersion integral at omega = {omega:g}: {exc}",
            best=exc.best,
            evaluations=exc.evaluations,
        ) from exc
    re = 2.0 * spec.a_k * spec.omega_r**3 / math.pi * pv.value
    return SelfEnergy(omega=omega, re=re, im=j)


def susceptibility(spec: BathSpec, res: Resonator, omega: float) -> Susceptibility:
    """Full nonlocal susceptibility; negative frequencies via chi(-w) = chi*(w)."""
    omega = float(omega)
    if omega < 0:
        pos = susceptibility(spec, res, -omega)
        return Susceptibility(omega=omega, value=pos.value.conjugate(), inverse=pos.inverse.conjugate())
    k0 = renorm.static_stiffness(spec, res)  # raises InstabilityError when unstable
    sig = self_energy(spec, omega)
    inv = complex(k0 - res.mass * omega * omega - sig.re, -sig.im)
    return Susceptibility(omega=omega, value=1.0 / inv, inverse=inv)


def observed_resonance(spec: BathSpec, res: Resonator) -> float:
    """The anchored resonance, or the solved one in forward mode."""
    if res.mode is Mode.ANCHORED:
        return float(res.omega_r)
    return resonance_solve(spec, res)


def local_susceptibility(spec: BathSpec, res: Resonator, omega: float) -> Susceptibility:
    """Near-resonance form chi_eff^{-1} = M_R (W^2 - w^2) - i J(W).

    Pure algebra; emits NarrowbandWarning when evaluated more than ten
    linewidths away from the resonance, where the local form degrades.
    """
    omega = float(omega)
    w_r = observed_resonance(spec, res)
    m_r = renorm.dressed_mass(spec, res)
    j_res = spectral_density(spec, w_r)
    gamma = j_res / (m_r * w_r)
    if abs(abs(omega) - w_r) > 10.0 * gamma:
        warnings.warn(
            f"local susceptibility evaluated {abs(abs(omega) - w_r) / gamma:.1f} "
            "linewidths from resonance",
            NarrowbandWarning,
            stacklevel=2,
        )
    if omega < 0:
        pos = local_susceptibility(spec, res, -omega)
        return Susceptibility(omega=omega, value=pos.value.conjugate(), inverse=pos.inverse.conjugate())
    inv = complex(m_r * (w_r * w_r - omega * omega), -j_res)
    return Susceptibility(omega=omega, value=1.0 / inv, inverse=inv)


def linewidth(spec: BathSpec, res: Resonator) -> ResonanceSummary:
    """Weak-damping linewidth gamma = J(W)/(M_R W) and quality factor W/gamma."""
    w_r = observed_resonance(spec, res)
    m_r = renorm.dressed_mass(spec, res)
    gamma = spectral_density(spec, w_r) / (m_r * w_r)
    ratio = gamma / w_r
    if ratio > 0.1:
        warnings.warn(
            f"gamma/Omega_R = {ratio:.3g} is outside the weak-damping regime",
            StrongDampingWarning,
            stacklevel=2,
        )
    return ResonanceSummary(
        omega_r=w_r,
        gamma=gamma,
        q_factor=w_r / gamma,
        m_r=m_r,
        slow_variation_ok=abs(spec.k) * ratio < 0.05,
    )


def resonance_solve(spec: BathSpec, res: Resonator, tol: Tolerance | None = None) -> float:
    """Forward-mode resonance: the root of Re chi^{-1}(w) = 0 below Omega_0."""
    if res.mode is not Mode.FORWARD:
        raise DomainError("resonance_solve expects a forward-mode resonator")
    tol = tol or Tolerance(rel=1e-12, abs=1e-15)
    k0 = res.mass * res.omega_0**2 - renorm.stiffness_shift(spec)

    def re_inv_chi(w: float) -> float:
        return k0 - res.mass * w * w - self_energy(spec, w).re

    # seed at [0.5, 1] Omega_0, then widen: a negative dispersive residue at
    # the resonance puts the root slightly above Omega_0
    knots = [f * res.omega_0 for f in (0.5, 0.75, 0.9, 1.0, 1.05, 1.15, 1.3, 1.6, 2.0)]
    values = [re_inv_chi(w) for w in knots]
    for (w_lo, f_lo), (w_hi, f_hi) in zip(zip(knots, values), zip(knots[1:], values[1:])):
        if f_lo == 0.0:
            return w_lo
        if f_lo * f_hi < 0:
            return find_root(re_inv_chi, (w_lo, w_hi), tol)
    raise NoSignChangeError(
        "Re chi^{-1} does not change sign near Omega_0; "
        "configuration is unstable or overdamped"
    )
