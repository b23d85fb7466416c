"""Optical readout chain: cavity response, homodyne transduction, spectra,
synthetic coherent-drive data, and reconstruction of chi, Re Sigma, and J.

In the weak-probe regime (g << kappa) the homodyne quadrature at angle
theta transduces mechanical motion with the complex gain

    Lambda_theta(w) = i sqrt(kappa/2) g [e^(-i theta) chi_c(w) - e^(i theta) chi_c*(-w)],

where chi_c^{-1}(w) = kappa/2 - i(Delta + w).  A calibrated coherent drive
makes the full complex susceptibility observable,
chi(w) = X_coh / (Lambda_theta F_ext), from which the dispersive and
dissipative parts of the bath self-energy separate algebraically.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import renorm, response
from .bath import BathSpec, spectral_density
from .errors import (
    BackactionWarning,
    DomainError,
    SingularTransductionError,
    ZeroDriveError,
)
from .renorm import Resonator

__all__ = [
    "CavityProbe",
    "SpectroscopyRecord",
    "BareParameters",
    "Reconstruction",
    "cavity_susceptibility",
    "transduction",
    "force_noise_spectrum",
    "passive_spectrum",
    "synth_coherent_response",
    "synthesize_records",
    "optimal_homodyne_angle",
    "bare_parameters",
    "reconstruct",
]

WEAK_PROBE_RATIO = 0.01
TRANSDUCTION_FLOOR = 1e-6  # relative |Lambda| below which a point is dropped


@dataclass(frozen=True)
class CavityProbe:
    """Readout parameters: cavity decay, effective detuning, linearized
    coupling (real by phase choice), and homodyne angle."""

    kappa: float
    delta: float
    g: float
    theta: float

    def __post_init__(self):
        if self.kappa <= 0:
            raise DomainError("cavity decay kappa must be positive")
        if self.g < 0:
            raise DomainError("linearized coupling g must be >= 0")

    @property
    def weak_probe(self) -> bool:
        return self.g / self.kappa < WEAK_PROBE_RATIO


@dataclass(frozen=True)
class SpectroscopyRecord:
    omega: float
    lambda_theta: complex
    s_xx: float
    x_coh: complex
    f_ext: complex

    def __post_init__(self):
        if self.s_xx < 0:
            raise DomainError("quadrature power spectrum must be >= 0")


@dataclass(frozen=True)
class BareParameters:
    """The renormalization convention fixed ahead of a reconstruction."""

    mass: float
    omega_0: float
    delta_k: float


@dataclass(frozen=True)
class Reconstruction:
    omega: np.ndarray
    chi: np.ndarray
    re_sigma: np.ndarray
    j: np.ndarray
    dropped: tuple  # indices of records below the transduction floor


def cavity_susceptibility(probe: CavityProbe, omega: float) -> complex:
    """chi_c(w) = 1/(kappa/2 - i(Delta + w)); never singular for kappa > 0."""
    return 1.0 / complex(0.5 * probe.kappa, -(probe.delta + float(omega)))


def transduction(probe: CavityProbe, omega: float) -> complex:
    """Homodyne gain Lambda_theta(w); flips sign under theta -> theta + pi."""
    omega = float(omega)
    phase = cmath.exp(-1j * probe.theta)
    chi_p = cavity_susceptibility(probe, omega)
    chi_m = cavity_susceptibility(probe, -omega).conjugate()
    return 1j * math.sqrt(0.5 * probe.kappa) * probe.g * (phase * chi_p - chi_m / phase)


def force_noise_spectrum(spec: BathSpec, temperature: float, omega: float) -> float:
    """Symmetrized thermal force spectrum S_FF(w) = J(|w|) coth(|w|/2 k_B T).

    Even in w; the w -> 0 limit is 0 because the super-Ohmic J quenches the
    2T/w divergence of coth.  T = 0 returns the vacuum spectrum J(|w|).
    """
    if temperature < 0:
        raise DomainError("temperature must be >= 0")
    w = abs(float(omega))
    if w == 0.0:
        return 0.0
    j = spectral_density(spec, w)
    if temperature == 0.0:
        return j
    return j / math.tanh(w / (2.0 * temperature))


def _warn_backaction(probe: CavityProbe):
    if not probe.weak_probe:
        warnings.warn(
            f"g/kappa = {probe.g / probe.kappa:.3g} >= {WEAK_PROBE_RATIO}: "
            "radiation-pressure backaction is not negligible",
            BackactionWarning,
            stacklevel=3,
        )


def passive_spectrum(
    spec: BathSpec,
    res: Resonator,
    probe: CavityProbe,
    s_imp: float,
    omega: float,
) -> float:
    """Passive quadrature PSD |Lambda|^2 |chi|^2 S_FF + S_imp (constant floor)."""
    if s_imp < 0:
        raise DomainError("imprecision floor must be >= 0")
    _warn_backaction(probe)
    lam = transduction(probe, omega)
    chi = response.susceptibility(spec, res, omega).value
    s_ff = force_noise_spectrum(spec, res.temperature, omega)
    return abs(lam) ** 2 * abs(chi) ** 2 * s_ff + s_imp


def synth_coherent_response(
    spec: BathSpec,
    res: Resonator,
    probe: CavityProbe,
    f_ext: complex,
    omega: float,
    noise_std: float = 0.0,
    rng: np.random.Generator | None = None,
) -> complex:
    """Phase-locked homodyne signal Lambda_theta chi F_ext for a calibrated drive.

    ``noise_std`` adds complex Gaussian measurement noise of that standard
    deviation per quadrature (a minimal detector model for robustness
    studies); the noiseless default is the deterministic forward map.
    """
    _warn_backaction(probe)
    signal = transduction(probe, omega) * response.susceptibility(spec, res, omega).value * f_ext
    if noise_std > 0.0:
        rng = rng or np.random.default_rng()
        signal += complex(rng.normal(0.0, noise_std), rng.normal(0.0, noise_std))
    return signal


def synthesize_records(
    spec: BathSpec,
    res: Resonator,
    probe: CavityProbe,
    omegas,
    f_ext: complex = 1.0,
    s_imp: float = 0.0,
    noise_std: float = 0.0,
    rng: np.random.Generator | None = None,
):
    """Forward-model a full measurement grid (passive PSD + coherent response)."""
    records = []
    for w in omegas:
        w = float(w)
        records.append(
            SpectroscopyRecord(
                omega=w,
                lambda_theta=transduction(probe, w),
                s_xx=passive_spectrum(spec, res, probe, s_imp, w),
                x_coh=synth_coherent_response(spec, res, probe, f_ext, w, noise_std, rng),
                f_ext=complex(f_ext),
            )
        )
    return records


def optimal_homodyne_angle(probe: CavityProbe, omega: float, n_scan: int = 64) -> float:
    """Angle maximizing |Lambda_theta(omega)|, by scan plus golden refinement.

    (|Lambda| is pi-periodic in theta up to sign, so the search runs on
    [0, pi).)
    """
    def neg_gain(theta: float) -> float:
        probed = CavityProbe(kappa=probe.kappa, delta=probe.delta, g=probe.g, theta=theta)
        return -abs(transduction(probed, omega))

    thetas = np.linspace(0.0, math.pi, n_scan, endpoint=False)
    best = min(thetas, key=neg_gain)
    lo, hi = best - math.pi / n_scan, best + math.pi / n_scan
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = neg_gain(c), neg_gain(d)
    for _ in range(60):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = neg_gain(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = neg_gain(d)
    return (a + b) / 2.0 % math.pi


def bare_parameters(spec: BathSpec, res: Resonator) -> BareParameters:
    """Freeze the bare-parameter/renormalization convention for reconstruction."""
    return BareParameters(
        mass=res.mass,
        omega_0=renorm.bare_frequency(spec, res),
        delta_k=renorm.stiffness_shift(spec),
    )


def reconstruct(probe: CavityProbe, measured, bare: BareParameters) -> Reconstruction:
    """Invert coherent-drive records into chi(w), Re Sigma(w), and J(w).

        chi      = X_coh / (Lambda_theta F_ext)
        Re Sigma = M Omega_0^2 - M w^2 - delta K - Re[1/chi]
        J        = -Im[1/chi]

    Records whose |Lambda_theta| falls below 1e-6 of the grid maximum are
    dropped and reported in ``dropped`` (never silently interpolated).
    """
    records = list(measured)
    if not records:
        raise DomainError("reconstruct: empty record list")
    if any(rec.f_ext == 0 for rec in records):
        raise ZeroDriveError("reconstruct: calibrated drive must be non-zero everywhere")
    _warn_backaction(probe)
    lam_max = max(abs(rec.lambda_theta) for rec in records)
    if lam_max == 0.0:
        raise SingularTransductionError("reconstruct: transduction vanishes on the whole grid")
    eps_lambda = TRANSDUCTION_FLOOR * lam_max
    dropped = tuple(i for i, rec in enumerate(records) if abs(rec.lambda_theta) < eps_lambda)
    kept = [rec for i, rec in enumerate(records) if abs(rec.lambda_theta) >= eps_lambda]
    if not kept:
        raise SingularTransductionError(
            "reconstruct: every record sits below the transduction floor"
        )
    omega = np.array([rec.omega for rec in kept])
    chi = np.array([rec.x_coh / (rec.lambda_theta * rec.f_ext) for rec in kept])
    inv_chi = 1.0 / chi
    static = bare.mass * bare.omega_0**2 - bare.delta_k
    re_sigma = static - bare.mass * omega**2 - inv_chi.real
    j = -inv_chi.imag
    return Reconstruction(omega=omega, chi=chi, re_sigma=re_sigma, j=j, dropped=dropped)
