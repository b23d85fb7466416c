"""Exact dissipation kernel of the model bath, its oracle, and the noise kernel.

The cosine transform of J_k(w)/w evaluates in closed form to

    mu_k(t) = (2 A_k W^(6-2k)/sqrt(pi)) [B_k(t) - D_k(t)],
    B_k(t)  = (t/2W)^(3/2-k) K_{3/2-k}(W t) / Gamma(2-k),
    D_k(t)  = W^2 (t/2W)^(5/2-k) K_{5/2-k}(W t) / Gamma(3-k),

with W the observed resonance and K_nu the modified Bessel function of the
second kind.  mu_k(0) = delta K exactly; at long times the D_k term
dominates and the kernel turns transiently negative before decaying as
t^(2-k) e^(-W t).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .bath import BathSpec
from .errors import DomainError, NonConvergenceError, NotFoundError, ValidityError
from .numerics import Tolerance, bessel_k, cosine_transform, find_root, gamma_fn
from .renorm import stiffness_shift

__all__ = [
    "KernelMethod",
    "NoiseMode",
    "KernelTrace",
    "dissipation_kernel",
    "dissipation_kernel_oracle",
    "kernel_asymptote",
    "kernel_sign_change",
    "noise_kernel",
    "kernel_trace",
]

_SQRT_PI = math.sqrt(math.pi)

# below this value of W t the Bessel difference is evaluated by its
# small-argument series; the two-term truncation error is O((W t)^4)
_SMALL_Z = 1e-4
# above this the exponentially scaled K_nu is used to avoid underflow
# before the B - D subtraction
_SCALED_Z = 30.0


class KernelMethod(enum.Enum):
    BESSEL = "bessel"
    QUADRATURE = "quadrature"
    ASYMPTOTE = "asymptote"


class NoiseMode(enum.Enum):
    QUANTUM = "quantum"
    HIGH_T = "high_t"


@dataclass(frozen=True)
class KernelTrace:
    """Time-ordered kernel samples; times in units of 1/W."""

    times: tuple
    values: tuple
    method: KernelMethod
    spec: BathSpec

    def __post_init__(self):
        t = np.asarray(self.times)
        if len(t) != len(self.values):
            raise DomainError("times and values must have equal length")
        if np.any(np.diff(t) <= 0):
            raise DomainError("times must be strictly increasing")
        if not np.all(np.isfinite(np.asarray(self.values))):
            raise DomainError("kernel values must be finite")


def _prefactor(spec: BathSpec) -> float:
    return 2.0 * spec.a_k * spec.omega_r ** (6.0 - 2.0 * spec.k) / _SQRT_PI


def _small_z(spec: BathSpec, z: float) -> float:
    """Two-term small-argument expansion around mu(0) = delta K.

    Both B_k and D_k diverge toward constants that nearly cancel; expanding
    (z/2)^nu K_nu(z) = (Gamma(nu)/2)[1 - z^2/(4(nu-1)) + O(z^4)] keeps the
    combination accurate where naive evaluation would lose digits.
    """
    k = spec.k
    p2 = (
        1.5
        * gamma_fn(1.5 - k)
        / ((0.5 - k) * (2.0 - k) * gamma_fn(2.0 - k))
    )
    quad_term = spec.a_k * spec.omega_r**3 / _SQRT_PI * (z * z / 4.0) * p2
    return stiffness_shift(spec) - quad_term


def dissipation_kernel(spec: BathSpec, t: float) -> float:
    """mu_k(t) for t >= 0 via the closed Bessel form."""
    t = float(t)
    if t < 0:
        raise DomainError("dissipation_kernel: t must be >= 0 (causality)")
    w = spec.omega_r
    z = w * t
    if z < _SMALL_Z:
        return _small_z(spec, z)
    k = spec.k
    nu_b = 1.5 - k
    nu_d = 2.5 - k
    half = t / (2.0 * w)
    scaled = z > _SCALED_Z
    kb = bessel_k(nu_b, z, scaled=scaled)
    kd = bessel_k(nu_d, z, scaled=scaled)
    b = half**nu_b * kb / gamma_fn(2.0 - k)
    d = w * w * half**nu_d * kd / gamma_fn(3.0 - k)
    out = _prefactor(spec) * (b - d)
    if scaled:
        out *= math.exp(-z)
    return out


def dissipation_kernel_oracle(spec: BathSpec, t: float, tol: Tolerance | None = None) -> float:
    """mu_k(t) by direct oscillatory quadrature of the defining transform.

    Independent of the Bessel route: evaluates
    (2 A_k W^3/pi) int_0^inf x^2 (1+x^2)^(k-3) cos(x W t) dx
    in the reduced variable x = w/W.
    """
    t = float(t)
    if t < 0:
        raise DomainError("dissipation_kernel_oracle: t must be >= 0")
    tol = tol or Tolerance(rel=1e-11, abs=1e-17, max_evals=400_000)
    k = spec.k
    z = spec.omega_r * t

    def g(x):
        x = np.asarray(x, dtype=float)
        return x * x * (1.0 + x * x) ** (k - 3.0)

    try:
        red = cosine_transform(g, z, tol)
    except NonConvergenceError as exc:
        raise NonConvergenceError(
            f"dissipation-kernel transform at W t = {z:g}: {exc}",
            best=exc.best,
            evaluations=exc.evaluations,
        ) from exc
    return 2.0 * spec.a_k * spec.omega_r**3 / math.pi * red.value


def kernel_asymptote(spec: BathSpec, t: float) -> float:
    """Leading long-time envelope -d_k t^(2-k) e^(-W t) (from the D_k term)."""
    t = float(t)
    w = spec.omega_r
    if w * t < 5.0:
        raise ValidityError(f"kernel_asymptote: valid for W t >= 5, got {w * t:g}")
    k = spec.k
    d_k = (
        _prefactor(spec)
        * w
        * w
        * (2.0 * w) ** (k - 2.5)
        * math.sqrt(math.pi / (2.0 * w))
        / gamma_fn(3.0 - k)
    )
    return -d_k * t ** (2.0 - k) * math.exp(-w * t)


def kernel_sign_change(spec: BathSpec) -> float:
    """Smallest t* > 0 with mu_k(t*) = 0 (coarse scan, then Brent refinement)."""
    w = spec.omega_r
    step = 0.05 / w
    t_prev = step
    v_prev = dissipation_kernel(spec, t_prev)
    n_steps = int(round(50.0 / 0.05))
    for i in range(2, n_steps + 1):
        t_cur = i * step
        v_cur = dissipation_kernel(spec, t_cur)
        if v_prev == 0.0:
            return t_prev
        if v_prev * v_cur < 0.0:
            return find_root(
                lambda tt: dissipation_kernel(spec, tt),
                (t_prev, t_cur),
                Tolerance(rel=1e-12, abs=1e-15),
            )
        t_prev, v_prev = t_cur, v_cur
    raise NotFoundError("kernel_sign_change: no sign change found below 50/Omega_R")


def noise_kernel(
    spec: BathSpec,
    temperature: float,
    t: float,
    mode: NoiseMode = NoiseMode.QUANTUM,
    tol: Tolerance | None = None,
) -> float:
    """Symmetrized force-noise correlation C_FF(t).

    QUANTUM evaluates (1/pi) int J(w) coth(w/2T) cos(w t) dw (T = 0 means
    coth -> 1, the vacuum correlation); HIGH_T returns k_B T mu_k(t), valid
    for k_B T >> W.
    """
    t = float(t)
    temperature = float(temperature)
    if t < 0:
        raise DomainError("noise_kernel: t must be >= 0")
    if temperature < 0:
        raise DomainError("noise_kernel: temperature must be >= 0")
    if mode is NoiseMode.HIGH_T:
        if temperature == 0.0:
            raise DomainError("noise_kernel: HIGH_T mode needs temperature > 0")
        return temperature * dissipation_kernel(spec, t)
    tol = tol or Tolerance(rel=1e-11, abs=1e-16, max_evals=400_000)
    w = spec.omega_r
    k = spec.k
    z = w * t
    t_red = temperature / w  # k_B T in units of the resonance

    if t_red == 0.0:

        def g(x):
            x = np.asarray(x, dtype=float)
            return x**3 * (1.0 + x * x) ** (k - 3.0)

    else:

        def g(x):
            x = np.asarray(x, dtype=float)
            # x^3 coth(x/2T~) is infrared-regular (~ 2T~ x^2)
            return x**3 * (1.0 + x * x) ** (k - 3.0) / np.tanh(x / (2.0 * t_red))

    try:
        red = cosine_transform(g, z, tol)
    except NonConvergenceError as exc:
        raise NonConvergenceError(
            f"noise-kernel transform at W t = {z:g}: {exc}",
            best=exc.best,
            evaluations=exc.evaluations,
        ) from exc
    return spec.a_k * w**4 / math.pi * red.value


def kernel_trace(
    spec: BathSpec,
    times,
    method: KernelMethod = KernelMethod.BESSEL,
) -> KernelTrace:
    """Sample the kernel on a time grid (times in units of 1/W)."""
    w = spec.omega_r
    ts = [float(x) for x in times]
    if method is KernelMethod.BESSEL:
        vals = [dissipation_kernel(spec, t / w) for t in ts]
    elif method is KernelMethod.QUADRATURE:
        vals = [dissipation_kernel_oracle(spec, t / w) for t in ts]
    else:
        vals = [kernel_asymptote(spec, t / w) for t in ts]
    return KernelTrace(times=tuple(ts), values=tuple(vals), method=method, spec=spec)
