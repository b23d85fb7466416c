"""Stationary position/momentum correlations, variances, and the memory tail.

The full quantum correlations are coth-weighted fluctuation-dissipation
integrals over Im chi(w),

    C_QQ(t) = (1/pi) int_0^inf coth(w/2T) Im chi(w) cos(w t) dw,
    C_PP(t) = (M^2/pi) int_0^inf w^2 coth(w/2T) Im chi(w) cos(w t) dw,

evaluated on a tabulated dispersive self-energy (Re Sigma is smooth, so a
spline over a one-time set of principal-value integrals is accurate to
~1e-9 while keeping the double integral tractable).  The weakly damped
pole gives the familiar damped-cosine approximants, and the structured
bath adds a subleading memory tail proportional to the dissipation kernel.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import renorm, response
from .bath import BathSpec, spectral_density
from .errors import DomainError, NonConvergenceError, ValidityError
from .memory import dissipation_kernel
from .numerics import Tolerance, _NaturalCubicSpline, cosine_transform, gamma_fn
from .parallel import parallel_map
from .renorm import Resonator

__all__ = [
    "CorrelationMode",
    "CorrelationTrace",
    "position_correlation",
    "momentum_correlation",
    "pole_correlations",
    "variances",
    "memory_tail",
    "correlation_trace",
    "thermal_occupation",
]


class CorrelationMode(enum.Enum):
    FULL_QUANTUM = "full_quantum"
    HIGH_T = "high_t"
    POLE = "pole"
    MEMORY_TAIL = "memory_tail"


@dataclass(frozen=True)
class CorrelationTrace:
    times: tuple
    cqq: tuple
    cpp: tuple
    method: CorrelationMode


_TABLE_X_MAX = 60.0
_INTEGRAL_TOL = Tolerance(rel=1e-9, abs=1e-16, max_evals=600_000)


@lru_cache(maxsize=8)
def _re_sigma_table(spec: BathSpec):
    """Spline of the reduced dispersive self-energy x -> Re Sigma(W x).

    Covers x in [0, 60]; beyond that the large-frequency expansion
    Re Sigma -> -delta K - C2/w^2 - C4/w^4 takes over (valid for k < -1/2).
    """
    w = spec.omega_r
    xs = np.concatenate([np.linspace(0.0, 3.0, 601), np.geomspace(3.02, _TABLE_X_MAX, 180)])
    vals = parallel_map(lambda x: response.self_energy(spec, w * x).re, xs)
    spline = _NaturalCubicSpline(xs, np.asarray(vals))
    k = spec.k
    a5 = spec.a_k * w**5
    c2 = a5 * gamma_fn(2.5) * gamma_fn(0.5 - k) / (math.pi * gamma_fn(3.0 - k))
    c4 = (
        spec.a_k * w**7 * gamma_fn(3.5) * gamma_fn(-0.5 - k) / (math.pi * gamma_fn(3.0 - k))
        if k < -0.5
        else 0.0
    )
    delta_k = renorm.stiffness_shift(spec)

    def re_sigma(x):
        x = np.asarray(x, dtype=float)
        inside = x <= _TABLE_X_MAX
        out = np.empty_like(x)
        out[inside] = spline(x[inside])
        xo = x[~inside] * w
        out[~inside] = -delta_k - c2 / xo**2 - c4 / xo**4
        return out

    return re_sigma


def _im_chi_reduced(spec: BathSpec, res: Resonator):
    """Vectorized x -> Im chi(W x) plus the peak-panel breakpoints."""
    w = spec.omega_r
    k0 = renorm.static_stiffness(spec, res)
    m = res.mass
    re_sigma = _re_sigma_table(spec)

    def im_chi(x):
        x = np.asarray(x, dtype=float)
        j = spectral_density(spec, w * x)
        re_inv = k0 - m * (w * x) ** 2 - re_sigma(x)
        return j / (re_inv * re_inv + j * j)

    w_r = response.observed_resonance(spec, res)
    gamma_red = spectral_density(spec, w_r) / (renorm.dressed_mass(spec, res) * w_r) / w
    x_r = w_r / w
    lo = max(x_r - 10.0 * gamma_red, 0.0)
    hi = x_r + 10.0 * gamma_red
    # the resonance peak needs a dedicated finely divided panel: adaptive
    # refinement alone can step over a feature ~1e-2 wide
    breakpoints = tuple(np.linspace(lo, hi, 201))
    return im_chi, breakpoints


def _coth_factor(x, t_red: float):
    x = np.asarray(x, dtype=float)
    if t_red == 0.0:
        return np.ones_like(x)
    return 1.0 / np.tanh(x / (2.0 * t_red))


def _fdt_integral(spec, res, t, weight_power: int, mode: CorrelationMode) -> float:
    """(1/pi) int w^p coth(w/2T) Im chi(w) cos(w t) dw in reduced variables."""
    w = spec.omega_r
    t_red = res.temperature / w
    if mode is CorrelationMode.HIGH_T and res.temperature <= 0.0:
        raise DomainError("high-temperature correlation mode needs T > 0")
    im_chi, bps = _im_chi_reduced(spec, res)
    z = w * float(t)

    if mode is CorrelationMode.FULL_QUANTUM:

        def g(x):
            return _coth_factor(x, t_red) * np.asarray(x) ** weight_power * im_chi(x)

        pref = w ** (weight_power + 1) / math.pi
    else:
        # coth -> 2T/w: one power of x moves into the prefactor

        def g(x):
            return np.asarray(x) ** (weight_power - 1) * im_chi(x)

        pref = 2.0 * res.temperature * w**weight_power / math.pi

    try:
        result = cosine_transform(g, z, _INTEGRAL_TOL, breakpoints=bps, knee=2.0)
    except NonConvergenceError as exc:
        raise NonConvergenceError(
            f"fluctuation-dissipation integral (w^{weight_power} weight) at "
            f"W t = {z:g}: {exc}",
            best=exc.best,
            evaluations=exc.evaluations,
        ) from exc
    return pref * result.value


def position_correlation(
    spec: BathSpec,
    res: Resonator,
    t: float,
    mode: CorrelationMode = CorrelationMode.FULL_QUANTUM,
) -> float:
    """Symmetrized position correlation C_QQ(t) (t >= 0)."""
    if t < 0:
        raise DomainError("position_correlation: t must be >= 0")
    if mode is CorrelationMode.POLE:
        return pole_correlations(spec, res, t)[0]
    if mode is CorrelationMode.MEMORY_TAIL:
        return memory_tail(spec, res, t)
    return _fdt_integral(spec, res, t, 0, mode)


def momentum_correlation(
    spec: BathSpec,
    res: Resonator,
    t: float,
    mode: CorrelationMode = CorrelationMode.FULL_QUANTUM,
) -> float:
    """Symmetrized momentum correlation C_PP(t) (t >= 0)."""
    if t < 0:
        raise DomainError("momentum_correlation: t must be >= 0")
    if mode is CorrelationMode.POLE:
        return pole_correlations(spec, res, t)[1]
    if mode is CorrelationMode.MEMORY_TAIL:
        raise DomainError("memory tail is defined for the position correlation")
    return res.mass**2 * _fdt_integral(spec, res, t, 2, mode)


def thermal_occupation(spec: BathSpec, res: Resonator) -> float:
    """n_R = 1/(exp(W/k_B T) - 1) at the observed resonance (0 at T = 0)."""
    if res.temperature == 0.0:
        return 0.0
    w_r = response.observed_resonance(spec, res)
    return 1.0 / math.expm1(w_r / res.temperature)


def pole_correlations(spec: BathSpec, res: Resonator, t: float):
    """Weak-damping pole approximants (damped cosines at the resonance).

    C_QQ = (2 n_R + 1)/(2 M_R W) e^(-gamma t/2) cos(W t)
    C_PP = M^2 W (2 n_R + 1)/(2 M_R) e^(-gamma t/2) cos(W t)
    """
    t = float(t)
    w_r = response.observed_resonance(spec, res)
    m_r = renorm.dressed_mass(spec, res)
    gamma = spectral_density(spec, w_r) / (m_r * w_r)
    envelope = (2.0 * thermal_occupation(spec, res) + 1.0) * math.exp(-0.5 * gamma * t) * math.cos(w_r * t)
    cqq = envelope / (2.0 * m_r * w_r)
    cpp = res.mass**2 * w_r * envelope / (2.0 * m_r)
    return cqq, cpp


def variances(spec: BathSpec, res: Resonator):
    """(sigma_Q^2, sigma_P^2) from the full quantum integrals at t = 0."""
    return (
        position_correlation(spec, res, 0.0, CorrelationMode.FULL_QUANTUM),
        momentum_correlation(spec, res, 0.0, CorrelationMode.FULL_QUANTUM),
    )


def memory_tail(spec: BathSpec, res: Resonator, t: float) -> float:
    """Non-Markovian residue delta C_QQ(t) = (k_B T / D_*) mu_k(t).

    The slowly varying background scale is fixed to D_* = M_R^2 W^4.
    High-temperature regime; valid for W t >> 1 (guarded at W t >= 5).
    """
    t = float(t)
    w_r = response.observed_resonance(spec, res)
    if w_r * t < 5.0:
        raise ValidityError(f"memory_tail: valid for W t >= 5, got {w_r * t:g}")
    d_star = renorm.dressed_mass(spec, res) ** 2 * w_r**4
    return res.temperature / d_star * dissipation_kernel(spec, t)


def correlation_trace(
    spec: BathSpec,
    res: Resonator,
    times,
    mode: CorrelationMode = CorrelationMode.FULL_QUANTUM,
) -> CorrelationTrace:
    """Sample C_QQ and C_PP on a grid of times (in units of 1/W)."""
    w = spec.omega_r
    ts = [float(x) for x in times]
    if mode is CorrelationMode.POLE:
        pairs = [pole_correlations(spec, res, t / w) for t in ts]
    elif mode is CorrelationMode.MEMORY_TAIL:
        pairs = [(memory_tail(spec, res, t / w), math.nan) for t in ts]
    else:
        if ts:  # build the shared table once before farming out points
            _im_chi_reduced(spec, res)
        pairs = parallel_map(
            lambda t: (
                position_correlation(spec, res, t / w, mode),
                momentum_correlation(spec, res, t / w, mode),
            ),
            ts,
        )
    return CorrelationTrace(
        times=tuple(ts),
        cqq=tuple(p[0] for p in pairs),
        cpp=tuple(p[1] for p in pairs),
        method=mode,
    )
