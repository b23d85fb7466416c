"""Bath-induced stiffness/mass renormalizations and the dressed resonator.

Closed forms for the renormalization integrals of the model bath,

    delta K = (2/pi) int_0^inf J(w)/w   dw = A_k W^3 G(3/2-k) / (2 sqrt(pi) G(3-k)),
    delta M = (2/pi) int_0^inf J(w)/w^3 dw = A_k W   G(5/2-k) / (  sqrt(pi) G(3-k)),

with W the observed resonance, plus the quadrature oracle for both, the
residual (post-delta-M) dispersive self-energy, the dressed mass, and the
inferred bare frequency.  The observed resonance is anchored by default;
forward mode (bare frequency given) exists for round-trip checks.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

from .bath import BathSpec, calibrate
from .errors import (
    DerivativeUnstableError,
    DomainError,
    InstabilityError,
    NonConvergenceError,
)
from .numerics import Tolerance, gamma_fn, integrate_semi_infinite

__all__ = [
    "Mode",
    "RenormMethod",
    "Resonator",
    "RenormResult",
    "stiffness_shift",
    "mass_shift",
    "renorm_oracle",
    "renorm_summary",
    "residual_self_energy_real",
    "dressed_mass",
    "bare_frequency",
    "static_stiffness",
    "calibrate_from_quality",
]

_SQRT_PI = math.sqrt(math.pi)


class Mode(enum.Enum):
    ANCHORED = "anchored"  # observed resonance is input, bare frequency inferred
    FORWARD = "forward"  # bare frequency is input, resonance solved for


class RenormMethod(enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class Resonator:
    """Mechanical parameters; temperature is k_B T in angular-frequency units."""

    mass: float
    temperature: float
    mode: Mode
    omega_r: float | None = None
    omega_0: float | None = None

    def __post_init__(self):
        if self.mass <= 0:
            raise DomainError("resonator mass must be positive")
        if self.temperature < 0:
            raise DomainError("temperature must be >= 0")
        if self.mode is Mode.ANCHORED:
            if self.omega_r is None or self.omega_r <= 0 or self.omega_0 is not None:
                raise DomainError("anchored mode takes omega_r (> 0) only")
        else:
            if self.omega_0 is None or self.omega_0 <= 0 or self.omega_r is not None:
                raise DomainError("forward mode takes omega_0 (> 0) only")

    @classmethod
    def anchored(cls, mass: float, omega_r: float, temperature: float = 0.0):
        return cls(mass=mass, temperature=temperature, mode=Mode.ANCHORED, omega_r=omega_r)

    @classmethod
    def forward(cls, mass: float, omega_0: float, temperature: float = 0.0):
        return cls(mass=mass, temperature=temperature, mode=Mode.FORWARD, omega_0=omega_0)


@dataclass(frozen=True)
class RenormResult:
    """Shifts are pure bath functionals; the dressed mass and inferred bare
    frequency additionally need a (stable) resonator and are None otherwise."""

    delta_k: float
    delta_m: float
    m_r: float | None
    omega_0: float | None
    method: RenormMethod

    def __post_init__(self):
        if self.delta_k <= 0 or self.delta_m <= 0:
            raise InstabilityError("renormalization produced non-positive shifts")
        if self.m_r is not None and self.m_r <= 0:
            raise InstabilityError("dressed mass is not positive")

    def to_json(self) -> dict:
        return {
            "delta_k": self.delta_k,
            "delta_m": self.delta_m,
            "m_r": self.m_r,
            "omega_0": self.omega_0,
            "method": self.method.value,
        }


def stiffness_shift(spec: BathSpec) -> float:
    """delta K, exact: equals the dissipation kernel at t = 0."""
    k = spec.k
    return spec.a_k * spec.omega_r**3 * gamma_fn(1.5 - k) / (2.0 * _SQRT_PI * gamma_fn(3.0 - k))


def mass_shift(spec: BathSpec) -> float:
    """delta M, exact; note delta M W^2 / delta K = 2(3/2 - k)."""
    k = spec.k
    return spec.a_k * spec.omega_r * gamma_fn(2.5 - k) / (_SQRT_PI * gamma_fn(3.0 - k))


def renorm_oracle(spec: BathSpec, res: Resonator | None = None, tol: Tolerance | None = None) -> RenormResult:
    """Both renormalizations by direct adaptive quadrature (oracle path).

    Integration is done in the reduced variable x = w/Omega_R so accuracy is
    unit-independent.  The dressed mass and bare frequency are filled in for
    ``res`` (default: unit mass anchored at the model resonance).
    """
    tol = tol or Tolerance(rel=1e-12, abs=1e-15)
    k = spec.k
    dk_red = integrate_semi_infinite(lambda x: x * x * (1.0 + x * x) ** (k - 3.0), tol).value
    dm_red = integrate_semi_infinite(lambda x: (1.0 + x * x) ** (k - 3.0), tol).value
    delta_k = 2.0 * spec.a_k * spec.omega_r**3 / math.pi * dk_red
    delta_m = 2.0 * spec.a_k * spec.omega_r / math.pi * dm_red
    return RenormResult(
        delta_k=delta_k,
        delta_m=delta_m,
        m_r=dressed_mass(spec, res) if res is not None else None,
        omega_0=bare_frequency(spec, res) if res is not None else None,
        method=RenormMethod.QUADRATURE,
    )


def renorm_summary(spec: BathSpec, res: Resonator | None = None) -> RenormResult:
    """Closed-form renormalizations plus the derived dressed parameters."""
    return RenormResult(
        delta_k=stiffness_shift(spec),
        delta_m=mass_shift(spec),
        m_r=dressed_mass(spec, res) if res is not None else None,
        omega_0=bare_frequency(spec, res) if res is not None else None,
        method=RenormMethod.CLOSED_FORM,
    )


def residual_self_energy_real(spec: BathSpec, omega: float) -> float:
    """Re Sigma_res(w) = Re Sigma(w) - delta M w^2 (the post-quadratic remainder)."""
    from . import response  # deferred: response imports this module at top level

    omega = float(omega)
    if omega == 0.0:
        return 0.0
    return response.self_energy(spec, omega).re - mass_shift(spec) * omega * omega


@lru_cache(maxsize=64)
def _sigma_res_at_resonance(spec: BathSpec) -> float:
    return residual_self_energy_real(spec, spec.omega_r)


@lru_cache(maxsize=64)
def _sigma_res_derivative(spec: BathSpec) -> float:
    """d Re Sigma_res / d(w^2) at the resonance.

    Central difference in the variable u = w^2 with step 1e-4 W^2,
    Richardson-extrapolated once; the two Richardson levels must agree.
    """
    w2 = spec.omega_r**2
    h = 1e-4 * w2

    def g(u: float) -> float:
        return residual_self_energy_real(spec, math.sqrt(u))

    def central(step: float) -> float:
        return (g(w2 + step) - g(w2 - step)) / (2.0 * step)

    d1, d2, d3 = central(h), central(0.5 * h), central(0.25 * h)
    r1 = (4.0 * d2 - d1) / 3.0
    r2 = (4.0 * d3 - d2) / 3.0
    scale = max(abs(r1), abs(r2), mass_shift(spec))
    if abs(r2 - r1) > 1e-5 * scale:
        raise DerivativeUnstableError(
            f"self-energy derivative Richardson levels disagree: {r1:.6e} vs {r2:.6e}",
            best=r2,
        )
    return r2


def dressed_mass(spec: BathSpec, res: Resonator) -> float:
    """M_R = M + delta M + d Re Sigma_res / d(w^2) at the resonance."""
    m_r = res.mass + mass_shift(spec) + _sigma_res_derivative(spec)
    if m_r <= 0:
        raise InstabilityError(f"dressed mass is not positive: {m_r:g}")
    return m_r


def static_stiffness(spec: BathSpec, res: Resonator) -> float:
    """M Omega_0^2 - delta K, the static restoring coefficient (must be > 0)."""
    if res.mode is Mode.ANCHORED:
        w2 = res.omega_r**2
        value = res.mass * w2 + mass_shift(spec) * w2 + _sigma_res_at_resonance(spec)
    else:
        value = res.mass * res.omega_0**2 - stiffness_shift(spec)
    if value <= 0:
        raise InstabilityError(
            "bath-induced stiffness renormalization destabilizes the resonator"
        )
    return value


def bare_frequency(spec: BathSpec, res: Resonator) -> float:
    """Infer Omega_0 from the anchored resonance:

    Omega_0^2 = (1 + delta M / M) W^2 + delta K / M + Re Sigma_res(W) / M.
    """
    if res.mode is not Mode.ANCHORED:
        return float(res.omega_0)
    m = res.mass
    w2 = res.omega_r**2
    rhs = (1.0 + mass_shift(spec) / m) * w2 + stiffness_shift(spec) / m
    rhs += _sigma_res_at_resonance(spec) / m
    if rhs <= 0:
        raise InstabilityError("inferred bare frequency squared is not positive")
    omega_0 = math.sqrt(rhs)
    # derivation must leave the static problem stable
    if m * rhs - stiffness_shift(spec) <= 0:
        raise InstabilityError("derived configuration violates M Omega_0^2 > delta K")
    return omega_0


def calibrate_from_quality(
    k: float,
    omega_r: float,
    q_target: float,
    mass: float = 1.0,
    rel_tol: float = 1e-10,
    max_iter: int = 50,
) -> BathSpec:
    """Back-solve J(Omega_R) from a target quality factor.

    gamma = J(W)/(M_R W) and Q = W/gamma give J = M_R W^2 / Q, but M_R
    itself depends (weakly, ~1/Q) on J; a fixed-point iteration converges
    geometrically.
    """
    if q_target <= 0:
        raise DomainError("q_target must be positive")
    res = Resonator.anchored(mass=mass, omega_r=omega_r)
    j = mass * omega_r**2 / q_target
    for _ in range(max_iter):
        spec = calibrate(k, omega_r, j)
        j_new = dressed_mass(spec, res) * omega_r**2 / q_target
        if abs(j_new - j) <= rel_tol * j_new:
            return calibrate(k, omega_r, j_new)
        j = j_new
    raise NonConvergenceError(
        f"quality-factor calibration did not converge in {max_iter} iterations",
        best=calibrate(k, omega_r, j),
    )
