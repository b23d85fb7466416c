"""Stationary correlations: a damped-cosine pole plus a structured tail.

The full coth-weighted fluctuation integrals are dominated by the narrow
mechanical pole (damped cosine at W with envelope gamma/2), but the
structured bath leaves a subleading memory tail proportional to the
dissipation kernel.  High temperature here means k_B T = 100 W.
"""

import math

import numpy as np

from bathforge import correlations as corr, renorm, response
from bathforge.correlations import CorrelationMode
from bathforge.renorm import Resonator

spec = renorm.calibrate_from_quality(-2.30, 1.0, 215.0)
res = Resonator.anchored(mass=1.0, omega_r=1.0, temperature=100.0)

sq2, sp2 = corr.variances(spec, res)
m_r = renorm.dressed_mass(spec, res)
print(f"sigma_Q^2 = {sq2:.6f}   equipartition k_B T/(M_R W^2) = {res.temperature / m_r:.6f}")
print(f"sigma_P^2 = {sp2:.6f}   (M^2 W^2 sigma_Q^2 in the pole picture)")
print(f"thermal occupation n_R = {corr.thermal_occupation(spec, res):.4f}")

print("\nfull quantum vs pole approximation (C_QQ, units of C_QQ(0)):")
cq0, _ = corr.pole_correlations(spec, res, 0.0)
print("   W t      full        pole        |diff|/C(0)")
for t in (0.0, 3.0, 10.0, 21.5):
    full = corr.position_correlation(spec, res, t)
    pole, _ = corr.pole_correlations(spec, res, t)
    print(f"  {t:5.1f}  {full / cq0:+.6f}  {pole / cq0:+.6f}   {abs(full - pole) / cq0:.4f}")

gamma = response.linewidth(spec, res).gamma
print(f"\nenvelope check at cosine antinodes (should track e^(-gamma t/2), gamma = {gamma:.2e}):")
for n in (2, 6, 10):
    t = 2.0 * math.pi * n
    pole, _ = corr.pole_correlations(spec, res, t)
    print(f"  W t = {t:6.2f}: C/C(0) = {pole / cq0:.6f}   e^(-gamma t/2) = {math.exp(-0.5 * gamma * t):.6f}")

print("\nmemory tail delta C_QQ = (k_B T / M_R^2 W^4) mu(t): power-law times exponential")
print("   W t    tail/C(0)       tail * e^(W t) / t^(2-k)")
for t in (8.0, 15.0, 25.0, 35.0):
    tail = corr.memory_tail(spec, res, t)
    shape = tail * math.exp(t) / t ** (2.0 - spec.k)
    print(f"  {t:5.1f}  {tail / cq0:+.3e}   {shape:+.6e}")

trace = corr.correlation_trace(spec, res, np.linspace(0.0, 6.0, 4), CorrelationMode.HIGH_T)
print("\nhigh-T trace (t W, C_QQ, C_PP):")
for t, a, b in zip(trace.times, trace.cqq, trace.cpp):
    print(f"  {t:4.1f}  {a:+.6f}  {b:+.6f}")
