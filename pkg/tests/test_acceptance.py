"""Acceptance suite: one test per release criterion, at pinned tolerances.

Run with ``pytest tests/test_acceptance.py -v`` (each test prints a
``[criterion NN] PASS/FAIL`` line, visible with ``-s`` or on failure).

Criterion 6's long-time envelope band is expected to fail for the two most
sub-Ohmic slopes and is marked strict-xfail: the band compares the kernel
against its leading-order envelope, whose K_nu corrections enter as
(4 nu^2 - 1)/(8 z) with nu = 5/2 - k, and for k <= -2.3 those exceed the
+-10% band at the window's left edge (ratio 1.133 at z = 20 for k = -2.30,
1.34 for k = -3.35).  The two shallow slopes sit inside the band.
"""

import math
from contextlib import contextmanager

import numpy as np
import pytest

from bathforge import bath, cli, correlations as corr, memory, renorm, response, spectroscopy as sp
from bathforge.correlations import CorrelationMode

K_BAND = (-3.35, -2.30, -1.75, -1.25)


@contextmanager
def criterion(num: int, name: str):
    try:
        yield
    except BaseException:
        print(f"[criterion {num:02d}] FAIL  {name}")
        raise
    print(f"[criterion {num:02d}] PASS  {name}")


@pytest.fixture(scope="module")
def probe():
    base = sp.CavityProbe(kappa=1.0, delta=-1.0, g=1e-3, theta=0.0)
    return sp.CavityProbe(kappa=1.0, delta=-1.0, g=1e-3,
                          theta=sp.optimal_homodyne_angle(base, 1.0))


def test_c01_local_slope_regression():
    with criterion(1, "local log-slope across the measured window"):
        spec = bath.calibrate(-2.30, 2.0 * math.pi * 0.914e6, 1.0)
        assert bath.log_slope(spec, 2.0 * math.pi * 0.885e6) == pytest.approx(-2.13, abs=0.005)
        assert bath.log_slope(spec, 2.0 * math.pi * 0.945e6) == pytest.approx(-2.48, abs=0.005)


def test_c02_slope_at_resonance_exact():
    with criterion(2, "log-slope at resonance equals k to 1e-12"):
        rng = np.random.default_rng(101)
        for k in rng.uniform(-3.35, -1.25, 100):
            spec = bath.calibrate(k, 1.0, 1.0)
            assert abs(bath.log_slope(spec, 1.0) - k) < 1e-12


def test_c03_linewidth_regime(q_spec, res_cold):
    with criterion(3, "Q = 215 linewidth ratio and its square"):
        summary = response.linewidth(q_spec, res_cold)
        ratio = summary.gamma / summary.omega_r
        assert ratio == pytest.approx(4.651e-3, abs=1e-5)
        assert ratio**2 == pytest.approx(2.16e-5, abs=1e-7)


def test_c04_closed_forms_vs_quadrature():
    with criterion(4, "delta K, delta M, and kernel vs independent quadrature"):
        for k in K_BAND:
            spec = bath.calibrate(k, 1.0, 1.0)
            oracle = renorm.renorm_oracle(spec)
            assert oracle.delta_k == pytest.approx(renorm.stiffness_shift(spec), rel=1e-7)
            assert oracle.delta_m == pytest.approx(renorm.mass_shift(spec), rel=1e-7)
            for t in np.linspace(0.0, 30.0, 30):
                cf = memory.dissipation_kernel(spec, t)
                oc = memory.dissipation_kernel_oracle(spec, t)
                assert abs(cf - oc) / max(abs(cf), abs(oc)) < 1e-7


def test_c05_kernel_boundary_identity():
    with criterion(5, "mu(0) equals delta K to 1e-8"):
        for k in K_BAND:
            spec = bath.calibrate(k, 1.0, 1.0)
            assert memory.dissipation_kernel(spec, 0.0) == pytest.approx(
                renorm.stiffness_shift(spec), rel=1e-8
            )


def test_c06_kernel_sign_change():
    with criterion(6, "transient negativity below 50/W for every slope"):
        for k in K_BAND:
            spec = bath.calibrate(k, 1.0, 1.0)
            t_star = memory.kernel_sign_change(spec)
            assert 0.0 < t_star < 50.0
            assert memory.dissipation_kernel(spec, t_star - 1e-3) > 0.0
            assert memory.dissipation_kernel(spec, t_star + 1e-3) < 0.0


@pytest.mark.parametrize(
    "k",
    [
        pytest.param(
            -3.35,
            marks=pytest.mark.xfail(
                strict=True,
                reason="K_nu corrections (4 nu^2 - 1)/(8 z), nu = 5/2 - k, put the "
                "ratio at 1.16-1.34 on this window for k = -3.35",
            ),
        ),
        pytest.param(
            -2.30,
            marks=pytest.mark.xfail(
                strict=True,
                reason="ratio reaches 1.133 at z = 20 for k = -2.30; it enters the "
                "band only beyond z ~ 27",
            ),
        ),
        -1.75,
        -1.25,
    ],
)
def test_c06_kernel_asymptote_band(k):
    with criterion(6, f"kernel within 10% of the leading envelope on [20, 40] (k={k})"):
        spec = bath.calibrate(k, 1.0, 1.0)
        for t in np.linspace(20.0, 40.0, 21):
            ratio = memory.dissipation_kernel(spec, t) / memory.kernel_asymptote(spec, t)
            assert 0.9 <= ratio <= 1.1


def test_c07_self_energy_small_frequency_law(q_spec):
    with criterion(7, "dispersive self-energy is delta M w^2 + O(w^4)"):
        dm = renorm.mass_shift(q_spec)
        ws = np.geomspace(1e-3, 1e-2, 9)
        residual = [abs(response.self_energy(q_spec, w).re - dm * w * w) for w in ws]
        exponent = np.polyfit(np.log(ws), np.log(residual), 1)[0]
        assert exponent == pytest.approx(4.0, abs=0.1)
        w = 1e-3
        assert response.self_energy(q_spec, w).re / (w * w) == pytest.approx(dm, rel=1e-4)


def test_c08_susceptibility_identities(q_spec, res_cold):
    with criterion(8, "dissipative identity and conjugate symmetry at 1e-10"):
        rng = np.random.default_rng(202)
        for w in rng.uniform(0.05, 4.0, 50):
            chi = response.susceptibility(q_spec, res_cold, w)
            ref = bath.spectral_density(q_spec, w) / abs(chi.inverse) ** 2
            assert chi.value.imag == pytest.approx(ref, rel=1e-10)
            minus = response.susceptibility(q_spec, res_cold, -w)
            assert abs(minus.value - chi.value.conjugate()) <= 1e-10 * abs(chi.value)


def test_c09_fdt_consistency(q_spec, res_warm):
    with criterion(9, "variances close the t = 0 correlations; high-T rate"):
        sq2, sp2 = corr.variances(q_spec, res_warm)
        assert corr.position_correlation(q_spec, res_warm, 0.0) == pytest.approx(sq2, rel=1e-8)
        assert corr.momentum_correlation(q_spec, res_warm, 0.0) == pytest.approx(sp2, rel=1e-8)
        high = corr.position_correlation(q_spec, res_warm, 0.0, CorrelationMode.HIGH_T)
        assert abs(sq2 - high) / sq2 < 1e-3


def test_c10_pole_dominance(q_spec, res_warm):
    with criterion(10, "pole approximation carries the correlations to 5%"):
        gamma = response.linewidth(q_spec, res_warm).gamma
        cq0, _ = corr.pole_correlations(q_spec, res_warm, 0.0)
        for frac in (0.0, 0.2, 0.5, 0.8, 1.0):
            t = frac * 0.1 / gamma
            full = corr.position_correlation(q_spec, res_warm, t)
            pole, _ = corr.pole_correlations(q_spec, res_warm, t)
            assert abs(full - pole) / cq0 < 0.05


def test_c11_reconstruction_round_trip(q_spec, res_warm, probe):
    with criterion(11, "noiseless synth -> reconstruct recovers J and Re Sigma"):
        grid = np.linspace(0.1, 3.0, 200)
        records = sp.synthesize_records(q_spec, res_warm, probe, grid, f_ext=1.0 + 0.3j)
        recon = sp.reconstruct(probe, records, sp.bare_parameters(q_spec, res_warm))
        assert recon.dropped == ()
        j_true = bath.spectral_density(q_spec, recon.omega)
        assert np.max(np.abs(recon.j / j_true - 1.0)) < 1e-8
        re_true = np.array([response.self_energy(q_spec, w).re for w in recon.omega])
        assert np.max(np.abs(recon.re_sigma - re_true)) < 1e-7  # reduced units
        ln_j, ln_w = np.log(recon.j), np.log(recon.omega)
        slopes = (ln_j[2:] - ln_j[:-2]) / (ln_w[2:] - ln_w[:-2])
        k_est = float(np.interp(1.0, recon.omega[1:-1], slopes))
        assert k_est == pytest.approx(q_spec.k, abs=0.01)


def test_c12_figure_data(tmp_path):
    with criterion(12, "figure curves: non-negative, unimodal, correct peaks, negativity"):
        out = tmp_path / "figs"
        assert cli.run(["figures", "--which", "2", "--out", str(out)]) == 0
        assert cli.run(["figures", "--which", "3", "--out", str(out)]) == 0
        fig2 = _read(out / "figure2.csv")
        for k in (-2.30, -1.75):
            col = fig2[f"j_norm_k_{cli._k_tag(k)}"]
            assert np.all(col >= 0.0)
            dj = np.diff(col)
            assert np.sum(np.sign(dj[:-1]) != np.sign(dj[1:])) == 1  # unimodal
            # refine the continuous argmax via golden section around the peak
            spec = bath.calibrate(k, 1.0, 1.0)
            w_peak = _golden_argmax(lambda w: bath.spectral_density(spec, w), 0.3, 1.0)
            assert w_peak == pytest.approx(math.sqrt(3.0 / (3.0 - 2.0 * k)), rel=1e-6)
        fig3 = _read(out / "figure3.csv")
        for k in (-2.30, -1.75):
            col = fig3[f"mu_norm_k_{cli._k_tag(k)}"]
            assert col[0] > 0.0
            assert np.min(col) < 0.0


def _read(path):
    lines = [l for l in path.read_text().splitlines() if l and not l.startswith("#")]
    names = lines[0].split(",")
    data = np.array([[float(v) for v in row.split(",")] for row in lines[1:]])
    return {n: data[:, i] for i, n in enumerate(names)}


def _golden_argmax(f, lo, hi):
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(100):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)
