import math

import numpy as np
import pytest

from bathforge import bath, memory, renorm, response
from bathforge.errors import DomainError, InstabilityError
from bathforge.numerics import Tolerance, gamma_fn
from bathforge.renorm import Mode, RenormMethod, Resonator

SQRT_PI = math.sqrt(math.pi)


@pytest.fixture
def spec():
    return bath.calibrate(-2.30, 1.0, 1.0)


class TestClosedForms:
    def test_stiffness_shift_gamma_expression(self, spec):
        ref = 2.0**4.3 * gamma_fn(3.8) / (SQRT_PI * gamma_fn(5.3))
        assert renorm.stiffness_shift(spec) == pytest.approx(ref, rel=1e-13)

    def test_mass_shift_gamma_expression(self, spec):
        ref = 2.0**5.3 * gamma_fn(4.8) / (SQRT_PI * gamma_fn(5.3))
        assert renorm.mass_shift(spec) == pytest.approx(ref, rel=1e-13)

    def test_shift_ratio_identity(self):
        rng = np.random.default_rng(21)
        for k in rng.uniform(-3.35, -1.25, 20):
            s = bath.calibrate(k, 1.0, 1.0)
            ratio = renorm.mass_shift(s) / renorm.stiffness_shift(s)
            assert ratio == pytest.approx(2.0 * (1.5 - k), rel=1e-12)

    def test_units_scale_out(self):
        # delta K ~ W^3, delta M ~ W^-2 relative to j_res: check SI input
        w = 2.0 * math.pi * 0.914e6
        s = bath.calibrate(-2.30, w, 1e-3)
        base = bath.calibrate(-2.30, 1.0, 1e-3)
        assert renorm.stiffness_shift(s) == pytest.approx(
            renorm.stiffness_shift(base), rel=1e-12
        )
        assert renorm.mass_shift(s) == pytest.approx(
            renorm.mass_shift(base) / w**2, rel=1e-12
        )


class TestQuadratureOracle:
    @pytest.mark.parametrize("k", [-3.35, -2.30, -1.75, -1.25])
    def test_matches_closed_forms(self, k):
        s = bath.calibrate(k, 1.0, 1.0)
        orc = renorm.renorm_oracle(s)
        assert orc.method is RenormMethod.QUADRATURE
        assert orc.delta_k == pytest.approx(renorm.stiffness_shift(s), rel=1e-9)
        assert orc.delta_m == pytest.approx(renorm.mass_shift(s), rel=1e-9)

    def test_kernel_boundary_link(self, spec):
        assert memory.dissipation_kernel(spec, 0.0) == pytest.approx(
            renorm.stiffness_shift(spec), rel=1e-8
        )


class TestResidualSelfEnergy:
    def test_zero_at_origin(self, spec):
        assert renorm.residual_self_energy_real(spec, 0.0) == 0.0

    def test_quartic_small_frequency(self, spec):
        # Re Sigma_res ~ w^4: the ratio at doubled frequency is ~16
        r1 = renorm.residual_self_energy_real(spec, 1e-3)
        r2 = renorm.residual_self_energy_real(spec, 2e-3)
        assert r2 / r1 == pytest.approx(16.0, rel=0.05)

    def test_resolution_stability_at_resonance(self, spec):
        a = response.self_energy(spec, 1.0, Tolerance(rel=1e-10, abs=1e-14)).re
        b = response.self_energy(spec, 1.0, Tolerance(rel=1e-12, abs=1e-16)).re
        assert a == pytest.approx(b, rel=1e-7)


class TestDressedMass:
    def test_decoupled_limit(self):
        s = bath.calibrate(-2.30, 1.0, 1e-12)
        res = Resonator.anchored(1.0, 1.0)
        assert renorm.dressed_mass(s, res) == pytest.approx(1.0, abs=1e-9)

    def test_q215_regression_value(self, q_spec, res_cold):
        # derived constant, frozen at first build
        assert renorm.dressed_mass(q_spec, res_cold) == pytest.approx(
            0.997816118817391, rel=1e-9
        )

    def test_derivative_term_subdominant(self, q_spec, res_cold):
        m_r = renorm.dressed_mass(q_spec, res_cold)
        dm = renorm.mass_shift(q_spec)
        assert abs(m_r - res_cold.mass - dm) < 4.0 * dm

    def test_linewidth_consistency(self, q_spec, res_cold):
        m_r = renorm.dressed_mass(q_spec, res_cold)
        gamma = q_spec.j_res / m_r
        assert gamma == pytest.approx(1.0 / 215.0, rel=1e-9)


class TestBareFrequency:
    def test_decoupled_limit(self):
        s = bath.calibrate(-2.30, 1.0, 1e-12)
        res = Resonator.anchored(1.0, 1.0)
        assert renorm.bare_frequency(s, res) == pytest.approx(1.0, abs=1e-9)

    def test_defining_identity(self, q_spec, res_cold):
        om0 = renorm.bare_frequency(q_spec, res_cold)
        rhs = (
            (1.0 + renorm.mass_shift(q_spec)) * 1.0
            + renorm.stiffness_shift(q_spec)
            + renorm.residual_self_energy_real(q_spec, 1.0)
        )
        assert om0**2 == pytest.approx(rhs, rel=1e-10)

    def test_round_trip_through_forward_mode(self, q_spec, res_cold):
        om0 = renorm.bare_frequency(q_spec, res_cold)
        fwd = Resonator.forward(mass=1.0, omega_0=om0)
        assert response.resonance_solve(q_spec, fwd) == pytest.approx(1.0, rel=1e-6)

    def test_ordering_when_dispersive_residue_positive(self, q_spec, res_cold):
        # Omega_0 > Omega_R is implied only when Re Sigma_res(W) >= 0
        sig = renorm.residual_self_energy_real(q_spec, 1.0)
        om0 = renorm.bare_frequency(q_spec, res_cold)
        if sig >= 0.0:
            assert om0 > 1.0
        else:
            assert om0**2 > 1.0 + renorm.mass_shift(q_spec) + renorm.stiffness_shift(q_spec) + sig - 1e-12

    def test_stability_guard(self):
        # strong coupling destabilizes the anchored configuration
        s = bath.calibrate(-2.30, 1.0, 1.0)
        res = Resonator.anchored(1.0, 1.0)
        with pytest.raises(InstabilityError):
            renorm.bare_frequency(s, res)


class TestStability:
    @pytest.mark.parametrize("k", [-3.35, -2.30, -1.75, -1.25])
    def test_static_stiffness_positive_in_weak_damping(self, k):
        s = renorm.calibrate_from_quality(k, 1.0, 215.0)
        res = Resonator.anchored(1.0, 1.0)
        assert renorm.static_stiffness(s, res) > 0.0


class TestQualityCalibration:
    def test_hits_target_quality(self):
        for q in (50.0, 215.0, 1e4):
            s = renorm.calibrate_from_quality(-2.30, 1.0, q)
            res = Resonator.anchored(1.0, 1.0)
            gamma = bath.spectral_density(s, 1.0) / renorm.dressed_mass(s, res)
            assert gamma == pytest.approx(1.0 / q, rel=1e-9)

    def test_rejects_nonpositive_quality(self):
        with pytest.raises(DomainError):
            renorm.calibrate_from_quality(-2.30, 1.0, 0.0)


class TestResonatorType:
    def test_anchored_requires_omega_r(self):
        with pytest.raises(DomainError):
            Resonator(mass=1.0, temperature=0.0, mode=Mode.ANCHORED, omega_0=1.0)

    def test_forward_requires_omega_0(self):
        with pytest.raises(DomainError):
            Resonator(mass=1.0, temperature=0.0, mode=Mode.FORWARD, omega_r=1.0)

    def test_rejects_bad_scalars(self):
        with pytest.raises(DomainError):
            Resonator.anchored(mass=-1.0, omega_r=1.0)
        with pytest.raises(DomainError):
            Resonator.anchored(mass=1.0, omega_r=1.0, temperature=-0.1)
