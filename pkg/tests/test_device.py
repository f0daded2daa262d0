"""Device layer: mode spectrum, derived rate bundle, pump rate."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from paramres import (
    DeviceSpec,
    ModePair,
    derive_mode_pair,
    pump_strength,
    solve_mode_spectrum,
    validate_regime,
)
from conftest import mk_pair


def make_spec(gamma=0.05, flux_bias=math.pi / 4, flux_amp=0.05,
              coupling_ratio=0.01, **kw):
    EJ = kw.pop("E_J_over_hbar", 1.0e12)
    return DeviceSpec(
        gamma=gamma,
        omega_scale=kw.pop("omega_scale", 2 * math.pi * 1.0e9),
        flux_bias=flux_bias,
        flux_amp=flux_amp,
        coupling_ratio=coupling_ratio,
        E_L_cav_over_hbar=2.0 * EJ * math.cos(flux_bias) * gamma,
        E_J_over_hbar=EJ,
        **kw,
    )


# ---------------------------------------------------------------------------
# dispersion relation
# ---------------------------------------------------------------------------

class TestModeSpectrum:
    def test_roots_satisfy_dispersion(self):
        gamma = 0.05
        kd = solve_mode_spectrum(gamma, 4)
        assert len(kd) == 4
        res = np.abs(kd * np.tan(kd) - 1.0 / gamma) / (1.0 / gamma)
        assert np.all(res < 1e-12)

    def test_one_root_per_branch_increasing(self):
        kd = solve_mode_spectrum(0.1, 5)
        assert np.all(np.diff(kd) > 0)
        for n, x in enumerate(kd):
            assert n * math.pi < x < n * math.pi + math.pi / 2

    def test_hard_wall_limit(self):
        # a vanishing participation ratio pushes the roots to the
        # quarter-wave ladder (2n-1) pi/2
        kd = solve_mode_spectrum(1e-4, 3)
        ladder = np.array([1, 3, 5]) * math.pi / 2
        # each root sits at (2n-1)(pi/2)(1 - gamma) + O(gamma^2)
        assert np.allclose(kd, ladder, rtol=2e-4)

    def test_bracket_example(self):
        kd = solve_mode_spectrum(0.1, 2)
        assert 0 < kd[0] < math.pi / 2
        assert math.pi < kd[1] < 1.5 * math.pi

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            solve_mode_spectrum(0.0, 2)
        with pytest.raises(ValueError):
            solve_mode_spectrum(0.1, 0)

    @given(st.floats(min_value=1e-3, max_value=0.45),
           st.integers(min_value=1, max_value=6))
    def test_property_roots_valid(self, gamma, n):
        kd = solve_mode_spectrum(gamma, n)
        assert len(kd) == n
        assert np.all(np.diff(kd) > 0) or n == 1
        res = np.abs(kd * np.tan(kd) - 1.0 / gamma) * gamma
        assert np.all(res < 1e-10)


# ---------------------------------------------------------------------------
# derived mode pair
# ---------------------------------------------------------------------------

class TestDeriveModePair:
    def test_basic_bundle(self):
        mp = derive_mode_pair(make_spec())
        assert mp.omega2 > mp.omega1 > 0
        assert 0 < mp.Gamma10 <= mp.Gamma1
        assert 0 < mp.Gamma20 <= mp.Gamma2
        assert mp.alpha1 > 0 and mp.alpha2 > 0
        assert mp.alpha == pytest.approx(math.sqrt(mp.alpha1 * mp.alpha2),
                                         rel=1e-14)

    def test_lossless_by_default(self):
        mp = derive_mode_pair(make_spec())
        assert mp.lossless

    def test_total_rate_override(self):
        mp0 = derive_mode_pair(make_spec())
        mp = derive_mode_pair(make_spec(), Gamma1=3.0 * mp0.Gamma10,
                              Gamma2=2.0 * mp0.Gamma20)
        assert not mp.lossless
        assert mp.Gamma10 == pytest.approx(mp0.Gamma10)
        assert mp.Gamma1 == pytest.approx(3.0 * mp0.Gamma10)

    def test_small_gamma_scaling(self):
        # coupling and Kerr ratios approach the quarter-wave mode-number
        # scaling ((2n-1)/(2m-1))^2 as the boundary loading vanishes
        mp = derive_mode_pair(make_spec(gamma=0.005))
        assert mp.Gamma20 / mp.Gamma10 == pytest.approx(9.0, rel=0.05)
        assert mp.alpha2 / mp.alpha1 == pytest.approx(9.0, rel=0.05)

    def test_frequency_from_wavenumber(self):
        spec = make_spec()
        kd = solve_mode_spectrum(spec.gamma, 2)
        mp = derive_mode_pair(spec)
        assert mp.omega1 == pytest.approx(spec.omega_scale * kd[0], rel=1e-12)
        assert mp.omega2 == pytest.approx(spec.omega_scale * kd[1], rel=1e-12)

    def test_mode_index_order_enforced(self):
        with pytest.raises(ValueError):
            derive_mode_pair(make_spec(), mode_indices=(2, 1))


class TestPumpStrength:
    def test_zero_modulation_zero_pump(self):
        spec = make_spec(flux_amp=0.0)
        mp = derive_mode_pair(spec)
        assert pump_strength(spec, mp) == 0.0

    def test_linear_in_modulation(self):
        mp = derive_mode_pair(make_spec())
        e1 = pump_strength(make_spec(flux_amp=0.01), mp)
        e2 = pump_strength(make_spec(flux_amp=0.02), mp)
        assert e1 > 0
        assert e2 == pytest.approx(2.0 * e1, rel=1e-6)


# ---------------------------------------------------------------------------
# parameter validation
# ---------------------------------------------------------------------------

class TestValidation:
    def test_gamma_bounds(self):
        with pytest.raises(ValueError):
            make_spec(gamma=0.0)
        with pytest.raises(ValueError):
            make_spec(gamma=0.6)
        with pytest.warns(UserWarning):
            make_spec(gamma=0.3)

    def test_flux_bounds(self):
        with pytest.raises(ValueError):
            make_spec(flux_amp=1.0)
        with pytest.raises(ValueError):
            make_spec(flux_bias=math.pi / 2)

    def test_pair_coupling_bounds(self):
        with pytest.raises(ValueError):
            mk_pair(G1=1.0, G10=2.0)
        with pytest.raises(ValueError):
            ModePair(Gamma1=1.0, Gamma2=1.0, Gamma10=0.0, Gamma20=1.0,
                     alpha1=0.0, alpha2=0.0, omega1=1.0, omega2=2.0)

    def test_pair_cross_kerr_consistency(self):
        # a shared junction fixes the cross-Kerr to the geometric mean
        mp = mk_pair(a1=0.04, a2=0.09)
        assert mp.alpha == pytest.approx(0.06, rel=1e-14)
        with pytest.raises(ValueError):
            mk_pair(a1=0.04, a2=0.09, alpha=0.05)

    def test_pair_mode_order(self):
        with pytest.raises(ValueError):
            mk_pair(omega1=7000.0, omega2=5000.0)

    def test_regime_report(self):
        from paramres import PumpConfig

        spec = make_spec()
        mp = derive_mode_pair(spec)
        eps = pump_strength(make_spec(flux_amp=0.02), mp)
        rep = validate_regime(spec, mp, PumpConfig(epsilon=eps),
                              photon_scale=10.0)
        assert rep.passed
        assert isinstance(rep.ratios, dict)
