"""Linearized input-output response: two-mode and four-mode Bogoliubov maps,
supermode channels, near-threshold closed forms, phase locking."""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from paramres import (
    DriveTone,
    PumpConfig,
    four_mode_bogoliubov,
    gain_spectrum,
    near_threshold_asymptotics,
    nonlinear_io,
    oscillation_state,
    oscillator_determinants,
    phase_lock,
    regularized_detuned_response,
    solve_steady_state,
    supermode_coeffs,
    supermode_to_bogoliubov,
    trivial_state,
    two_mode_uv,
)
from paramres._numerics import wrap_angle
from conftest import mk_pair
import oracles


# ---------------------------------------------------------------------------
# empty-cavity (linear) map
# ---------------------------------------------------------------------------

class TestTwoModeMap:
    def test_no_pump_is_pure_reflection(self):
        mp = mk_pair(G1=0.8, G2=1.7)
        uv = two_mode_uv(mp, PumpConfig(epsilon=0.0), 0.3)
        assert uv.v1 == 0 and uv.v2 == 0
        assert abs(uv.u1) == pytest.approx(1.0, rel=1e-12)
        assert abs(uv.u2) == pytest.approx(1.0, rel=1e-12)

    def test_lossless_photon_number_relation(self):
        mp = mk_pair(G1=0.9, G2=2.1)
        uv = two_mode_uv(mp, PumpConfig(epsilon=0.8, delta=0.25),
                         np.linspace(-4, 4, 41))
        assert np.allclose(np.abs(uv.u1) ** 2 - np.abs(uv.v1) ** 2, 1.0,
                           atol=1e-10)
        assert np.allclose(np.abs(uv.u2) ** 2 - np.abs(uv.v2) ** 2, 1.0,
                           atol=1e-10)

    def test_internal_loss_breaks_the_relation(self):
        mp = mk_pair(G1=1.0, G2=1.0, G10=0.6, G20=0.6)
        uv = two_mode_uv(mp, PumpConfig(epsilon=0.5), 0.0)
        assert abs(uv.u1) ** 2 - abs(uv.v1) ** 2 < 1.0 - 1e-3

    def test_divergence_at_threshold(self):
        mp = mk_pair()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            uv = two_mode_uv(mp, PumpConfig(epsilon=1.0), 0.0)
        assert uv.divergent

    def test_above_threshold_warns(self):
        mp = mk_pair()
        with pytest.warns(UserWarning, match="transient"):
            two_mode_uv(mp, PumpConfig(epsilon=1.2), 0.5)

    @given(st.floats(min_value=0.05, max_value=5.0),
           st.floats(min_value=0.05, max_value=5.0),
           st.floats(min_value=0.0, max_value=0.95),
           st.floats(min_value=-6.0, max_value=6.0),
           st.floats(min_value=-8.0, max_value=8.0))
    @settings(max_examples=200)
    def test_property_lossless_relation(self, G1, G2, eps_frac, delta, Delta):
        mp = mk_pair(G1=G1, G2=G2)
        eps = eps_frac * math.sqrt(G1 * G2)
        uv = two_mode_uv(mp, PumpConfig(epsilon=eps, delta=delta), Delta)
        assert abs(uv.u1) ** 2 - abs(uv.v1) ** 2 == pytest.approx(1.0,
                                                                  abs=1e-9)


class TestGainSumRule:
    def test_linear_map_row_wise(self):
        mp = mk_pair(G1=0.9, G2=2.1)
        pump = PumpConfig(epsilon=0.8, delta=0.25)
        t = gain_spectrum(mp, pump, trivial_state(mp, pump),
                          np.linspace(-3, 3, 61))
        assert np.allclose(t.G11_signal - t.G12_idler, 1.0, atol=1e-10)

    def test_frozen_shift_map_at_driven_state(self):
        mp = mk_pair(a1=0.01, a2=0.01)
        pump = PumpConfig(epsilon=0.95, delta=0.0)
        s = solve_steady_state(mp, pump, [DriveTone(1, 1.0, 0.0)])[0]
        g = nonlinear_io(mp, pump, s, 0.7)
        assert g.G11 - g.G12 == pytest.approx(1.0, abs=1e-10)

    def test_full_table_at_driven_state(self):
        # with Kerr currents the signal scatters into all four channels;
        # only the complete column obeys the photon-number sum rule
        mp = mk_pair(a1=0.01, a2=0.01)
        pump = PumpConfig(epsilon=0.95, delta=0.0)
        s = solve_steady_state(mp, pump, [DriveTone(1, 1.0, 0.0)])[0]
        t = gain_spectrum(mp, pump, s, np.array([0.7, 1.3, -0.4]))
        total = t.G11_signal + t.G12_signal - t.G11_idler - t.G12_idler
        assert np.allclose(total, 1.0, atol=1e-10)

    def test_idler_channel_frequency_bookkeeping(self):
        # the idler of a signal detuned by +D sits at -D in the frame; the
        # gain table stores both on the same row
        mp = mk_pair()
        pump = PumpConfig(epsilon=0.5, delta=0.1)
        t = gain_spectrum(mp, pump, trivial_state(mp, pump), np.array([0.4]))
        uv = two_mode_uv(mp, pump, 0.4)
        assert t.G11_signal[0] == pytest.approx(abs(uv.u1) ** 2, rel=1e-12)
        assert t.G12_idler[0] == pytest.approx(abs(uv.v1) ** 2, rel=1e-12)


# ---------------------------------------------------------------------------
# four-channel map about a strong state
# ---------------------------------------------------------------------------

def driven_state(mp, pump, B1, Delta_S=0.0):
    states = solve_steady_state(mp, pump, [DriveTone(1, B1, Delta_S)])
    return states[0]


class TestFourModeMap:
    def test_symplectic_identity_random(self):
        rng = np.random.default_rng(23)
        eye = np.eye(2)
        for _ in range(60):
            G = rng.uniform(0.2, 3.0)
            mp = mk_pair(G1=G, G2=G, a1=0.01 * G, a2=0.01 * G)
            eps = G * rng.uniform(0.3, 0.999)
            pump = PumpConfig(epsilon=eps, delta=rng.uniform(-0.5, 0.5) * G)
            s = driven_state(mp, pump, rng.uniform(0.1, 1.5) * math.sqrt(G))
            fm = four_mode_bogoliubov(mp, pump, s, rng.uniform(-3, 3) * G)
            d = fm.U @ fm.U.conj().T - fm.V @ fm.V.conj().T - eye
            assert np.max(np.abs(d)) < 1e-10

    def test_reduces_to_two_mode_on_vacuum(self):
        mp = mk_pair(G1=0.7, G2=1.9)
        pump = PumpConfig(epsilon=0.5, delta=0.2)
        fm = four_mode_bogoliubov(mp, pump, trivial_state(mp, pump), 0.6)
        uv = two_mode_uv(mp, pump, 0.6)
        assert fm.U[0, 0] == pytest.approx(uv.u1, rel=1e-12)
        assert fm.V[0, 1] == pytest.approx(uv.v1, rel=1e-12)
        # no Kerr currents: the anomalous same-mode channels stay empty
        assert fm.U[0, 1] == 0 and fm.V[0, 0] == 0

    def test_supermode_route_equals_direct_route(self):
        # the supermode factorization must be exact for a balanced pair in
        # its free oscillation state (equal populations by symmetry)
        mp = mk_pair(a1=0.01, a2=0.01)
        pump = PumpConfig(epsilon=1.4, delta=-0.2)
        s = oscillation_state(mp, pump).cavity_state(mp, pump, psi=0.7)
        grid = np.linspace(-5.0, 5.0, 200)
        direct = four_mode_bogoliubov(mp, pump, s, grid)
        sm = supermode_coeffs(mp, pump, s, grid)
        psi = np.angle(s.A1) - np.angle(s.A2)
        Theta = np.angle(s.A1) + np.angle(s.A2)
        rebuilt = supermode_to_bogoliubov(sm, psi, Theta)
        assert np.nanmax(np.abs(rebuilt.U - direct.U)) < 1e-10
        assert np.nanmax(np.abs(rebuilt.V - direct.V)) < 1e-10

    def test_supermode_refuses_unequal_populations(self):
        mp = mk_pair(a1=0.01, a2=0.01)
        pump = PumpConfig(epsilon=1.0, delta=0.0)
        s = driven_state(mp, pump, 0.8)  # one-sided drive skews populations
        with pytest.raises(ValueError, match="equal mode populations"):
            supermode_coeffs(mp, pump, s, 0.0)

    def test_supermode_refuses_unbalanced_pair(self):
        mp = mk_pair(G2=3.0, a1=0.01, a2=0.03)
        pump = PumpConfig(epsilon=0.9 * mp.rate_scale, delta=0.0)
        s = trivial_state(mp, pump)
        with pytest.raises(ValueError, match="balanced pair"):
            supermode_coeffs(mp, pump, s, 0.0)

    def test_balanced_approximation_symmetrizes(self):
        mp = mk_pair(a1=0.01, a2=0.01)
        pump = PumpConfig(epsilon=0.9, delta=0.05)
        s = driven_state(mp, pump, 0.7)
        fm = four_mode_bogoliubov(mp, pump, s, 0.3,
                                  balanced_approximation=True)
        d = fm.U @ fm.U.conj().T - fm.V @ fm.V.conj().T - np.eye(2)
        assert np.max(np.abs(d)) < 1e-10


class TestOscillatorChannels:
    def test_goldstone_zero_at_origin(self):
        mp = mk_pair(a1=1e-4, a2=1e-4)
        for eps in (2.0, 10.0):
            dp, dm = oscillator_determinants(mp, PumpConfig(epsilon=eps), 0.0)
            assert abs(dm) < 1e-12 * eps**2
            assert abs(dp) > 0.1

    def test_strong_pump_gain_asymptote(self):
        # far above threshold the anomalous (idler) channel gains follow an
        # inverse-quartic profile in the offset frequency, set entirely by
        # the soft phase direction of the oscillation
        mp = mk_pair(a1=1e-4, a2=1e-4)
        pump = PumpConfig(epsilon=10.0)
        osc = oscillation_state(mp, pump)
        s = osc.cavity_state(mp, pump)
        for D in (0.5, 1.0, 2.0):
            t = gain_spectrum(mp, pump, s, np.array([D]),
                              balanced_approximation=True)
            ref = (4.0 / 9.0) * pump.epsilon**2 / (D**2 * (D**2 + 4.0))
            assert t.G12_idler[0] == pytest.approx(ref, rel=0.05)
            assert t.G11_idler[0] == pytest.approx(ref, rel=0.05)


# ---------------------------------------------------------------------------
# near-threshold closed forms
# ---------------------------------------------------------------------------

class TestNearThresholdForms:
    def test_balanced_formula_and_phases(self):
        mp = mk_pair(a1=0.01, a2=0.01)
        pump = PumpConfig(epsilon=1.0, delta=0.0)
        thB = 0.35
        B1 = math.sqrt(0.1) * np.exp(1j * thB)
        r = near_threshold_asymptotics(mp, pump, B1)
        want = (math.sqrt(2.0) * abs(B1) / (9.0 * 0.01**2)) ** 0.2
        assert abs(r.A1) == pytest.approx(want, rel=1e-12)
        assert abs(r.A2) == pytest.approx(want, rel=1e-12)
        assert wrap_angle(np.angle(r.A1) - (thB - math.pi / 2)) == \
            pytest.approx(0.0, abs=1e-12)
        assert wrap_angle(np.angle(r.A2) - (math.pi - thB)) == \
            pytest.approx(0.0, abs=1e-12)
        assert r.G11 == pytest.approx(2.0 * want**2 / abs(B1) ** 2, rel=1e-12)

    def test_balanced_tracks_full_solve_in_window(self):
        mp = mk_pair(a1=0.01, a2=0.01)
        pump = PumpConfig(epsilon=1.0, delta=0.0)
        B1 = math.sqrt(0.1)
        pred = near_threshold_asymptotics(mp, pump, B1)
        s = driven_state(mp, pump, B1)
        assert abs(s.A1) == pytest.approx(abs(pred.A1), rel=0.05)
        assert abs(s.A2) == pytest.approx(abs(pred.A2), rel=0.05)

    def test_unbalanced_formula_value(self):
        mp = mk_pair(G2=3.0, a1=0.01, a2=0.03)
        pump = PumpConfig(epsilon=math.sqrt(3.0), delta=0.0)
        r = near_threshold_asymptotics(mp, pump, 1.0)
        want6 = 2.0 / (1.0 - 1.0 / 3.0) ** 2 * (1.0 / 0.01) ** 2
        assert abs(r.A1) ** 6 == pytest.approx(want6, rel=1e-12)
        assert abs(r.A2) ** 2 / abs(r.A1) ** 2 == pytest.approx(1.0 / 3.0,
                                                                rel=1e-12)

    def test_unbalanced_accuracy_improves_with_weaker_drive(self):
        # the closed form is the leading order of an expansion in
        # (a1 |B1|^2 / G1^2)^(1/3); its error must shrink with the drive
        mp = mk_pair(G2=3.0, a1=0.01, a2=0.03)
        pump = PumpConfig(epsilon=math.sqrt(3.0), delta=0.0)
        devs = []
        for B1sq in (1.0, 0.01):
            pred = near_threshold_asymptotics(mp, pump, math.sqrt(B1sq))
            s = driven_state(mp, pump, math.sqrt(B1sq))
            devs.append(abs(abs(s.A1) - abs(pred.A1)) / abs(s.A1))
        assert devs[1] < 0.3 * devs[0]
        assert devs[1] < 0.02

    def test_window_guards(self):
        mp = mk_pair(a1=0.01, a2=0.01)
        with pytest.raises(ValueError, match="window|strong"):
            near_threshold_asymptotics(mp, PumpConfig(epsilon=1.0), 40.0)
        with pytest.raises(ValueError, match="threshold"):
            near_threshold_asymptotics(mp, PumpConfig(epsilon=0.5), 0.3)
        with pytest.raises(ValueError, match="delta"):
            near_threshold_asymptotics(mp, PumpConfig(epsilon=1.0, delta=0.4),
                                       0.3)
        lossy = mk_pair(G10=0.7, G20=0.7, a1=0.01, a2=0.01)
        with pytest.raises(ValueError, match="lossless"):
            near_threshold_asymptotics(lossy, PumpConfig(epsilon=1.0), 0.3)


# ---------------------------------------------------------------------------
# phase locking of the free oscillation
# ---------------------------------------------------------------------------

class TestPhaseLock:
    def test_lock_angle_formula(self):
        mp = mk_pair(a1=1e-6, a2=1e-6)
        pump = PumpConfig(epsilon=1.2)
        thB = 0.6
        pl = phase_lock(mp, pump, 0.01 * np.exp(1j * thB))
        w = math.sqrt(1.2**2 - 1.0)
        Q = 2.0 * w / 3.0 + 1j
        Theta0 = math.atan2(1.0 / 1.2, -w / 1.2)
        want = wrap_angle(2.0 * thB - Theta0 - 2.0 * np.angle(Q))
        assert wrap_angle(pl.psi - want) == pytest.approx(0.0, abs=1e-12)

    def test_locked_output_is_contractive(self):
        # on resonance the locked response reflects less than unit power in
        # the antisymmetric channel: the oscillator absorbs the quadrature
        # that would otherwise diverge
        mp = mk_pair(a1=1e-6, a2=1e-6)
        for eps in (1.2, 2.0, 5.0):
            pl = phase_lock(mp, PumpConfig(epsilon=eps), 0.01)
            assert abs(pl.c_minus) < abs(pl.b_minus)
            zm = 2.0 * math.sqrt(eps**2 - 1.0) / 3.0
            want = abs(pl.b_minus) * zm / abs(pl.Q)
            assert abs(pl.c_minus) == pytest.approx(want, rel=1e-12)

    def test_free_phase_representative(self):
        mp = mk_pair(a1=1e-6, a2=1e-6)
        pl = phase_lock(mp, PumpConfig(epsilon=1.5), 0.0)
        assert pl.free_phase

    def test_driven_solve_realizes_the_lock(self):
        mp = mk_pair(a1=1e-6, a2=1e-6)
        pump = PumpConfig(epsilon=1.2)
        B1 = 0.01
        pl = phase_lock(mp, pump, B1)
        states = solve_steady_state(mp, pump, [DriveTone(1, B1, 0.0)])
        s = next(x for x in states if x.stability == "stable")
        psi = wrap_angle(np.angle(s.A1) - np.angle(s.A2))
        assert abs(wrap_angle(psi - pl.psi)) < 1e-4

    def test_requires_oscillation(self):
        mp = mk_pair(a1=1e-6, a2=1e-6)
        with pytest.raises(ValueError, match="oscillation|threshold"):
            phase_lock(mp, PumpConfig(epsilon=0.8), 0.01)


class TestRegularizedResponse:
    def test_locked_input_is_finite_on_resonance(self):
        mp = mk_pair(a1=1e-6, a2=1e-6)
        pump = PumpConfig(epsilon=1.5)
        pl = phase_lock(mp, pump, 0.01)
        b0 = pl.b_minus

        resp = regularized_detuned_response(
            mp, pump, lambda D: b0, np.array([0.0, 1e-6, 1e-4, 0.05]))
        assert resp.locked
        assert np.all(np.isfinite(np.abs(resp.c_minus)))
        # the on-resonance value is the continuous limit of the sideband
        # response; for a flat locked input on a lossless pair it vanishes
        assert abs(resp.c_minus[0]) == 0.0
        assert abs(resp.c_minus[1]) < 1e-8

    def test_locked_limit_keeps_internal_loss_fraction(self):
        mp = mk_pair(G10=0.6, G20=0.6, a1=1e-6, a2=1e-6)
        pump = PumpConfig(epsilon=1.5)
        pl = phase_lock(mp, pump, 0.01)
        resp = regularized_detuned_response(mp, pump, lambda D: pl.b_minus,
                                            np.array([0.0]))
        assert resp.locked
        want = pl.b_minus * (1.0 - 0.6 / 1.0)
        assert abs(resp.c_minus[0] - want) < 1e-12

    def test_unlocked_input_diverges(self):
        mp = mk_pair(a1=1e-6, a2=1e-6)
        pump = PumpConfig(epsilon=1.5)
        resp = regularized_detuned_response(mp, pump, lambda D: 0.01 + 0.0j,
                                            np.array([1e-6]))
        if resp.locked:
            pytest.skip("input accidentally satisfies the lock condition")
        assert abs(resp.c_minus[0]) > 1e3
