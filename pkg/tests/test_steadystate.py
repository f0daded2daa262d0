"""Steady states: instability threshold, free oscillation, driven solver,
branch sweeps."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from paramres import (
    DriveTone,
    PumpConfig,
    detuning_threshold,
    instability_threshold,
    oscillation_state,
    solve_steady_state,
    stability_of_state,
    sweep_branches,
    trivial_state,
)
from conftest import mk_pair
import oracles

rates = st.floats(min_value=0.05, max_value=20.0)
detunings = st.floats(min_value=-10.0, max_value=10.0)


# ---------------------------------------------------------------------------
# parametric instability threshold
# ---------------------------------------------------------------------------

class TestThreshold:
    def test_minimal_threshold_exact(self):
        mp = mk_pair(G1=0.7, G2=2.3)
        eps, Dc = instability_threshold(mp, 0.0)
        assert eps == math.sqrt(0.7 * 2.3)
        assert Dc == 0.0

    def test_against_eigenvalue_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            G1, G2 = rng.uniform(0.1, 5.0, 2)
            delta = rng.uniform(-4.0, 4.0)
            mp = mk_pair(G1=G1, G2=G2)
            eps, Dc = instability_threshold(mp, delta)
            eps_o, Dc_o = oracles.eig_threshold(G1, G2, delta)
            assert eps == pytest.approx(eps_o, rel=1e-8)
            assert Dc == pytest.approx(Dc_o, rel=1e-6, abs=1e-8)

    def test_oscillation_window(self):
        mp = mk_pair(G1=1.0, G2=3.0)
        gm = math.sqrt(3.0)
        assert detuning_threshold(mp, 0.9 * gm) is None
        dth = detuning_threshold(mp, 2.0 * gm)
        assert dth is not None and dth > 0
        # the window edge reproduces the threshold curve
        eps_edge, _ = instability_threshold(mp, dth)
        assert eps_edge == pytest.approx(2.0 * gm, rel=1e-12)

    def test_window_width_example(self):
        # at twice the minimal pump and a 1:3 linewidth split the window
        # half-width is about 2 in geometric-mean units
        mp = mk_pair(G1=1.0, G2=3.0)
        gm = math.sqrt(3.0)
        dth = detuning_threshold(mp, 2.0 * gm)
        assert dth == pytest.approx((1.0 + 3.0) / (2.0 * gm)
                                    * math.sqrt(4.0 * gm**2 - gm**2), rel=1e-12)
        assert dth / gm == pytest.approx(2.0, rel=1e-12)

    @given(rates, rates, detunings)
    def test_property_threshold_grows_with_detuning(self, G1, G2, delta):
        mp = mk_pair(G1=G1, G2=G2)
        eps0, _ = instability_threshold(mp, 0.0)
        eps, Dc = instability_threshold(mp, delta)
        assert eps >= eps0 - 1e-12
        # the critical fluctuation frequency is odd in the pump detuning
        eps_m, Dc_m = instability_threshold(mp, -delta)
        assert eps_m == pytest.approx(eps, rel=1e-12)
        assert Dc_m == pytest.approx(-Dc, rel=1e-12, abs=1e-15)


# ---------------------------------------------------------------------------
# free-running oscillation
# ---------------------------------------------------------------------------

class TestOscillation:
    def test_residual_and_ratios_random(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            G1, G2 = rng.uniform(0.1, 4.0, 2)
            gm = math.sqrt(G1 * G2)
            eps = gm * rng.uniform(1.05, 3.0)
            dth = (G1 + G2) / (2 * gm) * math.sqrt(eps**2 - gm**2)
            delta = rng.uniform(-2.0, 1.0) * dth - 0.05 * gm
            a1 = rng.uniform(1e-4, 1e-2) * gm
            mp = mk_pair(G1=G1, G2=G2, a1=a1, a2=a1 * rng.uniform(0.5, 2))
            pump = PumpConfig(epsilon=eps, delta=delta)
            osc = oscillation_state(mp, pump)
            res = oracles.ring_residual(mp, pump, osc.r1, osc.r2, osc.Theta,
                                        osc.Delta0, psi=rng.uniform(0, 4 * math.pi))
            scale = max(eps, gm) * max(osc.r1, osc.r2)
            assert res < 1e-10 * scale
            assert (osc.r2 / osc.r1) ** 2 == pytest.approx(G1 / G2, rel=1e-10)
            assert math.sin(osc.Theta) == pytest.approx(gm / eps, rel=1e-10)

    def test_branch_existence(self):
        mp = mk_pair(a1=1e-3, a2=1e-3)
        pump = PumpConfig(epsilon=2.0, delta=0.0)
        osc = oscillation_state(mp, pump)
        assert osc.branch == "stable"
        # at zero pump detuning the unstable ring needs delta < -delta_th
        with pytest.raises(ValueError):
            oscillation_state(mp, pump, branch="unstable")
        dth = detuning_threshold(mp, 2.0)
        pump_red = PumpConfig(epsilon=2.0, delta=-1.2 * dth)
        u = oscillation_state(mp, pump_red, branch="unstable")
        assert u.r1 > 0

    def test_below_threshold_raises(self):
        mp = mk_pair(a1=1e-3, a2=1e-3)
        with pytest.raises(ValueError):
            oscillation_state(mp, PumpConfig(epsilon=0.5))

    def test_zero_kerr_raises(self):
        with pytest.raises(ValueError):
            oscillation_state(mk_pair(), PumpConfig(epsilon=2.0))

    def test_ring_is_marginal_with_one_neutral_direction(self):
        mp = mk_pair(a1=1e-3, a2=1e-3)
        pump = PumpConfig(epsilon=1.5, delta=0.0)
        osc = oscillation_state(mp, pump)
        st_ = osc.cavity_state(mp, pump)
        assert st_.free_phase
        assert st_.stability == "marginal"
        rates_ = np.sort(st_.growth_rates.real)
        # exactly one neutral direction (the free phase), others decaying
        assert abs(rates_[-1]) < 1e-9 * mp.rate_scale
        assert rates_[-2] < -1e-6 * mp.rate_scale

    def test_oscillation_frame_detuning(self):
        # for a balanced pair at zero pump detuning the oscillation sits at
        # the frame origin; a linewidth split pulls it off
        mpb = mk_pair(a1=1e-3, a2=1e-3)
        assert oscillation_state(mpb, PumpConfig(epsilon=1.5)).Delta0 == \
            pytest.approx(0.0, abs=1e-15)
        mpu = mk_pair(G2=3.0, a1=1e-3, a2=3e-3)
        osc = oscillation_state(mpu, PumpConfig(epsilon=2.0))
        assert osc.Delta0 != 0.0


# ---------------------------------------------------------------------------
# driven steady states
# ---------------------------------------------------------------------------

class TestDrivenStates:
    def test_linear_limit_matches_closed_form(self):
        mp = mk_pair(G1=0.8, G2=2.5)
        pump = PumpConfig(epsilon=0.6, delta=0.3)
        B1 = 0.02 * np.exp(0.4j)
        states = solve_steady_state(mp, pump, [DriveTone(1, B1, 0.0)])
        assert len(states) == 1
        s = states[0]
        # invert the 2x2 Kerr-free system directly
        D = (0.3 + 0.8j) * (0.3 - 2.5j) - 0.36
        A1 = math.sqrt(2 * 0.8) * B1 * (0.3 - 2.5j) / D
        A2 = np.conj(-0.6 * A1 / (0.3 - 2.5j))
        assert s.A1 == pytest.approx(A1, rel=1e-10)
        assert s.A2 == pytest.approx(A2, rel=1e-10)
        assert s.stability == "stable"

    def test_multistable_duffing_point(self):
        # strong resonant drive on a red-shifted Kerr resonance: the classic
        # three-root fold, exactly one of them stable on the high branch
        mp = mk_pair(a1=0.01, a2=0.01)
        pump = PumpConfig(epsilon=1.5, delta=0.0)
        states = solve_steady_state(mp, pump,
                                    [DriveTone(1, math.sqrt(2.0), 0.0)])
        n1 = sorted(abs(s.A1) ** 2 for s in states)
        assert len(states) == 3
        # photon numbers frozen from the bracketing oracle (oracles.py)
        assert n1 == pytest.approx([2.659171266942, 24.309128902006,
                                    49.043894015711], rel=1e-9)
        labels = [s.stability for s in
                  sorted(states, key=lambda s: -abs(s.A1) ** 2)]
        assert labels == ["stable", "unstable", "unstable"]

    def test_states_sorted_and_converged(self):
        mp = mk_pair(a1=0.01, a2=0.01)
        pump = PumpConfig(epsilon=1.5, delta=0.0)
        states = solve_steady_state(mp, pump, [DriveTone(1, 1.4, 0.0)])
        mags = [abs(s.A1) ** 2 for s in states]
        assert mags == sorted(mags, reverse=True)
        for s in states:
            assert s.residual < 1e-8

    def test_matches_photon_number_oracle(self):
        mp = mk_pair(G2=3.0, a1=0.01, a2=0.03)
        pump = PumpConfig(epsilon=math.sqrt(3.0), delta=0.0)
        states = solve_steady_state(mp, pump, [DriveTone(1, 1.0, 0.0)])
        roots = oracles.driven_photon_roots(1.0, 3.0, 1.0, 0.01, 0.03,
                                            math.sqrt(3e-4), math.sqrt(3.0), 1.0)
        assert len(states) == len(roots)
        for s, (n1, n2) in zip(states, sorted(roots, reverse=True)):
            assert abs(s.A1) ** 2 == pytest.approx(n1, rel=1e-9)
            assert abs(s.A2) ** 2 == pytest.approx(n2, rel=1e-9)

    def test_stable_state_attracts_flow(self):
        mp = mk_pair(a1=0.01, a2=0.01)
        pump = PumpConfig(epsilon=1.5, delta=0.0)
        drives = [DriveTone(1, math.sqrt(2.0), 0.0)]
        states = solve_steady_state(mp, pump, drives)
        s = next(x for x in states if x.stability == "stable")
        z0 = (s.A1 * 1.02, s.A2 * 0.98)
        A1f, A2f = oracles.relax_flow(mp, pump, drives, z0, t_final=60.0)
        assert abs(A1f - s.A1) < 1e-6 * abs(s.A1)
        assert abs(A2f - s.A2) < 1e-6 * abs(s.A2)

    def test_unstable_state_repels_flow(self):
        mp = mk_pair(a1=0.01, a2=0.01)
        pump = PumpConfig(epsilon=1.5, delta=0.0)
        drives = [DriveTone(1, math.sqrt(2.0), 0.0)]
        states = solve_steady_state(mp, pump, drives)
        mid = sorted(states, key=lambda s: abs(s.A1) ** 2)[1]
        assert mid.stability == "unstable"
        z0 = (mid.A1 * 1.01, mid.A2)
        A1f, _ = oracles.relax_flow(mp, pump, drives, z0, t_final=60.0)
        assert abs(A1f - mid.A1) > 0.1 * abs(mid.A1)

    def test_above_threshold_zero_kerr_has_no_steady_state(self):
        mp = mk_pair()
        pump = PumpConfig(epsilon=1.5, delta=0.0)
        with pytest.raises(ValueError, match="threshold"):
            solve_steady_state(mp, pump, [DriveTone(1, 0.1, 0.0)])

    def test_mixed_detunings_rejected(self):
        mp = mk_pair()
        with pytest.raises(ValueError):
            solve_steady_state(mp, PumpConfig(epsilon=0.5),
                               [DriveTone(1, 0.1, 0.0),
                                DriveTone(2, 0.1, 0.5)])

    def test_empty_drive_below_threshold_gives_vacuum(self):
        mp = mk_pair()
        states = solve_steady_state(mp, PumpConfig(epsilon=0.5), [])
        assert len(states) == 1
        assert states[0].A1 == 0 and states[0].A2 == 0
        assert states[0].stability == "stable"

    def test_trivial_state_stability_tracks_threshold(self):
        mp = mk_pair()
        assert trivial_state(mp, PumpConfig(epsilon=0.99)).stability == "stable"
        assert trivial_state(mp, PumpConfig(epsilon=1.01)).stability == "unstable"

    @given(st.floats(min_value=0.05, max_value=0.9),
           st.floats(min_value=-2.0, max_value=2.0),
           st.floats(min_value=0.0, max_value=1.5))
    @settings(max_examples=25)
    def test_property_below_threshold_single_stable_state(self, eps_frac,
                                                          delta, phase):
        mp = mk_pair(G1=1.0, G2=2.0, a1=1e-3, a2=2e-3)
        eps_th, _ = instability_threshold(mp, delta)
        pump = PumpConfig(epsilon=eps_frac * eps_th, delta=delta)
        B1 = 0.05 * np.exp(1j * phase)
        states = solve_steady_state(mp, pump, [DriveTone(1, B1, 0.0)])
        assert len(states) >= 1
        assert states[0].stability == "stable"
        assert states[0].residual < 1e-8


# ---------------------------------------------------------------------------
# stability relabeling helper
# ---------------------------------------------------------------------------

class TestStabilityOfState:
    def test_relabel_is_consistent(self):
        mp = mk_pair(a1=0.01, a2=0.01)
        pump = PumpConfig(epsilon=1.5, delta=0.0)
        states = solve_steady_state(mp, pump, [DriveTone(1, 1.4, 0.0)])
        for s in states:
            label, growth = stability_of_state(mp, pump, s)
            assert label == s.stability
            assert np.allclose(np.sort(growth.real),
                               np.sort(s.growth_rates.real))


# ---------------------------------------------------------------------------
# swept branches
# ---------------------------------------------------------------------------

class TestSweep:
    def test_duffing_fold_below_threshold(self):
        # just below threshold the resonance is a folded Duffing lobe:
        # three branches between the fold points, one of them stable
        mp = mk_pair(a1=0.01, a2=0.01)
        pump = PumpConfig(epsilon=0.95, delta=0.0)
        grid = np.linspace(-3.0, 1.5, 181)
        table = sweep_branches(mp, pump, [DriveTone(1, math.sqrt(2.0), 0.0)],
                               axis="delta", grid=grid)
        assert table.axis == "delta"
        n_states = [sum(1 for r in table.rows if r.axis_value == g)
                    for g in grid]
        assert max(n_states) == 3
        assert min(n_states) == 1
        assert len(table.folds) >= 1
        # every grid point keeps at least one stable state
        for g in grid:
            labels = [r.stability for r in table.rows if r.axis_value == g]
            assert "stable" in labels

    def test_sweep_reuses_branch_ids(self):
        mp = mk_pair(a1=0.01, a2=0.01)
        pump = PumpConfig(epsilon=0.5, delta=0.0)
        grid = np.linspace(-0.5, 0.5, 21)
        table = sweep_branches(mp, pump, [DriveTone(1, 0.1, 0.0)],
                               axis="delta", grid=grid)
        ids = {r.branch for r in table.rows}
        assert ids == {0}

    def test_oscillator_frame_below_threshold(self):
        # unbalanced pair below threshold: the tone is pinned at the
        # constant frame detuning the oscillator would have at the window
        # edge, and the sweep must stay defined everywhere
        mp = mk_pair(G2=3.0, a1=math.sqrt(3) / 100, a2=3 * math.sqrt(3) / 100)
        gm = mp.rate_scale
        pump = PumpConfig(epsilon=0.95 * gm, delta=0.0)
        grid = np.linspace(-3.0, 1.0, 41) * gm
        table = sweep_branches(mp, pump,
                               [DriveTone(1, math.sqrt(2.0 * gm), 0.0)],
                               axis="delta", grid=grid,
                               drive_frame="oscillator")
        assert len(table.rows) >= len(grid)

    def test_epsilon_axis(self):
        mp = mk_pair(a1=0.01, a2=0.01)
        pump = PumpConfig(epsilon=0.5, delta=-0.4)
        grid = np.linspace(0.1, 0.9, 17)
        table = sweep_branches(mp, pump, [DriveTone(1, 0.2, 0.0)],
                               axis="epsilon", grid=grid)
        assert {r.axis_value for r in table.rows} == set(grid)
