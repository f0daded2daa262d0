"""Steady states of the driven two-mode cavity at parametric resonance.

The pump modulates the boundary inductance near the sum frequency of the two
modes (amplification regime).  In the co-rotating frame the dynamics of the
complex amplitudes (A1, A2) reduces to a pair of coupled cubic algebraic
equations whose solutions this module enumerates and classifies:

* the parametric instability threshold of the empty cavity and the detuning
  window of self-oscillation,
* the free-running oscillation states (a continuous ring with one free phase,
  reported through a representative with an explicit free-phase flag),
* driven steady states under coherent tones, found by a multi-start damped
  Newton iteration with an analytic Jacobian (the system is multistable:
  up to two pairs of high-amplitude branches coexist with a low branch),
* linear-stability labels from the eigenvalues of the linearized flow,
* branch-connected parameter sweeps for reproducing response curves.

Conventions.  The pump sits at twice the average mode frequency plus 2*delta;
delta is the common detuning both modes inherit in the rotating frame.  A
strong tone on mode 1 at frame detuning Delta_S has its idler partner on mode
2 at -Delta_S.  Input amplitudes B are in sqrt(photon flux); intracavity
amplitudes A in sqrt(photons); every output amplitude follows
C_n = B_n - i sqrt(2 Gamma_n0) A_n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._numerics import newton_complex, realify_jacobian, wrap_angle
from ._tables import write_csv
from .device import ModePair

__all__ = [
    "PumpConfig",
    "DriveTone",
    "CavityState",
    "OscillationState",
    "BranchTable",
    "instability_threshold",
    "detuning_threshold",
    "oscillation_state",
    "trivial_state",
    "solve_steady_state",
    "stability_of_state",
    "sweep_branches",
]


@dataclass(frozen=True)
class PumpConfig:
    """Flux-pump settings.

    epsilon: parametric coupling rate (rad/s), non-negative.
    delta: pump half-detuning (rad/s); the pump frequency is offset from the
        relevant combination of mode frequencies by 2*delta.
    regime: "amplification" (pump near the sum frequency) or "conversion"
        (pump near the difference frequency).
    """

    epsilon: float
    delta: float = 0.0
    regime: str = "amplification"

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("pump strength epsilon must be non-negative")
        if self.regime not in ("amplification", "conversion"):
            raise ValueError(f"unknown pump regime {self.regime!r}")


@dataclass(frozen=True)
class DriveTone:
    """One coherent input tone.

    mode: 1 or 2.
    amplitude: complex amplitude B in sqrt(photon flux) = sqrt(rad/s).
    detuning: frame detuning Delta (rad/s).  In the amplification regime a
        mode-1 tone at detuning Delta sits at omega1 + delta + Delta in the
        lab and its stationary idler partner on mode 2 at omega2 + delta -
        Delta; all tones passed to one solve must share the same Delta.
    """

    mode: int
    amplitude: complex
    detuning: float = 0.0

    def __post_init__(self):
        if self.mode not in (1, 2):
            raise ValueError("drive mode must be 1 or 2")

    @property
    def theta_B(self) -> float:
        """Phase of the drive amplitude (radians)."""
        return math.atan2(complex(self.amplitude).imag, complex(self.amplitude).real)


@dataclass
class CavityState:
    """One steady state of the driven cavity.

    A1, A2: complex amplitudes (sqrt photons) in the rotating frame.
    Delta_S: frame detuning (rad/s) of the strong field this state belongs to.
    zeta1, zeta2: effective (Kerr-shifted) detunings at this state, rad/s.
    stability: "stable", "unstable" or "marginal" (one neutral direction —
        the free phase of a self-oscillation).
    residual: max-norm of the steady-state equations at (A1, A2).
    free_phase: True when the state represents a continuous family whose
        overall phase split psi = arg A1 - arg A2 is arbitrary; the stored
        amplitudes then use the psi = 0 representative.
    """

    A1: complex
    A2: complex
    Delta_S: float
    zeta1: float
    zeta2: float
    stability: str
    residual: float
    free_phase: bool = False
    growth_rates: Optional[np.ndarray] = None


@dataclass
class OscillationState:
    """Free-running parametric oscillation above threshold.

    r1, r2: field moduli (sqrt photons); r2^2/r1^2 = Gamma1/Gamma2.
    Theta: sum of the two mode phases (radians); fixed by the pump.
    Delta0: frequency offset (rad/s) of the emitted fields from the rotating
        frame — mode 1 radiates at omega1 + delta + Delta0, mode 2 at
        omega2 + delta - Delta0.
    branch: "stable" or "unstable".
    psi: the reported representative of the free phase difference.
    """

    r1: float
    r2: float
    Theta: float
    Delta0: float
    branch: str
    psi: float = 0.0
    free_phase: bool = True

    def amplitudes(self, psi: Optional[float] = None) -> Tuple[complex, complex]:
        """Complex amplitudes of the ring member with phase difference psi."""
        p = self.psi if psi is None else psi
        return (
            self.r1 * np.exp(0.5j * (self.Theta + p)),
            self.r2 * np.exp(0.5j * (self.Theta - p)),
        )

    def cavity_state(self, mode_pair: ModePair, pump: "PumpConfig",
                     psi: Optional[float] = None) -> CavityState:
        """Package one ring member as a CavityState (frame at Delta0)."""
        A1, A2 = self.amplitudes(psi)
        z1, z2 = _zetas(mode_pair, pump, A1, A2)
        F = _amp_residual(mode_pair, pump, self.Delta0, 0.0, 0.0, A1, A2)
        res = float(np.max(np.abs(F)))
        label, rates = stability_of_state(
            mode_pair,
            pump,
            CavityState(A1, A2, self.Delta0, z1, z2, "unknown", res),
        )
        return CavityState(
            A1=complex(A1),
            A2=complex(A2),
            Delta_S=self.Delta0,
            zeta1=z1,
            zeta2=z2,
            stability=label,
            residual=res,
            free_phase=True,
            growth_rates=rates,
        )


# ---------------------------------------------------------------------------
# thresholds and the free oscillation
# ---------------------------------------------------------------------------

def instability_threshold(mode_pair: ModePair, delta: float) -> Tuple[float, float]:
    """Pump strength at which the empty cavity destabilizes, and the frame
    detuning of the critical fluctuation.

    Returns (epsilon_th, Delta_crit).  The threshold is minimal at zero pump
    detuning, where epsilon_th = sqrt(Gamma1*Gamma2); for unequal linewidths
    the critical fluctuation sits at a finite frequency offset
    Delta_crit = delta (Gamma1-Gamma2)/(Gamma1+Gamma2).
    """
    G1, G2 = mode_pair.Gamma1, mode_pair.Gamma2
    if G1 <= 0 or G2 <= 0:
        raise ValueError("damping rates must be positive")
    ratio = (G1 - G2) / (G1 + G2)
    eps_th = math.sqrt(G1 * G2 + delta**2 * (1.0 - ratio**2))
    return eps_th, delta * ratio


def detuning_threshold(mode_pair: ModePair, epsilon: float) -> Optional[float]:
    """Half-width delta_th of the self-oscillation window at pump strength
    epsilon: the empty cavity is unstable for |delta| < delta_th.  Returns
    None below the minimal threshold sqrt(Gamma1*Gamma2)."""
    G1, G2 = mode_pair.Gamma1, mode_pair.Gamma2
    gm2 = G1 * G2
    if epsilon**2 < gm2:
        return None
    return (G1 + G2) / (2.0 * math.sqrt(gm2)) * math.sqrt(epsilon**2 - gm2)


def oscillation_state(
    mode_pair: ModePair, pump: PumpConfig, branch: str = "stable"
) -> OscillationState:
    """Free-running oscillation state above the parametric threshold.

    The stable branch exists for delta < delta_th, the unstable one for
    delta < -delta_th (where it separates the oscillation basin from the
    still-stable trivial state).  Raises if the requested branch does not
    exist at these parameters.
    """
    if pump.regime != "amplification":
        raise ValueError("self-oscillation requires the amplification regime")
    if branch not in ("stable", "unstable"):
        raise ValueError("branch must be 'stable' or 'unstable'")
    G1, G2 = mode_pair.Gamma1, mode_pair.Gamma2
    a1, a2, a = mode_pair.alpha1, mode_pair.alpha2, mode_pair.alpha
    eps, delta = pump.epsilon, pump.delta
    gm = mode_pair.rate_scale
    if eps <= gm:
        raise ValueError(
            f"pump epsilon={eps:.6g} at or below the minimal threshold {gm:.6g}; "
            "no self-oscillation"
        )
    if a1 == 0.0 and a2 == 0.0:
        raise ValueError("vanishing Kerr nonlinearity cannot saturate the oscillation")
    dth = detuning_threshold(mode_pair, eps)
    denom = a1 * G2 + a2 * G1 + 2.0 * a * (G1 + G2)
    sign = 1.0 if branch == "stable" else -1.0
    r1sq = 2.0 * (-delta + sign * dth) * G2 / denom
    if r1sq <= 0.0:
        raise ValueError(
            f"the {branch} oscillation branch does not exist at delta={delta:.6g} "
            f"(needs delta < {sign * dth:.6g})"
        )
    r2sq = r1sq * G1 / G2
    sinT = gm / eps
    cosT = -sign * math.sqrt(max(eps**2 - gm**2, 0.0)) / eps
    Theta = math.atan2(sinT, cosT)
    z1 = delta + a1 * r1sq + 2.0 * a * r2sq
    z2 = delta + a2 * r2sq + 2.0 * a * r1sq
    Delta0 = (G1 * z2 - G2 * z1) / (G1 + G2)
    return OscillationState(
        r1=math.sqrt(r1sq),
        r2=math.sqrt(r2sq),
        Theta=Theta,
        Delta0=Delta0,
        branch=branch,
    )


# ---------------------------------------------------------------------------
# the static system and its linearization
# ---------------------------------------------------------------------------

def _zetas(mode_pair: ModePair, pump: PumpConfig, A1, A2) -> Tuple[float, float]:
    """Effective detunings including self- and cross-Kerr shifts."""
    n1 = abs(A1) ** 2
    n2 = abs(A2) ** 2
    z1 = pump.delta + mode_pair.alpha1 * n1 + 2.0 * mode_pair.alpha * n2
    z2 = pump.delta + mode_pair.alpha2 * n2 + 2.0 * mode_pair.alpha * n1
    return z1, z2


def _amp_residual(mode_pair, pump, Delta_S, B1, B2, A1, A2) -> np.ndarray:
    """Residual of the static equations, written as the pair of equations for
    (A1, A2).  The flow is d/dt (A1, A2) = i * F, so F = 0 at any fixed point
    and the same Wirtinger blocks serve the Newton step and the stability
    matrix."""
    G1, G2 = mode_pair.Gamma1, mode_pair.Gamma2
    k1 = math.sqrt(2.0 * mode_pair.Gamma10)
    k2 = math.sqrt(2.0 * mode_pair.Gamma20)
    z1, z2 = _zetas(mode_pair, pump, A1, A2)
    e = pump.epsilon
    F1 = (Delta_S + z1 + 1j * G1) * A1 + e * np.conj(A2) - k1 * B1
    F2 = (-Delta_S + z2 + 1j * G2) * A2 + e * np.conj(A1) - k2 * B2
    return np.array([F1, F2])


def _amp_blocks(mode_pair, pump, Delta_S, A1, A2) -> Tuple[np.ndarray, np.ndarray]:
    """Wirtinger blocks (P, Q) = (dF/dA, dF/d conj A) of the static system.

    P coincides with the fluctuation coupling matrix at zero sideband offset
    and Q with the anomalous (pair-creating) coupling matrix.
    """
    a1, a2, a = mode_pair.alpha1, mode_pair.alpha2, mode_pair.alpha
    G1, G2 = mode_pair.Gamma1, mode_pair.Gamma2
    z1, z2 = _zetas(mode_pair, pump, A1, A2)
    e = pump.epsilon
    P = np.array(
        [
            [Delta_S + z1 + 1j * G1 + a1 * abs(A1) ** 2, 2.0 * a * A1 * np.conj(A2)],
            [2.0 * a * np.conj(A1) * A2, -Delta_S + z2 + 1j * G2 + a2 * abs(A2) ** 2],
        ]
    )
    Q = np.array(
        [
            [a1 * A1**2, e + 2.0 * a * A1 * A2],
            [e + 2.0 * a * A1 * A2, a2 * A2**2],
        ]
    )
    return P, Q


def fluctuation_matrices(
    mode_pair: ModePair, pump: PumpConfig, state: CavityState, Delta: float
):
    """Sideband coupling matrices of fluctuations about a steady state.

    Returns (T, E): T couples the fluctuation amplitudes (a1, a2) at sideband
    offset Delta to themselves (Kerr-renormalized detunings on the diagonal,
    cross-Kerr beam-splitter coupling off it); E couples them to the
    conjugates at -Delta (self-Kerr pair terms on the diagonal, the
    pump-plus-cross-Kerr pair coupling off it, symmetric).
    """
    P, Q = _amp_blocks(mode_pair, pump, state.Delta_S, state.A1, state.A2)
    T = P + Delta * np.eye(2)
    return T, Q


def stability_of_state(
    mode_pair: ModePair, pump: PumpConfig, state: CavityState
) -> Tuple[str, np.ndarray]:
    """Linear stability of a steady state.

    Returns ``(label, rates)`` where rates are the four eigenvalues of the
    realified linearized flow; their real parts are the growth rates.  A state
    is stable when every growth rate is below -tol, unstable when any exceeds
    +tol, and marginal when a rate sits within +-tol of zero (the free phase
    of a self-oscillation produces exactly one such neutral direction).
    tol = 1e-9 sqrt(Gamma1*Gamma2).
    """
    P, Q = _amp_blocks(mode_pair, pump, state.Delta_S, state.A1, state.A2)
    J = realify_jacobian(1j * P, 1j * Q)
    rates = np.linalg.eigvals(J)
    tol = 1e-9 * mode_pair.rate_scale
    growth = rates.real
    if np.any(growth > tol):
        label = "unstable"
    elif np.any(np.abs(growth) <= tol):
        label = "marginal"
    else:
        label = "stable"
    return label, rates


# ---------------------------------------------------------------------------
# driven steady states
# ---------------------------------------------------------------------------

def trivial_state(
    mode_pair: ModePair, pump: PumpConfig, Delta_S: float = 0.0
) -> CavityState:
    """The empty-cavity state A = 0, stability-labelled."""
    st = CavityState(
        A1=0j, A2=0j, Delta_S=Delta_S, zeta1=pump.delta, zeta2=pump.delta,
        stability="unknown", residual=0.0,
    )
    st.stability, st.growth_rates = stability_of_state(mode_pair, pump, st)
    return st


def _collect_drives(drives: Sequence[DriveTone]) -> Tuple[complex, complex, float]:
    B1 = 0j
    B2 = 0j
    det: Optional[float] = None
    for d in drives:
        if det is None:
            det = float(d.detuning)
        elif float(d.detuning) != det:
            raise ValueError(
                "all drive tones must share one frame detuning; got "
                f"{d.detuning} after {det}"
            )
        if d.mode == 1:
            B1 += complex(d.amplitude)
        else:
            B2 += complex(d.amplitude)
    return B1, B2, 0.0 if det is None else det


def _linear_seed(mode_pair, pump, Delta_S, B1, B2) -> np.ndarray:
    """Kerr-free driven amplitudes; the universal first Newton seed."""
    G1, G2 = mode_pair.Gamma1, mode_pair.Gamma2
    d = pump.delta
    e = pump.epsilon
    M = np.array(
        [
            [Delta_S + d + 1j * G1, e],
            [e, -Delta_S + d - 1j * G2],
        ]
    )
    rhs = np.array(
        [
            math.sqrt(2.0 * mode_pair.Gamma10) * B1,
            math.sqrt(2.0 * mode_pair.Gamma20) * np.conj(B2),
        ]
    )
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    scale = max(abs(M[0, 0]), abs(M[1, 1]), e, 1e-300)
    if abs(det) < 1e-10 * scale**2:
        # at the linear-response pole: seed with a capped amplitude instead
        amp = (abs(rhs[0]) + abs(rhs[1])) / max(G1, G2)
        return np.array([amp, amp * 1j])
    sol = np.linalg.solve(M, rhs)
    return np.array([sol[0], np.conj(sol[1])])


def solve_steady_state(
    mode_pair: ModePair,
    pump: PumpConfig,
    drives: Sequence[DriveTone],
    extra_seeds: Sequence[np.ndarray] = (),
) -> List[CavityState]:
    """All steady states of the driven cavity at one parameter point.

    Solves the coupled cubic static equations by damped Newton iteration from
    a battery of seeds — the Kerr-free linear solution and rescaled copies of
    it, members of the free-oscillation ring(s) when above threshold, any
    caller-provided continuation seeds, and a deterministic cloud of random
    starts — then deduplicates, labels stability, and sorts by |A1|^2
    descending.

    Without drives the list contains the trivial state plus one
    representative per existing oscillation branch (free-phase flagged).

    Above threshold (|delta| < delta_th) a weak drive detuned from the
    oscillator emission frequency Delta0 produces a beating, non-stationary
    response; such solves are refused.
    """
    if pump.regime != "amplification":
        raise ValueError(
            "solve_steady_state handles the amplification regime; "
            "use paramres.conversion for difference-frequency pumping"
        )
    B1, B2, Delta_S = _collect_drives(drives)
    gm = mode_pair.rate_scale
    eps_th, _ = instability_threshold(mode_pair, pump.delta)
    above = pump.epsilon > eps_th
    driven = (B1 != 0) or (B2 != 0)

    states: List[CavityState] = []

    ring_states: List[OscillationState] = []
    if pump.epsilon > gm:
        for branch in ("stable", "unstable"):
            try:
                ring_states.append(oscillation_state(mode_pair, pump, branch))
            except ValueError:
                pass

    if not driven:
        states = [osc.cavity_state(mode_pair, pump) for osc in ring_states]
        states.append(trivial_state(mode_pair, pump, Delta_S))
        states.sort(key=lambda s: -abs(s.A1) ** 2)
        return states

    if above:
        osc = next((o for o in ring_states if o.branch == "stable"), None)
        if osc is None:
            raise ValueError(
                "pump is above threshold but no oscillation state exists to "
                "saturate the instability (zero Kerr coefficients?); the "
                "driven cavity has no steady state here"
            )
        if abs(Delta_S - osc.Delta0) > 1e-6 * gm:
            raise ValueError(
                "above threshold the driven response is stationary only for "
                f"tones at the oscillator frequency (frame detuning {osc.Delta0:.9g}); "
                f"got Delta = {Delta_S:.9g}.  Detuned weak tones beat against the "
                "free oscillation; use the linearized response instead."
            )

    def fun(z):
        return _amp_residual(mode_pair, pump, Delta_S, B1, B2, z[0], z[1])

    def jac(z):
        return _amp_blocks(mode_pair, pump, Delta_S, z[0], z[1])

    # --- seed battery -----------------------------------------------------
    seeds: List[np.ndarray] = []
    lin = _linear_seed(mode_pair, pump, Delta_S, B1, B2)
    seeds.append(lin)
    for s in (0.3, 3.0):
        seeds.append(lin * s)
    for osc in ring_states:
        # On the free ring the phase-difference direction is an exact zero
        # mode of the Jacobian (|F| is flat around the ring at k|B|), so
        # Newton started at an arbitrary phase crawls.  The locked phases are
        # where the drive satisfies the solvability condition: the residual's
        # projection onto the Jacobian's left null vector changes sign there.
        # The half-angle split in amplitudes() means the manifold closes only
        # after a 4*pi sweep (psi and psi + 2*pi are distinct sign-flipped
        # members), so scan the full period to catch both locked phases.
        fan = np.linspace(0.0, 4.0 * math.pi, 128, endpoint=False)
        dp = fan[1] - fan[0]
        g = np.empty(fan.size)
        n_prev = None
        for j, p in enumerate(fan):
            z = np.asarray(osc.amplitudes(p))
            J = realify_jacobian(*jac(z))
            n = np.linalg.svd(J)[0][:, -1]
            if n_prev is not None and float(n @ n_prev) < 0.0:
                n = -n  # keep the null-vector orientation continuous
            n_prev = n
            F = np.asarray(fun(z), dtype=complex).ravel()
            Fr = np.empty(2 * F.size)
            Fr[0::2] = F.real
            Fr[1::2] = F.imag
            g[j] = float(n @ Fr)
        for j in range(fan.size):
            k = (j + 1) % fan.size
            if g[j] == 0.0 or g[j] * g[k] < 0.0:
                frac = g[j] / (g[j] - g[k]) if g[j] != g[k] else 0.0
                seeds.append(np.asarray(osc.amplitudes(fan[j] + frac * dp)))
    seeds.extend(np.asarray(s, dtype=complex).ravel() for s in extra_seeds)
    # the high Duffing branch saturates where the Kerr shifts balance the
    # detuning/pump scale, far above the linear response — seed there too
    alpha_eff = max(
        mode_pair.alpha1 + 2.0 * mode_pair.alpha, mode_pair.alpha2 + 2.0 * mode_pair.alpha
    )
    r_kerr = 0.0
    if alpha_eff > 0.0:
        r_kerr = math.sqrt(
            max(mode_pair.Gamma1, mode_pair.Gamma2, abs(pump.delta) + abs(Delta_S), pump.epsilon)
            / alpha_eff
        )
        u = lin / max(float(np.max(np.abs(lin))), 1e-300)
        for s in (0.5, 1.0, 2.0):
            for rot in (1.0, 1.0j, -1.0, -1.0j):
                seeds.append(r_kerr * s * rot * u)
    rng = np.random.default_rng(0x5EED)
    amp_scale = max(
        float(np.max(np.abs(lin))),
        max((o.r1 for o in ring_states), default=0.0),
        (abs(B1) + abs(B2)) / gm,
        r_kerr,
    )
    for _ in range(6):
        z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        seeds.append(amp_scale * z)

    # --- Newton from every seed -------------------------------------------
    drive_scale = max(
        math.sqrt(2.0 * mode_pair.Gamma10) * abs(B1),
        math.sqrt(2.0 * mode_pair.Gamma20) * abs(B2),
        gm * max(amp_scale, 1.0),
    )
    newton_tol = 1e-12 * drive_scale

    found: List[np.ndarray] = []
    for seed in seeds:
        # a seed sitting on top of a known root lands back on it — skip
        if any(
            np.max(np.abs(seed - z)) < 0.15 * max(float(np.max(np.abs(z))), 1e-12)
            for z in found
        ):
            continue
        res = newton_complex(fun, jac, seed, tol=newton_tol)
        if not res.converged:
            continue
        for z in found:
            if np.max(np.abs(res.z - z)) <= 1e-7 * max(amp_scale, 1e-12):
                break
        else:
            found.append(res.z)

    for z in found:
        A1, A2 = complex(z[0]), complex(z[1])
        z1, z2 = _zetas(mode_pair, pump, A1, A2)
        F = fun(z)
        residual = float(np.max(np.abs(F)))
        st = CavityState(A1, A2, Delta_S, z1, z2, "unknown", residual)
        st.stability, st.growth_rates = stability_of_state(mode_pair, pump, st)
        # contract: converged states sit within 1e-9 of the local term scale
        scale = max(
            mode_pair.Gamma1,
            mode_pair.Gamma2,
            abs((Delta_S + z1 + 1j * mode_pair.Gamma1) * A1),
            abs((-Delta_S + z2 + 1j * mode_pair.Gamma2) * A2),
            pump.epsilon * max(abs(A1), abs(A2)),
            drive_scale,
        )
        if residual <= 1e-9 * scale:
            states.append(st)

    states.sort(key=lambda s: -abs(s.A1) ** 2)
    return states


# ---------------------------------------------------------------------------
# parameter sweeps with branch continuation
# ---------------------------------------------------------------------------

@dataclass
class BranchPoint:
    axis_value: float
    branch: int
    A1: complex
    A2: complex
    out1: float  # |C1|^2, photon flux leaving on mode 1
    out2: float  # |C2|^2
    stability: str
    residual: float
    free_phase: bool


@dataclass
class BranchTable:
    """Branch-resolved sweep result.

    rows are ordered by grid index, then branch id.  ``folds`` lists
    (branch id, last axis value) for branches that terminated inside the
    grid — the signature of a fold in the response curve.
    """

    axis: str
    grid: np.ndarray
    rows: List[BranchPoint]
    folds: List[Tuple[int, float]]

    def table(self, unit: str = "rad/s"):
        header = [
            f"{self.axis} [{unit}]",
            "branch",
            "Re_A1 [sqrt(photon)]",
            "Im_A1 [sqrt(photon)]",
            "Re_A2 [sqrt(photon)]",
            "Im_A2 [sqrt(photon)]",
            f"out1 [{unit}]",
            f"out2 [{unit}]",
            "stability",
            "residual",
            "free_phase",
        ]
        rows = [
            (
                p.axis_value,
                p.branch,
                p.A1.real,
                p.A1.imag,
                p.A2.real,
                p.A2.imag,
                p.out1,
                p.out2,
                p.stability,
                p.residual,
                p.free_phase,
            )
            for p in self.rows
        ]
        return header, rows

    def to_csv(self, path, unit: str = "rad/s") -> None:
        header, rows = self.table(unit)
        write_csv(path, header, rows)


def _branch_signature(state: CavityState) -> Tuple[float, float, float]:
    n1 = abs(state.A1) ** 2
    n2 = abs(state.A2) ** 2
    if n1 * n2 == 0.0:
        cosT = 0.0
    else:
        cosT = math.cos(
            math.atan2(state.A1.imag, state.A1.real)
            + math.atan2(state.A2.imag, state.A2.real)
        )
    return n1, n2, cosT


def sweep_branches(
    mode_pair: ModePair,
    pump: PumpConfig,
    drives: Sequence[DriveTone],
    axis: str,
    grid: Sequence[float],
    drive_frame: str = "as-given",
) -> BranchTable:
    """Sweep one parameter and connect the steady states into branches.

    axis: "delta" or "epsilon" (pump parameters) or "Delta" (the common frame
    detuning of all drives).  grid must be monotone.  With drive_frame =
    "oscillator" the drive detuning follows the oscillation emission offset
    Delta0(delta) wherever the stable oscillation exists, frozen at its
    boundary value Delta0(delta_th) outside the window (and, when the pump is
    too weak for any window, tracking the critical fluctuation frequency) —
    the frame in which above-threshold driving is stationary.

    Branches are connected point to point by minimum-total-distance matching
    in the invariant signature (|A1|^2, |A2|^2, cos(arg A1 + arg A2)); a
    branch with no state left to match ends and is reported in ``folds``,
    surplus states open new branch ids.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid must be a 1-d array with at least two points")
    diffs = np.diff(grid)
    if not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ValueError("grid must be strictly monotone")
    if axis not in ("delta", "epsilon", "Delta"):
        raise ValueError("axis must be 'delta', 'epsilon' or 'Delta'")

    rows: List[BranchPoint] = []
    folds: List[Tuple[int, float]] = []
    last: Dict[int, Tuple[Tuple[float, float, float], np.ndarray]] = {}
    next_id = 0

    for x in grid:
        p = pump
        ds = drives
        if axis == "delta":
            p = replace(pump, delta=float(x))
        elif axis == "epsilon":
            p = replace(pump, epsilon=float(x))
        else:
            ds = [replace(d, detuning=float(x)) for d in drives]
        if drive_frame == "oscillator":
            try:
                target = oscillation_state(mode_pair, p, "stable").Delta0
            except ValueError:
                rho = (mode_pair.Gamma1 - mode_pair.Gamma2) / (
                    mode_pair.Gamma1 + mode_pair.Gamma2
                )
                dth = detuning_threshold(mode_pair, p.epsilon)
                if dth is None:
                    _, target = instability_threshold(mode_pair, p.delta)
                else:
                    target = rho * dth
            ds = [replace(d, detuning=float(target)) for d in ds]

        seeds = [amps for (_sig, amps) in last.values()]
        states = solve_steady_state(mode_pair, p, ds, extra_seeds=seeds)

        sigs = [_branch_signature(s) for s in states]
        scale = max((s[0] + s[1] for s in sigs), default=0.0)
        scale = max(scale, 1e-30)

        # minimum-total-distance matching against surviving branches
        prev_ids = list(last.keys())
        assigned: Dict[int, int] = {}
        used_states = set()
        if prev_ids and sigs:
            cost = np.empty((len(prev_ids), len(sigs)))
            for i, bid in enumerate(prev_ids):
                sig_prev = last[bid][0]
                for k, sig in enumerate(sigs):
                    cost[i, k] = (
                        abs(sig[0] - sig_prev[0]) / scale
                        + abs(sig[1] - sig_prev[1]) / scale
                        + 0.5 * abs(sig[2] - sig_prev[2])
                    )
            ii, kk = linear_sum_assignment(cost)
            for i, k in zip(ii, kk):
                assigned[prev_ids[i]] = int(k)
                used_states.add(int(k))
        for bid in list(last.keys()):
            if bid not in assigned:
                folds.append((bid, float(rows[-1].axis_value) if rows else float(x)))
                del last[bid]

        new_last: Dict[int, Tuple[Tuple[float, float, float], np.ndarray]] = {}
        order: List[Tuple[int, int]] = []  # (branch id, state index)
        for bid, k in assigned.items():
            order.append((bid, k))
        for k in range(len(states)):
            if k not in used_states:
                order.append((next_id, k))
                next_id += 1
        order.sort(key=lambda t: t[0])

        B1, B2, _ = _collect_drives(ds)
        k1 = math.sqrt(2.0 * mode_pair.Gamma10)
        k2 = math.sqrt(2.0 * mode_pair.Gamma20)
        for bid, k in order:
            s = states[k]
            C1 = B1 - 1j * k1 * s.A1
            C2 = B2 - 1j * k2 * s.A2
            rows.append(
                BranchPoint(
                    axis_value=float(x),
                    branch=bid,
                    A1=s.A1,
                    A2=s.A2,
                    out1=float(abs(C1) ** 2),
                    out2=float(abs(C2) ** 2),
                    stability=s.stability,
                    residual=s.residual,
                    free_phase=s.free_phase,
                )
            )
            new_last[bid] = (sigs[k], np.array([s.A1, s.A2]))
        last = new_last

    return BranchTable(axis=axis, grid=grid, rows=rows, folds=folds)
