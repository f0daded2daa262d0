"""Linearized input-output response around cavity steady states.

Small fluctuations about any steady state scatter between the two modes and
between sidebands at opposite frame detunings +-Delta.  This module builds
the corresponding Bogoliubov-type scattering maps at increasing levels of
completeness:

* ``two_mode_uv`` — response of the empty (undriven, below-threshold) cavity:
  a signal at +Delta on one mode beats with the pump into an idler at -Delta
  on the other.
* ``nonlinear_io`` — same two-channel map about a driven state, keeping the
  state only through its Kerr-shifted effective detunings (the pump-frame
  "frozen shift" approximation).
* ``four_mode_bogoliubov`` — the full linearization about a steady state:
  each input sideband scatters into four outputs (both modes, both signs of
  detuning) because the state's self- and cross-Kerr response adds
  mode-converting and pair-creating channels of its own.
* ``supermode_coeffs`` — for a balanced pair the four-mode map diagonalizes
  in the +-(symmetric/antisymmetric) field combinations; each supermode obeys
  an independent single-mode squeezing relation.
* ``phase_lock`` / ``regularized_detuned_response`` — behaviour of the free
  (Goldstone) phase of the oscillation above threshold under an injected
  tone: locking phase, locked response, and the finite detuned response that
  survives regularization of the 1/Delta divergence.

Output amplitudes everywhere follow c_n = b_n - i sqrt(2 Gamma_n0) a_n; the
maps act on (b1(Delta), b2(Delta), conj b1(-Delta), conj b2(-Delta)).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Tuple, Union

import numpy as np

from ._numerics import wrap_angle
from ._tables import write_csv
from .device import ModePair
from .steadystate import (
    CavityState,
    PumpConfig,
    fluctuation_matrices,
    instability_threshold,
    oscillation_state,
)

__all__ = [
    "TwoModeBogoliubov",
    "SignalIdlerGains",
    "NearThresholdResponse",
    "FourModeBogoliubov",
    "SupermodeCoeffs",
    "PhaseLock",
    "RegularizedResponse",
    "GainTable",
    "two_mode_uv",
    "nonlinear_io",
    "near_threshold_asymptotics",
    "four_mode_matrices",
    "four_mode_bogoliubov",
    "supermode_coeffs",
    "supermode_to_bogoliubov",
    "oscillator_determinants",
    "phase_lock",
    "regularized_detuned_response",
    "gain_spectrum",
]

#: condition number of the sideband coupling matrix beyond which the linear
#: response is treated as divergent (a parametric pole on the real axis)
COND_DIVERGENT = 1e12


def _as_grid(Delta) -> Tuple[np.ndarray, bool]:
    arr = np.atleast_1d(np.asarray(Delta, dtype=float))
    return arr, np.ndim(Delta) == 0


# ---------------------------------------------------------------------------
# empty-cavity two-mode map
# ---------------------------------------------------------------------------

@dataclass
class TwoModeBogoliubov:
    """Signal/idler coefficients of the empty cavity.

    c1(Delta) = u1(Delta) b1(Delta) + v1(Delta) conj b2(-Delta), and the same
    with 1 <-> 2.  For a lossless pair |u_n|^2 - |v_n|^2 = 1 (photon-flux sum
    rule) and u1(Delta) v2(-Delta) = v1(Delta) u2(-Delta) (the two idler
    routes interfere consistently).
    """

    u1: np.ndarray
    v1: np.ndarray
    u2: np.ndarray
    v2: np.ndarray
    Delta: np.ndarray
    divergent: np.ndarray


def two_mode_uv(mode_pair: ModePair, pump: PumpConfig, Delta) -> TwoModeBogoliubov:
    """Empty-cavity Bogoliubov coefficients on a detuning grid.

    Above the parametric threshold the trivial state is unstable and this map
    describes transient gain only; a warning is issued and points where the
    response diverges are masked NaN with ``divergent`` set.
    """
    if pump.regime != "amplification":
        raise ValueError("two_mode_uv describes sum-frequency (amplification) pumping")
    eps_th, _ = instability_threshold(mode_pair, pump.delta)
    if pump.epsilon > eps_th:
        warnings.warn(
            "pump above the parametric threshold: the trivial state is unstable "
            "and its linear response describes transient gain only",
            stacklevel=2,
        )
    grid, scalar = _as_grid(Delta)
    G1, G2 = mode_pair.Gamma1, mode_pair.Gamma2
    G10, G20 = mode_pair.Gamma10, mode_pair.Gamma20
    d, e = pump.delta, pump.epsilon

    det = (d + grid + 1j * G1) * (d - grid - 1j * G2) - e**2
    det_swap = (d + grid + 1j * G2) * (d - grid - 1j * G1) - e**2
    scale = max(abs(d) + np.max(np.abs(grid)) + max(G1, G2), e, 1e-300)
    bad = (np.abs(det) < 1e-14 * scale**2) | (np.abs(det_swap) < 1e-14 * scale**2)

    with np.errstate(divide="ignore", invalid="ignore"):
        u1 = 1.0 - 2j * G10 * (d - grid - 1j * G2) / det
        v1 = 2j * math.sqrt(G10 * G20) * e / det
        u2 = 1.0 - 2j * G20 * (d - grid - 1j * G1) / det_swap
        v2 = 2j * math.sqrt(G10 * G20) * e / det_swap
    for arr in (u1, v1, u2, v2):
        arr[bad] = np.nan

    if scalar:
        return TwoModeBogoliubov(u1[0], v1[0], u2[0], v2[0], grid[0], bool(bad[0]))
    return TwoModeBogoliubov(u1, v1, u2, v2, grid, bad)


# ---------------------------------------------------------------------------
# frozen-shift map about a driven state
# ---------------------------------------------------------------------------

@dataclass
class SignalIdlerGains:
    """Two-channel scattering about a driven state (frozen Kerr shifts).

    Rows act on (b1(Delta), conj b2(-Delta)):
    c1(Delta)        = V11 b1(Delta) + V12 conj b2(-Delta)
    conj c2(-Delta)  = V21 b1(Delta) + V22 conj b2(-Delta)
    G11 = |V11|^2 (signal gain), G12 = |V21|^2 (idler gain into mode 2).
    """

    V11: np.ndarray
    V12: np.ndarray
    V21: np.ndarray
    V22: np.ndarray
    G11: np.ndarray
    G12: np.ndarray
    Delta: np.ndarray
    singular: np.ndarray


def nonlinear_io(
    mode_pair: ModePair, pump: PumpConfig, state: CavityState, Delta
) -> SignalIdlerGains:
    """Signal/idler response with the state entering through its effective
    detunings zeta1, zeta2 only.  For a scalar Delta at a true pole a
    ValueError is raised; on a grid such points are NaN-masked instead."""
    grid, scalar = _as_grid(Delta)
    G1, G2 = mode_pair.Gamma1, mode_pair.Gamma2
    G10, G20 = mode_pair.Gamma10, mode_pair.Gamma20
    z1, z2 = state.zeta1, state.zeta2
    e = pump.epsilon

    m11 = grid + z1 + 1j * G1
    m22 = z2 - grid - 1j * G2
    det = m11 * m22 - e**2
    scale = np.maximum(np.maximum(np.abs(m11), np.abs(m22)), e)
    bad = np.abs(det) < 1e-14 * scale**2
    if scalar and bad[0]:
        raise ValueError(
            f"signal/idler response singular at Delta={grid[0]:.9g}: the frozen-"
            "shift coupling matrix is at a parametric pole"
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        V11 = 1.0 - 2j * G10 * m22 / det
        V12 = 2j * math.sqrt(G10 * G20) * e / det
        V21 = -V12
        V22 = 1.0 + 2j * G20 * m11 / det
    for arr in (V11, V12, V21, V22):
        arr[bad] = np.nan
    G11 = np.abs(V11) ** 2
    G12 = np.abs(V21) ** 2
    if scalar:
        return SignalIdlerGains(
            V11[0], V12[0], V21[0], V22[0], G11[0], G12[0], grid[0], bool(bad[0])
        )
    return SignalIdlerGains(V11, V12, V21, V22, G11, G12, grid, bad)


# ---------------------------------------------------------------------------
# threshold-pumped asymptotics
# ---------------------------------------------------------------------------

@dataclass
class NearThresholdResponse:
    """Leading-order driven response exactly at the minimal threshold.

    A1, A2: complex amplitudes (phases included); G11, G12: asymptotic
    photon-flux gains; window: the small parameter (alpha1 |B1|^2 /
    Gamma1^2)^(1/3) controlling the expansion.
    """

    A1: complex
    A2: complex
    G11: float
    G12: float
    window: float


def near_threshold_asymptotics(
    mode_pair: ModePair, pump: PumpConfig, B1: complex
) -> NearThresholdResponse:
    """Closed-form driven amplitudes for a resonant mode-1 tone with the pump
    at the minimal threshold epsilon^2 = Gamma1 Gamma2, delta = 0.

    The gain is limited by the Kerr shift pulling the modes off resonance;
    amplitudes scale as |B1|^(1/3) (distinct linewidths) or |B1|^(1/5)
    (identical pair).  Raises when called outside the expansion's window.
    """
    G1, G2 = mode_pair.Gamma1, mode_pair.Gamma2
    a1, a2, a = mode_pair.alpha1, mode_pair.alpha2, mode_pair.alpha
    if not mode_pair.lossless:
        raise ValueError("threshold asymptotics are derived for a lossless pair")
    B1 = complex(B1)
    if B1 == 0:
        raise ValueError("needs a non-zero mode-1 drive")
    q = (a1 * abs(B1) ** 2 / G1**2) ** (1.0 / 3.0)
    if q > 1.0 / 3.0:
        raise ValueError(
            f"drive too strong for the threshold expansion: window parameter "
            f"{q:.3g} > 1/3"
        )
    gm2 = G1 * G2
    if abs(pump.delta) > 1e-9 * math.sqrt(gm2):
        raise ValueError("threshold asymptotics require delta = 0")
    off = abs(1.0 - pump.epsilon**2 / gm2)
    if off > q / 3.0:
        raise ValueError(
            f"pump must sit at the minimal threshold: |1 - eps^2/(G1 G2)| = "
            f"{off:.3g} exceeds a third of the window parameter {q:.3g}"
        )

    thB = math.atan2(B1.imag, B1.real)
    if mode_pair.balanced:
        G = 0.5 * (G1 + G2)
        r = (math.sqrt(2.0) * G**1.5 * abs(B1) / (9.0 * a**2)) ** 0.2
        A1 = r * np.exp(1j * (thB - 0.5 * math.pi))
        A2 = r * np.exp(1j * (math.pi - thB))
        G11 = 2.0 * G * r**2 / abs(B1) ** 2
        return NearThresholdResponse(complex(A1), complex(A2), G11, G11, q)

    ratio = G1 / G2
    if abs(1.0 - ratio) < 3.0 * q:
        warnings.warn(
            "linewidths nearly equal relative to the drive window: the "
            "distinct-linewidth expansion is unreliable here",
            stacklevel=2,
        )
    r1 = (2.0 * (G1 / a1) ** 2 * abs(B1) ** 2 / G1 / (1.0 - ratio) ** 2) ** (1.0 / 6.0)
    r2 = r1 * math.sqrt(ratio)
    z1 = a1 * r1**2 + 2.0 * a * r2**2
    z2 = a2 * r2**2 + 2.0 * a * r1**2
    det = z1 * z2 + 1j * (G1 * z2 - G2 * z1)
    dir1 = math.sqrt(2.0 * G1) * B1 * (z2 - 1j * G2) / det
    A1 = r1 * dir1 / abs(dir1)
    dir2 = -math.sqrt(gm2) * np.conj(A1) / (z2 + 1j * G2)
    A2 = r2 * dir2 / abs(dir2)
    G11 = 2.0 * G1 * r1**2 / abs(B1) ** 2
    G12 = 2.0 * G2 * r2**2 / abs(B1) ** 2
    return NearThresholdResponse(complex(A1), complex(A2), G11, G12, q)


# ---------------------------------------------------------------------------
# full four-channel map
# ---------------------------------------------------------------------------

def four_mode_matrices(
    mode_pair: ModePair, pump: PumpConfig, state: CavityState, Delta: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Sideband coupling matrices (T, E) of fluctuations about ``state``.

    T(Delta) couples (a1, a2) at offset Delta to themselves; E (symmetric,
    Delta-independent) couples them to the conjugate amplitudes at -Delta.
    """
    return fluctuation_matrices(mode_pair, pump, state, Delta)


@dataclass
class FourModeBogoliubov:
    """Full linearized scattering about a steady state.

    c(Delta) = U(Delta) b(Delta) + V(Delta) conj b(-Delta), with 2x2 blocks
    stacked along the leading grid axis.  psi and Theta are the phase
    difference / sum of the underlying state (zero for the trivial state).
    Unitarity of the symplectic pair: U U+ - V V+ = 1.
    """

    U: np.ndarray
    V: np.ndarray
    psi: float
    Theta: float
    Delta: np.ndarray
    divergent: np.ndarray


def _state_phases(state: CavityState) -> Tuple[float, float]:
    if abs(state.A1) == 0.0 or abs(state.A2) == 0.0:
        return 0.0, 0.0
    t1 = math.atan2(state.A1.imag, state.A1.real)
    t2 = math.atan2(state.A2.imag, state.A2.real)
    return wrap_angle(t1 - t2), wrap_angle(t1 + t2)


def four_mode_bogoliubov(
    mode_pair: ModePair,
    pump: PumpConfig,
    state: CavityState,
    Delta,
    balanced_approximation: bool = False,
) -> FourModeBogoliubov:
    """Four-channel Bogoliubov map about a steady state on a detuning grid.

    With ``balanced_approximation`` the state's moduli are symmetrized (its
    phases kept) and the map is assembled from the two supermode channels —
    valid for a balanced pair only, and exact there when the state itself is
    balanced.  Divergent grid points (response pole on the real axis, e.g.
    Delta = 0 for a free-running oscillation) are NaN-masked and flagged.
    """
    if pump.regime != "amplification":
        raise ValueError("four_mode_bogoliubov describes sum-frequency pumping")
    psi, Theta = _state_phases(state)

    if balanced_approximation:
        if not mode_pair.balanced:
            raise ValueError(
                "balanced_approximation needs a pair with equal damping and "
                "Kerr parameters"
            )
        nbar = 0.5 * (abs(state.A1) ** 2 + abs(state.A2) ** 2)
        r = math.sqrt(nbar)
        sym = CavityState(
            A1=r * np.exp(0.5j * (Theta + psi)),
            A2=r * np.exp(0.5j * (Theta - psi)),
            Delta_S=state.Delta_S,
            zeta1=state.zeta1,
            zeta2=state.zeta2,
            stability=state.stability,
            residual=state.residual,
        )
        coeffs = supermode_coeffs(mode_pair, pump, sym, Delta, form="exact")
        return supermode_to_bogoliubov(coeffs, psi, Theta)

    grid, scalar = _as_grid(Delta)
    n = grid.size
    T0, E = fluctuation_matrices(mode_pair, pump, state, 0.0)
    M = np.zeros((n, 4, 4), dtype=complex)
    M[:, :2, :2] = T0
    M[:, :2, 2:] = E
    M[:, 2:, :2] = np.conj(E)
    M[:, 2:, 2:] = np.conj(T0)
    idx = np.arange(4)
    sgn = np.array([1.0, 1.0, -1.0, -1.0])
    M[:, idx, idx] += grid[:, None] * sgn[None, :]

    cond = np.linalg.cond(M)
    bad = ~np.isfinite(cond) | (cond > COND_DIVERGENT)
    Msafe = M.copy()
    Msafe[bad] = np.eye(4)
    X = np.linalg.inv(Msafe)

    k = np.array(
        [
            math.sqrt(2.0 * mode_pair.Gamma10),
            math.sqrt(2.0 * mode_pair.Gamma20),
        ]
    )
    kk = np.outer(k, k)
    U = np.eye(2)[None, :, :] - 1j * kk[None, :, :] * X[:, :2, :2]
    V = -1j * kk[None, :, :] * X[:, :2, 2:]
    U[bad] = np.nan
    V[bad] = np.nan

    if scalar:
        return FourModeBogoliubov(U[0], V[0], psi, Theta, grid[0], bool(bad[0]))
    return FourModeBogoliubov(U, V, psi, Theta, grid, bad)


# ---------------------------------------------------------------------------
# supermode channels of a balanced pair
# ---------------------------------------------------------------------------

@dataclass
class SupermodeCoeffs:
    """Independent squeezing channels of a balanced pair.

    The symmetric (+) and antisymmetric (-) combinations of the two mode
    fields decouple; each obeys a single-channel relation
    c_s = u_s b_s + v_s conj b_s(-Delta) with its own effective detuning
    zeta_s and pair coupling eps_s.  For a lossless pair
    |u_s|^2 - |v_s|^2 = 1 exactly (form="exact").
    """

    u_plus: np.ndarray
    v_plus: np.ndarray
    u_minus: np.ndarray
    v_minus: np.ndarray
    zeta_plus: float
    zeta_minus: float
    eps_plus: complex
    eps_minus: complex
    Delta: np.ndarray
    divergent: np.ndarray
    form: str = "exact"


def _balanced_rates(mode_pair: ModePair) -> Tuple[float, float, float]:
    if not mode_pair.balanced:
        raise ValueError(
            "supermode decomposition needs a balanced pair (equal damping "
            "rates and Kerr parameters)"
        )
    G = 0.5 * (mode_pair.Gamma1 + mode_pair.Gamma2)
    G0 = 0.5 * (mode_pair.Gamma10 + mode_pair.Gamma20)
    return G, G0, mode_pair.alpha


def supermode_coeffs(
    mode_pair: ModePair,
    pump: PumpConfig,
    state: CavityState,
    Delta,
    form: str = "exact",
) -> SupermodeCoeffs:
    """Supermode squeezing coefficients about a balanced steady state.

    form="exact" keeps the full sideband structure; form="near_threshold"
    uses the simplified resonances valid when the drive holds the pair at its
    effective instability point (pump at threshold, resonant drive).  States
    with unequal mode populations or a finite frame detuning are refused —
    symmetrize first (see four_mode_bogoliubov's balanced_approximation).
    """
    G, G0, a = _balanced_rates(mode_pair)
    n1, n2 = abs(state.A1) ** 2, abs(state.A2) ** 2
    if abs(n1 - n2) > 1e-6 * max(n1 + n2, 1e-300):
        raise ValueError(
            "supermode decomposition needs equal mode populations; "
            f"got |A1|^2={n1:.6g}, |A2|^2={n2:.6g}"
        )
    if abs(state.Delta_S) > 1e-6 * G:
        raise ValueError("supermode decomposition is defined at zero frame detuning")
    if form not in ("exact", "near_threshold"):
        raise ValueError("form must be 'exact' or 'near_threshold'")
    nbar = 0.5 * (n1 + n2)
    _, Theta = _state_phases(state)
    phase = np.exp(1j * Theta)

    zp = pump.delta + 6.0 * a * nbar
    zm = pump.delta + 2.0 * a * nbar
    ep = pump.epsilon + 3.0 * a * nbar * phase
    em = -(pump.epsilon + a * nbar * phase)

    grid, scalar = _as_grid(Delta)
    if form == "exact":
        dp = zp**2 - (grid + 1j * G) ** 2 - abs(ep) ** 2
        dm = zm**2 - (grid + 1j * G) ** 2 - abs(em) ** 2
        scale = max(abs(zp), abs(zm), abs(ep), abs(em), G + np.max(np.abs(grid)))
        badp = np.abs(dp) < 1e-14 * scale**2
        badm = np.abs(dm) < 1e-14 * scale**2
        with np.errstate(divide="ignore", invalid="ignore"):
            up = 1.0 - 2j * G0 * (zp - grid - 1j * G) / dp
            vp = 2j * G0 * ep / dp
            um = 1.0 - 2j * G0 * (zm - grid - 1j * G) / dm
            vm = 2j * G0 * em / dm
    else:
        z = 3.0 * a * nbar
        sp2 = 3.0 * z**2
        sm2 = z**2 / 3.0
        dp = sp2 - grid**2 - 2j * G * grid
        dm = sm2 - grid**2 - 2j * G * grid
        scale = max(z, G + np.max(np.abs(grid)), 1e-300)
        badp = np.abs(dp) < 1e-14 * scale**2
        badm = np.abs(dm) < 1e-14 * scale**2
        with np.errstate(divide="ignore", invalid="ignore"):
            up = (sp2 - grid**2 - 2.0 * G**2) / dp
            vp = 2j * G**2 / dp
            um = (sm2 - grid**2 - 2.0 * G**2) / dm
            vm = -2j * G**2 / dm
    up = np.where(badp, np.nan, up)
    vp = np.where(badp, np.nan, vp)
    um = np.where(badm, np.nan, um)
    vm = np.where(badm, np.nan, vm)
    bad = badp | badm

    if scalar:
        return SupermodeCoeffs(
            up[0], vp[0], um[0], vm[0], zp, zm, complex(ep), complex(em),
            grid[0], bool(bad[0]), form,
        )
    return SupermodeCoeffs(up, vp, um, vm, zp, zm, complex(ep), complex(em), grid, bad, form)


def supermode_to_bogoliubov(
    coeffs: SupermodeCoeffs, psi: float, Theta: float = 0.0
) -> FourModeBogoliubov:
    """Reassemble the two-mode four-channel map from supermode channels.

    psi rotates the supermode basis back to the physical modes; for a state
    with a free phase any psi yields a valid member of the family.
    """
    up, vp = np.atleast_1d(coeffs.u_plus), np.atleast_1d(coeffs.v_plus)
    um, vm = np.atleast_1d(coeffs.u_minus), np.atleast_1d(coeffs.v_minus)
    scalar = np.ndim(coeffs.u_plus) == 0
    n = up.size
    e = np.exp(1j * psi)
    U = np.empty((n, 2, 2), dtype=complex)
    V = np.empty((n, 2, 2), dtype=complex)
    U[:, 0, 0] = U[:, 1, 1] = 0.5 * (up + um)
    U[:, 0, 1] = 0.5 * (up - um) * e
    U[:, 1, 0] = 0.5 * (up - um) / e
    V[:, 0, 0] = 0.5 * (vp + vm) * e
    V[:, 1, 1] = 0.5 * (vp + vm) / e
    V[:, 0, 1] = V[:, 1, 0] = 0.5 * (vp - vm)
    grid = np.atleast_1d(coeffs.Delta)
    bad = np.atleast_1d(coeffs.divergent)
    if scalar:
        return FourModeBogoliubov(U[0], V[0], psi, Theta, grid[0], bool(bad[0]))
    return FourModeBogoliubov(U, V, psi, Theta, grid, bad)


def oscillator_determinants(
    mode_pair: ModePair, pump: PumpConfig, Delta
) -> Tuple[np.ndarray, np.ndarray]:
    """Resonant denominators of the two supermode channels at the stable
    free-running oscillation of a balanced pair.

    The antisymmetric channel's determinant vanishes identically at Delta=0
    — the free oscillation phase costs nothing to displace (Goldstone mode)
    and the response there diverges.
    """
    G, _, a = _balanced_rates(mode_pair)
    osc = oscillation_state(mode_pair, pump, "stable")
    nbar = 0.5 * (osc.r1**2 + osc.r2**2)
    phase = np.exp(1j * osc.Theta)
    zp = pump.delta + 6.0 * a * nbar
    zm = pump.delta + 2.0 * a * nbar
    ep = pump.epsilon + 3.0 * a * nbar * phase
    em = -(pump.epsilon + a * nbar * phase)
    grid, scalar = _as_grid(Delta)
    dp = zp**2 - (grid + 1j * G) ** 2 - abs(ep) ** 2
    dm = zm**2 - (grid + 1j * G) ** 2 - abs(em) ** 2
    if scalar:
        return dp[0], dm[0]
    return dp, dm


# ---------------------------------------------------------------------------
# phase locking of the free-running oscillation
# ---------------------------------------------------------------------------

@dataclass
class PhaseLock:
    """Locking of the oscillation's free phase to a resonant injected tone.

    psi: locked phase difference arg A1 - arg A2 of the oscillation.
    c_minus: reflected amplitude of the antisymmetric input combination
        b_minus = (b1 - e^{i psi} b2*) ... assembled as exp(-i psi/2) B1 /
        sqrt 2 for a mode-1 tone.
    a_minus: intracavity antisymmetric response amplitude.
    Q: the antisymmetric channel's effective (detuning + i damping) constant.
    """

    psi: float
    c_minus: complex
    a_minus: complex
    b_minus: complex
    Q: complex
    Theta0: float
    free_phase: bool = False


def _goldstone_setup(mode_pair: ModePair, pump: PumpConfig):
    G, G0, _a = _balanced_rates(mode_pair)
    if abs(pump.delta) > 1e-9 * G:
        raise ValueError("phase locking analysis requires zero pump detuning")
    if pump.epsilon <= G:
        raise ValueError(
            f"needs a free-running oscillation: epsilon={pump.epsilon:.6g} "
            f"not above the threshold {G:.6g}"
        )
    w = math.sqrt(pump.epsilon**2 - G**2)
    Theta0 = math.atan2(G / pump.epsilon, -w / pump.epsilon)
    Q = 2.0 * w / 3.0 + 1j * G
    return G, G0, w, Theta0, Q


def phase_lock(mode_pair: ModePair, pump: PumpConfig, B1: complex) -> PhaseLock:
    """Locked oscillation phase and on-resonance response to a weak mode-1
    tone at the oscillation frequency (balanced pair, zero pump detuning).

    The tone pins the otherwise-free phase difference psi so that the
    antisymmetric channel is driven along its decaying quadrature; of the two
    locked configurations (psi, psi + 2 pi) exactly one is stable and is the
    one returned.  B1 = 0 returns the free-phase representative.
    """
    G, G0, w, Theta0, Q = _goldstone_setup(mode_pair, pump)
    B1 = complex(B1)
    if B1 == 0:
        return PhaseLock(0.0, 0j, 0j, 0j, Q, Theta0, free_phase=True)
    thB = math.atan2(B1.imag, B1.real)
    psi = wrap_angle(2.0 * thB - Theta0 - 2.0 * np.angle(Q))
    b_minus = np.exp(-0.5j * psi) * B1 / math.sqrt(2.0)
    b_bar = b_minus * np.exp(-0.5j * Theta0)
    a_minus = math.sqrt(G0 / 2.0) * b_bar / Q
    c_minus = b_minus * (Q - 1j * G0) / Q
    return PhaseLock(
        psi, complex(c_minus), complex(a_minus), complex(b_minus), Q, Theta0
    )


@dataclass
class RegularizedResponse:
    """Detuned response of the antisymmetric channel about a locked state."""

    Delta: np.ndarray
    c_minus: np.ndarray
    locked: bool
    lock_residual: float


def regularized_detuned_response(
    mode_pair: ModePair,
    pump: PumpConfig,
    b_minus: Callable[[float], complex],
    Delta,
) -> RegularizedResponse:
    """Response of the Goldstone (antisymmetric) channel to a detuned input
    spectrum b_minus(Delta) about the locked oscillation.

    The raw channel coefficients diverge as 1/Delta; when the input satisfies
    the lock condition at Delta = 0 the divergence cancels and the response
    stays finite (computed here without subtractive loss of accuracy).  An
    input violating the lock condition leaves the phase unlocked: the raw,
    divergent response is returned with ``locked=False``.
    """
    G, G0, w, Theta0, Q = _goldstone_setup(mode_pair, pump)
    zm = 2.0 * w / 3.0
    phase0 = np.exp(1j * Theta0)

    grid, scalar = _as_grid(Delta)
    bvals = np.array([complex(b_minus(float(x))) for x in grid])
    bneg = np.array([complex(b_minus(float(-x))) for x in grid])
    b0 = complex(b_minus(0.0))
    lock_res = abs(np.conj(Q) * b0 - Q * phase0 * np.conj(b0))
    locked = lock_res <= 1e-9 * abs(Q) * max(abs(b0), 1e-300)

    # N(0) = lock residual; N'(0) enters the regularized on-resonance value
    def N(bD, bmD):
        return (zm - grid - 1j * G) * bD - Q * phase0 * np.conj(bmD)

    with np.errstate(divide="ignore", invalid="ignore"):
        c = bvals + 2j * G0 * N(bvals, bneg) / (grid * (grid + 2j * G))
    on_res = np.abs(grid) <= 1e-9 * G
    if np.any(on_res):
        if locked:
            h = 1e-6 * G
            db = (complex(b_minus(h)) - complex(b_minus(-h))) / (2.0 * h)
            c0 = b0 + (G0 / G) * (
                np.conj(Q) * db + Q * phase0 * np.conj(db) - b0
            )
            c[on_res] = c0
        else:
            c[on_res] = np.nan
    if scalar:
        return RegularizedResponse(grid[0], c[0], locked, lock_res)
    return RegularizedResponse(grid, c, locked, lock_res)


# ---------------------------------------------------------------------------
# gain tables
# ---------------------------------------------------------------------------

@dataclass
class GainTable:
    """Photon-flux gains of the four scattering channels fed by b1(Delta).

    delta1 is the physical offset of the input tone from the mode-1
    resonance (pump detuning + state frame + sideband offset).
    """

    Delta: np.ndarray
    delta1: np.ndarray
    G11_signal: np.ndarray  # b1(Delta) -> c1(Delta)
    G12_idler: np.ndarray   # b1(Delta) -> c2(-Delta)
    G11_idler: np.ndarray   # b1(Delta) -> c1(-Delta)
    G12_signal: np.ndarray  # b1(Delta) -> c2(Delta)
    divergent: np.ndarray

    def table(self, unit: str = "rad/s"):
        header = [
            f"Delta [{unit}]",
            f"delta1 [{unit}]",
            "G11_signal",
            "G12_idler",
            "G11_idler",
            "G12_signal",
            "divergent",
        ]
        rows = zip(
            self.Delta,
            self.delta1,
            self.G11_signal,
            self.G12_idler,
            self.G11_idler,
            self.G12_signal,
            (bool(b) for b in self.divergent),
        )
        return header, [tuple(map(_plain, r)) for r in rows]

    def to_csv(self, path, unit: str = "rad/s") -> None:
        header, rows = self.table(unit)
        write_csv(path, header, rows)


def _plain(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def gain_spectrum(
    mode_pair: ModePair,
    pump: PumpConfig,
    state: CavityState,
    Delta,
    balanced_approximation: bool = False,
) -> GainTable:
    """Gains of all four channels fed by a weak mode-1 probe at Delta,
    linearized about ``state`` (use the trivial state for the empty cavity)."""
    grid, _ = _as_grid(Delta)
    fwd = four_mode_bogoliubov(
        mode_pair, pump, state, grid, balanced_approximation=balanced_approximation
    )
    bwd = four_mode_bogoliubov(
        mode_pair, pump, state, -grid, balanced_approximation=balanced_approximation
    )
    delta1 = pump.delta + state.Delta_S + grid
    return GainTable(
        Delta=grid,
        delta1=delta1,
        G11_signal=np.abs(fwd.U[:, 0, 0]) ** 2,
        G12_idler=np.abs(bwd.V[:, 1, 0]) ** 2,
        G11_idler=np.abs(bwd.V[:, 0, 0]) ** 2,
        G12_signal=np.abs(fwd.U[:, 1, 0]) ** 2,
        divergent=fwd.divergent | bwd.divergent,
    )
