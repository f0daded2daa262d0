"""Quantum noise of the cavity output: homodyne squeezing spectra and SNR.

With vacuum at the input ports, the Bogoliubov scattering of sidebands at
+-Delta correlates the output quadratures of the two modes.  This module
evaluates the resulting homodyne spectral densities (normalized so one mode's
vacuum floor is 1), locates the local-oscillator phases of maximal squeezing,
forms matched-filter signal-to-noise ratios for a weak coherent tone read out
through the amplifier, and extracts the pair amplitudes of the equivalent
(two- or four-mode) squeezed-vacuum output state.

Spectra about a strong driven state use the full four-channel map, which
mixes the quadratures of both modes at both sideband signs; for a balanced
pair the supermode decomposition (each channel an independent single-mode
squeezer) is attached to the returned spectrum.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import minimize

from ._numerics import parabolic_peak, wrap_angle, wrap_half_turn
from ._tables import write_csv
from .device import ModePair
from .response import (
    FourModeBogoliubov,
    SupermodeCoeffs,
    four_mode_bogoliubov,
    supermode_coeffs,
    supermode_to_bogoliubov,
    two_mode_uv,
)
from .steadystate import (
    CavityState,
    DriveTone,
    PumpConfig,
    instability_threshold,
    solve_steady_state,
    trivial_state,
)

__all__ = [
    "HomodyneConfig",
    "SqueezingSpectrum",
    "SNRResult",
    "PairAmplitudes",
    "two_mode_spectrum",
    "four_mode_spectrum",
    "optimal_squeezing_phase",
    "snr",
    "squeezed_vacuum_amplitudes",
]


@dataclass(frozen=True)
class HomodyneConfig:
    """Homodyne detection settings.

    theta1, theta2: local-oscillator phases (radians) for the two modes.
    mode_set: "single-LO" (mode 1 only) or "dual-LO" (both records summed /
        jointly filtered).
    bandwidth: full integration bandwidth for SNR (rad/s); None selects
        0.1x the response peak half-width, estimated from the gain spectrum.
    """

    theta1: float = 0.0
    theta2: float = 0.0
    mode_set: str = "dual-LO"
    bandwidth: Optional[float] = None

    def __post_init__(self):
        if self.mode_set not in ("single-LO", "dual-LO"):
            raise ValueError("mode_set must be 'single-LO' or 'dual-LO'")
        if self.bandwidth is not None and self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")


@dataclass
class SqueezingSpectrum:
    """Homodyne quadrature spectral densities on a detuning grid.

    S11, S22 are real per-mode quadrature spectra; S12 = conj(S21) is the
    cross-mode correlation.  ``total`` is S11 for a single-LO measurement and
    S11 + S22 + 2 Re S12 for the summed dual-LO record.  ``supermodes``
    carries the single-channel squeezing parameters when a decomposition
    applies: {"r", "chi"} for the empty cavity, {"r_plus", "chi_plus",
    "r_minus", "chi_minus", "psi"} for a balanced strong-field state.
    """

    Delta: np.ndarray
    S11: np.ndarray
    S22: np.ndarray
    S12: np.ndarray
    S21: np.ndarray
    total: np.ndarray
    config: HomodyneConfig
    supermodes: Optional[Dict[str, np.ndarray]] = None

    def table(self, unit: str = "rad/s"):
        header = [
            f"Delta [{unit}]",
            "theta [rad]",
            "S11",
            "S22",
            "Re_S12",
            "Im_S12",
            "S_total",
        ]
        sup_cols = []
        if self.supermodes is not None:
            sup_cols = sorted(self.supermodes.keys())
            header += sup_cols
        rows = []
        for i, D in enumerate(self.Delta):
            row = [
                float(D),
                float(self.config.theta1),
                float(self.S11[i]),
                float(self.S22[i]),
                float(self.S12[i].real),
                float(self.S12[i].imag),
                float(self.total[i]),
            ]
            for k in sup_cols:
                v = self.supermodes[k]
                row.append(float(v[i]) if np.ndim(v) else float(v))
            rows.append(row)
        return header, rows

    def to_csv(self, path, unit: str = "rad/s") -> None:
        header, rows = self.table(unit)
        write_csv(path, header, rows)


def _spectral_blocks(Up, Vp, Um, Vm, theta1: float, theta2: float) -> np.ndarray:
    """Quadrature spectral matrix S_nm(Delta) from the Bogoliubov blocks at
    +Delta (Up, Vp) and -Delta (Um, Vm); vacuum inputs, unit floor per mode."""
    ph = np.exp(-1j * np.array([theta1, theta2]))
    E = Up * ph[None, :, None] + np.conj(Vm) * np.conj(ph)[None, :, None]
    F = Vm * ph[None, :, None] + np.conj(Up) * np.conj(ph)[None, :, None]
    return np.einsum("gnk,gmk->gnm", E, F)


def _assemble(grid, S, hom: HomodyneConfig, supermodes=None) -> SqueezingSpectrum:
    S11 = S[:, 0, 0].real
    S22 = S[:, 1, 1].real
    S12 = S[:, 0, 1]
    S21 = S[:, 1, 0]
    if hom.mode_set == "single-LO":
        total = S11.copy()
    else:
        total = S11 + S22 + 2.0 * S12.real
    return SqueezingSpectrum(
        Delta=grid, S11=S11, S22=S22, S12=S12, S21=S21, total=total,
        config=hom, supermodes=supermodes,
    )


def _require_lossless(mode_pair: ModePair) -> None:
    if not mode_pair.lossless:
        raise ValueError(
            "quadrature spectra are derived for loss-free coupling "
            "(Gamma_n = Gamma_n0); internal loss adds input noise channels "
            "that are not modelled"
        )


def two_mode_spectrum(
    mode_pair: ModePair, pump: PumpConfig, hom: HomodyneConfig, Delta
) -> SqueezingSpectrum:
    """Squeezing spectrum of the empty cavity below threshold (lossless).

    The supermodes payload carries the squeezing parameter r(Delta) =
    asinh|v1(Delta)| and interference phase chi(Delta) = arg[u1(Delta)
    v2(-Delta)] that put the dual-LO total in the standard squeezed form.
    """
    _require_lossless(mode_pair)
    eps_th, _ = instability_threshold(mode_pair, pump.delta)
    if pump.epsilon >= eps_th:
        raise ValueError(
            "empty-cavity spectrum is defined below the parametric threshold"
        )
    grid = np.atleast_1d(np.asarray(Delta, dtype=float))
    uvp = two_mode_uv(mode_pair, pump, grid)
    uvm = two_mode_uv(mode_pair, pump, -grid)
    n = grid.size
    Up = np.zeros((n, 2, 2), dtype=complex)
    Vp = np.zeros((n, 2, 2), dtype=complex)
    Um = np.zeros((n, 2, 2), dtype=complex)
    Vm = np.zeros((n, 2, 2), dtype=complex)
    Up[:, 0, 0], Up[:, 1, 1] = uvp.u1, uvp.u2
    Vp[:, 0, 1], Vp[:, 1, 0] = uvp.v1, uvp.v2
    Um[:, 0, 0], Um[:, 1, 1] = uvm.u1, uvm.u2
    Vm[:, 0, 1], Vm[:, 1, 0] = uvm.v1, uvm.v2
    S = _spectral_blocks(Up, Vp, Um, Vm, hom.theta1, hom.theta2)
    sup = {
        "r": np.arcsinh(np.abs(uvp.v1)),
        "chi": np.angle(uvp.u1 * uvm.v2),
    }
    return _assemble(grid, S, hom, sup)


def optimal_squeezing_phase(mode_pair: ModePair, pump: PumpConfig) -> float:
    """Local-oscillator phase minimizing the dual-LO on-resonance noise of
    the empty cavity: theta = pi/2 + chi(0)/2, reported in [0, pi)."""
    _require_lossless(mode_pair)
    eps_th, _ = instability_threshold(mode_pair, pump.delta)
    if pump.epsilon >= eps_th:
        raise ValueError("optimal squeezing phase is defined below threshold")
    uv0 = two_mode_uv(mode_pair, pump, 0.0)
    chi0 = np.angle(uv0.u1 * uv0.v2)
    return wrap_half_turn(0.5 * math.pi + 0.5 * chi0)


def _symmetrized(state: CavityState) -> CavityState:
    """Equal-modulus copy of a state, keeping its phase sum and difference."""
    n1, n2 = abs(state.A1) ** 2, abs(state.A2) ** 2
    r = math.sqrt(0.5 * (n1 + n2))
    if n1 == 0.0 or n2 == 0.0:
        t1 = t2 = 0.0
    else:
        t1 = math.atan2(state.A1.imag, state.A1.real)
        t2 = math.atan2(state.A2.imag, state.A2.real)
    return CavityState(
        A1=r * np.exp(1j * t1), A2=r * np.exp(1j * t2),
        Delta_S=state.Delta_S, zeta1=state.zeta1, zeta2=state.zeta2,
        stability=state.stability, residual=state.residual,
    )


def four_mode_spectrum(
    mode_pair: ModePair,
    pump: PumpConfig,
    state: CavityState,
    hom: HomodyneConfig,
    Delta,
    balanced_approximation: bool = False,
) -> SqueezingSpectrum:
    """Squeezing spectrum about a strong intracavity field (lossless).

    The state's Kerr response opens the mode-converting and extra
    pair-creating channels, so all four S_nm components are structured.  For
    a balanced pair the supermode squeezing parameters r_sigma, chi_sigma are
    attached (computed from the symmetrized state).

    Free-running oscillation states are refused: their phase undergoes
    undamped diffusion, and the stationary spectrum of that process is
    outside this linearized treatment — lock the phase with a weak tone
    first.
    """
    _require_lossless(mode_pair)
    if state.free_phase:
        raise ValueError(
            "quantum noise of a free-running oscillation is not described by "
            "this linearization (the unpinned phase diffuses); use a "
            "phase-locked or driven state"
        )
    grid = np.atleast_1d(np.asarray(Delta, dtype=float))
    bp = four_mode_bogoliubov(
        mode_pair, pump, state, grid, balanced_approximation=balanced_approximation
    )
    bm = four_mode_bogoliubov(
        mode_pair, pump, state, -grid, balanced_approximation=balanced_approximation
    )
    S = _spectral_blocks(bp.U, bp.V, bm.U, bm.V, hom.theta1, hom.theta2)
    sup = None
    if mode_pair.balanced:
        try:
            sym = _symmetrized(state)
            cp = supermode_coeffs(mode_pair, pump, sym, grid)
            cm = supermode_coeffs(mode_pair, pump, sym, -grid)
            sup = {
                "r_plus": np.arcsinh(np.abs(cp.v_plus)),
                "chi_plus": np.angle(cp.u_plus * cm.v_plus),
                "r_minus": np.arcsinh(np.abs(cp.v_minus)),
                "chi_minus": np.angle(cp.u_minus * cm.v_minus),
                "psi": np.full(grid.shape, bp.psi),
            }
        except ValueError:
            sup = None
    return _assemble(grid, S, hom, sup)


# ---------------------------------------------------------------------------
# signal-to-noise of a weak coherent tone
# ---------------------------------------------------------------------------

@dataclass
class SNRResult:
    """Matched-filter SNR of a coherent tone in the homodyne record.

    P0_bar: weight of the coherent power peak at the tone frequency.
    S_bar: noise power integrated over the bandwidth at the reported phase.
    SNR: P0_bar / S_bar.  theta: LO phase (single-LO) or (theta1, theta2)
    maximizing the SNR.  Iterates as the (P0_bar, S_bar, SNR) triple.
    """

    P0_bar: float
    S_bar: float
    SNR: float
    theta: Union[float, Tuple[float, float]]
    bandwidth: float

    def __iter__(self):
        return iter((self.P0_bar, self.S_bar, self.SNR))


def _response_hwhm(mode_pair, pump, state) -> float:
    """Half-width at half maximum of the signal gain |U11(Delta)|^2."""
    scale = mode_pair.rate_scale
    lo, hi = 0.0, 5.0 * scale
    for _ in range(4):
        grid = np.linspace(lo, hi, 1501)
        bog = four_mode_bogoliubov(mode_pair, pump, state, grid)
        G = np.abs(bog.U[:, 0, 0]) ** 2
        G = np.where(np.isfinite(G), G, np.inf)
        half = G[0] / 2.0
        below = np.nonzero(G < half)[0]
        if below.size == 0:
            return hi
        j = below[0]
        if j <= 2:
            hi = grid[max(j, 1)] * 2.0
            continue
        x0, x1 = grid[j - 1], grid[j]
        g0, g1 = G[j - 1], G[j]
        frac = (g0 - half) / max(g0 - g1, 1e-300)
        return float(x0 + frac * (x1 - x0))
    return float(hi)


def _normalize_drive(drive) -> complex:
    if isinstance(drive, DriveTone):
        if drive.mode != 1:
            raise ValueError("SNR analysis reads out a mode-1 tone")
        if drive.detuning != 0.0:
            raise ValueError("SNR analysis assumes an on-resonance tone (Delta = 0)")
        return complex(drive.amplitude)
    return complex(drive)


def _imposed_phase_blocks(
    mode_pair, pump, state, grid, thB
) -> Tuple[FourModeBogoliubov, FourModeBogoliubov]:
    """Bogoliubov blocks of the idealized threshold model: supermode moduli
    from the near-threshold closed forms (set by the Kerr shift alone) and
    phases pinned at chi_sigma = -sigma pi/2, psi = 2 theta_B + pi/2."""
    psi = wrap_angle(2.0 * thB + 0.5 * math.pi)
    sym = _symmetrized(state)

    def imposed(coeffs: SupermodeCoeffs) -> SupermodeCoeffs:
        return SupermodeCoeffs(
            u_plus=np.abs(coeffs.u_plus),
            v_plus=np.abs(coeffs.v_plus) * np.exp(-0.5j * math.pi),
            u_minus=np.abs(coeffs.u_minus),
            v_minus=np.abs(coeffs.v_minus) * np.exp(0.5j * math.pi),
            zeta_plus=coeffs.zeta_plus,
            zeta_minus=coeffs.zeta_minus,
            eps_plus=coeffs.eps_plus,
            eps_minus=coeffs.eps_minus,
            Delta=coeffs.Delta,
            divergent=coeffs.divergent,
            form=coeffs.form,
        )

    cp = imposed(supermode_coeffs(mode_pair, pump, sym, grid, form="near_threshold"))
    cm = imposed(supermode_coeffs(mode_pair, pump, sym, -grid, form="near_threshold"))
    return (
        supermode_to_bogoliubov(cp, psi),
        supermode_to_bogoliubov(cm, psi),
    )


def snr(
    mode_pair: ModePair,
    pump: PumpConfig,
    drive,
    hom: HomodyneConfig,
    regime: str = "linear-two-mode",
    state: Optional[CavityState] = None,
    analytic_phases: bool = False,
) -> SNRResult:
    """Homodyne SNR for a weak on-resonance mode-1 tone.

    The coherent tone produces a delta peak in the quadrature record whose
    weight P0_bar = 8 pi sum_n |C_n|^2 cos^2(arg C_n - theta_n) (over the
    measured modes) competes with the noise integrated over (-bw/2, +bw/2).

    regime="linear-two-mode": empty-cavity amplification of the tone
    (C1 = u1(0) B1, C2 = v2(0) conj B1), lossless, below threshold.
    regime="nonlinear-four-mode": the tone itself drives the cavity; the
    carrier is the exact steady-state output C_n = B_n - i sqrt(2 Gamma_n0)
    A_n and the noise is the four-channel spectrum about that state (solved
    here when ``state`` is not supplied).  ``analytic_phases`` replaces the
    numeric squeezing phases by their idealized threshold values (balanced
    pair only), the textbook limit in which the single-LO SNR approaches
    nine times the linear value.

    Single-LO: returns the SNR maximized over theta (for the linear map the
    noise is phase-independent, so this is the maximum-amplification phase).
    Dual-LO: maximizes the jointly filtered two-channel SNR
    2 pi s^T Sigma^-1 s over both LO phases.
    """
    _require_lossless(mode_pair)
    B1 = _normalize_drive(drive)
    if B1 == 0:
        raise ValueError("SNR needs a non-zero tone")
    thB = math.atan2(B1.imag, B1.real)

    if regime == "linear-two-mode":
        eps_th, _ = instability_threshold(mode_pair, pump.delta)
        if pump.epsilon >= eps_th:
            raise ValueError("linear SNR is defined below the parametric threshold")
        work_state = trivial_state(mode_pair, pump)
        uv0 = two_mode_uv(mode_pair, pump, 0.0)
        C1 = uv0.u1 * B1
        C2 = uv0.v2 * np.conj(B1)
        if analytic_phases:
            raise ValueError("analytic_phases applies to the nonlinear four-mode regime")
    elif regime == "nonlinear-four-mode":
        if state is None:
            states = solve_steady_state(
                mode_pair, pump, [DriveTone(1, B1, 0.0)]
            )
            stable = [s for s in states if s.stability == "stable"]
            if not stable:
                raise ValueError("no stable driven state found for the SNR analysis")
            work_state = stable[0]
        else:
            work_state = state
        if work_state.free_phase:
            raise ValueError(
                "free-running oscillation noise is out of scope; supply a "
                "driven or phase-locked state"
            )
        C1 = B1 - 1j * math.sqrt(2.0 * mode_pair.Gamma10) * work_state.A1
        C2 = -1j * math.sqrt(2.0 * mode_pair.Gamma20) * work_state.A2
    else:
        raise ValueError("regime must be 'linear-two-mode' or 'nonlinear-four-mode'")

    hwhm = _response_hwhm(mode_pair, pump, work_state)
    bw = hom.bandwidth if hom.bandwidth is not None else 0.1 * hwhm
    if 0.5 * bw > hwhm:
        warnings.warn(
            f"integration bandwidth {bw:.3g} is wider than the response peak "
            f"(half-width {hwhm:.3g}); the tone is no longer uniformly amplified "
            "across the band",
            stacklevel=2,
        )
    grid = np.linspace(-0.5 * bw, 0.5 * bw, 65)

    if analytic_phases:
        bp, bm = _imposed_phase_blocks(mode_pair, pump, work_state, grid, thB)
    else:
        bp = four_mode_bogoliubov(mode_pair, pump, work_state, grid)
        bm = four_mode_bogoliubov(mode_pair, pump, work_state, -grid)

    # closed theta dependence: S_nn = a_n + Re(b_n e^{-2 i theta_n}),
    # S_12 built from four integrated complex coefficients
    a1 = np.sum(np.abs(bp.U[:, 0, :]) ** 2 + np.abs(bm.V[:, 0, :]) ** 2, axis=1)
    b1 = 2.0 * np.sum(bp.U[:, 0, :] * bm.V[:, 0, :], axis=1)
    A1b = float(simpson(a1, x=grid))
    B1b = complex(simpson(b1, x=grid))

    if hom.mode_set == "single-LO":
        phi1 = math.atan2(C1.imag, C1.real)

        def snr_of(th):
            num = 8.0 * math.pi * abs(C1) ** 2 * math.cos(phi1 - th) ** 2
            den = A1b + (B1b * np.exp(-2j * th)).real
            return num / den

        thetas = np.linspace(0.0, math.pi, 2049, endpoint=False)
        vals = np.array([snr_of(t) for t in thetas])
        k = int(np.argmax(vals))
        th_opt, _ = parabolic_peak(thetas, vals)
        th_opt = wrap_half_turn(float(th_opt))
        best = snr_of(th_opt)
        if best < vals[k]:
            th_opt, best = wrap_half_turn(float(thetas[k])), float(vals[k])
        P0 = 8.0 * math.pi * abs(C1) ** 2 * math.cos(phi1 - th_opt) ** 2
        return SNRResult(P0, P0 / best, float(best), th_opt, bw)

    # dual-LO matched filter
    a2 = np.sum(np.abs(bp.U[:, 1, :]) ** 2 + np.abs(bm.V[:, 1, :]) ** 2, axis=1)
    b2 = 2.0 * np.sum(bp.U[:, 1, :] * bm.V[:, 1, :], axis=1)
    A2b = float(simpson(a2, x=grid))
    B2b = complex(simpson(b2, x=grid))
    c12 = np.sum(bp.U[:, 0, :] * np.conj(bp.U[:, 1, :]), axis=1)
    d12 = np.sum(np.conj(bm.V[:, 0, :]) * bm.V[:, 1, :], axis=1)
    e12 = np.sum(bp.U[:, 0, :] * bm.V[:, 1, :], axis=1)
    f12 = np.sum(np.conj(bm.V[:, 0, :]) * np.conj(bp.U[:, 1, :]), axis=1)
    Cb = complex(simpson(c12, x=grid))
    Db = complex(simpson(d12, x=grid))
    Eb = complex(simpson(e12, x=grid))
    Fb = complex(simpson(f12, x=grid))
    phi1 = math.atan2(C1.imag, C1.real)
    phi2 = math.atan2(C2.imag, C2.real)

    def neg_snr(th):
        t1, t2 = th
        s = np.array(
            [
                2.0 * abs(C1) * math.cos(phi1 - t1),
                2.0 * abs(C2) * math.cos(phi2 - t2),
            ]
        )
        s11 = A1b + (B1b * np.exp(-2j * t1)).real
        s22 = A2b + (B2b * np.exp(-2j * t2)).real
        s12 = (
            Cb * np.exp(-1j * (t1 - t2))
            + Db * np.exp(1j * (t1 - t2))
            + Eb * np.exp(-1j * (t1 + t2))
            + Fb * np.exp(1j * (t1 + t2))
        ).real
        det = s11 * s22 - s12**2
        if det <= 0.0:
            return 0.0
        q = (s[0] ** 2 * s22 - 2.0 * s[0] * s[1] * s12 + s[1] ** 2 * s11) / det
        return -2.0 * math.pi * q

    t1g = np.linspace(0.0, math.pi, 121, endpoint=False)
    best_val, best_th = 0.0, (0.0, 0.0)
    for t1 in t1g:
        for t2 in t1g:
            v = neg_snr((t1, t2))
            if v < best_val:
                best_val, best_th = v, (t1, t2)
    res = minimize(neg_snr, np.array(best_th), method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-12})
    if res.fun < best_val:
        best_val, best_th = float(res.fun), (float(res.x[0]), float(res.x[1]))
    t1, t2 = (wrap_half_turn(best_th[0]), wrap_half_turn(best_th[1]))
    snr_val = -best_val
    P0 = 8.0 * math.pi * (
        abs(C1) ** 2 * math.cos(phi1 - t1) ** 2
        + abs(C2) ** 2 * math.cos(phi2 - t2) ** 2
    )
    S_eff = P0 / snr_val if snr_val > 0 else math.inf
    return SNRResult(P0, S_eff, snr_val, (t1, t2), bw)


# ---------------------------------------------------------------------------
# squeezed-vacuum pair amplitudes
# ---------------------------------------------------------------------------

@dataclass
class PairAmplitudes:
    """Pair amplitudes of the equivalent squeezed-vacuum output state.

    kind="two-mode": the output is a two-mode squeezed vacuum over
    (mode 1 at +Delta, mode 2 at -Delta) pairs with amplitude
    g = tanh r e^{i rho}; the overall phases eta_n = arg u_n are recorded
    but not applied.

    kind="four-mode": each supermode is a single-channel squeezed vacuum
    with amplitude g_sigma; re-expressed in the physical modes, pair_11 /
    pair_22 weight the same-mode pairs and pair_12 the cross-mode pairs.
    """

    Delta: np.ndarray
    kind: str
    g: Optional[np.ndarray] = None
    r: Optional[np.ndarray] = None
    rho: Optional[np.ndarray] = None
    eta1: Optional[np.ndarray] = None
    eta2: Optional[np.ndarray] = None
    g_plus: Optional[np.ndarray] = None
    g_minus: Optional[np.ndarray] = None
    pair_11: Optional[np.ndarray] = None
    pair_22: Optional[np.ndarray] = None
    pair_12: Optional[np.ndarray] = None
    psi: Optional[float] = None

    def table(self, unit: str = "rad/s"):
        if self.kind == "two-mode":
            header = [f"Delta [{unit}]", "r", "rho [rad]", "Re_g", "Im_g",
                      "eta1 [rad]", "eta2 [rad]"]
            rows = [
                (float(D), float(self.r[i]), float(self.rho[i]),
                 float(self.g[i].real), float(self.g[i].imag),
                 float(self.eta1[i]), float(self.eta2[i]))
                for i, D in enumerate(self.Delta)
            ]
        else:
            header = [f"Delta [{unit}]",
                      "Re_g_plus", "Im_g_plus", "Re_g_minus", "Im_g_minus",
                      "Re_pair11", "Im_pair11", "Re_pair22", "Im_pair22",
                      "Re_pair12", "Im_pair12", "psi [rad]"]
            rows = [
                (float(D),
                 float(self.g_plus[i].real), float(self.g_plus[i].imag),
                 float(self.g_minus[i].real), float(self.g_minus[i].imag),
                 float(self.pair_11[i].real), float(self.pair_11[i].imag),
                 float(self.pair_22[i].real), float(self.pair_22[i].imag),
                 float(self.pair_12[i].real), float(self.pair_12[i].imag),
                 float(self.psi))
                for i, D in enumerate(self.Delta)
            ]
        return header, rows

    def to_csv(self, path, unit: str = "rad/s") -> None:
        header, rows = self.table(unit)
        write_csv(path, header, rows)


def _pair_amp(u, v):
    """g = tanh r e^{i rho} with sinh r = |v| and rho = arg(v/u) + pi."""
    r = np.arcsinh(np.abs(v))
    rho = np.angle(-v / u)
    return np.tanh(r) * np.exp(1j * rho), r, rho


def squeezed_vacuum_amplitudes(
    mode_pair: ModePair,
    pump: PumpConfig,
    state: Optional[CavityState],
    Delta,
) -> PairAmplitudes:
    """Pair amplitudes of the output squeezed vacuum.

    state=None (or the trivial state): two-mode squeezed vacuum of the empty
    cavity below threshold.  A balanced strong-field state instead yields the
    four-mode structure: same-mode pair weights (g_plus + g_minus)/2 carrying
    e^{+-i psi}, cross-mode weight (g_plus - g_minus)/2.  The cross weight is
    set by the flux pump; the same-mode weights vanish with |A|^2.
    """
    _require_lossless(mode_pair)
    grid = np.atleast_1d(np.asarray(Delta, dtype=float))
    if state is None or (abs(state.A1) == 0.0 and abs(state.A2) == 0.0):
        eps_th, _ = instability_threshold(mode_pair, pump.delta)
        if pump.epsilon >= eps_th:
            raise ValueError("two-mode squeezed vacuum requires a pump below threshold")
        uv = two_mode_uv(mode_pair, pump, grid)
        g, r, rho = _pair_amp(uv.u1, uv.v1)
        return PairAmplitudes(
            Delta=grid, kind="two-mode", g=g, r=r, rho=rho,
            eta1=np.angle(uv.u1), eta2=np.angle(uv.u2),
        )
    if state.free_phase:
        raise ValueError(
            "free-running oscillation noise is out of scope; supply a driven "
            "or phase-locked state"
        )
    sym = _symmetrized(state)
    coeffs = supermode_coeffs(mode_pair, pump, sym, grid)
    gp, _, _ = _pair_amp(coeffs.u_plus, coeffs.v_plus)
    gm, _, _ = _pair_amp(coeffs.u_minus, coeffs.v_minus)
    t1 = math.atan2(state.A1.imag, state.A1.real)
    t2 = math.atan2(state.A2.imag, state.A2.real)
    psi = wrap_angle(t1 - t2)
    same = 0.5 * (gp + gm)
    cross = 0.5 * (gp - gm)
    return PairAmplitudes(
        Delta=grid, kind="four-mode", g_plus=gp, g_minus=gm,
        pair_11=np.exp(1j * psi) * same,
        pair_22=np.exp(-1j * psi) * same,
        pair_12=cross,
        psi=psi,
    )
