"""Coherent frequency conversion between the two modes.

Pumping the coupler at the mode difference (rather than the sum) exchanges
photons between the modes instead of creating pairs: the linearized
scattering of a probe is a unitary, reciprocal beam-splitter rotation in
frequency space whenever the cavity is loss-free.  A strong tone shifts the
effective resonances through the Kerr terms; the scattering stays unitary
at the self-consistently shifted detunings, but the mean field displaces
the operating point away from the vacuum-preserving rotation (tracked with
a quantum_valid flag).

Frame bookkeeping: with the pump at (omega2 - omega1 + 2 delta), a probe
offset by delta1 from mode-1 resonance enters at frame detuning
Delta = delta + delta1 and leaves on mode 2 offset by delta2 = 2 delta +
delta1 from that mode's resonance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ._numerics import newton_complex, parabolic_peak, realify_jacobian
from ._tables import write_csv
from .device import ModePair
from .steadystate import CavityState, DriveTone, PumpConfig

__all__ = [
    "ConversionScattering",
    "ConversionMap",
    "conversion_scattering",
    "full_conversion_point",
    "conversion_sweep",
]

_STAB_TOL = 1e-9


def _bare_detunings(pump: PumpConfig) -> Tuple[float, float]:
    return -pump.delta, +pump.delta


def _zetas(mode_pair: ModePair, pump: PumpConfig, A1: complex, A2: complex):
    z10, z20 = _bare_detunings(pump)
    a = mode_pair.alpha
    zeta1 = z10 + mode_pair.alpha1 * abs(A1) ** 2 + 2.0 * a * abs(A2) ** 2
    zeta2 = z20 + mode_pair.alpha2 * abs(A2) ** 2 + 2.0 * a * abs(A1) ** 2
    return zeta1, zeta2


def _blocks(mode_pair, pump, Delta, A1, A2):
    zeta1, zeta2 = _zetas(mode_pair, pump, A1, A2)
    eps, a = pump.epsilon, mode_pair.alpha
    P = np.array(
        [
            [Delta + zeta1 + 1j * mode_pair.Gamma1 + mode_pair.alpha1 * abs(A1) ** 2,
             eps + 2.0 * a * np.conj(A2) * A1],
            [eps + 2.0 * a * np.conj(A1) * A2,
             Delta + zeta2 + 1j * mode_pair.Gamma2 + mode_pair.alpha2 * abs(A2) ** 2],
        ],
        dtype=complex,
    )
    Q = np.array(
        [
            [mode_pair.alpha1 * A1**2, 2.0 * a * A1 * A2],
            [2.0 * a * A1 * A2, mode_pair.alpha2 * A2**2],
        ],
        dtype=complex,
    )
    return P, Q


def _residual(mode_pair, pump, Delta, B1, B2, A1, A2):
    zeta1, zeta2 = _zetas(mode_pair, pump, A1, A2)
    eps = pump.epsilon
    k1 = math.sqrt(2.0 * mode_pair.Gamma10)
    k2 = math.sqrt(2.0 * mode_pair.Gamma20)
    F1 = (Delta + zeta1 + 1j * mode_pair.Gamma1) * A1 + eps * A2 - k1 * B1
    F2 = (Delta + zeta2 + 1j * mode_pair.Gamma2) * A2 + eps * A1 - k2 * B2
    return np.array([F1, F2])


def _scattering_at(mode_pair, pump, zeta1, zeta2, Delta):
    """2x2 frequency-conversion scattering at effective detunings zeta_n."""
    eps = pump.epsilon
    m1 = Delta + zeta1 + 1j * mode_pair.Gamma1
    m2 = Delta + zeta2 + 1j * mode_pair.Gamma2
    D = m1 * m2 - eps**2
    g1, g2 = mode_pair.Gamma10, mode_pair.Gamma20
    V11 = 1.0 - 2j * g1 * m2 / D
    V22 = 1.0 - 2j * g2 * m1 / D
    V12 = 2j * eps * math.sqrt(g1 * g2) / D
    if np.ndim(Delta) == 0:
        V = np.array([[V11, V12], [V12, V22]], dtype=complex)
    else:
        n = np.shape(Delta)[0]
        V = np.empty((n, 2, 2), dtype=complex)
        V[:, 0, 0], V[:, 1, 1] = V11, V22
        V[:, 0, 1] = V[:, 1, 0] = V12
    return V


def _defect(V: np.ndarray) -> float:
    if V.ndim == 2:
        G = V @ V.conj().T - np.eye(2)
        return float(np.max(np.abs(G)))
    G = np.einsum("gij,gkj->gik", V, np.conj(V)) - np.eye(2)[None, :, :]
    return float(np.max(np.abs(G)))


@dataclass
class ConversionScattering:
    """Probe scattering in the conversion regime.

    V: 2x2 complex scattering matrix (or a stack over the detuning grid)
    acting on (b1(Delta), b2(Delta)).  unitarity_defect: max-norm of
    V V^dag - 1 over the grid (vanishes for loss-free coupling).  state: the
    self-consistent field fixing the Kerr-shifted detunings.  quantum_valid:
    True when those shifts are negligible, i.e. the map also describes
    vacuum-preserving conversion of quantum signals.
    """

    V: np.ndarray
    unitarity_defect: float
    state: CavityState
    Delta: np.ndarray
    quantum_valid: bool
    out1: Optional[complex] = None
    out2: Optional[complex] = None


def _collect_drives(drives) -> Tuple[complex, complex, float]:
    B1 = B2 = 0.0 + 0.0j
    det: Optional[float] = None
    for d in drives:
        if not isinstance(d, DriveTone):
            raise TypeError("drives must be DriveTone instances")
        if det is None:
            det = d.detuning
        elif d.detuning != det:
            raise ValueError("all drive tones must share one frame detuning")
        if d.mode == 1:
            B1 += complex(d.amplitude)
        else:
            B2 += complex(d.amplitude)
    return B1, B2, (0.0 if det is None else det)


def _solve_state(mode_pair, pump, B1, B2, Delta_d, seed=None):
    """Small-field Newton branch for the driven conversion statics."""
    k1 = math.sqrt(2.0 * mode_pair.Gamma10)
    k2 = math.sqrt(2.0 * mode_pair.Gamma20)
    z10, z20 = _bare_detunings(pump)
    M = np.array(
        [
            [Delta_d + z10 + 1j * mode_pair.Gamma1, pump.epsilon],
            [pump.epsilon, Delta_d + z20 + 1j * mode_pair.Gamma2],
        ],
        dtype=complex,
    )
    lin = np.linalg.solve(M, np.array([k1 * B1, k2 * B2]))
    z0 = lin if seed is None else np.asarray(seed, dtype=complex)

    def fun(z):
        return _residual(mode_pair, pump, Delta_d, B1, B2, z[0], z[1])

    def jac(z):
        return _blocks(mode_pair, pump, Delta_d, z[0], z[1])

    scale = max(
        abs(k1 * B1), abs(k2 * B2),
        mode_pair.rate_scale * float(np.max(np.abs(z0))), mode_pair.rate_scale,
    )
    res = newton_complex(fun, jac, z0, tol=1e-12 * scale)
    if not res.converged:
        raise RuntimeError(
            "conversion statics did not converge: "
            f"residual={res.residual:.3e} after {res.iterations} iterations "
            f"(Delta={Delta_d!r}, B1={B1!r}, B2={B2!r}, eps={pump.epsilon!r}, "
            f"delta={pump.delta!r}); the Kerr shifts may have pushed the "
            "small-field branch out of reach of the linear seed"
        )
    A1, A2 = res.z
    zeta1, zeta2 = _zetas(mode_pair, pump, A1, A2)
    P, Q = _blocks(mode_pair, pump, Delta_d, A1, A2)
    rates = np.linalg.eigvals(realify_jacobian(1j * P, 1j * Q))
    tol = _STAB_TOL * mode_pair.rate_scale
    if np.any(rates.real > tol):
        label = "unstable"
    elif np.any(np.abs(rates.real) <= tol):
        label = "marginal"
    else:
        label = "stable"
    return CavityState(
        A1=A1, A2=A2, Delta_S=Delta_d, zeta1=zeta1, zeta2=zeta2,
        stability=label, residual=res.residual,
    ), rates


def conversion_scattering(
    mode_pair: ModePair,
    pump: PumpConfig,
    drives: Sequence[DriveTone] = (),
    Delta=0.0,
) -> ConversionScattering:
    """Self-consistent probe scattering for a conversion-regime pump.

    Any drive tones (all at one frame detuning) are solved to the unique
    small-field branch by Newton iteration seeded from the Kerr-free linear
    response; the returned V is then evaluated at the converged effective
    detunings on the requested Delta grid.
    """
    if pump.regime != "conversion":
        raise ValueError("conversion_scattering requires pump.regime='conversion'")
    B1, B2, Delta_d = _collect_drives(drives)
    z10, z20 = _bare_detunings(pump)
    if B1 == 0 and B2 == 0:
        state = CavityState(
            A1=0.0j, A2=0.0j, Delta_S=Delta_d, zeta1=z10, zeta2=z20,
            stability="stable", residual=0.0,
        )
        out1 = out2 = None
    else:
        state, _ = _solve_state(mode_pair, pump, B1, B2, Delta_d)
        out1 = complex(B1 - 1j * math.sqrt(2.0 * mode_pair.Gamma10) * state.A1)
        out2 = complex(B2 - 1j * math.sqrt(2.0 * mode_pair.Gamma20) * state.A2)
    grid = np.asarray(Delta, dtype=float)
    V = _scattering_at(mode_pair, pump, state.zeta1, state.zeta2, grid)
    shift = max(abs(state.zeta1 - z10), abs(state.zeta2 - z20))
    qscale = max(mode_pair.Gamma1, mode_pair.Gamma2, abs(pump.delta), pump.epsilon)
    return ConversionScattering(
        V=V,
        unitarity_defect=_defect(V),
        state=state,
        Delta=np.atleast_1d(grid),
        quantum_valid=bool(shift <= 1e-6 * qscale),
        out1=out1,
        out2=out2,
    )


def full_conversion_point(mode_pair: ModePair, delta: float) -> Tuple[float, float]:
    """Pump strength and probe detuning of unit-efficiency conversion.

    Loss-free coupling only.  Returns (epsilon, Delta) with
    epsilon^2 = Gamma1 Gamma2 [1 + 4 delta^2 / (Gamma2 - Gamma1)^2] and
    Delta = delta (Gamma1 + Gamma2) / (Gamma2 - Gamma1); at delta = 0 this
    is (sqrt(Gamma1 Gamma2), 0), the same pump strength as the minimum of
    the amplification threshold.  Equal linewidths admit no finite solution
    off delta = 0 (the required Delta diverges).
    """
    if not mode_pair.lossless:
        raise ValueError("full conversion requires loss-free coupling")
    g1, g2 = mode_pair.Gamma1, mode_pair.Gamma2
    if delta == 0.0:
        return math.sqrt(g1 * g2), 0.0
    if g1 == g2:
        raise ValueError(
            "equal linewidths admit no finite full-conversion point at "
            "non-zero pump detuning"
        )
    eps = math.sqrt(g1 * g2 * (1.0 + 4.0 * delta**2 / (g2 - g1) ** 2))
    Delta = delta * (g1 + g2) / (g2 - g1)
    return eps, Delta


@dataclass
class ConversionMap:
    """Reflection/conversion maps |V11|^2, |V12|^2 over (delta, delta1).

    delta2 = 2 delta + delta1 locates the converted output relative to
    mode-2 resonance.  max_mask flags grid-local maxima of the conversion
    efficiency; peaks holds their parabolically refined positions as
    (delta, delta1_peak, T12_peak) triples.
    """

    delta: np.ndarray
    delta1: np.ndarray
    delta2: np.ndarray
    T11: np.ndarray
    T12: np.ndarray
    defect: np.ndarray
    max_mask: np.ndarray
    quantum_valid: np.ndarray
    peaks: List[Tuple[float, float, float]]

    def table(self, unit: str = "rad/s"):
        header = [
            f"delta [{unit}]",
            f"delta1 [{unit}]",
            f"delta2 [{unit}]",
            "T11",
            "T12",
            "unitarity_defect",
            "max_conversion",
        ]
        rows = []
        for i, d in enumerate(self.delta):
            for j, d1 in enumerate(self.delta1):
                rows.append(
                    (
                        float(d),
                        float(d1),
                        float(self.delta2[i, j]),
                        float(self.T11[i, j]),
                        float(self.T12[i, j]),
                        float(self.defect[i, j]),
                        bool(self.max_mask[i, j]),
                    )
                )
        return header, rows

    def to_csv(self, path, unit: str = "rad/s") -> None:
        header, rows = self.table(unit)
        write_csv(path, header, rows)


def conversion_sweep(
    mode_pair: ModePair,
    pump: PumpConfig,
    drive: Optional[DriveTone],
    delta1,
    delta=None,
) -> ConversionMap:
    """Map the probe reflection and conversion over (delta, delta1).

    With no drive the map is the linear (vacuum-valid) scattering.  A mode-1
    drive is treated as the probe itself: at every point the statics are
    re-solved with the tone at Delta = delta + delta1 (continuation along
    the grid), and the map reports the scattering at the shifted detunings.
    """
    if pump.regime != "conversion":
        raise ValueError("conversion_sweep requires pump.regime='conversion'")
    d1 = np.atleast_1d(np.asarray(delta1, dtype=float))
    dg = (
        np.atleast_1d(np.asarray(delta, dtype=float))
        if delta is not None
        else np.array([pump.delta])
    )
    if drive is not None and drive.mode != 1:
        raise ValueError("the swept probe tone must enter on mode 1")
    nd, n1 = dg.size, d1.size
    T11 = np.empty((nd, n1))
    T12 = np.empty((nd, n1))
    defect = np.empty((nd, n1))
    qvalid = np.empty((nd, n1), dtype=bool)
    delta2 = np.empty((nd, n1))
    for i, d in enumerate(dg):
        p = PumpConfig(epsilon=pump.epsilon, delta=float(d), regime="conversion")
        Dgrid = d + d1
        delta2[i] = 2.0 * d + d1
        if drive is None:
            sc = conversion_scattering(mode_pair, p, (), Dgrid)
            T11[i] = np.abs(sc.V[:, 0, 0]) ** 2
            T12[i] = np.abs(sc.V[:, 0, 1]) ** 2
            G = np.einsum("gij,gkj->gik", sc.V, np.conj(sc.V)) - np.eye(2)
            defect[i] = np.max(np.abs(G), axis=(1, 2))
            qvalid[i] = True
            continue
        seed = None
        for j, D in enumerate(Dgrid):
            state, _ = _solve_state(
                mode_pair, p, complex(drive.amplitude), 0.0j, float(D), seed=seed
            )
            seed = np.array([state.A1, state.A2])
            sc_V = _scattering_at(mode_pair, p, state.zeta1, state.zeta2, float(D))
            T11[i, j] = abs(sc_V[0, 0]) ** 2
            T12[i, j] = abs(sc_V[0, 1]) ** 2
            defect[i, j] = _defect(sc_V)
            z10, z20 = _bare_detunings(p)
            shift = max(abs(state.zeta1 - z10), abs(state.zeta2 - z20))
            qscale = max(mode_pair.Gamma1, mode_pair.Gamma2, abs(d), p.epsilon)
            qvalid[i, j] = bool(shift <= 1e-6 * qscale)
    max_mask = np.zeros((nd, n1), dtype=bool)
    peaks: List[Tuple[float, float, float]] = []
    for i in range(nd):
        row = T12[i]
        for j in range(1, n1 - 1):
            if row[j] > row[j - 1] and row[j] >= row[j + 1]:
                max_mask[i, j] = True
                xs = d1[j - 1 : j + 2]
                ys = row[j - 1 : j + 2]
                xp, yp = parabolic_peak(xs, ys)
                peaks.append((float(dg[i]), float(xp), float(yp)))
    return ConversionMap(
        delta=dg, delta1=d1, delta2=delta2, T11=T11, T12=T12,
        defect=defect, max_mask=max_mask, quantum_valid=qvalid, peaks=peaks,
    )
