"""Device-level parameters of a flux-pumped two-mode nonlinear cavity.

The physical system is a quarter-wavelength resonator terminated by a
flux-tunable Josephson inductance (a SQUID) and read out through a coupling
capacitor.  This module solves the electromagnetic boundary-value problem of
that circuit and condenses it into the handful of numbers the dynamical
modules actually consume: mode frequencies, external coupling rates, self- and
cross-Kerr coefficients, and the pump rate generated by a weak ac modulation
of the SQUID flux.

Two entry points matter in practice:

* ``derive_mode_pair`` maps a :class:`DeviceSpec` to a :class:`ModePair`,
  the parameter bundle shared by all dynamical calculations;
* ``pump_strength`` converts a flux-modulation amplitude into the parametric
  coupling rate ``epsilon``.

All rates are angular frequencies (rad/s).  A :class:`ModePair` can also be
built directly in any consistent unit system (e.g. rates normalized to
sqrt(Gamma1*Gamma2)); nothing downstream depends on absolute scale.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

__all__ = [
    "DeviceSpec",
    "ModePair",
    "RegimeReport",
    "solve_mode_spectrum",
    "derive_mode_pair",
    "pump_strength",
    "validate_regime",
]


@dataclass
class DeviceSpec:
    """Lumped physical description of the cavity + SQUID circuit.

    gamma
        dimensionless participation ratio of the terminating inductance,
        equal to the ratio of the cavity inductive energy scale to twice the
        flux-tuned Josephson energy.  Governs the mode spectrum through the
        dispersion relation ``(k d) tan(k d) = 1/gamma``.
    omega_scale
        angular-frequency unit (rad/s) that converts the dimensionless
        wavenumbers ``k_n d`` into mode frequencies, ``omega_n =
        omega_scale * (k_n d)`` (the inverse transit time of the line).
    flux_bias
        dc flux working point F in radians, 0 <= F < pi/2.
    flux_amp
        dimensionless amplitude of the ac flux modulation, 0 <= flux_amp < 1.
    coupling_ratio
        ratio of the input coupling capacitance to the total cavity
        capacitance; sets the external linewidths.
    E_L_cav_over_hbar
        cavity inductive energy scale divided by hbar (rad/s).
    E_J_over_hbar
        bare Josephson energy divided by hbar (rad/s).
    n_modes
        number of cavity modes tracked when solving the spectrum.
    """

    gamma: float
    omega_scale: float
    flux_bias: float
    flux_amp: float
    coupling_ratio: float
    E_L_cav_over_hbar: float
    E_J_over_hbar: float
    n_modes: int = 2

    def __post_init__(self):
        if not (0.0 < self.gamma < 0.5):
            raise ValueError(
                f"participation ratio gamma={self.gamma} outside (0, 0.5)"
            )
        if self.gamma > 0.2:
            warnings.warn(
                "gamma > 0.2: strong boundary loading, derived Kerr and "
                "coupling coefficients lose accuracy",
                stacklevel=2,
            )
        if not (0.0 <= self.flux_amp < 1.0):
            raise ValueError(f"flux_amp={self.flux_amp} outside [0, 1)")
        if not (0.0 <= self.flux_bias < math.pi / 2):
            raise ValueError(
                f"flux_bias={self.flux_bias} outside [0, pi/2); the Josephson "
                "inductance diverges at pi/2"
            )
        if self.omega_scale <= 0 or self.E_L_cav_over_hbar <= 0 or self.E_J_over_hbar <= 0:
            raise ValueError("omega_scale and energy scales must be positive")
        if self.coupling_ratio < 0:
            raise ValueError("coupling_ratio must be non-negative")
        if int(self.n_modes) < 1:
            raise ValueError("n_modes must be a positive integer")
        self.n_modes = int(self.n_modes)
        # gamma is authoritative; cross-check it against the energy scales.
        implied = self.E_L_cav_over_hbar / (
            2.0 * self.E_J_over_hbar * math.cos(self.flux_bias)
        )
        if abs(implied - self.gamma) > 1e-6 * self.gamma:
            warnings.warn(
                f"gamma={self.gamma} disagrees with "
                f"E_L/(2 E_J cos F)={implied:.6g}; gamma is used as given",
                stacklevel=2,
            )


@dataclass
class ModePair:
    """Rates and nonlinearities of the two modes used at parametric resonance.

    Gamma1, Gamma2
        total (energy) damping rates of the lower/upper mode, rad/s.
    Gamma10, Gamma20
        external coupling rates through the readout port, rad/s;
        0 < Gamma_n0 <= Gamma_n.  Equality means a lossless (overcoupled
        limit) mode in which every emitted photon reaches the detector.
    alpha1, alpha2
        self-Kerr coefficients, rad/s per photon.
    alpha
        cross-Kerr coefficient; equals sqrt(alpha1*alpha2) for modes sharing
        a single nonlinear element (enforced here; computed if omitted).
    omega1, omega2
        mode angular frequencies, rad/s, omega2 > omega1.
    """

    Gamma1: float
    Gamma2: float
    Gamma10: float
    Gamma20: float
    alpha1: float
    alpha2: float
    omega1: float
    omega2: float
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.Gamma10 <= 0 or self.Gamma20 <= 0:
            raise ValueError("external couplings Gamma10, Gamma20 must be positive")
        if self.Gamma1 < self.Gamma10 or self.Gamma2 < self.Gamma20:
            raise ValueError("total damping cannot be below the external coupling")
        if self.alpha1 < 0 or self.alpha2 < 0:
            raise ValueError("Kerr coefficients must be non-negative")
        expected = math.sqrt(self.alpha1 * self.alpha2)
        if self.alpha is None:
            self.alpha = expected
        elif abs(self.alpha - expected) > 1e-12 * max(expected, 1e-300):
            raise ValueError(
                f"alpha={self.alpha} inconsistent with sqrt(alpha1*alpha2)="
                f"{expected}; a single shared nonlinear element requires equality"
            )
        if not self.omega2 > self.omega1:
            raise ValueError("mode ordering requires omega2 > omega1")

    @property
    def rate_scale(self) -> float:
        """Geometric-mean linewidth sqrt(Gamma1*Gamma2), the natural rate unit."""
        return math.sqrt(self.Gamma1 * self.Gamma2)

    @property
    def lossless(self) -> bool:
        """True when each mode decays only through the readout port."""
        return (
            abs(self.Gamma1 - self.Gamma10) <= 1e-12 * self.Gamma1
            and abs(self.Gamma2 - self.Gamma20) <= 1e-12 * self.Gamma2
        )

    @property
    def balanced(self) -> bool:
        """True when the two modes share damping and Kerr strength
        (the regime in which the dynamics splits into two supermode blocks)."""
        g_ok = abs(self.Gamma1 - self.Gamma2) <= 1e-6 * max(self.Gamma1, self.Gamma2)
        g0_ok = abs(self.Gamma10 - self.Gamma20) <= 1e-6 * max(self.Gamma10, self.Gamma20)
        a_scale = max(self.alpha1, self.alpha2)
        a_ok = a_scale == 0.0 or abs(self.alpha1 - self.alpha2) <= 1e-6 * a_scale
        return g_ok and g0_ok and a_ok


def _dispersion(gamma: float, x: float) -> float:
    return gamma * x * math.tan(x) - 1.0


def solve_mode_spectrum(gamma: float, n_modes: int) -> np.ndarray:
    """Dimensionless wavenumbers ``k_n d`` of the inductively loaded line.

    Roots of ``(k d) tan(k d) = 1/gamma``, one per branch of the tangent; the
    n-th root lies in ``((n-1) pi, (n-1) pi + pi/2)``.  As gamma -> 0 the
    ladder approaches the bare quarter-wave values (2n-1) pi/2 and every root
    decreases monotonically with growing gamma.

    Bracketed bisection followed by Newton polishing (kept inside the
    bracket); the relative residual |gamma x tan x - 1| of every root is
    verified to be below 1e-12.
    """
    if not (0.0 < gamma < 0.5):
        raise ValueError(f"gamma={gamma} outside (0, 0.5)")
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    roots = np.empty(n_modes)
    for n in range(1, n_modes + 1):
        base = (n - 1) * math.pi
        lo = base
        # just below the tangent pole, where the left side is huge and positive
        hi_off = 1e-3
        hi = base + math.pi / 2 - hi_off
        while _dispersion(gamma, hi) <= 0.0 and hi_off > 1e-15:
            hi_off *= 1e-3
            hi = base + math.pi / 2 - hi_off
        flo = _dispersion(gamma, lo) if lo > 0.0 else -1.0
        if flo > 0.0:  # cannot happen on these branches, but keep the guard
            raise RuntimeError(f"failed to bracket root {n} at gamma={gamma}")
        a, b = lo, hi
        for _ in range(60):
            m = 0.5 * (a + b)
            if _dispersion(gamma, m) > 0.0:
                b = m
            else:
                a = m
        x = 0.5 * (a + b)
        # Newton polish, safeguarded to the bisection bracket
        for _ in range(8):
            t = math.tan(x)
            f = gamma * x * t - 1.0
            df = gamma * (t + x * (1.0 + t * t))
            if df == 0.0:
                break
            x_new = x - f / df
            if not (a < x_new < b):
                break
            if x_new == x:
                break
            x = x_new
        if abs(gamma * x * math.tan(x) - 1.0) > 1e-12:
            raise RuntimeError(
                f"mode-spectrum root {n} failed the residual check at gamma={gamma}"
            )
        roots[n - 1] = x
    return roots


def derive_mode_pair(
    spec: DeviceSpec,
    mode_indices: Tuple[int, int] = (1, 2),
    Gamma1: Optional[float] = None,
    Gamma2: Optional[float] = None,
) -> ModePair:
    """Condense a :class:`DeviceSpec` into the :class:`ModePair` of two modes.

    ``mode_indices = (n, m)`` selects the modes (1-based, n < m <= n_modes).
    Total linewidths default to the derived external couplings (lossless
    modes); pass ``Gamma1``/``Gamma2`` to include internal loss.
    """
    n, m = int(mode_indices[0]), int(mode_indices[1])
    if not (1 <= n < m <= spec.n_modes):
        raise ValueError(
            f"mode_indices={mode_indices} must satisfy 1 <= n < m <= n_modes={spec.n_modes}"
        )
    roots = solve_mode_spectrum(spec.gamma, m)
    xs = roots[[n - 1, m - 1]]
    cos_x = np.cos(xs)
    if np.any(np.abs(cos_x) < 1e-14):
        raise ValueError(
            "a selected mode has a node at the SQUID end (cos(k d) = 0); its "
            "coupling to the flux pump vanishes and the derivation is invalid"
        )
    omegas = spec.omega_scale * xs
    gamma0 = omegas * spec.coupling_ratio**2 * xs
    # Kerr coefficients from the zero-point phase slip across the SQUID
    alphas = (np.sqrt(omegas) * cos_x / xs) ** 4 / (
        2.0 * spec.gamma * spec.E_L_cav_over_hbar
    )
    if np.any(gamma0 <= 0.0) or np.any(alphas < 0.0):
        raise ValueError("derived a non-positive coupling or Kerr coefficient")
    G1 = gamma0[0] if Gamma1 is None else float(Gamma1)
    G2 = gamma0[1] if Gamma2 is None else float(Gamma2)
    return ModePair(
        Gamma1=G1,
        Gamma2=G2,
        Gamma10=float(gamma0[0]),
        Gamma20=float(gamma0[1]),
        alpha1=float(alphas[0]),
        alpha2=float(alphas[1]),
        omega1=float(omegas[0]),
        omega2=float(omegas[1]),
    )


def _wavenumbers_of(spec: DeviceSpec, mode_pair: ModePair) -> Tuple[float, float]:
    """Recover the dimensionless wavenumbers of a device-derived pair.

    Mode frequencies are omega = omega_scale * (k d) exactly, so the inverse
    map is trivial; a residual check guards against mixing a ModePair with a
    spec it was not derived from.
    """
    xs = (mode_pair.omega1 / spec.omega_scale, mode_pair.omega2 / spec.omega_scale)
    for x in xs:
        if abs(spec.gamma * x * math.tan(x) - 1.0) > 1e-6:
            raise ValueError(
                "mode_pair frequencies do not solve this device's dispersion "
                "relation; was the pair derived from a different spec?"
            )
    return xs


def pump_strength(spec: DeviceSpec, mode_pair: ModePair) -> float:
    """Parametric coupling rate epsilon (rad/s) for the spec's flux modulation.

    The ac flux of amplitude ``flux_amp`` about the bias F modulates the
    Josephson inductance and couples the two modes with a rate proportional
    to tan F and to each mode's amplitude at the SQUID end of the line.
    Returns a non-negative rate (the pump phase is absorbed into the phase
    convention of the intracavity fields).
    """
    if math.cos(spec.flux_bias) < 1e-12:
        raise ValueError("flux bias at pi/2: pump expansion diverges")
    x1, x2 = _wavenumbers_of(spec, mode_pair)
    w1, w2 = mode_pair.omega1, mode_pair.omega2
    eps = (
        spec.flux_amp
        * math.tan(spec.flux_bias)
        / (2.0 * spec.gamma)
        * (math.sqrt(w1) * math.cos(x1) / x1)
        * (math.sqrt(w2) * math.cos(x2) / x2)
    )
    return abs(eps)


@dataclass
class RegimeReport:
    """Outcome of :func:`validate_regime`.

    ratios maps a label like ``"epsilon/omega1"`` to its value; entries above
    0.3 are failures, entries above 0.1 are warnings.  ``above_threshold_capable``
    reports whether the pump can be driven well past the parametric
    instability while all rates stay perturbative (both Gamma_n < 0.1 epsilon).
    """

    ratios: Dict[str, float]
    warnings: List[str]
    failures: List[str]
    passed: bool
    above_threshold_capable: bool


def validate_regime(spec, mode_pair: ModePair, pump, photon_scale: float) -> RegimeReport:
    """Check that the rotating-wave, weak-nonlinearity expansion is justified.

    Every rate entering the two-mode model (pump detuning, pump strength,
    Kerr shift at the expected photon number ``photon_scale``, linewidths)
    must be small compared to the mode frequencies.  Ratios below 0.1 pass
    silently, ratios in [0.1, 0.3) warn, anything larger is a failure.
    A large flux-bias slope (tan F > 10) is flagged as a warning because the
    pump-strength linearization in the flux amplitude degrades there.
    """
    eps = pump.epsilon
    delta = pump.delta
    ratios: Dict[str, float] = {}
    for label, omega in (("omega1", mode_pair.omega1), ("omega2", mode_pair.omega2)):
        ratios[f"|delta|/{label}"] = abs(delta) / omega
        ratios[f"epsilon/{label}"] = eps / omega
        ratios[f"Gamma_{label[-1]}/{label}"] = (
            mode_pair.Gamma1 if label.endswith("1") else mode_pair.Gamma2
        ) / omega
    ratios["alpha1*n/omega1"] = mode_pair.alpha1 * photon_scale / mode_pair.omega1
    ratios["alpha2*n/omega2"] = mode_pair.alpha2 * photon_scale / mode_pair.omega2

    warns: List[str] = []
    fails: List[str] = []
    for k, v in ratios.items():
        if v >= 0.3:
            fails.append(f"{k} = {v:.3g} >= 0.3")
        elif v >= 0.1:
            warns.append(f"{k} = {v:.3g} >= 0.1")
    if spec is not None:
        if math.tan(spec.flux_bias) > 10.0:
            warns.append(
                f"tan(flux_bias) = {math.tan(spec.flux_bias):.3g} > 10: "
                "flux-modulation linearization degrades"
            )
        implied = spec.E_L_cav_over_hbar / (
            2.0 * spec.E_J_over_hbar * math.cos(spec.flux_bias)
        )
        if abs(implied - spec.gamma) > 1e-6 * spec.gamma:
            warns.append(
                f"gamma={spec.gamma} vs E_L/(2 E_J cos F)={implied:.6g} mismatch"
            )
    capable = (
        mode_pair.Gamma1 < 0.1 * eps and mode_pair.Gamma2 < 0.1 * eps
        if eps > 0
        else False
    )
    return RegimeReport(
        ratios=ratios,
        warnings=warns,
        failures=fails,
        passed=not fails,
        above_threshold_capable=capable,
    )
