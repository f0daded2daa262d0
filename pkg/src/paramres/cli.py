"""Command-line runner: TOML config in, deterministic CSV/JSON tables out.

Subcommands
    threshold   instability boundary epsilon_th(delta) and its frequency
    oscillator  free-running oscillation amplitudes and frame vs an axis
    sweep       driven steady-state branches along delta / epsilon / Delta
    gain        linearized scattering gains about the operating state
    squeeze     homodyne squeezing spectra and matched-filter SNR
    convert     frequency-conversion reflection/transmission maps

Every run writes the requested tables plus ``<subcommand>-manifest.json``
(config echo, library versions, timing, SHA-256 of each output).  Exit code
0 on success, 2 for configuration problems, 3 for numerical failures (a
``<subcommand>-diagnostics.json`` is left next to the outputs).

Config units: rates and detunings in [pump], [drive], [homodyne] and [grid]
are multiples of sqrt(Gamma1*Gamma2) unless the top-level key ``units`` is
``"si"`` (then everything is rad/s, matching [mode_pair]).  Set the env var
PARAMRES_LOG=debug|info|warning to control diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import sys
import time
import traceback
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from datetime import datetime, timezone
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from ._tables import write_csv, write_json
from .conversion import conversion_sweep, full_conversion_point
from .device import DeviceSpec, ModePair, derive_mode_pair, pump_strength
from .noise import (
    HomodyneConfig,
    four_mode_spectrum,
    snr as snr_of,
    squeezed_vacuum_amplitudes,
    two_mode_spectrum,
)
from .response import gain_spectrum
from .steadystate import (
    DriveTone,
    PumpConfig,
    detuning_threshold,
    instability_threshold,
    oscillation_state,
    solve_steady_state,
    sweep_branches,
    trivial_state,
)

log = logging.getLogger("paramres")

SUBCOMMANDS = ("threshold", "oscillator", "sweep", "gain", "squeeze", "convert")


class ConfigError(Exception):
    """Raised for malformed or inconsistent run configuration."""


# ---------------------------------------------------------------------------
# config assembly
# ---------------------------------------------------------------------------

@dataclass
class RunContext:
    cfg: dict
    mode_pair: ModePair
    device: Optional[DeviceSpec]
    pump: PumpConfig
    drives: List[DriveTone]
    oscillator_frame: bool
    hom: HomodyneConfig
    unit: str
    threads: int
    extras: Dict = dc_field(default_factory=dict)


def _load_toml(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from exc


def _normalized_pair(pair: ModePair, s: float) -> ModePair:
    return ModePair(
        Gamma1=pair.Gamma1 / s,
        Gamma2=pair.Gamma2 / s,
        Gamma10=pair.Gamma10 / s,
        Gamma20=pair.Gamma20 / s,
        alpha1=pair.alpha1 / s,
        alpha2=pair.alpha2 / s,
        omega1=pair.omega1 / s,
        omega2=pair.omega2 / s,
        alpha=pair.alpha / s,
    )


def _build_pair(cfg: dict) -> Tuple[ModePair, Optional[DeviceSpec], float]:
    """Returns (mode_pair, device, epsilon_from_device) in SI units."""
    has_mp = "mode_pair" in cfg
    has_dev = "device" in cfg
    if has_mp == has_dev:
        raise ConfigError("exactly one of [mode_pair] or [device] is required")
    if has_mp:
        t = dict(cfg["mode_pair"])
        try:
            G1 = float(t.pop("Gamma1"))
            G2 = float(t.pop("Gamma2"))
        except KeyError as exc:
            raise ConfigError(f"[mode_pair] is missing {exc}") from exc
        try:
            G10 = float(t.pop("Gamma10", G1))
            G20 = float(t.pop("Gamma20", G2))
            a1 = float(t.pop("alpha1", 0.0))
            a2 = float(t.pop("alpha2", 0.0))
            w1 = float(t.pop("omega1", 0.0))
            w2 = float(t.pop("omega2", w1 + 1.0))
            alpha = float(t.pop("alpha")) if "alpha" in t else None
            if t:
                raise ConfigError(f"[mode_pair] has unknown keys: {sorted(t)}")
            pair = ModePair(
                Gamma1=G1, Gamma2=G2, Gamma10=G10, Gamma20=G20,
                alpha1=a1, alpha2=a2, omega1=w1, omega2=w2, alpha=alpha,
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[mode_pair]: {exc}") from exc
        return pair, None, 0.0
    t = dict(cfg["device"])
    idx = t.pop("modes", [1, 2])
    overrides = {
        "Gamma1": t.pop("Gamma1", None),
        "Gamma2": t.pop("Gamma2", None),
    }
    try:
        spec = DeviceSpec(
            gamma=float(t.pop("gamma")),
            omega_scale=float(t.pop("omega_scale")),
            flux_bias=float(t.pop("flux_bias")),
            flux_amp=float(t.pop("flux_amp")),
            coupling_ratio=float(t.pop("coupling_ratio")),
            E_L_cav_over_hbar=float(t.pop("E_L_cav_over_hbar")),
            E_J_over_hbar=float(t.pop("E_J_over_hbar")),
            n_modes=int(t.pop("n_modes", max(idx))),
        )
    except KeyError as exc:
        raise ConfigError(f"[device] is missing {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[device]: {exc}") from exc
    if t:
        raise ConfigError(f"[device] has unknown keys: {sorted(t)}")
    try:
        pair = derive_mode_pair(
            spec,
            (int(idx[0]), int(idx[1])),
            Gamma1=overrides["Gamma1"],
            Gamma2=overrides["Gamma2"],
        )
        eps = pump_strength(spec, pair) if spec.flux_amp > 0 else 0.0
    except ValueError as exc:
        raise ConfigError(f"[device]: {exc}") from exc
    return pair, spec, eps


def _build_context(cfg: dict, subcommand: str, threads: int) -> RunContext:
    units = cfg.get("units", "normalized")
    if units not in ("normalized", "si"):
        raise ConfigError("units must be 'normalized' or 'si'")
    pair_si, device, eps_device = _build_pair(cfg)
    if units == "normalized":
        s = pair_si.rate_scale
        mode_pair = _normalized_pair(pair_si, s)
        eps_device = eps_device / s
        unit = "sqrt(Gamma1*Gamma2)"
    else:
        mode_pair = pair_si
        unit = "rad/s"

    pt = dict(cfg.get("pump", {}))
    regime_default = "conversion" if subcommand == "convert" else "amplification"
    try:
        pump = PumpConfig(
            epsilon=float(pt.pop("epsilon", eps_device)),
            delta=float(pt.pop("delta", 0.0)),
            regime=str(pt.pop("regime", regime_default)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[pump]: {exc}") from exc
    if pt:
        raise ConfigError(f"[pump] has unknown keys: {sorted(pt)}")

    drives: List[DriveTone] = []
    oscillator_frame = False
    for i, dt in enumerate(cfg.get("drive", [])):
        d = dict(dt)
        mode = int(d.pop("mode", 1))
        theta = float(d.pop("theta", 0.0))
        if ("power" in d) == ("amplitude" in d):
            raise ConfigError(
                f"[[drive]] #{i}: give exactly one of power (|B|^2) or amplitude"
            )
        if "power" in d:
            p = float(d.pop("power"))
            if p < 0:
                raise ConfigError(f"[[drive]] #{i}: power must be non-negative")
            amp = math.sqrt(p) * complex(math.cos(theta), math.sin(theta))
        else:
            raw = d.pop("amplitude")
            if isinstance(raw, (list, tuple)):
                amp = complex(float(raw[0]), float(raw[1]))
                if theta:
                    raise ConfigError(
                        f"[[drive]] #{i}: theta cannot combine with a complex amplitude"
                    )
            else:
                amp = float(raw) * complex(math.cos(theta), math.sin(theta))
        det = d.pop("detuning", 0.0)
        if d:
            raise ConfigError(f"[[drive]] #{i} has unknown keys: {sorted(d)}")
        if det == "oscillator":
            oscillator_frame = True
            det = 0.0
        try:
            drives.append(DriveTone(mode=mode, amplitude=amp, detuning=float(det)))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"[[drive]] #{i}: {exc}") from exc

    ht = dict(cfg.get("homodyne", {}))
    try:
        hom = HomodyneConfig(
            theta1=float(ht.pop("theta1", 0.0)),
            theta2=float(ht.pop("theta2", 0.0)),
            mode_set=str(ht.pop("mode_set", "dual-LO")),
            bandwidth=(float(ht["bandwidth"]) if "bandwidth" in ht else None),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[homodyne]: {exc}") from exc
    ht.pop("bandwidth", None)
    if ht:
        raise ConfigError(f"[homodyne] has unknown keys: {sorted(ht)}")

    return RunContext(
        cfg=cfg,
        mode_pair=mode_pair,
        device=device,
        pump=pump,
        drives=drives,
        oscillator_frame=oscillator_frame,
        hom=hom,
        unit=unit,
        threads=max(1, threads),
    )


def _grid(cfg: dict, key: str, allowed_axes: Sequence[str], default_axis: str,
          required: bool = True) -> Optional[Tuple[str, np.ndarray]]:
    if key not in cfg:
        if required:
            raise ConfigError(f"[{key}] section with start/stop/count is required")
        return None
    g = dict(cfg[key])
    axis = str(g.pop("axis", default_axis))
    if axis not in allowed_axes:
        raise ConfigError(f"[{key}].axis must be one of {list(allowed_axes)}")
    try:
        start = float(g.pop("start"))
        stop = float(g.pop("stop"))
        count = int(g.pop("count"))
    except KeyError as exc:
        raise ConfigError(f"[{key}] is missing {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{key}]: {exc}") from exc
    if g:
        raise ConfigError(f"[{key}] has unknown keys: {sorted(g)}")
    if count < 2:
        raise ConfigError(f"[{key}].count must be at least 2")
    return axis, np.linspace(start, stop, count)


def _oscillator_detuning(mode_pair: ModePair, pump: PumpConfig) -> float:
    try:
        return oscillation_state(mode_pair, pump, "stable").Delta0
    except ValueError:
        return instability_threshold(mode_pair, pump.delta)[1]


def _select_state(states, which: str):
    stable = [s for s in states if s.stability == "stable"]
    pool = stable if stable else states
    if which == "largest":
        return pool[0]
    if which == "smallest":
        return pool[-1]
    raise ConfigError("branch selector must be 'largest' or 'smallest'")


def _operating_state(ctx: RunContext, pump: PumpConfig, which: str):
    """Steady state the linearization is taken about, at the given pump."""
    if ctx.drives:
        if ctx.oscillator_frame:
            det = _oscillator_detuning(ctx.mode_pair, pump)
            drives = [DriveTone(d.mode, d.amplitude, det) for d in ctx.drives]
        else:
            drives = ctx.drives
        states = solve_steady_state(ctx.mode_pair, pump, drives)
        return _select_state(states, which)
    eps_th, _ = instability_threshold(ctx.mode_pair, pump.delta)
    if pump.epsilon > eps_th:
        return oscillation_state(ctx.mode_pair, pump, "stable").cavity_state(
            ctx.mode_pair, pump
        )
    return trivial_state(ctx.mode_pair, pump)


# ---------------------------------------------------------------------------
# subcommand runners: each returns a list of (name, header, rows)
# ---------------------------------------------------------------------------

def run_threshold(ctx: RunContext):
    axis, grid = _grid(ctx.cfg, "grid", ("delta",), "delta")
    rows = []
    for d in grid:
        eps_th, Delta_crit = instability_threshold(ctx.mode_pair, float(d))
        rows.append((float(d), float(eps_th), float(Delta_crit)))
    dth = detuning_threshold(ctx.mode_pair, ctx.pump.epsilon)
    ctx.extras["epsilon"] = ctx.pump.epsilon
    ctx.extras["delta_th"] = dth
    header = [
        f"delta [{ctx.unit}]",
        f"epsilon_th [{ctx.unit}]",
        f"Delta_crit [{ctx.unit}]",
    ]
    return [("threshold", header, rows)]


def run_oscillator(ctx: RunContext):
    axis, grid = _grid(ctx.cfg, "grid", ("delta", "epsilon"), "delta")
    rows = []
    for v in grid:
        pump = PumpConfig(
            epsilon=float(v) if axis == "epsilon" else ctx.pump.epsilon,
            delta=float(v) if axis == "delta" else ctx.pump.delta,
            regime="amplification",
        )
        for branch in ("stable", "unstable"):
            try:
                osc = oscillation_state(ctx.mode_pair, pump, branch)
            except ValueError:
                continue
            rows.append(
                (
                    float(v),
                    branch,
                    float(osc.r1),
                    float(osc.r2),
                    float(osc.Theta),
                    float(osc.Delta0),
                )
            )
    header = [
        f"{axis} [{ctx.unit}]",
        "branch",
        "r1 [sqrt(photon)]",
        "r2 [sqrt(photon)]",
        "Theta [rad]",
        f"Delta0 [{ctx.unit}]",
    ]
    return [("oscillator", header, rows)]


def run_sweep(ctx: RunContext):
    axis, grid = _grid(ctx.cfg, "grid", ("delta", "epsilon", "Delta"), "delta")
    table = sweep_branches(
        ctx.mode_pair,
        ctx.pump,
        ctx.drives,
        axis,
        grid,
        drive_frame="oscillator" if ctx.oscillator_frame else "as-given",
    )
    ctx.extras["folds"] = [[int(b), float(v)] for b, v in table.folds]
    ctx.extras["n_branches"] = int(
        len({p.branch for p in table.rows}) if table.rows else 0
    )
    header, rows = table.table(ctx.unit)
    return [("branches", header, rows)]


def run_gain(ctx: RunContext):
    gt = dict(ctx.cfg.get("gain", {}))
    balanced = bool(gt.pop("balanced_approximation", False))
    which = str(gt.pop("branch", "largest"))
    if gt:
        raise ConfigError(f"[gain] has unknown keys: {sorted(gt)}")
    _, inner = _grid(ctx.cfg, "grid", ("Delta",), "Delta")
    outer = _grid(ctx.cfg, "grid2", ("delta", "epsilon"), "delta", required=False)

    def one(i_pump):
        i, pump = i_pump
        state = _operating_state(ctx, pump, which)
        table = gain_spectrum(
            ctx.mode_pair, pump, state, inner, balanced_approximation=balanced
        )
        info = {
            "delta": pump.delta,
            "epsilon": pump.epsilon,
            "Delta_S": float(state.Delta_S),
            "A1": [state.A1.real, state.A1.imag],
            "A2": [state.A2.real, state.A2.imag],
            "stability": state.stability,
            "free_phase": bool(state.free_phase),
        }
        return i, table, info

    if outer is None:
        jobs = [(0, ctx.pump)]
    else:
        oaxis, ogrid = outer
        jobs = [
            (
                i,
                PumpConfig(
                    epsilon=float(v) if oaxis == "epsilon" else ctx.pump.epsilon,
                    delta=float(v) if oaxis == "delta" else ctx.pump.delta,
                    regime=ctx.pump.regime,
                ),
            )
            for i, v in enumerate(ogrid)
        ]
    if ctx.threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=ctx.threads) as ex:
            results = list(ex.map(one, jobs))
    else:
        results = [one(j) for j in jobs]
    results.sort(key=lambda r: r[0])
    outputs = []
    states_info = []
    for i, table, info in results:
        name = "gain" if outer is None else f"gain_{i:03d}"
        header, rows = table.table(ctx.unit)
        outputs.append((name, header, rows))
        states_info.append(info)
    ctx.extras["states"] = states_info
    return outputs


def run_squeeze(ctx: RunContext):
    st = dict(ctx.cfg.get("squeeze", {}))
    kind = str(st.pop("kind", "auto"))
    balanced = bool(st.pop("balanced_approximation", False))
    want_pairs = bool(st.pop("pairs", False))
    if st:
        raise ConfigError(f"[squeeze] has unknown keys: {sorted(st)}")
    if kind not in ("auto", "two-mode", "four-mode"):
        raise ConfigError("squeeze.kind must be auto, two-mode, or four-mode")
    _, grid = _grid(ctx.cfg, "grid", ("Delta",), "Delta")
    if kind == "auto":
        kind = "four-mode" if ctx.drives else "two-mode"
    outputs = []
    if kind == "two-mode":
        spec = two_mode_spectrum(ctx.mode_pair, ctx.pump, ctx.hom, grid)
        state = None
    else:
        state = _operating_state(ctx, ctx.pump, "largest")
        spec = four_mode_spectrum(
            ctx.mode_pair, ctx.pump, state, ctx.hom, grid,
            balanced_approximation=balanced,
        )
    header, rows = spec.table(ctx.unit)
    outputs.append(("squeeze", header, rows))

    if want_pairs:
        pairs = squeezed_vacuum_amplitudes(ctx.mode_pair, ctx.pump, state, grid)
        header, rows = pairs.table(ctx.unit)
        outputs.append(("pairs", header, rows))

    if "snr" in ctx.cfg:
        nt = dict(ctx.cfg["snr"])
        regime = str(nt.pop("regime", "linear-two-mode"))
        analytic = bool(nt.pop("analytic_phases", False))
        if nt:
            raise ConfigError(f"[snr] has unknown keys: {sorted(nt)}")
        tone = next((d for d in ctx.drives if d.mode == 1), None)
        if tone is None:
            raise ConfigError("[snr] needs a mode-1 [[drive]] tone")
        result = snr_of(
            ctx.mode_pair, ctx.pump, tone, ctx.hom,
            regime=regime,
            state=state if regime == "nonlinear-four-mode" else None,
            analytic_phases=analytic,
        )
        th = result.theta if isinstance(result.theta, tuple) else (result.theta, None)
        header = [
            "regime",
            "P0_bar",
            "S_bar",
            "SNR",
            "theta1 [rad]",
            "theta2 [rad]",
            f"bandwidth [{ctx.unit}]",
        ]
        rows = [
            (
                regime,
                float(result.P0_bar),
                float(result.S_bar),
                float(result.SNR),
                float(th[0]),
                (float(th[1]) if th[1] is not None else ""),
                float(result.bandwidth),
            )
        ]
        outputs.append(("snr", header, rows))
        ctx.extras["snr"] = {
            "SNR": float(result.SNR),
            "P0_bar": float(result.P0_bar),
            "S_bar": float(result.S_bar),
            "bandwidth": float(result.bandwidth),
        }
    return outputs


def run_convert(ctx: RunContext):
    if ctx.pump.regime != "conversion":
        raise ConfigError("the convert subcommand needs pump.regime='conversion'")
    _, d1 = _grid(ctx.cfg, "grid", ("delta1",), "delta1")
    outer = _grid(ctx.cfg, "grid2", ("delta",), "delta", required=False)
    dgrid = outer[1] if outer is not None else np.array([ctx.pump.delta])
    tone = next((d for d in ctx.drives if d.mode == 1), None)

    if ctx.threads > 1 and dgrid.size > 1:
        def one(d):
            return conversion_sweep(ctx.mode_pair, ctx.pump, tone, d1, [float(d)])

        with ThreadPoolExecutor(max_workers=ctx.threads) as ex:
            parts = list(ex.map(one, dgrid))
        cmap = parts[0]
        cmap.delta = np.array([p.delta[0] for p in parts])
        cmap.delta2 = np.vstack([p.delta2 for p in parts])
        cmap.T11 = np.vstack([p.T11 for p in parts])
        cmap.T12 = np.vstack([p.T12 for p in parts])
        cmap.defect = np.vstack([p.defect for p in parts])
        cmap.max_mask = np.vstack([p.max_mask for p in parts])
        cmap.quantum_valid = np.vstack([p.quantum_valid for p in parts])
        cmap.peaks = [pk for p in parts for pk in p.peaks]
    else:
        cmap = conversion_sweep(ctx.mode_pair, ctx.pump, tone, d1, dgrid)
    ctx.extras["peaks"] = [[float(a), float(b), float(c)] for a, b, c in cmap.peaks]
    ctx.extras["quantum_valid_everywhere"] = bool(np.all(cmap.quantum_valid))
    if ctx.mode_pair.lossless:
        points = []
        for d in dgrid:
            try:
                eps, D = full_conversion_point(ctx.mode_pair, float(d))
                points.append([float(d), float(eps), float(D)])
            except ValueError:
                points.append([float(d), None, None])
        ctx.extras["full_conversion_points"] = points
    header, rows = cmap.table(ctx.unit)
    return [("convert", header, rows)]


RUNNERS = {
    "threshold": run_threshold,
    "oscillator": run_oscillator,
    "sweep": run_sweep,
    "gain": run_gain,
    "squeeze": run_squeeze,
    "convert": run_convert,
}


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _configure_logging() -> None:
    level_name = os.environ.get("PARAMRES_LOG", "warning").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(name)s %(levelname)s: %(message)s"
    )


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, datetime):
        return obj.isoformat()
    return obj


def run(subcommand: str, config_path: str, out_dir: Optional[str] = None,
        threads: Optional[int] = None, out_format: Optional[str] = None) -> int:
    """Programmatic entry point; returns the process exit code."""
    _configure_logging()
    started = datetime.now(timezone.utc)
    t0 = time.monotonic()
    try:
        if subcommand not in RUNNERS:
            raise ConfigError(f"unknown subcommand {subcommand!r}")
        cfg = _load_toml(config_path)
        out_cfg = dict(cfg.get("output", {}))
        outdir = out_dir or str(out_cfg.get("dir", "paramres-out"))
        fmt = (out_format or str(out_cfg.get("format", "csv"))).lower()
        if fmt not in ("csv", "json"):
            raise ConfigError("output format must be 'csv' or 'json'")
        nthreads = threads if threads is not None else (os.cpu_count() or 1)
        ctx = _build_context(cfg, subcommand, nthreads)
    except ConfigError as exc:
        print(f"paramres: config error: {exc}", file=sys.stderr)
        return 2

    os.makedirs(outdir, exist_ok=True)
    try:
        log.info("running %s with %s", subcommand, config_path)
        outputs = RUNNERS[subcommand](ctx)
    except ConfigError as exc:
        print(f"paramres: config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # numerical failure: leave diagnostics behind
        diag = {
            "subcommand": subcommand,
            "error": type(exc).__name__,
            "message": str(exc),
            "traceback": traceback.format_exc(),
            "config": _json_safe(cfg),
        }
        diag_path = os.path.join(outdir, f"{subcommand}-diagnostics.json")
        with open(diag_path, "w", encoding="utf-8") as fh:
            json.dump(diag, fh, indent=1)
            fh.write("\n")
        print(
            f"paramres: numerical failure: {exc} (diagnostics in {diag_path})",
            file=sys.stderr,
        )
        return 3

    manifest_outputs = []
    for name, header, rows in outputs:
        fname = f"{name}.{fmt}"
        path = os.path.join(outdir, fname)
        if fmt == "csv":
            write_csv(path, header, rows)
        else:
            write_json(path, header, rows)
        manifest_outputs.append(
            {"file": fname, "sha256": _sha256(path), "bytes": os.path.getsize(path)}
        )
        log.info("wrote %s", path)
    manifest = {
        "subcommand": subcommand,
        "config_path": os.path.abspath(config_path),
        "config": _json_safe(cfg),
        "versions": {
            "paramres": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": sys.version.split()[0],
        },
        "started": started.isoformat(),
        "elapsed_s": time.monotonic() - t0,
        "threads": ctx.threads,
        "outputs": manifest_outputs,
        "extras": _json_safe(ctx.extras),
    }
    mpath = os.path.join(outdir, f"{subcommand}-manifest.json")
    with open(mpath, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1)
        fh.write("\n")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="paramres",
        description=(
            "steady states, gain, squeezing and frequency conversion of a "
            "flux-pumped two-mode Kerr cavity"
        ),
    )
    parser.add_argument("--version", action="version", version=f"paramres {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, blurb in (
        ("threshold", "instability boundary epsilon_th(delta)"),
        ("oscillator", "free-running oscillation branches"),
        ("sweep", "driven steady-state branches along an axis"),
        ("gain", "linearized gain spectra about the operating state"),
        ("squeeze", "homodyne squeezing spectra and SNR"),
        ("convert", "frequency-conversion maps"),
    ):
        sp = sub.add_parser(name, help=blurb)
        sp.add_argument("--config", required=True, help="TOML run configuration")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument(
            "--threads",
            type=int,
            default=None,
            help="worker threads for grid decomposition (default: logical cores)",
        )
        sp.add_argument(
            "--format", choices=("csv", "json"), default=None, help="table format"
        )
    args = parser.parse_args(argv)
    return run(
        args.subcommand,
        args.config,
        out_dir=args.out,
        threads=args.threads,
        out_format=args.format,
    )


if __name__ == "__main__":
    sys.exit(main())
