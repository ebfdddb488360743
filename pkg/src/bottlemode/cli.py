"""Command-line front end.

Subcommands ``solve``, ``field``, ``coupling``, ``tuning`` and
``oracle-check``.  Every run writes its data files plus a manifest into
the output directory.  The manifest records the fully resolved
configuration and can be passed back through ``--config`` to repeat the
run exactly.

Exit codes: 0 success, 1 solver or numerical failure, 2 usage or
configuration error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from . import __version__, _io
from .coupling import (
    g_at_surface_curve,
    g_max,
    regime_report,
    sphere_g_curve,
    sphere_mode,
    sphere_mode_volume,
)
from .fields import field_grid, mode_volume
from .materials import CS_D2, SILICA
from .modes import solve_bottle_mode
from .oracle import compare, load_table
from .tuning import (
    microsphere_tuning_comparison,
    mode_spacings,
    strain_budget,
    strain_response,
)


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def _positive(kind: Callable[[Any], Any]):
    def conv(v):
        x = kind(v)
        if not (x > 0) or (isinstance(x, float) and not math.isfinite(x)):
            raise ValueError("must be positive")
        return x
    return conv


def _nonneg_int(v):
    x = int(v)
    if x < 0:
        raise ValueError("must be a non-negative integer")
    return x


def _finite(v):
    x = float(v)
    if not math.isfinite(x):
        raise ValueError("must be finite")
    return x


def _bool(v):
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError("must be true or false")


def _choice(*options):
    def conv(v):
        s = str(v)
        if s not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return s
    return conv


def _grid(v):
    parts = str(v).lower().split("x")
    if len(parts) != 2:
        raise ValueError("must look like WxH")
    w, h = (int(p) for p in parts)
    if w < 1 or h < 1:
        raise ValueError("grid dimensions must be positive")
    return f"{w}x{h}"


def _range(v):
    if v is None or v == "auto":
        return "auto"
    lo, hi = (float(p) for p in str(v).split(":"))
    if not hi > lo:
        raise ValueError("range must be LO:HI with HI > LO")
    return f"{lo!r}:{hi!r}"


def _optional(conv):
    def wrapped(v):
        if v is None or str(v).strip().lower() in ("", "none", "auto"):
            return None
        return conv(v)
    return wrapped


# key -> (converter, default); physical keys of the design point first
SCHEMA: dict[str, tuple[Callable[[Any], Any], Any]] = {
    "wavelength": (_positive(float), 0.852),
    "R_c": (_positive(float), 7.8),
    "delta_k": (_positive(float), 0.0032),
    "q": (_nonneg_int, 80),
    "n_bulk": (_optional(_positive(float)), None),
    "dn_dT": (_positive(float), SILICA.dn_dT),
    "youngs_modulus": (_positive(float), SILICA.youngs_modulus),
    "poisson_ratio": (_finite, SILICA.poisson_ratio),
    "p11": (_finite, SILICA.p11),
    "p12": (_finite, SILICA.p12),
    "damage_threshold": (_positive(float), SILICA.damage_threshold),
    "dipole_moment": (_positive(float), CS_D2.dipole_moment),
    "sphere_radius": (_positive(float), 25.0),
    "out": (str, "bottlemode_out"),
    "format": (_choice("csv", "json"), "csv"),
    "grid": (_grid, "400x800"),
    "rho_range": (_range, "auto"),
    "z_range": (_range, "auto"),
    "dmax": (_positive(float), 1.0),
    "samples": (_positive(int), 201),
    "sphere": (_bool, False),
    "q_factor": (_positive(float), 1e9),
}

_SILICA_KEYS = ("dn_dT", "youngs_modulus", "poisson_ratio", "p11", "p12", "damage_threshold")


def _convert(key: str, value: Any) -> Any:
    if key not in SCHEMA:
        raise ConfigError(f"unknown config key '{key}'")
    conv, _ = SCHEMA[key]
    try:
        return conv(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid value for '{key}': {value!r} ({exc})") from None


def parse_config_text(text: str) -> dict[str, Any]:
    """Parse ``key = value`` lines (``#`` comments) or a manifest JSON document."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config JSON not parseable: {exc}") from None
        items = doc.get("config", doc)
        if not isinstance(items, dict):
            raise ConfigError("manifest 'config' entry must be an object")
        return {k: _convert(k, v) for k, v in items.items()}
    out: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw.strip()!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        out[key] = _convert(key, value)
    return out


def resolve_config(path: str | None, overrides: dict[str, Any]) -> dict[str, Any]:
    cfg = {k: default for k, (_, default) in SCHEMA.items()}
    if path is not None:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        cfg.update(parse_config_text(text))
    for key, value in overrides.items():
        if value is not None:
            cfg[key] = _convert(key, value)
    if cfg["poisson_ratio"] < 0 or cfg["poisson_ratio"] >= 0.5:
        raise ConfigError("invalid value for 'poisson_ratio': must lie in [0, 0.5)")
    return cfg


def _config_record(cfg: dict[str, Any]) -> dict[str, Any]:
    """Config for the manifest; floats as shortest round-trip strings."""
    rec: dict[str, Any] = {}
    for key in SCHEMA:
        v = cfg[key]
        rec[key] = repr(v) if isinstance(v, float) else v
    return rec


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

@dataclass
class Run:
    cfg: dict[str, Any]
    command: str
    timings: dict[str, float]
    warnings: list[str]

    def stage(self, name: str, fn: Callable[[], Any]) -> Any:
        t0 = time.perf_counter()
        value = fn()
        self.timings[name] = time.perf_counter() - t0
        return value


def _transition(cfg):
    return CS_D2.with_overrides(dipole_moment=cfg["dipole_moment"])


def _silica(cfg):
    return SILICA.with_overrides(**{k: cfg[k] for k in _SILICA_KEYS})


def _solve(run: Run):
    cfg = run.cfg
    mode = run.stage("solve", lambda: solve_bottle_mode(
        cfg["wavelength"], cfg["R_c"], cfg["delta_k"], cfg["q"], n_bulk=cfg["n_bulk"]))
    vol = run.stage("mode_volume", lambda: mode_volume(mode))
    return mode, vol


def _mode_summary(mode, vol, g0, transition=CS_D2) -> dict[str, Any]:
    return {
        "m": mode.m,
        "q": mode.q,
        "k0_per_um": mode.k0,
        "resonance_wavelength_um": mode.wavelength,
        "n_bulk": mode.n_bulk,
        "n_eff": mode.n_eff,
        "R0_um": mode.profile.R0,
        "z_c_turning_um": mode.caustic.z_turning,
        "z_c_intensity_um": mode.caustic.z_intensity_max,
        "V_um3": vol.volume,
        "V_error_um3": vol.quadrature_error_estimate,
        "g_max_over_2pi_MHz": g_max(vol.volume, transition) / (2 * math.pi * 1e6),
        "g0_over_2pi_MHz": g0 / (2 * math.pi * 1e6),
    }


def _write_manifest(run: Run, out: Path, summary: dict[str, Any], outputs: list[str]) -> Path:
    manifest = {
        "tool": "bottlemode",
        "version": __version__,
        "command": run.command,
        "config": _config_record(run.cfg),
        "mode": summary,
        "outputs": outputs,
        "warnings": run.warnings,
        "timings_s": run.timings,
    }
    path = out / f"{run.command}_manifest.json"
    path.write_text(_io.dumps(manifest), encoding="utf-8")
    return path


def _print_summary(summary: dict[str, Any], keys) -> None:
    for k in keys:
        v = summary[k]
        print(f"{k}={v}" if isinstance(v, int) else f"{k}={_io.fmt(v)}")


def _outdir(cfg) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _surface_g(mode, vol, cfg, samples=1, d_max=0.0):
    return g_at_surface_curve(mode, vol, _transition(cfg), d_max=d_max, samples=samples)


def cmd_solve(run: Run) -> int:
    mode, vol = _solve(run)
    g0 = run.stage("coupling", lambda: _surface_g(mode, vol, run.cfg).g_axis[0])
    summary = _mode_summary(mode, vol, g0, _transition(run.cfg))
    _print_summary(summary, ("m", "n_eff", "R0_um", "z_c_turning_um", "z_c_intensity_um",
                             "V_um3", "g0_over_2pi_MHz"))
    _write_manifest(run, _outdir(run.cfg), summary, [])
    return 0


def _axis_range(spec: str, default: tuple[float, float]) -> tuple[float, float]:
    if spec == "auto":
        return default
    lo, hi = spec.split(":")
    return float(lo), float(hi)


def cmd_field(run: Run, jobs: int) -> int:
    cfg = run.cfg
    mode, vol = _solve(run)
    n_rho, n_z = (int(v) for v in cfg["grid"].split("x"))
    zt = mode.caustic.z_turning
    rho_range = _axis_range(cfg["rho_range"], (0.0, 1.5 * mode.profile.R0))
    z_range = _axis_range(cfg["z_range"], (-1.25 * zt, 1.25 * zt))
    grid = run.stage("field_grid", lambda: field_grid(mode, rho_range, z_range, (n_rho, n_z),
                                                      jobs=jobs))
    if grid.under_resolved:
        run.warnings.append("axial grid spacing does not resolve the caustic lobe")
        print("warning: axial grid spacing does not resolve the caustic lobe", file=sys.stderr)
    out = _outdir(cfg)
    name = f"field.{cfg['format']}"
    with open(out / name, "w", encoding="utf-8", newline="\n") as fh:
        if cfg["format"] == "csv":
            grid.write_csv(fh)
        else:
            grid.write_json(fh)
    g0 = _surface_g(mode, vol, cfg).g_axis[0]
    summary = _mode_summary(mode, vol, g0, _transition(cfg))
    _print_summary(summary, ("m", "z_c_intensity_um"))
    print(f"field_file={out / name}")
    _write_manifest(run, out, summary, [name])
    return 0


def _write_curve(curve, out: Path, stem: str, fmt_: str) -> str:
    name = f"{stem}.{fmt_}"
    with open(out / name, "w", encoding="utf-8", newline="\n") as fh:
        if fmt_ == "csv":
            curve.write_csv(fh)
        else:
            fh.write(_io.dumps(curve.to_json_dict()))
    return name


def cmd_coupling(run: Run) -> int:
    cfg = run.cfg
    mode, vol = _solve(run)
    tr = _transition(cfg)
    curve = run.stage("bottle_curve", lambda: g_at_surface_curve(
        mode, vol, tr, d_max=cfg["dmax"], samples=cfg["samples"]))
    out = _outdir(cfg)
    files = [_write_curve(curve, out, "coupling_bottle", cfg["format"])]
    summary = _mode_summary(mode, vol, float(curve.g_axis[0]), tr)
    print(f"m={mode.m}")
    print(f"g0_over_2pi_MHz={_io.fmt(curve.g_over_2pi_MHz[0])}")
    print(f"g_max_over_2pi_MHz={_io.fmt(g_max(vol.volume, tr) / (2 * math.pi * 1e6))}")
    if cfg["sphere"]:
        sm = run.stage("sphere_solve", lambda: sphere_mode(
            cfg["sphere_radius"], cfg["wavelength"], cfg["n_bulk"]))
        svol = run.stage("sphere_volume", lambda: sphere_mode_volume(sm))
        scurve = run.stage("sphere_curve", lambda: sphere_g_curve(
            sm, svol, tr, d_max=cfg["dmax"], samples=cfg["samples"]))
        files.append(_write_curve(scurve, out, "coupling_sphere", cfg["format"]))
        r_max = g_max(svol.volume, tr) / g_max(vol.volume, tr)
        r_surf = float(curve.g_axis[0] / scurve.g_axis[0])
        summary.update({
            "sphere_l": sm.l,
            "sphere_V_um3": svol.volume,
            "ratio_gmax_sphere_over_bottle": r_max,
            "ratio_g0_bottle_over_sphere": r_surf,
        })
        print(f"sphere_l={sm.l}")
        print(f"ratio_gmax_sphere_over_bottle={_io.fmt(r_max)}")
        print(f"ratio_g0_bottle_over_sphere={_io.fmt(r_surf)}")
    _write_manifest(run, out, summary, files)
    return 0


def tuning_report(mode, vol, cfg) -> dict[str, Any]:
    silica = _silica(cfg)
    tr = _transition(cfg)
    spec = mode_spacings(mode)
    budget = strain_budget(mode, spec, silica)
    sphere = microsphere_tuning_comparison(cfg["sphere_radius"], cfg["q_factor"], mode.n_bulk,
                                           cfg["wavelength"])
    g0 = float(_surface_g(mode, vol, cfg).g_axis[0])
    regime = regime_report(g0, cfg["q_factor"], tr)
    two_pi_mhz = 2 * math.pi * 1e6
    return {
        "spectrum": {
            "dnu_m_numeric_THz": spec.dnu_m_numeric / 1e12,
            "dnu_m_formula_THz": spec.dnu_m_formula / 1e12,
            "dnu_q_numeric_GHz": spec.dnu_q_numeric / 1e9,
            "dnu_q_formula_GHz": spec.dnu_q_formula / 1e9,
            "mode_frequency_THz": spec.frequency / 1e12,
            "flags": list(spec.flags),
        },
        "temperature": {
            "relative_shift": budget.relative_path_change_per_fsr,
            "dT_K": budget.temperature_delta.dT_direct,
            "dT_strict_K": budget.temperature_delta.dT_strict,
        },
        "strain": {
            "coefficient": strain_response(silica, mode.n_bulk),
            "strain_per_fsr": budget.strain_per_fsr,
            "stress_GPa": budget.stress_per_fsr / 1e9,
            "safety_margin": budget.safety_margin,
        },
        "microsphere": {
            "radius_um": cfg["sphere_radius"],
            "fsr_THz": sphere.fsr / 1e12,
            "relative_path_change_per_fsr": sphere.relative_path_change_per_fsr,
            "linewidth_over_fsr": sphere.linewidth_over_fsr,
        },
        "regime": {
            "Q": cfg["q_factor"],
            "g_over_2pi_MHz": regime.g / two_pi_mhz,
            "kappa_over_2pi_MHz": regime.kappa / two_pi_mhz,
            "gamma_over_2pi_MHz": regime.gamma / two_pi_mhz,
            "strong_coupling": regime.strong_coupling,
        },
    }


def cmd_tuning(run: Run) -> int:
    mode, vol = _solve(run)
    report = run.stage("tuning", lambda: tuning_report(mode, vol, run.cfg))
    out = _outdir(run.cfg)
    (out / "tuning.json").write_text(_io.dumps(report), encoding="utf-8")
    print(f"stress_GPa={_io.fmt(report['strain']['stress_GPa'])}")
    print(f"dT_K={_io.fmt(report['temperature']['dT_K'])}")
    print(f"strong_coupling={'true' if report['regime']['strong_coupling'] else 'false'}")
    g0 = report["regime"]["g_over_2pi_MHz"] * 2 * math.pi * 1e6
    _write_manifest(run, out, _mode_summary(mode, vol, g0, _transition(run.cfg)), ["tuning.json"])
    return 0


def cmd_oracle_check(table: str, rtol: float) -> int:
    try:
        records = load_table(table)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    results = compare(records, rtol)
    bad = [r for r in results if not r.ok]
    for r in bad:
        rec = r.record
        print(f"MISMATCH {rec.func} {rec.order} {rec.x}: rel err {r.relative_error:.3e}")
    worst = max((r.relative_error for r in results), default=0.0)
    print(f"oracle-check: {len(results) - len(bad)}/{len(results)} within {rtol:g} "
          f"(max rel err {worst:.3e})")
    return 1 if bad else 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value config file or manifest JSON")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--format", choices=("csv", "json"), help="data file format")
    common.add_argument("--jobs", type=int, default=None, metavar="N",
                        help="worker threads for grid sampling (default: all CPUs)")

    p = argparse.ArgumentParser(prog="bottlemode", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"bottlemode {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("solve", parents=[common], help="solve the design-point mode")
    f = sub.add_parser("field", parents=[common], help="export the intensity grid")
    f.add_argument("--grid", metavar="WxH", help="samples in rho x z (default 400x800)")
    f.add_argument("--rho-range", metavar="LO:HI", dest="rho_range")
    f.add_argument("--z-range", metavar="LO:HI", dest="z_range")
    c = sub.add_parser("coupling", parents=[common], help="export g(d) curves")
    c.add_argument("--dmax", metavar="UM", help="largest surface distance")
    c.add_argument("--samples", metavar="N", help="number of distance samples")
    c.add_argument("--sphere", action="store_const", const=True, default=None,
                   help="also compute the microsphere reference curve")
    t = sub.add_parser("tuning", parents=[common], help="spectrum and tuning report")
    t.add_argument("--q-factor", metavar="Q", dest="q_factor")
    o = sub.add_parser("oracle-check", help="compare special functions with a reference table")
    o.add_argument("--table", required=True, metavar="PATH")
    o.add_argument("--rtol", type=float, default=5e-9)
    return p


_SOLVER_ERRORS = (ArithmeticError, LookupError, RuntimeError, ValueError)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "oracle-check":
        return cmd_oracle_check(args.table, args.rtol)

    overrides = {k: getattr(args, k, None)
                 for k in ("out", "format", "grid", "rho_range", "z_range", "dmax",
                           "samples", "sphere", "q_factor")}
    try:
        cfg = resolve_config(args.config, overrides)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    if jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return 2
    run = Run(cfg, args.command, {}, [])
    try:
        if args.command == "solve":
            return cmd_solve(run)
        if args.command == "field":
            return cmd_field(run, jobs)
        if args.command == "coupling":
            return cmd_coupling(run)
        return cmd_tuning(run)
    except _SOLVER_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
