"""Command-line front end.

    spinres <command> --config <path> [--out <path>] [--threads N]

Exit codes: 0 success, 2 config error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import __version__
from .config import COMMANDS, ConfigError, RunConfig, parse_config
from .extraction import MultipletDataset, extract_parameters
from .jahn_teller import (
    JTParams,
    elongation_ratio,
    g_anisotropy,
    mixing_angle_from_widths,
    principal_g_factors,
)
from .perturbation import multiplet_width
from .sensitivity import concentration_ppb, min_detectable_spins
from .transitions import render_line_table, resonance_fields, spectrum_maps
from .units import CODATA, joule_to_inv_cm


def _write_text(path: str, text: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _write_json(path: str, doc) -> None:
    _write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _map_output_path(base: str, index: int, count: int) -> str:
    if count == 1:
        return base
    stem, ext = os.path.splitext(base)
    return f"{stem}_mode{index}{ext or '.csv'}"


def _run_simulate(cfg: RunConfig, out: str, threads: int) -> list[str]:
    system = cfg.spin_system.to_system()
    modes = [m.to_mode() for m in cfg.modes]
    maps = spectrum_maps(
        system,
        modes,
        cfg.field_grid.axis(),
        cfg.lineshape.to_lineshape(),
        freq_span_hz=cfg.freq_span_hz,
        freq_points=cfg.freq_points,
        hidden_mi=cfg.hidden_mi,
        threads=threads,
    )
    written = []
    for k, sm in enumerate(maps):
        path = _map_output_path(out, k, len(maps))
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", newline="\n") as fh:
            sm.to_csv(fh)
        written.append(path)
    return written


def _run_resonance(cfg: RunConfig, out: str) -> list[str]:
    system = cfg.spin_system.to_system()
    b_range = (cfg.field_grid.min_tesla, cfg.field_grid.max_tesla)
    rows = []
    for mode_cfg in cfg.modes:
        mode = mode_cfg.to_mode()
        lines = resonance_fields(
            system, mode.freq, b_range, scan_points=cfg.field_grid.points
        )
        for ln in lines:
            if any(abs(ln.mi_label - hm) < 1e-9 for hm in cfg.hidden_mi):
                continue
            rows.append((mode.label, ln))
    _write_text(out, render_line_table(rows))
    return [out]


def _run_fit(cfg: RunConfig, out: str, base_dir: str) -> list[str]:
    path = cfg.dataset_path
    if not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    dataset = MultipletDataset.from_json(path)
    axial = None
    if cfg.spin_system is not None:
        system = cfg.spin_system.to_system()
        axial = (system.g_par, system.g_perp, system.a_par, system.a_perp)
    quad = None
    if cfg.quadrupole is not None:
        nuclear_spin = cfg.spin_system.nuclear_spin if cfg.spin_system else 1.5
        quad = cfg.quadrupole.context(nuclear_spin)
    result = extract_parameters(dataset, sign=cfg.a_sign, quad=quad, axial=axial)
    _write_json(out, result.to_json_dict())
    sys.stdout.write(result.table())
    return [out]


def _run_jt(cfg: RunConfig, out: str) -> list[str]:
    jt = cfg.jt
    params = JTParams(jt.lambda_over_delta, math.radians(jt.phi_deg))
    g1, g2, g3 = principal_g_factors(params)
    dg_par, dg_perp = g_anisotropy(jt.lambda_over_delta)
    ratio, elongated = elongation_ratio(g1, g2, g3)
    report = {
        "lambda_over_delta": jt.lambda_over_delta,
        "phi_deg": jt.phi_deg,
        "g1": g1,
        "g2": g2,
        "g3": g3,
        "delta_g_par_formula": dg_par,
        "delta_g_perp_formula": dg_perp,
        "elongation_ratio": ratio,
        "elongated": elongated,
    }
    if jt.g_par_measured is not None:
        report["delta_g_par_measured"] = jt.g_par_measured - params.g_s
    if jt.g_perp_measured is not None:
        report["delta_g_perp_measured"] = jt.g_perp_measured - params.g_s
    if jt.widths_gauss is not None:
        phi, admixture = mixing_angle_from_widths(jt.widths_gauss)
        report["mixing_phi_deg"] = math.degrees(phi)
        report["admixture"] = admixture
    _write_json(out, report)
    return [out]


def _run_quadrupole(cfg: RunConfig, out: str) -> list[str]:
    from .extraction import quadrupole_from_multiplet, r3_from_quadrupole

    qc = cfg.quadrupole
    nuclear_spin = cfg.spin_system.nuclear_spin if cfg.spin_system else 1.5
    per_mi = []
    a_joules = []
    for entry in qc.entries:
        a_j = entry.a * 1e-4 * CODATA.hc_per_cm
        a_joules.append(a_j)
        per_mi.append(
            {
                "mi": entry.mi,
                "g": entry.g,
                "a_1e-4cm-1": entry.a,
                "width_mt": multiplet_width(a_j, entry.g) * 1e3,
            }
        )
    p_par = quadrupole_from_multiplet(a_joules)
    r3_q, r3_un = r3_from_quadrupole(p_par, qc.context(nuclear_spin))
    report = {
        "per_mi": per_mi,
        "p_par_joule": p_par,
        "p_par_1e-4cm-1": joule_to_inv_cm(p_par) * 1e4,
        "q_barn": qc.q_barn,
        "screening": qc.screening,
        "r3_q_au": r3_q,
        "r3_unscreened_au": r3_un,
        "p_par_convention": "outer adjacent-spacing half difference of per-mi hyperfine constants",
    }
    _write_json(out, report)
    lines = ["  mi       g      A (1e-4 cm^-1)   width (mT)"]
    for row in per_mi:
        lines.append(
            f"{row['mi']:+5.1f}  {row['g']:7.3f}  {row['a_1e-4cm-1']:12.1f}  {row['width_mt']:10.2f}"
        )
    sys.stdout.write("\n".join(lines) + "\n")
    return [out]


def _run_sensitivity(cfg: RunConfig, out: str) -> list[str]:
    lattice = cfg.lattice.to_lattice() if cfg.lattice is not None else None
    scenarios = []
    for mode_cfg in cfg.modes:
        mode = mode_cfg.to_mode()
        setup = cfg.detection.to_setup(mode_cfg.agg_width_hz)
        n = min_detectable_spins(mode, setup)
        record = {
            "label": mode.label,
            "freq_ghz": mode_cfg.freq_ghz,
            "q_loaded": mode.q_loaded,
            "agg_width_hz": setup.agg_width,
            "n_min": n,
        }
        if lattice is not None:
            record["ppb"] = concentration_ppb(n, mode.mode_volume, lattice)
        scenarios.append(record)
    _write_json(out, {"scenarios": scenarios})
    header = f"{'mode':<12} {'f (GHz)':>8} {'Q_L':>9} {'dw (kHz)':>9} {'N_min':>11}"
    if lattice is not None:
        header += f" {'ppb':>9}"
    lines = [header]
    for rec in scenarios:
        row = (
            f"{rec['label']:<12} {rec['freq_ghz']:>8.3f} {rec['q_loaded']:>9.0f}"
            f" {rec['agg_width_hz']/1e3:>9.1f} {rec['n_min']:>11.3e}"
        )
        if lattice is not None:
            row += f" {rec['ppb']:>9.4f}"
        lines.append(row)
    sys.stdout.write("\n".join(lines) + "\n")
    return [out]


def run_config(cfg: RunConfig, base_dir: str = ".", out: str | None = None, threads: int = 1) -> list[str]:
    """Execute one validated configuration; returns written paths.

    A configured output path is taken relative to ``base_dir`` (the
    config file's directory); an explicit ``out`` override is taken
    relative to the working directory.
    """
    if out is not None:
        target = os.path.abspath(out)
    else:
        target = cfg.output_path
        if not os.path.isabs(target):
            target = os.path.join(base_dir, target)
    if cfg.command == "simulate":
        return _run_simulate(cfg, target, threads)
    if cfg.command == "resonance":
        return _run_resonance(cfg, target)
    if cfg.command == "fit":
        return _run_fit(cfg, target, base_dir)
    if cfg.command == "jt":
        return _run_jt(cfg, target)
    if cfg.command == "quadrupole":
        return _run_quadrupole(cfg, target)
    if cfg.command == "sensitivity":
        return _run_sensitivity(cfg, target)
    raise ConfigError("command", f"unhandled command {cfg.command!r}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="spinres",
        description="Spin-resonance simulation and parameter extraction",
    )
    parser.add_argument("--version", action="version", version=f"spinres {__version__}")
    sub = parser.add_subparsers(dest="cli_command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON configuration file")
        p.add_argument("--out", default=None, help="override the configured output path")
        p.add_argument("--threads", type=int, default=1)
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    base_dir = os.path.dirname(os.path.abspath(args.config))
    try:
        cfg = parse_config(text, base_dir=base_dir)
        if cfg.command != args.cli_command:
            raise ConfigError("command", f"config says {cfg.command!r} but CLI invoked {args.cli_command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        written = run_config(cfg, base_dir=base_dir, out=args.out, threads=max(1, args.threads))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # numeric or data failure
        print(f"error: {exc}", file=sys.stderr)
        return 3
    for path in written:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
