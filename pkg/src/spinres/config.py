"""Run configuration: JSON schema, validation and exact round-tripping.

Config files keep the bench units people actually quote: hyperfine and
quadrupole couplings in 1e-4 cm^-1, frequencies in GHz, fields in tesla.
Values are stored as given (so parse -> render -> parse is the identity)
and converted to canonical joules/hertz by the accessor methods used at
the physics boundary.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .extraction import QuadrupoleContext
from .sensitivity import DetectionSetup, LatticeParams, ResonatorMode
from .spin_algebra import SpinSystem
from .transitions import Lineshape
from .units import CODATA

COMMANDS = ("simulate", "resonance", "fit", "jt", "quadrupole", "sensitivity")


class ConfigError(ValueError):
    """Validation failure with a path-qualified message."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _require(doc: dict, key: str, path: str):
    # path is a prefix that is either empty or ends with "."
    if key not in doc:
        raise ConfigError(f"{path}{key}", "missing required key")
    return doc[key]


def _reject_unknown(doc: dict, allowed: set[str], path: str) -> None:
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigError(f"{path}{unknown[0]}", "unknown key")


def _number(value, path: str, positive=False, non_negative=False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {type(value).__name__}")
    x = float(value)
    if not math.isfinite(x):
        raise ConfigError(path, "must be finite")
    if positive and not x > 0:
        raise ConfigError(path, f"must be positive, got {x}")
    if non_negative and x < 0:
        raise ConfigError(path, f"must be non-negative, got {x}")
    return x


def _integer(value, path: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {type(value).__name__}")
    if value < minimum:
        raise ConfigError(path, f"must be at least {minimum}, got {value}")
    return value


@dataclass(frozen=True)
class SpinSystemConfig:
    g_par: float
    g_perp: float
    a_par: float = 0.0  # 1e-4 cm^-1
    a_perp: float = 0.0
    p_par: float = 0.0
    gi_par: float = 0.0
    electron_spin: float = 0.5
    nuclear_spin: float = 1.5

    def to_system(self) -> SpinSystem:
        return SpinSystem.from_wavenumbers(
            g_par=self.g_par,
            g_perp=self.g_perp,
            a_par_cm=self.a_par * 1e-4,
            a_perp_cm=self.a_perp * 1e-4,
            p_par_cm=self.p_par * 1e-4,
            gi_par=self.gi_par,
            s=self.electron_spin,
            i=self.nuclear_spin,
        )


@dataclass(frozen=True)
class ModeConfig:
    label: str
    freq_ghz: float
    q_loaded: float
    mode_volume_m3: float = 1e-7
    filling_factor: float = 1.0
    agg_width_hz: float | None = None  # per-mode override for sensitivity

    def to_mode(self) -> ResonatorMode:
        return ResonatorMode(
            label=self.label,
            freq=self.freq_ghz * 1e9,
            q_loaded=self.q_loaded,
            mode_volume=self.mode_volume_m3,
            filling_factor=self.filling_factor,
        )


@dataclass(frozen=True)
class FieldGridConfig:
    min_tesla: float
    max_tesla: float
    points: int

    def axis(self) -> np.ndarray:
        return np.linspace(self.min_tesla, self.max_tesla, self.points)


@dataclass(frozen=True)
class LineshapeConfig:
    kind: str
    width_hz: float

    def to_lineshape(self) -> Lineshape:
        return Lineshape(kind=self.kind, width=self.width_hz)


@dataclass(frozen=True)
class JTConfig:
    lambda_over_delta: float
    phi_deg: float = 0.0
    widths_gauss: tuple[float, ...] | None = None
    g_par_measured: float | None = None
    g_perp_measured: float | None = None


@dataclass(frozen=True)
class QuadrupoleEntryConfig:
    mi: float
    g: float
    a: float  # 1e-4 cm^-1


@dataclass(frozen=True)
class QuadrupoleConfig:
    entries: tuple[QuadrupoleEntryConfig, ...] | None
    q_barn: float = -0.211
    screening: float = 0.15

    def context(self, nuclear_spin: float = 1.5) -> QuadrupoleContext:
        return QuadrupoleContext(q_barn=self.q_barn, i=nuclear_spin, screening=self.screening)


@dataclass(frozen=True)
class DetectionConfig:
    temperature_k: float
    agg_width_hz: float
    noise_ratio: float = 1.0
    electron_g: float = CODATA.free_electron_g
    effective_spin: float = 0.5

    def to_setup(self, agg_width_hz: float | None = None) -> DetectionSetup:
        return DetectionSetup(
            temperature=self.temperature_k,
            agg_width=agg_width_hz if agg_width_hz is not None else self.agg_width_hz,
            noise_ratio=self.noise_ratio,
            electron_g=self.electron_g,
            effective_spin=self.effective_spin,
        )


@dataclass(frozen=True)
class LatticeConfig:
    a_angstrom: float
    b_angstrom: float
    c_angstrom: float
    formula_units_per_cell: int = 2
    sites_per_formula: int = 1

    def to_lattice(self) -> LatticeParams:
        return LatticeParams(
            a=self.a_angstrom * 1e-10,
            b=self.b_angstrom * 1e-10,
            c=self.c_angstrom * 1e-10,
            formula_units_per_cell=self.formula_units_per_cell,
            sites_per_formula=self.sites_per_formula,
        )


@dataclass
class RunConfig:
    command: str
    output_path: str
    spin_system: SpinSystemConfig | None = None
    modes: tuple[ModeConfig, ...] = ()
    field_grid: FieldGridConfig | None = None
    lineshape: LineshapeConfig | None = None
    dataset_path: str | None = None
    jt: JTConfig | None = None
    quadrupole: QuadrupoleConfig | None = None
    detection: DetectionConfig | None = None
    lattice: LatticeConfig | None = None
    hidden_mi: tuple[float, ...] = ()
    a_sign: float = -1.0
    freq_span_hz: float = 2e6
    freq_points: int = 201


def _parse_spin_system(doc, path: str) -> SpinSystemConfig:
    if not isinstance(doc, dict):
        raise ConfigError(path, "expected an object")
    allowed = {
        "g_par", "g_perp", "a_par_1e-4cm-1", "a_perp_1e-4cm-1",
        "p_par_1e-4cm-1", "gi_par", "electron_spin", "nuclear_spin",
    }
    _reject_unknown(doc, allowed, path + ".")
    cfg = SpinSystemConfig(
        g_par=_number(_require(doc, "g_par", path + "."), f"{path}.g_par", positive=True),
        g_perp=_number(_require(doc, "g_perp", path + "."), f"{path}.g_perp", positive=True),
        a_par=_number(doc.get("a_par_1e-4cm-1", 0.0), f"{path}.a_par_1e-4cm-1"),
        a_perp=_number(doc.get("a_perp_1e-4cm-1", 0.0), f"{path}.a_perp_1e-4cm-1"),
        p_par=_number(doc.get("p_par_1e-4cm-1", 0.0), f"{path}.p_par_1e-4cm-1"),
        gi_par=_number(doc.get("gi_par", 0.0), f"{path}.gi_par"),
        electron_spin=_number(doc.get("electron_spin", 0.5), f"{path}.electron_spin", positive=True),
        nuclear_spin=_number(doc.get("nuclear_spin", 1.5), f"{path}.nuclear_spin", non_negative=True),
    )
    try:
        cfg.to_system()
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from exc
    return cfg


def _parse_mode(doc, path: str) -> ModeConfig:
    if not isinstance(doc, dict):
        raise ConfigError(path, "expected an object")
    allowed = {"label", "freq_ghz", "q_loaded", "mode_volume_m3", "filling_factor", "agg_width_hz"}
    _reject_unknown(doc, allowed, path + ".")
    label = _require(doc, "label", path + ".")
    if not isinstance(label, str):
        raise ConfigError(f"{path}.label", "expected a string")
    agg = doc.get("agg_width_hz")
    cfg = ModeConfig(
        label=label,
        freq_ghz=_number(_require(doc, "freq_ghz", path + "."), f"{path}.freq_ghz", positive=True),
        q_loaded=_number(_require(doc, "q_loaded", path + "."), f"{path}.q_loaded", positive=True),
        mode_volume_m3=_number(doc.get("mode_volume_m3", 1e-7), f"{path}.mode_volume_m3", positive=True),
        filling_factor=_number(doc.get("filling_factor", 1.0), f"{path}.filling_factor", positive=True),
        agg_width_hz=None if agg is None else _number(agg, f"{path}.agg_width_hz", positive=True),
    )
    if cfg.filling_factor > 1.0:
        raise ConfigError(f"{path}.filling_factor", "must not exceed 1")
    return cfg


def _parse_field_grid(doc, path: str) -> FieldGridConfig:
    if not isinstance(doc, dict):
        raise ConfigError(path, "expected an object")
    _reject_unknown(doc, {"min_tesla", "max_tesla", "points"}, path + ".")
    cfg = FieldGridConfig(
        min_tesla=_number(_require(doc, "min_tesla", path + "."), f"{path}.min_tesla", positive=True),
        max_tesla=_number(_require(doc, "max_tesla", path + "."), f"{path}.max_tesla", positive=True),
        points=_integer(_require(doc, "points", path + "."), f"{path}.points", minimum=2),
    )
    if not cfg.min_tesla < cfg.max_tesla:
        raise ConfigError(f"{path}.max_tesla", "must exceed min_tesla")
    return cfg


def _parse_lineshape(doc, path: str) -> LineshapeConfig:
    if not isinstance(doc, dict):
        raise ConfigError(path, "expected an object")
    _reject_unknown(doc, {"kind", "width_hz"}, path + ".")
    kind = _require(doc, "kind", path + ".")
    if kind not in ("lorentzian", "gaussian"):
        raise ConfigError(f"{path}.kind", f"must be lorentzian or gaussian, got {kind!r}")
    return LineshapeConfig(
        kind=kind,
        width_hz=_number(_require(doc, "width_hz", path + "."), f"{path}.width_hz", positive=True),
    )


def _parse_jt(doc, path: str) -> JTConfig:
    if not isinstance(doc, dict):
        raise ConfigError(path, "expected an object")
    allowed = {"lambda_over_delta", "phi_deg", "widths_gauss", "g_par_measured", "g_perp_measured"}
    _reject_unknown(doc, allowed, path + ".")
    widths = doc.get("widths_gauss")
    if widths is not None:
        if not isinstance(widths, list) or len(widths) != 4:
            raise ConfigError(f"{path}.widths_gauss", "expected a list of four widths")
        widths = tuple(
            _number(w, f"{path}.widths_gauss[{k}]", positive=True) for k, w in enumerate(widths)
        )
    gpm = doc.get("g_par_measured")
    gvm = doc.get("g_perp_measured")
    return JTConfig(
        lambda_over_delta=_number(
            _require(doc, "lambda_over_delta", path + "."), f"{path}.lambda_over_delta"
        ),
        phi_deg=_number(doc.get("phi_deg", 0.0), f"{path}.phi_deg"),
        widths_gauss=widths,
        g_par_measured=None if gpm is None else _number(gpm, f"{path}.g_par_measured", positive=True),
        g_perp_measured=None if gvm is None else _number(gvm, f"{path}.g_perp_measured", positive=True),
    )


def _parse_quadrupole(doc, path: str) -> QuadrupoleConfig:
    if not isinstance(doc, dict):
        raise ConfigError(path, "expected an object")
    _reject_unknown(doc, {"entries", "q_barn", "screening"}, path + ".")
    entries = None
    if "entries" in doc:
        raw_entries = doc["entries"]
        if not isinstance(raw_entries, list) or len(raw_entries) != 4:
            raise ConfigError(f"{path}.entries", "expected a list of four per-mi entries")
        parsed = []
        for k, e in enumerate(raw_entries):
            epath = f"{path}.entries[{k}]"
            if not isinstance(e, dict):
                raise ConfigError(epath, "expected an object")
            _reject_unknown(e, {"mi", "g", "a_1e-4cm-1"}, epath + ".")
            parsed.append(
                QuadrupoleEntryConfig(
                    mi=_number(_require(e, "mi", epath + "."), f"{epath}.mi"),
                    g=_number(_require(e, "g", epath + "."), f"{epath}.g", positive=True),
                    a=_number(_require(e, "a_1e-4cm-1", epath + "."), f"{epath}.a_1e-4cm-1"),
                )
            )
        parsed.sort(key=lambda e: -e.mi)
        entries = tuple(parsed)
    q_barn = _number(doc.get("q_barn", -0.211), f"{path}.q_barn")
    screening = _number(doc.get("screening", 0.15), f"{path}.screening", non_negative=True)
    if screening >= 1.0:
        raise ConfigError(f"{path}.screening", "must be below 1")
    return QuadrupoleConfig(entries=entries, q_barn=q_barn, screening=screening)


def _parse_detection(doc, path: str) -> DetectionConfig:
    if not isinstance(doc, dict):
        raise ConfigError(path, "expected an object")
    allowed = {"temperature_k", "agg_width_hz", "noise_ratio", "electron_g", "effective_spin"}
    _reject_unknown(doc, allowed, path + ".")
    return DetectionConfig(
        temperature_k=_number(_require(doc, "temperature_k", path + "."), f"{path}.temperature_k", positive=True),
        agg_width_hz=_number(_require(doc, "agg_width_hz", path + "."), f"{path}.agg_width_hz", positive=True),
        noise_ratio=_number(doc.get("noise_ratio", 1.0), f"{path}.noise_ratio", non_negative=True),
        electron_g=_number(doc.get("electron_g", CODATA.free_electron_g), f"{path}.electron_g", positive=True),
        effective_spin=_number(doc.get("effective_spin", 0.5), f"{path}.effective_spin", positive=True),
    )


def _parse_lattice(doc, path: str) -> LatticeConfig:
    if not isinstance(doc, dict):
        raise ConfigError(path, "expected an object")
    allowed = {"a_angstrom", "b_angstrom", "c_angstrom", "formula_units_per_cell", "sites_per_formula"}
    _reject_unknown(doc, allowed, path + ".")
    return LatticeConfig(
        a_angstrom=_number(_require(doc, "a_angstrom", path + "."), f"{path}.a_angstrom", positive=True),
        b_angstrom=_number(_require(doc, "b_angstrom", path + "."), f"{path}.b_angstrom", positive=True),
        c_angstrom=_number(_require(doc, "c_angstrom", path + "."), f"{path}.c_angstrom", positive=True),
        formula_units_per_cell=_integer(doc.get("formula_units_per_cell", 2), f"{path}.formula_units_per_cell", 1),
        sites_per_formula=_integer(doc.get("sites_per_formula", 1), f"{path}.sites_per_formula", 1),
    )


_TOP_KEYS = {
    "command", "output_path", "spin_system", "modes", "field_grid", "lineshape",
    "dataset_path", "jt", "quadrupole", "detection", "lattice", "hidden_mi",
    "a_sign", "freq_span_hz", "freq_points",
}

_REQUIRED_SECTIONS = {
    "simulate": ("spin_system", "modes", "field_grid", "lineshape"),
    "resonance": ("spin_system", "modes", "field_grid"),
    "fit": ("dataset_path",),
    "jt": ("jt",),
    "quadrupole": ("quadrupole",),
    "sensitivity": ("modes", "detection"),
}


def parse_config(document: str | dict, base_dir: str = ".") -> RunConfig:
    """Validate a JSON document (text or already-decoded dict).

    Referenced files must exist relative to ``base_dir``. Every error
    carries the JSON path of the offending value.
    """
    if isinstance(document, (str, bytes)):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigError("$", f"malformed JSON: {exc}") from exc
    else:
        doc = document
    if not isinstance(doc, dict):
        raise ConfigError("$", "top level must be an object")
    _reject_unknown(doc, _TOP_KEYS, "")

    command = _require(doc, "command", "")
    if command not in COMMANDS:
        raise ConfigError("command", f"must be one of {', '.join(COMMANDS)}, got {command!r}")
    output_path = _require(doc, "output_path", "")
    if not isinstance(output_path, str) or not output_path:
        raise ConfigError("output_path", "expected a non-empty string")

    for section in _REQUIRED_SECTIONS[command]:
        if section not in doc:
            raise ConfigError(section, f"missing required key for command {command!r}")

    spin_system = _parse_spin_system(doc["spin_system"], "spin_system") if "spin_system" in doc else None

    modes: tuple[ModeConfig, ...] = ()
    if "modes" in doc:
        raw_modes = doc["modes"]
        if not isinstance(raw_modes, list) or not raw_modes:
            raise ConfigError("modes", "expected a non-empty array")
        modes = tuple(_parse_mode(m, f"modes[{k}]") for k, m in enumerate(raw_modes))

    field_grid = _parse_field_grid(doc["field_grid"], "field_grid") if "field_grid" in doc else None
    lineshape = _parse_lineshape(doc["lineshape"], "lineshape") if "lineshape" in doc else None
    jt = _parse_jt(doc["jt"], "jt") if "jt" in doc else None
    quadrupole = _parse_quadrupole(doc["quadrupole"], "quadrupole") if "quadrupole" in doc else None
    if command == "quadrupole" and quadrupole is not None and quadrupole.entries is None:
        raise ConfigError("quadrupole.entries", "missing required key for command 'quadrupole'")
    detection = _parse_detection(doc["detection"], "detection") if "detection" in doc else None
    lattice = _parse_lattice(doc["lattice"], "lattice") if "lattice" in doc else None

    dataset_path = doc.get("dataset_path")
    if dataset_path is not None:
        if not isinstance(dataset_path, str):
            raise ConfigError("dataset_path", "expected a string")
        resolved = dataset_path if os.path.isabs(dataset_path) else os.path.join(base_dir, dataset_path)
        if not os.path.exists(resolved):
            raise ConfigError("dataset_path", f"file not found: {dataset_path}")

    hidden_raw = doc.get("hidden_mi", [])
    if not isinstance(hidden_raw, list):
        raise ConfigError("hidden_mi", "expected an array")
    hidden_mi = tuple(_number(m, f"hidden_mi[{k}]") for k, m in enumerate(hidden_raw))

    a_sign = _number(doc.get("a_sign", -1.0), "a_sign")
    if a_sign not in (-1.0, 1.0):
        raise ConfigError("a_sign", "must be +1 or -1")

    return RunConfig(
        command=command,
        output_path=output_path,
        spin_system=spin_system,
        modes=modes,
        field_grid=field_grid,
        lineshape=lineshape,
        dataset_path=dataset_path,
        jt=jt,
        quadrupole=quadrupole,
        detection=detection,
        lattice=lattice,
        hidden_mi=hidden_mi,
        a_sign=a_sign,
        freq_span_hz=_number(doc.get("freq_span_hz", 2e6), "freq_span_hz", positive=True),
        freq_points=_integer(doc.get("freq_points", 201), "freq_points", minimum=2),
    )


def render_config(cfg: RunConfig) -> dict:
    """Config dict in the input schema; floats pass through unchanged."""
    doc: dict = {"command": cfg.command, "output_path": cfg.output_path}
    if cfg.spin_system is not None:
        s = cfg.spin_system
        doc["spin_system"] = {
            "g_par": s.g_par,
            "g_perp": s.g_perp,
            "a_par_1e-4cm-1": s.a_par,
            "a_perp_1e-4cm-1": s.a_perp,
            "p_par_1e-4cm-1": s.p_par,
            "gi_par": s.gi_par,
            "electron_spin": s.electron_spin,
            "nuclear_spin": s.nuclear_spin,
        }
    if cfg.modes:
        doc["modes"] = []
        for m in cfg.modes:
            rec = {
                "label": m.label,
                "freq_ghz": m.freq_ghz,
                "q_loaded": m.q_loaded,
                "mode_volume_m3": m.mode_volume_m3,
                "filling_factor": m.filling_factor,
            }
            if m.agg_width_hz is not None:
                rec["agg_width_hz"] = m.agg_width_hz
            doc["modes"].append(rec)
    if cfg.field_grid is not None:
        doc["field_grid"] = {
            "min_tesla": cfg.field_grid.min_tesla,
            "max_tesla": cfg.field_grid.max_tesla,
            "points": cfg.field_grid.points,
        }
    if cfg.lineshape is not None:
        doc["lineshape"] = {"kind": cfg.lineshape.kind, "width_hz": cfg.lineshape.width_hz}
    if cfg.dataset_path is not None:
        doc["dataset_path"] = cfg.dataset_path
    if cfg.jt is not None:
        block: dict = {"lambda_over_delta": cfg.jt.lambda_over_delta, "phi_deg": cfg.jt.phi_deg}
        if cfg.jt.widths_gauss is not None:
            block["widths_gauss"] = list(cfg.jt.widths_gauss)
        if cfg.jt.g_par_measured is not None:
            block["g_par_measured"] = cfg.jt.g_par_measured
        if cfg.jt.g_perp_measured is not None:
            block["g_perp_measured"] = cfg.jt.g_perp_measured
        doc["jt"] = block
    if cfg.quadrupole is not None:
        block = {
            "q_barn": cfg.quadrupole.q_barn,
            "screening": cfg.quadrupole.screening,
        }
        if cfg.quadrupole.entries is not None:
            block["entries"] = [
                {"mi": e.mi, "g": e.g, "a_1e-4cm-1": e.a} for e in cfg.quadrupole.entries
            ]
        doc["quadrupole"] = block
    if cfg.detection is not None:
        d = cfg.detection
        doc["detection"] = {
            "temperature_k": d.temperature_k,
            "agg_width_hz": d.agg_width_hz,
            "noise_ratio": d.noise_ratio,
            "electron_g": d.electron_g,
            "effective_spin": d.effective_spin,
        }
    if cfg.lattice is not None:
        lt = cfg.lattice
        doc["lattice"] = {
            "a_angstrom": lt.a_angstrom,
            "b_angstrom": lt.b_angstrom,
            "c_angstrom": lt.c_angstrom,
            "formula_units_per_cell": lt.formula_units_per_cell,
            "sites_per_formula": lt.sites_per_formula,
        }
    if cfg.hidden_mi:
        doc["hidden_mi"] = list(cfg.hidden_mi)
    if cfg.a_sign != -1.0:
        doc["a_sign"] = cfg.a_sign
    if cfg.freq_span_hz != 2e6:
        doc["freq_span_hz"] = cfg.freq_span_hz
    if cfg.freq_points != 201:
        doc["freq_points"] = cfg.freq_points
    return doc
