"""Inverse pipeline: per-multiplet g and hyperfine constants from measured
line positions and widths, a through-origin Bohr-magneton fit, the
quadrupole parameter from hyperfine-spacing asymmetry, and the
inverse-cube electron-nucleus distance it implies."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .units import CODATA, PhysicalConstants, joule_to_inv_cm


@dataclass(frozen=True)
class MultipletEntry:
    mi: float
    b_line: float  # T
    width: float  # T

    def __post_init__(self) -> None:
        if not (self.b_line > 0 and self.width > 0):
            raise ValueError("line field and width must be positive")


@dataclass
class MultipletDataset:
    """Measured per-multiplet line fields and widths at one mode frequency.

    Entries are kept sorted by descending mi. A complete set carries one
    entry per nuclear sublevel; incomplete sets are allowed and flagged.
    """

    mode_freq: float  # Hz
    entries: list[MultipletEntry]

    def __post_init__(self) -> None:
        if not self.mode_freq > 0:
            raise ValueError("mode frequency must be positive")
        if not self.entries:
            raise ValueError("dataset needs at least one entry")
        self.entries = sorted(self.entries, key=lambda e: -e.mi)
        labels = [e.mi for e in self.entries]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate mi labels in dataset")

    @property
    def is_complete(self) -> bool:
        """True when mi labels form the full ladder max_mi ... -max_mi."""
        top = max(e.mi for e in self.entries)
        expected = [top - k for k in range(int(round(2 * top)) + 1)]
        got = [e.mi for e in self.entries]
        return len(got) == len(expected) and all(
            abs(a - b) < 1e-9 for a, b in zip(got, expected)
        )

    @classmethod
    def from_json(cls, source) -> "MultipletDataset":
        if isinstance(source, (str, bytes)) and str(source).lstrip().startswith("{"):
            doc = json.loads(source)
        else:
            with open(source) as fh:
                doc = json.load(fh)
        entries = [
            MultipletEntry(
                mi=float(e["mi"]),
                b_line=float(e["b_line_tesla"]),
                width=float(e["width_tesla"]),
            )
            for e in doc["entries"]
        ]
        return cls(mode_freq=float(doc["mode_freq_hz"]), entries=entries)

    def to_json_dict(self) -> dict:
        return {
            "mode_freq_hz": self.mode_freq,
            "entries": [
                {"mi": e.mi, "b_line_tesla": e.b_line, "width_tesla": e.width}
                for e in self.entries
            ],
        }


@dataclass(frozen=True)
class QuadrupoleContext:
    """Nuclear quadrupole moment, spin and core-polarization screening."""

    q_barn: float
    i: float = 1.5
    screening: float = 0.15

    def __post_init__(self) -> None:
        if self.i * (2 * self.i - 1) == 0:
            raise ValueError("I(2I-1) must be non-zero")
        if not 0.0 <= self.screening < 1.0:
            raise ValueError("screening must be in [0, 1)")


@dataclass
class ExtractionResult:
    per_mi: list[dict]  # {"mi", "g", "a_joule"}
    beta_fit: float  # J/T
    beta_rel_err: float  # relative to the CODATA Bohr magneton
    p_par: float | None  # J
    r3_q: float | None  # a.u.
    r3_unscreened: float | None  # a.u.
    mean_g: float | None
    mean_a: float | None  # J
    mean_g_per_mi: float = 0.0
    mean_a_per_mi: float = 0.0  # J
    is_complete: bool = True
    notes: list[str] = field(default_factory=list)

    def to_json_dict(self, constants: PhysicalConstants = CODATA) -> dict:
        def cm4(x: float | None) -> float | None:
            return None if x is None else joule_to_inv_cm(x, constants) * 1e4

        return {
            "per_mi": [
                {
                    "mi": row["mi"],
                    "g": row["g"],
                    "a_joule": row["a_joule"],
                    "a_1e-4cm-1": cm4(row["a_joule"]),
                }
                for row in self.per_mi
            ],
            "beta_fit_j_per_t": self.beta_fit,
            "beta_rel_err": self.beta_rel_err,
            "p_par_joule": self.p_par,
            "p_par_1e-4cm-1": cm4(self.p_par),
            "r3_q_au": self.r3_q,
            "r3_unscreened_au": self.r3_unscreened,
            "mean_g": self.mean_g,
            "mean_a_joule": self.mean_a,
            "mean_a_1e-4cm-1": cm4(self.mean_a),
            "mean_g_per_mi": self.mean_g_per_mi,
            "mean_a_per_mi_joule": self.mean_a_per_mi,
            "mean_a_per_mi_1e-4cm-1": cm4(self.mean_a_per_mi),
            "dataset_complete": self.is_complete,
            "notes": list(self.notes),
        }

    def table(self, constants: PhysicalConstants = CODATA) -> str:
        rows = ["  mi       g        A (1e-4 cm^-1)"]
        for row in self.per_mi:
            a4 = joule_to_inv_cm(row["a_joule"], constants) * 1e4
            rows.append(f"{row['mi']:+5.1f}  {row['g']:8.4f}  {a4:12.2f}")
        rows.append(f"beta_fit = {self.beta_fit:.4e} J/T ({self.beta_rel_err:+.2%} vs reference)")
        if self.p_par is not None:
            rows.append(f"p_par    = {joule_to_inv_cm(self.p_par, constants)*1e4:.2f} e-4 cm^-1")
        if self.r3_q is not None:
            rows.append(f"<r^-3>_q = {self.r3_q:.3f} a.u.")
        return "\n".join(rows) + "\n"


def g_from_line(frequency: float, b_line: float, constants: PhysicalConstants = CODATA) -> float:
    """g = h f / (beta B) from one resonance line."""
    if not (frequency > 0 and b_line > 0):
        raise ValueError("frequency and field must be positive")
    return constants.planck_h * frequency / (constants.bohr_magneton_beta * b_line)


def a_from_width(
    g: float,
    width: float,
    sign: float = -1.0,
    constants: PhysicalConstants = CODATA,
) -> float:
    """Hyperfine constant in joules from a multiplet field width."""
    if not g > 0:
        raise ValueError("g must be positive")
    if width < 0:
        raise ValueError("width must be non-negative")
    if sign not in (-1.0, 1.0):
        raise ValueError("sign must be +1 or -1")
    return sign * g * constants.bohr_magneton_beta * width


def fit_bohr_magneton(per_mi: list[dict]) -> tuple[float, list[float]]:
    """Through-origin least squares of |A| in joules against g*width.

    ``per_mi`` rows carry "a_joule", "g" and "width" keys. Returns the
    slope in J/T and the residual vector.
    """
    if len(per_mi) < 2:
        raise ValueError("need at least two entries to fit")
    xs = [row["g"] * row["width"] for row in per_mi]
    ys = [abs(row["a_joule"]) for row in per_mi]
    sxx = sum(x * x for x in xs)
    if sxx == 0.0:
        raise ValueError("degenerate fit: all abscissae are zero")
    slope = sum(x * y for x, y in zip(xs, ys)) / sxx
    residuals = [y - slope * x for x, y in zip(xs, ys)]
    return slope, residuals


def quadrupole_from_multiplet(a_per_mi: list[float]) -> float:
    """Quadrupole parameter from four hyperfine constants, mi descending.

    Uses the outer adjacent-spacing half difference: with values ordered
    mi = +3/2 ... -3/2, the result is (|A(-3/2) - A(-1/2)| -
    |A(+1/2) - A(+3/2)|)/2, positive when spacings open up toward
    negative mi.
    """
    if len(a_per_mi) != 4:
        raise ValueError("expected exactly four hyperfine constants")
    a_hi, a_mid_hi, a_mid_lo, a_lo = a_per_mi
    delta_a = a_lo - a_mid_lo
    delta_ma = a_mid_hi - a_hi
    return (abs(delta_a) - abs(delta_ma)) / 2.0


def r3_from_quadrupole(
    p_par: float,
    ctx: QuadrupoleContext,
    constants: PhysicalConstants = CODATA,
) -> tuple[float, float]:
    """Inverse-cube radius expectation in a0^-3 units from ``p_par`` (J).

    Returns the bare value and the screening-corrected one,
    r3 / (1 - screening).
    """
    if ctx.q_barn == 0.0:
        raise ZeroDivisionError("quadrupole moment is zero")
    q_m2 = ctx.q_barn * 1e-28
    r3_m3 = -7.0 * ctx.i * (2.0 * ctx.i - 1.0) * p_par / (3.0 * constants.coulomb_e2 * q_m2)
    r3_au = r3_m3 * constants.bohr_radius_a0**3
    return r3_au, r3_au / (1.0 - ctx.screening)


def quadrupole_from_r3(
    r3_au: float,
    ctx: QuadrupoleContext,
    constants: PhysicalConstants = CODATA,
) -> float:
    """Forward relation: p_par in joules from the bare r3 in a.u."""
    q_m2 = ctx.q_barn * 1e-28
    r3_m3 = r3_au / constants.bohr_radius_a0**3
    return -3.0 * constants.coulomb_e2 * q_m2 * r3_m3 / (7.0 * ctx.i * (2.0 * ctx.i - 1.0))


def mean_values(g_par: float, g_perp: float, a_par: float, a_perp: float) -> tuple[float, float]:
    """Powder means (g_par + 2 g_perp)/3 and (a_par + 2 a_perp)/3."""
    return (g_par + 2.0 * g_perp) / 3.0, (a_par + 2.0 * a_perp) / 3.0


def extract_parameters(
    dataset: MultipletDataset,
    sign: float = -1.0,
    quad: QuadrupoleContext | None = None,
    axial: tuple[float, float, float, float] | None = None,
    constants: PhysicalConstants = CODATA,
) -> ExtractionResult:
    """Run the full inverse chain on one dataset.

    ``axial`` optionally supplies (g_par, g_perp, a_par, a_perp) in
    joules for the powder means; the quadrupole step needs a complete
    four-line dataset and, for the radius, a QuadrupoleContext.
    """
    per_mi = []
    for entry in dataset.entries:
        g = g_from_line(dataset.mode_freq, entry.b_line, constants)
        a = a_from_width(g, entry.width, sign, constants)
        per_mi.append({"mi": entry.mi, "g": g, "a_joule": a, "width": entry.width})

    beta_fit, _residuals = fit_bohr_magneton(per_mi)
    beta_rel = beta_fit / constants.bohr_magneton_beta - 1.0

    notes = ["p_par convention: outer adjacent-spacing half difference of per-mi hyperfine constants"]
    p_par = None
    r3_q = None
    r3_un = None
    if dataset.is_complete and len(per_mi) == 4:
        p_par = quadrupole_from_multiplet([row["a_joule"] for row in per_mi])
        if quad is not None:
            r3_q, r3_un = r3_from_quadrupole(p_par, quad, constants)
    else:
        notes.append("dataset incomplete: quadrupole asymmetry not extracted")

    mean_g = mean_a = None
    if axial is not None:
        mean_g, mean_a = mean_values(*axial)

    rows = [{"mi": r["mi"], "g": r["g"], "a_joule": r["a_joule"]} for r in per_mi]
    return ExtractionResult(
        per_mi=rows,
        beta_fit=beta_fit,
        beta_rel_err=beta_rel,
        p_par=p_par,
        r3_q=r3_q,
        r3_unscreened=r3_un,
        mean_g=mean_g,
        mean_a=mean_a,
        mean_g_per_mi=math.fsum(r["g"] for r in per_mi) / len(per_mi),
        mean_a_per_mi=math.fsum(r["a_joule"] for r in per_mi) / len(per_mi),
        is_complete=dataset.is_complete,
        notes=notes,
    )
