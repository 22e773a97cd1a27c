"""Minimum-detectable-spin-number estimates and ppb concentration.

The detection threshold scales as 1/(omega * Q_L); the baseline formula
applies at effective spin 1/2 and is rescaled by 3/(4 S(S+1)) for other
spins, normalized so the S = 1/2 case is reproduced exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .units import CODATA, PhysicalConstants


@dataclass(frozen=True)
class ResonatorMode:
    """One high-Q mode of the dielectric resonator."""

    label: str
    freq: float  # Hz
    q_loaded: float
    mode_volume: float  # m^3
    filling_factor: float

    def __post_init__(self) -> None:
        if not (self.freq > 0 and self.q_loaded > 0 and self.mode_volume > 0):
            raise ValueError("freq, q_loaded and mode_volume must be positive")
        if not 0.0 < self.filling_factor <= 1.0:
            raise ValueError("filling_factor must be in (0, 1]")


@dataclass(frozen=True)
class DetectionSetup:
    """Sample and readout conditions entering the spin-count threshold."""

    temperature: float  # K
    agg_width: float  # Hz, aggregate frequency width of the spin response
    noise_ratio: float = 1.0  # noise power over input power
    electron_g: float = CODATA.free_electron_g
    effective_spin: float = 0.5

    def __post_init__(self) -> None:
        if not (self.temperature > 0 and self.agg_width > 0):
            raise ValueError("temperature and agg_width must be positive")
        if self.noise_ratio < 0:
            raise ValueError("noise_ratio must be non-negative")
        if not (self.electron_g > 0 and self.effective_spin > 0):
            raise ValueError("electron_g and effective_spin must be positive")


@dataclass(frozen=True)
class LatticeParams:
    """Tetragonal cell dimensions and substitutional site counting."""

    a: float  # m
    b: float  # m
    c: float  # m
    formula_units_per_cell: int = 2
    sites_per_formula: int = 1

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0 and self.c > 0):
            raise ValueError("lattice constants must be positive")
        if self.formula_units_per_cell < 1 or self.sites_per_formula < 1:
            raise ValueError("cell counting must be at least 1")

    @property
    def site_density(self) -> float:
        """Substitutional sites per cubic meter."""
        return self.formula_units_per_cell * self.sites_per_formula / (self.a * self.b * self.c)


def _spin_scale(effective_spin: float) -> float:
    return 0.75 / (effective_spin * (effective_spin + 1.0))


def min_detectable_spins(
    mode: ResonatorMode,
    setup: DetectionSetup,
    constants: PhysicalConstants = CODATA,
) -> float:
    """Smallest spin count giving a detectable response in this mode.

    N = (4 kB V T)/(g^2 beta^2 mu0) * (dw/w) * 1/(eta Q_L) * sqrt(Pn/P),
    multiplied by the effective-spin rescaling.
    """
    prefactor = (
        4.0
        * constants.boltzmann_kB
        * mode.mode_volume
        * setup.temperature
        / (setup.electron_g**2 * constants.bohr_magneton_beta**2 * constants.vacuum_permeability_mu0)
    )
    base = (
        prefactor
        * (setup.agg_width / mode.freq)
        / (mode.filling_factor * mode.q_loaded)
        * math.sqrt(setup.noise_ratio)
    )
    return base * _spin_scale(setup.effective_spin)


def min_detectable_spins_field_form(
    mode: ResonatorMode,
    setup: DetectionSetup,
    line_width_b: float,
    resonant_b: float,
    constants: PhysicalConstants = CODATA,
) -> float:
    """Same threshold with the field ratio dB/B replacing dw/w."""
    if not resonant_b > 0:
        raise ValueError("resonant field must be positive")
    if line_width_b < 0:
        raise ValueError("line width must be non-negative")
    freq_form = min_detectable_spins(mode, setup, constants)
    return freq_form * (line_width_b / resonant_b) / (setup.agg_width / mode.freq)


def concentration_ppb(count: float, volume: float, lattice: LatticeParams) -> float:
    """Impurity count in ``volume`` as parts per 1e9 of lattice sites."""
    if count < 0 or not volume > 0:
        raise ValueError("count must be non-negative and volume positive")
    return 1e9 * count / (volume * lattice.site_density)


def count_from_ppb(ppb: float, volume: float, lattice: LatticeParams) -> float:
    """Inverse of :func:`concentration_ppb`."""
    if ppb < 0 or not volume > 0:
        raise ValueError("ppb must be non-negative and volume positive")
    return ppb * volume * lattice.site_density / 1e9


def load_modes(source) -> list[ResonatorMode]:
    """Read a JSON array of mode records (freq given in GHz).

    ``source`` is a path unless it starts with a JSON bracket, in which
    case it is parsed directly.
    """
    if isinstance(source, (str, bytes)) and str(source).lstrip()[:1] in ("[", "{"):
        records = json.loads(source)
    else:
        with open(source) as fh:
            records = json.load(fh)
    if not isinstance(records, list):
        raise ValueError("mode catalog must be a JSON array")
    modes = []
    for rec in records:
        modes.append(
            ResonatorMode(
                label=str(rec["label"]),
                freq=float(rec["freq_ghz"]) * 1e9,
                q_loaded=float(rec["q_loaded"]),
                mode_volume=float(rec["mode_volume_m3"]),
                filling_factor=float(rec["filling_factor"]),
            )
        )
    return modes
