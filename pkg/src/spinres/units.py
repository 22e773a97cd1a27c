"""Physical constants and energy-unit conversions.

The canonical energy unit everywhere in this package is the joule.
Inputs quoted in wavenumbers, GHz or magnetic field (via E = g*beta*B)
are converted at module boundaries with the helpers below.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA-2018 constants, frozen in source.

    The fitted Bohr magneton produced by the extraction pipeline is a
    measurement result and must never be substituted for
    ``bohr_magneton_beta`` here.
    """

    planck_h: float = 6.62607015e-34  # J s (exact)
    boltzmann_kB: float = 1.380649e-23  # J/K (exact)
    bohr_magneton_beta: float = 9.2740100783e-24  # J/T
    vacuum_permeability_mu0: float = 1.25663706212e-6  # T m/A
    free_electron_g: float = 2.00231930436256  # |g_e|
    coulomb_e2: float = 2.3070775523417355e-28  # e^2/(4 pi eps0), J m
    bohr_radius_a0: float = 5.29177210903e-11  # m
    hc_per_cm: float = 1.9864458571489285e-23  # J per cm^-1


CODATA = PhysicalConstants()


class EnergyUnit(Enum):
    JOULE = "J"
    WAVENUMBER = "cm^-1"
    GIGAHERTZ = "GHz"
    TESLA = "T"  # field equivalent, requires a g-factor: E = g*beta*B


@dataclass(frozen=True)
class EnergyValue:
    """An energy magnitude tagged with its unit.

    ``g`` is required (and must be positive) when the unit is TESLA and
    must be omitted otherwise.
    """

    magnitude: float
    unit: EnergyUnit
    g: float | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.unit, EnergyUnit):
            raise ValueError(f"unknown energy unit tag: {self.unit!r}")
        if self.unit is EnergyUnit.TESLA:
            if self.g is None or not self.g > 0:
                raise ValueError("tesla-valued energies need a positive g-factor")
        elif self.g is not None:
            raise ValueError(f"g-factor is meaningless for unit {self.unit.value}")


def _to_joule(v: EnergyValue, c: PhysicalConstants) -> float:
    if v.unit is EnergyUnit.JOULE:
        return v.magnitude
    if v.unit is EnergyUnit.WAVENUMBER:
        return v.magnitude * c.hc_per_cm
    if v.unit is EnergyUnit.GIGAHERTZ:
        return v.magnitude * 1e9 * c.planck_h
    if v.unit is EnergyUnit.TESLA:
        return v.magnitude * v.g * c.bohr_magneton_beta
    raise ValueError(f"unknown energy unit tag: {v.unit!r}")


def convert_energy(
    v: EnergyValue,
    target: EnergyUnit,
    g: float | None = None,
    constants: PhysicalConstants = CODATA,
) -> EnergyValue:
    """Convert ``v`` to ``target`` units; ``g`` applies to a TESLA target."""
    if not isinstance(target, EnergyUnit):
        raise ValueError(f"unknown energy unit tag: {target!r}")
    joules = _to_joule(v, constants)
    if target is EnergyUnit.JOULE:
        return EnergyValue(joules, target)
    if target is EnergyUnit.WAVENUMBER:
        return EnergyValue(joules / constants.hc_per_cm, target)
    if target is EnergyUnit.GIGAHERTZ:
        return EnergyValue(joules / (1e9 * constants.planck_h), target)
    if target is EnergyUnit.TESLA:
        if g is None or not g > 0:
            raise ValueError("converting to tesla needs a positive g-factor")
        return EnergyValue(joules / (g * constants.bohr_magneton_beta), target, g)
    raise ValueError(f"unknown energy unit tag: {target!r}")


def gauss_to_tesla(b_gauss: float) -> float:
    """1 G = 1e-4 T."""
    return b_gauss * 1e-4


def inv_cm_to_joule(x: float, constants: PhysicalConstants = CODATA) -> float:
    return x * constants.hc_per_cm


def joule_to_inv_cm(x: float, constants: PhysicalConstants = CODATA) -> float:
    return x / constants.hc_per_cm


def field_quantum(g: float, b_tesla: float, constants: PhysicalConstants = CODATA) -> float:
    """Zeeman energy scale g*beta*B in joules."""
    return g * constants.bohr_magneton_beta * b_tesla


def constants_consistency_residual(constants: PhysicalConstants = CODATA) -> float:
    """Relative mismatch of hc_per_cm against h times c in cm/s."""
    derived = constants.planck_h * 2.99792458e10
    return abs(constants.hc_per_cm - derived) / derived
