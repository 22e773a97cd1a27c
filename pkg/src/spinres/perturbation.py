"""First-order line positions, multiplet widths and the hierarchy check."""

from __future__ import annotations

from dataclasses import dataclass

from .spin_algebra import SpinSystem
from .units import CODATA, PhysicalConstants


@dataclass(frozen=True)
class FirstOrderLine:
    b0: float  # T, resonance field without hyperfine coupling
    mi: float
    b: float  # T

    def __post_init__(self) -> None:
        if not self.b > 0:
            raise ValueError("line field must be positive")


def first_order_field(
    b0: float,
    a: float,
    mi: float,
    g: float,
    constants: PhysicalConstants = CODATA,
) -> float:
    """b0 - a*mi/(g*beta); the caller picks the free-electron or measured g."""
    if not g > 0:
        raise ValueError("g must be positive")
    return b0 - a * mi / (g * constants.bohr_magneton_beta)


def first_order_multiplet(
    b0: float,
    a: float,
    g: float,
    i: float,
    constants: PhysicalConstants = CODATA,
) -> list[FirstOrderLine]:
    """The 2I+1 lines, mi descending."""
    count = int(round(2 * i)) + 1
    lines = []
    for k in range(count):
        mi = i - k
        lines.append(FirstOrderLine(b0=b0, mi=mi, b=first_order_field(b0, a, mi, g, constants)))
    return lines


def multiplet_width(a: float, g: float, constants: PhysicalConstants = CODATA) -> float:
    """|a|/(g*beta) in tesla."""
    if not g > 0:
        raise ValueError("g must be positive")
    return abs(a) / (g * constants.bohr_magneton_beta)


def anisotropy_energy(
    p_par: float,
    gi_par: float,
    b: float,
    mi: float,
    i: float,
    constants: PhysicalConstants = CODATA,
) -> float:
    """Quadrupole plus nuclear-Zeeman energy of one nuclear sublevel."""
    if i < 0:
        raise ValueError("nuclear spin must be non-negative")
    return p_par * (mi * mi - i * (i + 1) / 3.0) - constants.bohr_magneton_beta * b * gi_par * mi


def hierarchy_check(
    system: SpinSystem,
    b: float,
    ratio_min: float = 10.0,
    constants: PhysicalConstants = CODATA,
) -> tuple[bool, bool, bool]:
    """Is beta*B*g_par >> |a_par| >> |p_par| >> beta*B*|gi_par|?

    Each flag is true when the left side exceeds ratio_min times the
    right side; a zero right side makes the comparison vacuously true.
    """
    if not b > 0:
        raise ValueError("field must be positive")
    beta_b = constants.bohr_magneton_beta * b
    chain = (
        (beta_b * system.g_par, abs(system.a_par)),
        (abs(system.a_par), abs(system.p_par)),
        (abs(system.p_par), beta_b * abs(system.gi_par)),
    )
    return tuple(right == 0.0 or left > ratio_min * right for left, right in chain)
