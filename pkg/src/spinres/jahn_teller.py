"""Principal g-factors under a trigonal distortion coordinate and the
orbital mixing angle estimated from hyperfine multiplet widths."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .units import CODATA


@dataclass(frozen=True)
class JTParams:
    """Distortion inputs: spin-orbit over crystal-field ratio and angle.

    ``lambda_over_delta`` is negative for a d9 hole; ``phi`` is the
    vectorial angle of the distortion coordinate, in radians.
    """

    lambda_over_delta: float
    phi: float = 0.0
    g_s: float = CODATA.free_electron_g

    def __post_init__(self) -> None:
        if abs(self.phi) > math.pi:
            raise ValueError("phi must lie in [-pi, pi]")


def principal_g_factors(params: JTParams) -> tuple[float, float, float]:
    """The three principal g values along the fourfold axes.

    g1 and g2 carry squared (cos(phi/2) -+ sqrt(3) sin(phi/2)) factors;
    g3 carries cos^4(phi/2) with an eightfold shift coefficient.
    """
    r = params.lambda_over_delta
    half = 0.5 * params.phi
    c, s = math.cos(half), math.sin(half)
    g1 = params.g_s - 2.0 * r * (c - math.sqrt(3.0) * s) ** 2
    g2 = params.g_s - 2.0 * r * (c + math.sqrt(3.0) * s) ** 2
    g3 = params.g_s - 8.0 * r * (c * c) ** 2
    return g1, g2, g3


def g_anisotropy(lambda_over_delta: float) -> tuple[float, float]:
    """Parallel and perpendicular g shifts (8, 2) * |lambda/delta|.

    Returned as positive shifts above g_s, the convention for a
    negative spin-orbit ratio (hole configuration).
    """
    return 8.0 * abs(lambda_over_delta), 2.0 * abs(lambda_over_delta)


def elongation_ratio(g1: float, g2: float, g3: float) -> tuple[float, bool]:
    """R = (g2 - g1)/(g3 - g2) and the octahedral-elongation flag R < 1."""
    if g3 == g2:
        raise ValueError("ratio undefined: g3 equals g2")
    ratio = (g2 - g1) / (g3 - g2)
    return ratio, ratio < 1.0


def mixing_angle_from_widths(widths: Sequence[float]) -> tuple[float, float]:
    """Orbital mixing angle and excited-state admixture from four widths.

    phi = atan((max - min)/sum), admixture = sin^2(phi/2). Any common
    unit works; the estimate is scale invariant.
    """
    if len(widths) != 4:
        raise ValueError("expected exactly four per-multiplet widths")
    values = [float(w) for w in widths]
    if any(w <= 0 for w in values):
        raise ValueError("widths must be positive")
    phi = math.atan2(max(values) - min(values), sum(values))
    admixture = math.sin(0.5 * phi) ** 2
    return phi, admixture
