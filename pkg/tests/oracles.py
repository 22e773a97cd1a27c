"""Independent closed forms used as references by the test suite.

Everything here is scalar arithmetic: no tensor products, no matrix
diagonalization, so these stay independent of the code under test.
"""

from __future__ import annotations

import math

import numpy as np

# CODATA-2018, restated locally on purpose
PLANCK_H = 6.62607015e-34
BOHR_MAGNETON = 9.2740100783e-24


def breit_rabi_levels(a_iso: float, g: float, gi: float, i: float, b: float) -> list[float]:
    """Eigenvalues for S=1/2 with isotropic hyperfine a_iso (joules).

    Derived from the conserved total projection m = M_S + M_I: every m
    with |m| < I + 1/2 spans a 2x2 block whose roots follow from the
    quadratic formula; the stretched states are uncoupled. The nuclear
    Zeeman term is -beta*B*gi*Iz with the electron Bohr magneton.
    """
    beta = BOHR_MAGNETON
    levels = []
    # stretched states |+-1/2, +-I>
    levels.append(a_iso * i / 2.0 + g * beta * b / 2.0 - gi * beta * b * i)
    levels.append(a_iso * i / 2.0 - g * beta * b / 2.0 + gi * beta * b * i)
    m = -(i + 0.5) + 1.0
    while m <= (i + 0.5) - 1.0 + 1e-9:
        mi_up = m - 0.5  # M_I paired with M_S = +1/2
        mi_dn = m + 0.5  # M_I paired with M_S = -1/2
        d1 = a_iso * mi_up / 2.0 + g * beta * b / 2.0 - gi * beta * b * mi_up
        d2 = -a_iso * mi_dn / 2.0 - g * beta * b / 2.0 - gi * beta * b * mi_dn
        off = (a_iso / 2.0) * math.sqrt(i * (i + 1.0) - mi_up * mi_dn)
        mean = 0.5 * (d1 + d2)
        half = math.hypot(0.5 * (d1 - d2), off)
        levels.extend([mean - half, mean + half])
        m += 1.0
    return sorted(levels)


def diagonal_levels(g_par: float, a_par: float, p_par: float, gi_par: float,
                    s: float, i: float, bz: float) -> list[float]:
    """E(M_S, M_I) for the transverse-coupling-free case."""
    beta = BOHR_MAGNETON
    out = []
    ms = s
    while ms >= -s - 1e-9:
        mi = i
        while mi >= -i - 1e-9:
            out.append(
                g_par * beta * bz * ms
                + a_par * ms * mi
                + p_par * (mi * mi - i * (i + 1.0) / 3.0)
                - beta * bz * gi_par * mi
            )
            mi -= 1.0
        ms -= 1.0
    return sorted(out)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (raw + raw.conj().T)
