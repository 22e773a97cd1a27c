"""Angular-momentum operator matrices and the axial electron-nuclear Hamiltonian.

Matrices live in the |j, m> basis with m descending, and composite
operators in the |M_S> (x) |M_I> product basis, both indices descending.
All couplings are joules, fields are tesla.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

from .units import CODATA, PhysicalConstants


def _two_j(j: float) -> int:
    two_j = 2.0 * j
    if j < 0 or abs(two_j - round(two_j)) > 1e-9:
        raise ValueError(f"spin quantum number must be a non-negative half-integer, got {j}")
    return int(round(two_j))


@dataclass(frozen=True, eq=False)
class SpinOperators:
    """Dense spin matrices for one angular momentum j."""

    j: float
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray
    jplus: np.ndarray
    jminus: np.ndarray

    @property
    def dim(self) -> int:
        return self.jz.shape[0]


def spin_operators(j: float) -> SpinOperators:
    """Build jx, jy, jz and ladder matrices of dimension 2j+1.

    jplus has superdiagonal entries sqrt(j(j+1) - m(m+1)) where m is the
    projection of the lower state of each step.
    """
    dim = _two_j(j) + 1
    m = j - np.arange(dim)
    jz = np.diag(m).astype(complex)
    jplus = np.zeros((dim, dim), dtype=complex)
    for k in range(1, dim):
        jplus[k - 1, k] = math.sqrt(j * (j + 1) - m[k] * (m[k] + 1))
    jminus = jplus.conj().T
    jx = 0.5 * (jplus + jminus)
    jy = -0.5j * (jplus - jminus)
    return SpinOperators(j=float(j), jx=jx, jy=jy, jz=jz, jplus=jplus, jminus=jminus)


@dataclass(frozen=True)
class SpinSystem:
    """Parameters of one paramagnetic center (energies in joules).

    The nuclear Zeeman term is written with the electron Bohr magneton,
    so ``gi_par`` carries the small nuclear scale.
    """

    g_par: float
    g_perp: float
    a_par: float = 0.0
    a_perp: float = 0.0
    p_par: float = 0.0
    gi_par: float = 0.0
    s: float = 0.5
    i: float = 1.5

    def __post_init__(self) -> None:
        _two_j(self.s)
        _two_j(self.i)
        if not self.s > 0:
            raise ValueError("electron spin must be positive")
        if not (self.g_par > 0 and self.g_perp > 0):
            raise ValueError("g-factors must be positive")
        for name in ("a_par", "a_perp", "p_par", "gi_par"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @classmethod
    def from_wavenumbers(
        cls,
        g_par: float,
        g_perp: float,
        a_par_cm: float = 0.0,
        a_perp_cm: float = 0.0,
        p_par_cm: float = 0.0,
        gi_par: float = 0.0,
        s: float = 0.5,
        i: float = 1.5,
        constants: PhysicalConstants = CODATA,
    ) -> "SpinSystem":
        """Couplings given in cm^-1 instead of joules."""
        k = constants.hc_per_cm
        return cls(
            g_par=g_par,
            g_perp=g_perp,
            a_par=a_par_cm * k,
            a_perp=a_perp_cm * k,
            p_par=p_par_cm * k,
            gi_par=gi_par,
            s=s,
            i=i,
        )

    @property
    def dim(self) -> int:
        return (_two_j(self.s) + 1) * (_two_j(self.i) + 1)


@dataclass(frozen=True)
class FieldVector:
    """Static magnetic field in tesla."""

    bx: float = 0.0
    by: float = 0.0
    bz: float = 0.0

    def __post_init__(self) -> None:
        for comp in (self.bx, self.by, self.bz):
            if not math.isfinite(comp):
                raise ValueError("field components must be finite")

    @property
    def magnitude(self) -> float:
        return math.sqrt(self.bx**2 + self.by**2 + self.bz**2)

    def unit(self) -> "FieldVector":
        mag = self.magnitude
        if mag == 0.0:
            raise ValueError("cannot normalize a zero field vector")
        return FieldVector(self.bx / mag, self.by / mag, self.bz / mag)

    def scaled(self, factor: float) -> "FieldVector":
        return FieldVector(self.bx * factor, self.by * factor, self.bz * factor)


def build_hamiltonian(
    system: SpinSystem,
    field: FieldVector,
    constants: PhysicalConstants = CODATA,
) -> np.ndarray:
    """Assemble the full Hamiltonian matrix, dimension (2S+1)(2I+1).

    Terms: electron Zeeman (axial g), axial hyperfine, axial nuclear
    quadrupole (traceless by the I(I+1)/3 subtraction) and the nuclear
    Zeeman term taken with the field magnitude. Every term is Hermitian
    by construction, so H equals its conjugate transpose exactly.
    """
    es = spin_operators(system.s)
    ns = spin_operators(system.i)
    eye_s = np.eye(es.dim, dtype=complex)
    eye_i = np.eye(ns.dim, dtype=complex)
    beta = constants.bohr_magneton_beta

    h = beta * system.g_par * field.bz * np.kron(es.jz, eye_i)
    h = h + beta * system.g_perp * (
        field.bx * np.kron(es.jx, eye_i) + field.by * np.kron(es.jy, eye_i)
    )
    h = h + system.a_par * np.kron(es.jz, ns.jz)
    h = h + system.a_perp * (np.kron(es.jx, ns.jx) + np.kron(es.jy, ns.jy))
    quad = ns.jz @ ns.jz - (system.i * (system.i + 1) / 3.0) * eye_i
    h = h + system.p_par * np.kron(eye_s, quad)
    h = h - beta * field.magnitude * system.gi_par * np.kron(eye_s, ns.jz)
    return h


def basis_labels(system: SpinSystem) -> list[tuple[float, float]]:
    """(M_S, M_I) for each basis index, both descending."""
    dim_s = _two_j(system.s) + 1
    dim_i = _two_j(system.i) + 1
    labels = []
    for ks in range(dim_s):
        for ki in range(dim_i):
            labels.append((system.s - ks, system.i - ki))
    return labels


def trace_check(h: np.ndarray, hermitian_tol: float = 1e-12) -> float:
    """Real trace of a Hermitian matrix; rejects non-Hermitian input.

    All Hamiltonian terms are traceless, so this should vanish up to
    rounding for any assembled matrix.
    """
    h = np.asarray(h)
    asym = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    scale = float(np.max(np.abs(h))) if h.size else 0.0
    if asym > hermitian_tol * max(scale, 1.0):
        raise ValueError(f"matrix is not Hermitian, max asymmetry {asym:.3e}")
    return float(np.real(np.trace(h)))
