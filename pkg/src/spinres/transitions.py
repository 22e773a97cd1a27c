"""Exact diagonalization, resonance-field search and spectrum-map synthesis.

The resonance search scans a field range at fixed microwave frequency,
tracks adiabatic levels through eigenvector-overlap continuity and
bisects every bracketed crossing of the level gap with h*f. Spectrum
maps accumulate line shapes over a (field x frequency) grid, one map per
resonator mode window.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .sensitivity import ResonatorMode
from .spin_algebra import (
    FieldVector,
    SpinOperators,
    SpinSystem,
    build_hamiltonian,
    spin_operators,
)
from .units import CODATA, PhysicalConstants

MAX_DIM = 64


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Spectral decomposition: ascending eigenvalues, orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.shape[0]


class TransitionStrength(NamedTuple):
    gap: float  # J, positive
    intensity: float  # |<u| Sx (x) 1 |l>|^2
    lower: int
    upper: int


@dataclass(frozen=True)
class TransitionLine:
    """One resonance at fixed microwave frequency."""

    b_center: float  # T
    frequency: float  # Hz
    mi_label: float
    intensity: float
    level_pair: tuple[int, int]


@dataclass(frozen=True)
class Lineshape:
    kind: str  # "lorentzian" or "gaussian"
    width: float  # HWHM in Hz

    def __post_init__(self) -> None:
        if self.kind not in ("lorentzian", "gaussian"):
            raise ValueError(f"unknown lineshape kind {self.kind!r}")
        if not self.width > 0:
            raise ValueError("lineshape width must be positive")

    def profile(self, detuning_hz: np.ndarray) -> np.ndarray:
        x = detuning_hz / self.width
        if self.kind == "lorentzian":
            return 1.0 / (1.0 + x * x)
        return np.exp(-math.log(2.0) * x * x)


@dataclass(eq=False)
class SpectrumMap:
    """Response on a (field x frequency) grid for one resonator mode."""

    field_axis: np.ndarray  # T
    freq_axis: np.ndarray  # Hz
    response: np.ndarray  # shape (len(field_axis), len(freq_axis)), >= 0
    mode: ResonatorMode

    def to_csv(self, target) -> None:
        """Write header metadata then B_tesla,f_hz,response triples.

        Numbers are formatted with 12 significant digits so repeated
        runs produce byte-identical files.
        """
        own = isinstance(target, (str, bytes))
        fh = open(target, "w", newline="\n") if own else target
        try:
            fh.write("# spinres spectrum map\n")
            fh.write(f"# mode_label={self.mode.label}\n")
            fh.write(f"# mode_freq_hz={_fmt(self.mode.freq)}\n")
            fh.write(f"# q_loaded={_fmt(self.mode.q_loaded)}\n")
            fh.write(f"# mode_volume_m3={_fmt(self.mode.mode_volume)}\n")
            fh.write(f"# filling_factor={_fmt(self.mode.filling_factor)}\n")
            fh.write("B_tesla,f_hz,response\n")
            for ib, b in enumerate(self.field_axis):
                row = self.response[ib]
                for jf, f in enumerate(self.freq_axis):
                    fh.write(f"{_fmt(b)},{_fmt(f)},{_fmt(row[jf])}\n")
        finally:
            if own:
                fh.close()


def _fmt(x: float) -> str:
    return f"{float(x):.11e}"


def eigensystem(h: np.ndarray, hermitian_tol: float = 1e-12) -> EigenSystem:
    """Full spectral decomposition with a deterministic ordering.

    Eigenvalues ascend; near-degenerate groups are ordered by the basis
    index of each eigenvector's largest-amplitude component, and every
    eigenvector phase is fixed so that component is real positive.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError("expected a square matrix")
    if h.shape[0] > MAX_DIM:
        raise ValueError(f"dimension {h.shape[0]} exceeds supported maximum {MAX_DIM}")
    asym = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    scale = float(np.max(np.abs(h))) if h.size else 0.0
    if asym > hermitian_tol * max(scale, 1.0):
        raise ValueError(f"matrix is not Hermitian, max asymmetry {asym:.3e}")

    values, vectors = np.linalg.eigh(h)
    values = values.astype(float)

    # order near-degenerate runs by dominant-component index
    tol = 1e-12 * max(scale, np.max(np.abs(values)) if values.size else 0.0, 1e-300)
    order = np.arange(values.size)
    start = 0
    while start < values.size:
        stop = start + 1
        while stop < values.size and values[stop] - values[stop - 1] <= tol:
            stop += 1
        if stop - start > 1:
            block = order[start:stop]
            dominant = [int(np.argmax(np.abs(vectors[:, k]))) for k in block]
            order[start:stop] = block[np.argsort(dominant, kind="stable")]
        start = stop
    values = values[order]
    vectors = vectors[:, order]

    # canonical phase: dominant component real positive
    for k in range(vectors.shape[1]):
        col = vectors[:, k]
        idx = int(np.argmax(np.abs(col)))
        amp = col[idx]
        if abs(amp) > 0:
            vectors[:, k] = col * (amp.conjugate() / abs(amp))
    return EigenSystem(values=values, vectors=vectors)


def transverse_moment_operator(electron_ops: SpinOperators, total_dim: int) -> np.ndarray:
    """Sx (x) identity on the nuclear factor, inferred from total_dim."""
    if total_dim % electron_ops.dim != 0:
        raise ValueError("total dimension is not a multiple of the electron dimension")
    nuclear_dim = total_dim // electron_ops.dim
    return np.kron(electron_ops.jx, np.eye(nuclear_dim, dtype=complex))


def transition_table(
    es: EigenSystem,
    electron_ops: SpinOperators,
    intensity_floor: float = 1e-6,
) -> list[TransitionStrength]:
    """All level pairs with positive gap and intensity above the floor."""
    sx_full = transverse_moment_operator(electron_ops, es.dim)
    amps = es.vectors.conj().T @ sx_full @ es.vectors
    intens = np.abs(amps) ** 2
    rows: list[TransitionStrength] = []
    for lower in range(es.dim):
        for upper in range(es.dim):
            gap = es.values[upper] - es.values[lower]
            if gap > 0 and intens[upper, lower] > intensity_floor:
                rows.append(
                    TransitionStrength(float(gap), float(intens[upper, lower]), lower, upper)
                )
    rows.sort(key=lambda r: (r.gap, r.lower, r.upper))
    return rows


def _match_columns(reference: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Column permutation maximizing total overlap with the reference set."""
    overlap = np.abs(reference.conj().T @ vectors)
    rows, cols = linear_sum_assignment(-overlap)
    perm = np.empty_like(cols)
    perm[rows] = cols
    return perm


def _mi_of_index(system: SpinSystem, index: int) -> float:
    dim_i = int(round(2 * system.i)) + 1
    return system.i - (index % dim_i)


def resonance_fields(
    system: SpinSystem,
    frequency: float,
    b_range: tuple[float, float],
    b_dir: FieldVector = FieldVector(0.0, 0.0, 1.0),
    scan_points: int = 2000,
    intensity_floor: float = 1e-6,
    freq_tol_hz: float = 1.0,
    field_rtol: float = 1e-13,
    constants: PhysicalConstants = CODATA,
) -> list[TransitionLine]:
    """Fields where a tracked level gap equals h*frequency.

    The range is scanned on a uniform grid; levels are followed from
    point to point by maximum eigenvector overlap so the gap of a pair
    is well defined through avoided crossings. Each sign change of
    gap - h*f is bisected until the bracket is below ``field_rtol``
    relative and the gap is within ``freq_tol_hz`` of the target. A
    non-monotone gap yields every bracketed root; an empty result just
    means no crossing in range.
    """
    if not frequency > 0:
        raise ValueError("frequency must be positive")
    b_lo, b_hi = b_range
    if not (0 < b_lo < b_hi):
        raise ValueError("b_range must be positive and ordered")
    if scan_points < 2:
        raise ValueError("scan_points must be at least 2")
    unit = b_dir.unit()
    target = constants.planck_h * frequency
    es_ops = spin_operators(system.s)
    sx_full = transverse_moment_operator(es_ops, system.dim)

    def solve(b: float, reference: np.ndarray | None):
        es = eigensystem(build_hamiltonian(system, unit.scaled(b), constants))
        vals, vecs = es.values, es.vectors
        if reference is not None:
            perm = _match_columns(reference, vecs)
            vals, vecs = vals[perm], vecs[:, perm]
        return vals, vecs

    grid = np.linspace(b_lo, b_hi, scan_points)
    lines: list[TransitionLine] = []
    prev_vals, prev_vecs = solve(grid[0], None)
    dim = prev_vals.size

    for k in range(1, scan_points):
        cur_vals, cur_vecs = solve(grid[k], prev_vecs)
        for i in range(dim):
            for j in range(i + 1, dim):
                f_prev = (prev_vals[j] - prev_vals[i]) - target
                f_cur = (cur_vals[j] - cur_vals[i]) - target
                root = None
                if f_prev == 0.0:
                    root = (grid[k - 1], prev_vecs)
                elif f_prev * f_cur < 0.0:
                    root = _bisect_pair(
                        i, j, grid[k - 1], grid[k], f_prev, prev_vecs,
                        target, constants.planck_h * freq_tol_hz, field_rtol, solve,
                    )
                if root is None:
                    continue
                b_line, vecs_line = root
                lower_vec = vecs_line[:, i]
                amp = np.vdot(vecs_line[:, j], sx_full @ lower_vec)
                intensity = float(abs(amp) ** 2)
                if intensity <= intensity_floor:
                    continue
                mi = _mi_of_index(system, int(np.argmax(np.abs(lower_vec))))
                lines.append(
                    TransitionLine(
                        b_center=float(b_line),
                        frequency=frequency,
                        mi_label=mi,
                        intensity=intensity,
                        level_pair=(i, j),
                    )
                )
        prev_vals, prev_vecs = cur_vals, cur_vecs

    # drop duplicates from roots landing exactly on grid nodes
    lines.sort(key=lambda ln: (ln.b_center, ln.level_pair))
    deduped: list[TransitionLine] = []
    for ln in lines:
        if deduped and deduped[-1].level_pair == ln.level_pair and \
                abs(deduped[-1].b_center - ln.b_center) <= 1e-9 * ln.b_center:
            continue
        deduped.append(ln)
    return deduped


def _bisect_pair(i, j, lo, hi, f_lo, lo_vecs, target, gap_tol, field_rtol, solve):
    reference = lo_vecs
    mid = 0.5 * (lo + hi)
    vecs_mid = reference
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        vals_mid, vecs_mid = solve(mid, reference)
        f_mid = (vals_mid[j] - vals_mid[i]) - target
        if f_mid == 0.0:
            break
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo, reference = mid, f_mid, vecs_mid
        else:
            hi = mid
        if (hi - lo) <= field_rtol * abs(mid) and abs(f_mid) <= gap_tol:
            break
    return mid, vecs_mid


def spectrum_maps(
    system: SpinSystem,
    modes: Sequence[ResonatorMode],
    field_axis: np.ndarray,
    lineshape: Lineshape,
    freq_span_hz: float = 2e6,
    freq_points: int = 201,
    b_dir: FieldVector = FieldVector(0.0, 0.0, 1.0),
    intensity_floor: float = 1e-6,
    hidden_mi: Iterable[float] = (),
    threads: int = 1,
    constants: PhysicalConstants = CODATA,
) -> list[SpectrumMap]:
    """One response map per mode: sum of intensity-weighted line shapes.

    The expensive part, one diagonalization per field point, is shared
    across modes; columns may be computed by a thread pool and are
    merged by grid index so the result does not depend on ``threads``.
    """
    field_axis = np.asarray(field_axis, dtype=float)
    if field_axis.size == 0 or freq_points < 2:
        raise ValueError("grids must be non-empty")
    unit = b_dir.unit()
    es_ops = spin_operators(system.s)
    hidden = [float(m) for m in hidden_mi]

    def column(b: float):
        es = eigensystem(build_hamiltonian(system, unit.scaled(b), constants))
        rows = transition_table(es, es_ops, intensity_floor=intensity_floor)
        kept = []
        for r in rows:
            mi = _mi_of_index(system, int(np.argmax(np.abs(es.vectors[:, r.lower]))))
            if any(abs(mi - hm) < 1e-9 for hm in hidden):
                continue
            kept.append((r.gap / constants.planck_h, r.intensity))
        return kept

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_field = list(pool.map(column, field_axis))
    else:
        per_field = [column(b) for b in field_axis]

    maps: list[SpectrumMap] = []
    for mode in modes:
        freq_axis = np.linspace(
            mode.freq - 0.5 * freq_span_hz, mode.freq + 0.5 * freq_span_hz, freq_points
        )
        response = np.zeros((field_axis.size, freq_axis.size))
        for ib, entries in enumerate(per_field):
            for line_freq, intensity in entries:
                response[ib] += intensity * lineshape.profile(freq_axis - line_freq)
        maps.append(
            SpectrumMap(field_axis=field_axis.copy(), freq_axis=freq_axis,
                        response=response, mode=mode)
        )
    return maps


def aggregate_width(spectrum: SpectrumMap, b_slice: float, threshold: float) -> float:
    """Frequency extent of the contiguous above-threshold region.

    Taken around the strongest response at the field column nearest
    ``b_slice``; the extent counts grid cells, so a line narrower than
    the grid reports one frequency step.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must be inside (0, 1)")
    axis = spectrum.field_axis
    if not (axis.min() <= b_slice <= axis.max()):
        raise ValueError("b_slice is outside the field axis")
    col = int(np.argmin(np.abs(axis - b_slice)))
    profile = spectrum.response[col]
    peak = float(profile.max())
    if peak <= 0.0:
        raise ValueError(f"no spin-ensemble response at B = {b_slice} T")
    p = int(np.argmax(profile))
    cut = threshold * peak
    lo = p
    while lo > 0 and profile[lo - 1] >= cut:
        lo -= 1
    hi = p
    while hi < profile.size - 1 and profile[hi + 1] >= cut:
        hi += 1
    step = float(spectrum.freq_axis[1] - spectrum.freq_axis[0])
    return (hi - lo + 1) * step


def render_line_table(rows: Sequence[tuple[str, TransitionLine]]) -> str:
    """CSV text for labeled resonance lines."""
    buf = io.StringIO()
    buf.write("mode_label,mi,b_center_tesla,frequency_hz,intensity,lower,upper\n")
    for label, ln in rows:
        buf.write(
            f"{label},{ln.mi_label:g},{_fmt(ln.b_center)},{_fmt(ln.frequency)},"
            f"{_fmt(ln.intensity)},{ln.level_pair[0]},{ln.level_pair[1]}\n"
        )
    return buf.getvalue()
