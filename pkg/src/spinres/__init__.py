"""spinres: simulation and parameter extraction for axial-symmetry
electron spin resonance with nuclear hyperfine structure.

Forward model: spin-operator algebra, exact diagonalization of the
electron-nuclear Hamiltonian, resonance-field search at fixed microwave
frequency and synthetic field/frequency spectrum maps. Inverse model:
per-multiplet g and hyperfine extraction, Bohr-magneton regression,
nuclear-quadrupole parameter and inverse-cube-radius estimates, plus
distortion-angle analysis and detection-sensitivity figures.
"""

__version__ = "0.1.0"

from .extraction import (
    ExtractionResult,
    MultipletDataset,
    MultipletEntry,
    QuadrupoleContext,
    a_from_width,
    extract_parameters,
    fit_bohr_magneton,
    g_from_line,
    mean_values,
    quadrupole_from_multiplet,
    quadrupole_from_r3,
    r3_from_quadrupole,
)
from .jahn_teller import (
    JTParams,
    elongation_ratio,
    g_anisotropy,
    mixing_angle_from_widths,
    principal_g_factors,
)
from .perturbation import (
    FirstOrderLine,
    anisotropy_energy,
    first_order_field,
    first_order_multiplet,
    hierarchy_check,
    multiplet_width,
)
from .sensitivity import (
    DetectionSetup,
    LatticeParams,
    ResonatorMode,
    concentration_ppb,
    count_from_ppb,
    load_modes,
    min_detectable_spins,
    min_detectable_spins_field_form,
)
from .spin_algebra import (
    FieldVector,
    SpinOperators,
    SpinSystem,
    basis_labels,
    build_hamiltonian,
    spin_operators,
    trace_check,
)
from .transitions import (
    EigenSystem,
    Lineshape,
    SpectrumMap,
    TransitionLine,
    TransitionStrength,
    aggregate_width,
    eigensystem,
    resonance_fields,
    spectrum_maps,
    transition_table,
)
from .units import (
    CODATA,
    EnergyUnit,
    EnergyValue,
    PhysicalConstants,
    convert_energy,
    gauss_to_tesla,
    inv_cm_to_joule,
    joule_to_inv_cm,
)

__all__ = [
    "CODATA",
    "DetectionSetup",
    "EigenSystem",
    "EnergyUnit",
    "EnergyValue",
    "ExtractionResult",
    "FieldVector",
    "FirstOrderLine",
    "JTParams",
    "LatticeParams",
    "Lineshape",
    "MultipletDataset",
    "MultipletEntry",
    "PhysicalConstants",
    "QuadrupoleContext",
    "ResonatorMode",
    "SpectrumMap",
    "SpinOperators",
    "SpinSystem",
    "TransitionLine",
    "TransitionStrength",
    "a_from_width",
    "aggregate_width",
    "anisotropy_energy",
    "basis_labels",
    "build_hamiltonian",
    "concentration_ppb",
    "convert_energy",
    "count_from_ppb",
    "eigensystem",
    "elongation_ratio",
    "extract_parameters",
    "first_order_field",
    "first_order_multiplet",
    "fit_bohr_magneton",
    "g_anisotropy",
    "g_from_line",
    "gauss_to_tesla",
    "hierarchy_check",
    "inv_cm_to_joule",
    "joule_to_inv_cm",
    "load_modes",
    "mean_values",
    "min_detectable_spins",
    "min_detectable_spins_field_form",
    "mixing_angle_from_widths",
    "multiplet_width",
    "principal_g_factors",
    "quadrupole_from_multiplet",
    "quadrupole_from_r3",
    "r3_from_quadrupole",
    "resonance_fields",
    "spectrum_maps",
    "spin_operators",
    "trace_check",
    "transition_table",
]
