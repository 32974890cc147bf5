"""Eigenvalue topology and nonreciprocal scattering of dissipatively coupled
cavity pairs and rings.

Two cavity modes that share a strongly damped intermediary acquire, on top of
any direct coherent coupling G, a dissipative coupling J with a tunable phase
theta. The package computes the resulting complex spectra (periodic Riemann
sheets with odd/even exceptional points), the scattering parameters
(unidirectional, chiral and broadband-nonreciprocal transmission) and the
three-mode ring extension (a parity-dependent circulator), plus the figure
datasets and a CLI around them.
"""

from ._version import __version__
from .model import (
    CoefficientMatrix,
    EffectiveParams,
    FullParams,
    RingParams,
    ValidationError,
    build_effective_matrix,
    build_full_matrix,
    build_ring_matrix,
    coupling_coefficients,
    lift_to_full,
    reduce_full_to_effective,
    wrap_phase,
)
from .scattering import (
    ChiralitySample,
    NumericalError,
    PoleError,
    ProbeGrid,
    SMatrix,
    ThreeCavityAux,
    TransmissionCurve,
    UndefinedChiralityError,
    chirality,
    curve_area,
    fwhm,
    nonreciprocity_curve,
    ring_s_closed,
    s14_closed,
    s21_closed,
    s23_closed,
    s41_closed,
    s_general,
    s_general_grid,
)
from .spectra import (
    EpRecord,
    SheetGrid,
    Spectrum,
    classify_parity,
    eig2_closed,
    eig_numeric,
    eigengap,
    locate_eps,
    locate_ring_coalescence,
    locate_ring_defective,
    radicand,
    ring_eig_circulant,
    ring_eig_paper,
    sweep_riemann,
    track_branches,
)
from .sweeps import FIGURE_IDS, Dataset, SweepSpec, figure_dataset, run_sweep

__all__ = [
    "__version__",
    # model
    "CoefficientMatrix",
    "EffectiveParams",
    "FullParams",
    "RingParams",
    "ValidationError",
    "build_effective_matrix",
    "build_full_matrix",
    "build_ring_matrix",
    "coupling_coefficients",
    "lift_to_full",
    "reduce_full_to_effective",
    "wrap_phase",
    # spectra
    "EpRecord",
    "SheetGrid",
    "Spectrum",
    "classify_parity",
    "eig2_closed",
    "eig_numeric",
    "eigengap",
    "locate_eps",
    "locate_ring_coalescence",
    "locate_ring_defective",
    "radicand",
    "ring_eig_circulant",
    "ring_eig_paper",
    "sweep_riemann",
    "track_branches",
    # scattering
    "ChiralitySample",
    "NumericalError",
    "PoleError",
    "ProbeGrid",
    "SMatrix",
    "ThreeCavityAux",
    "TransmissionCurve",
    "UndefinedChiralityError",
    "chirality",
    "curve_area",
    "fwhm",
    "nonreciprocity_curve",
    "ring_s_closed",
    "s14_closed",
    "s21_closed",
    "s23_closed",
    "s41_closed",
    "s_general",
    "s_general_grid",
    # sweeps
    "FIGURE_IDS",
    "Dataset",
    "SweepSpec",
    "figure_dataset",
    "run_sweep",
]
