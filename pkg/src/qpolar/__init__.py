"""Polarization of two-mode quantum states of light on a truncated Fock space."""

from .errors import (
    BasisMismatchError,
    CutoffExceededError,
    InconsistentStrategyError,
    InvalidStateError,
    MultiBlockError,
    NumericalError,
    QPolarError,
    SingularDecompositionError,
    UndefinedPolarizationError,
    ValidationError,
)
from .fock import (
    DensityMatrix,
    OperatorMatrix,
    PureState,
    TwoModeBasis,
    expectation,
    ladder_operators,
    stokes_operators,
    validate,
)
from .majorana import (
    Constellation,
    FidelitySearch,
    MaxFidelity,
    constellation_to_state,
    max_fidelity_su2,
    state_to_constellation,
)
from .polarization import (
    ClassificationReport,
    DecompositionResult,
    StokesVector,
    TableRow,
    classify_perfect,
    counterexample_analysis,
    decompose,
    degree_of_polarization,
    ensemble_from_sigma,
    p_from_subspaces,
    per_subspace,
    perfect_mixed_state,
    pure_decomposition_feasibility,
    stokes_vector,
)
from .su2 import (
    PolarizedPureSpec,
    Rotation,
    apply_rotation,
    glauber_spec,
    polarized_pure_state,
    rotation_fock_exp,
    rotation_fock_gauss,
    su2_coherent,
)
from .tolerance import Tolerances, tolerances

__all__ = [
    "BasisMismatchError",
    "ClassificationReport",
    "Constellation",
    "CutoffExceededError",
    "DecompositionResult",
    "DensityMatrix",
    "FidelitySearch",
    "InconsistentStrategyError",
    "InvalidStateError",
    "MaxFidelity",
    "MultiBlockError",
    "NumericalError",
    "OperatorMatrix",
    "PolarizedPureSpec",
    "PureState",
    "QPolarError",
    "Rotation",
    "SingularDecompositionError",
    "StokesVector",
    "TableRow",
    "TwoModeBasis",
    "Tolerances",
    "UndefinedPolarizationError",
    "ValidationError",
    "apply_rotation",
    "classify_perfect",
    "constellation_to_state",
    "counterexample_analysis",
    "decompose",
    "degree_of_polarization",
    "ensemble_from_sigma",
    "expectation",
    "glauber_spec",
    "ladder_operators",
    "max_fidelity_su2",
    "p_from_subspaces",
    "per_subspace",
    "perfect_mixed_state",
    "polarized_pure_state",
    "pure_decomposition_feasibility",
    "rotation_fock_exp",
    "rotation_fock_gauss",
    "state_to_constellation",
    "stokes_operators",
    "stokes_vector",
    "su2_coherent",
    "tolerances",
    "validate",
]
