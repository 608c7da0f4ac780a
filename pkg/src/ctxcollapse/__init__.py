"""Collapse rules, functional calculus and event equivalence for finite-dimensional observables."""

from .calculus import (
    PreimagePartition,
    SpectrumFunction,
    apply_function,
    is_coarse_graining,
    preimage_of_set,
    preimage_partition,
)
from .collapse import (
    MeasurementEvent,
    UpdateMap,
    apply_update,
    born_probability,
    contextual_collapse,
    contextual_subjective_collapse,
    loss_of_outcome,
    lueders_block_collapse,
    standard_collapse,
    subjective_collapse,
    to_update_map,
)
from .config import DEFAULT_TOL, Tolerances
from .equivalence import (
    EquivalenceVerdict,
    InconsistencyReport,
    bases_commute,
    check_post_processing,
    contextual_event_equal_implies_same_projector,
    events_equivalent_projector,
    exhibit_ttt_inconsistency,
)
from .errors import (
    BasisMismatch,
    CollapseError,
    DomainMismatch,
    InvalidRelation,
    NonHermitianInput,
    NotCoarseGraining,
    NumericalFailure,
    SearchSpaceTooLarge,
    UnknownSpectralPoint,
)
from .operators import (
    DensityState,
    HermitianOperator,
    MeasurementBasis,
    Projector,
    SpectralDecomposition,
    canonical_basis,
    eigendecompose,
    random_basis,
    relabel_basis,
    spectral_projector,
)
from .valuation import ObservableFamily, Valuation, search_valuation

__all__ = [name for name in dir() if not name.startswith("_")]
