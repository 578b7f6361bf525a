"""Trace algebra, Farey navigation and BQ-condition classification for
type-preserving characters of the punctured torus."""
from ._version import __version__
from .algebra import (
    CharacterTriple,
    EigenvalueData,
    FanCoefficients,
    MatrixPair,
    fan_coefficients,
    matrix_lift,
    neighbor_recurrence,
    neighbor_trace,
    principal_eigenvalue,
    solve_third_trace,
    vieta_move,
)
from .bq import (
    Classification,
    Verdict,
    Witness,
    WitnessKind,
    bq_classify,
    classify_with_reduction,
    escaping_edge,
    fan_escape_index,
)
from .errors import (
    BowditchError,
    DegenerateEigenvalue,
    EllipticVertex,
    InvalidSlope,
    InvalidTriple,
    LayerOutOfRange,
    MagnitudeOverflow,
    SpecInvalid,
    ZeroCoefficient,
)
from .farey import FareyTriangle, Slope, matrix_word_trace_oracle, trace_at_slope, walk_flips
from .reduction import (
    ReductionOutcome,
    ReductionStatus,
    descend,
    lemma_bound_report,
    min_neighbor_search,
    reduce_trace,
    reduction_experiment,
)
from .scan import ScanResult, SliceSpec, render_ppm, scan_slice, write_csv

__all__ = [name for name in dir() if not name.startswith("_")]
