"""Gaps around rational points in fractional parts of radical sequences."""
from .closed_form import (
    ClosedFormValue,
    closed_form,
    gap_dilated,
    gap_dilated_at_zero,
    gap_dilated_case2,
    gap_higher,
    gap_sqrt,
    oracle_unreduced_gap,
)
from .core import (
    DomainError,
    GuardError,
    PeriodicClass,
    Rational,
    ResidueSet,
    absorb_period,
    farey_sequence,
    integer_root,
    parse_rational,
    reduce_fraction,
    residue_gap_around_zero,
)
from .engine import (
    GapMeasurement,
    ScaledApproximant,
    SequenceSpec,
    UnboundedGapError,
    background_scan,
    convergence_series,
    exact_gap_at,
    exact_gap_at_integer,
    gap_profile,
    min_N_estimate,
    scaled_gap,
)
from .orchard import (
    Linear,
    OrchardScene,
    Parabolic,
    SingularInterceptError,
    Tabulated,
    compare_to_closed_form,
    illumination_pattern,
    shadow_points,
)

__version__ = "0.1.0"
