"""Cover groupoids G_N, their closures, the limit groupoid G and twisted convolution algebras.

Topology is exact (rational intervals); algebra is floating point on finite
chamber blocks.
"""

from .cocycles import (
    CocycleData,
    CoboundaryGenerator,
    LimitCocycle,
    coboundary_from,
    is_coboundary,
    limit_eval,
    pullback,
    random_coboundary,
    trivial,
    verify_cocycle,
)
from .convolution import (
    AlgebraElement,
    convolve,
    i_norm,
    ind_point_mass,
    involution,
    matrix_unit,
    random_element,
    reduced_norm,
    unit_section,
)
from .covers import (
    Chamber,
    CoverSequence,
    OmegaPoint,
    builtin,
    chambers,
    example_A,
    example_B,
    example_C,
    omega_size,
    stable_w_closure,
    tail_equivalent,
    truncate,
    uhf,
    validate,
    w_region,
)
from .embeddings import (
    CylinderElement,
    SupportWitness,
    can_separate,
    check_direct_limit,
    eval_cylinder,
    isometry_check,
    phi,
    reduced_norm_cylinder,
    support_witness,
    uhf_from_factors,
    uhf_inclusion,
)
from .finite_level import ArrowN, LevelView, compose, groupoid_report, in_GN, in_GN_check, level_view, project_nm
from .limit import (
    BasicSet,
    LimitArrow,
    basic_range,
    basic_range_is_open,
    compose_limit,
    factor_through_closure,
    in_closure_G_infinity,
    in_G,
    in_G_check_infinity,
    in_G_infinity,
    in_TR,
    in_Xn,
    in_Yn,
    parse_arrow,
    project,
    script_local_compactness_failure,
)
from .region import FiniteSpace, Interval, IntervalSpace, Region, Space

__version__ = "0.1.0"
