"""coarselab: desk-scale computations in large scale geometry.

Finite windows of discrete metric spaces, uniformly bounded families and
star calculus, group actions with their quotient metrics, windowed
verification of coarse invariants, averaged partitions of unity, and
finite-propagation band operators.
"""

__version__ = "0.1.0"

from .lscore import (
    INF,
    TOL,
    Family,
    FiniteSpace,
    ScaleTower,
    UnionFind,
    ball_cover,
    co_membership_matrix,
    mesh,
    metric_axiom_violations,
    refines,
    star,
    tower_metrize,
    u_components,
)
from .spacegen import (
    BoxSpec,
    ConeSpec,
    QuotientLevel,
    axes_space,
    box_space,
    cone_space,
    cyclic_level,
    segment_space,
)
from .action import (
    GroupAction,
    GroupElement,
    axes_rotation_action,
    load_action,
    negation_action,
    orbit_family,
    orbit_metric,
    pair_family,
    quotient_pseudometric,
    translate_family,
    translation_action,
    word_length,
    xg_metric,
)
from .invariants import (
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    DisplacementProfile,
    IdentificationResult,
    WeakQuotientResult,
    WindowVerdict,
    coarsely_light_check,
    coarsely_light_growth,
    discontinuity_profile,
    identify_group_element,
    one_ended_check,
    separation_bound,
    weak_quotient_certificate,
)
from .propa import (
    FolnerSet,
    PartitionOfUnity,
    block_partition,
    exactness_witness_check,
    folner_average,
    folner_defect,
    hat_partition,
    variation,
)
from .roeops import (
    BandOperator,
    Decomposition,
    conjugate,
    decompose,
    homomorphism_check,
    propagation,
    translation_operator,
    uniqueness_defect,
)
