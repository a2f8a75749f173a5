"""kcolorlab: a desk-scale laboratory for coloring-count moment analysis.

The package evaluates the entropy/energy objective on overlap matrices,
certifies its barycenter maximality numerically, tabulates the closed-form
degree thresholds, samples plain and planted random graphs, enumerates
colorings and clusters exactly, peels cores, and computes exact and
Monte-Carlo moments of the coloring count.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import BudgetError, DomainError
from .overlap import (
    ConstantsProfile,
    ModelParams,
    OverlapMatrix,
    RegionReport,
    classify_region,
    energy_E,
    entropy_H,
    entropy_h,
    f_gradient,
    f_value,
    permute,
    special_matrix,
)
from .thresholds import (
    ThresholdTable,
    chromatic_window,
    chromatic_window_detail,
    density_S,
    thresholds,
    window_bounds,
)
from .variational import (
    AscentConfig,
    AscentResult,
    CertificationReport,
    HessianReport,
    XiProfile,
    ascend_region,
    average_rows,
    certify_barycenter_max,
    delta_star,
    hessian_at_barycenter,
    variation_sign,
    xi_profile,
)
from .graphs import (
    ClusterSet,
    Coloring,
    Graph,
    cluster,
    coloring_separable,
    count_colorings,
    enumerate_colorings,
    forbidden_count,
    is_good,
    overlap,
    planted_p_probability,
    random_balanced,
    sample_graph,
    validate_coloring,
)
from .corepeel import (
    CoreResult,
    CrSets,
    VertexCensus,
    check_property,
    cluster_bound,
    core,
    cr_sets,
    vertex_census,
)
from .moments import (
    McReport,
    MomentReport,
    PartitionLabel,
    chernoff_tail,
    exact_moment,
    exact_overlap_moment,
    laplace_partition,
    logscale_gap,
    mc_colorable,
    paley_zygmund,
    realizable_overlaps,
    round_to_birkhoff,
)

__all__ = [
    "__version__",
    "BudgetError",
    "DomainError",
    "ConstantsProfile",
    "ModelParams",
    "OverlapMatrix",
    "RegionReport",
    "classify_region",
    "energy_E",
    "entropy_H",
    "entropy_h",
    "f_gradient",
    "f_value",
    "permute",
    "special_matrix",
    "ThresholdTable",
    "chromatic_window",
    "chromatic_window_detail",
    "density_S",
    "thresholds",
    "window_bounds",
    "AscentConfig",
    "AscentResult",
    "CertificationReport",
    "HessianReport",
    "XiProfile",
    "ascend_region",
    "average_rows",
    "certify_barycenter_max",
    "delta_star",
    "hessian_at_barycenter",
    "variation_sign",
    "xi_profile",
    "ClusterSet",
    "Coloring",
    "Graph",
    "cluster",
    "coloring_separable",
    "count_colorings",
    "enumerate_colorings",
    "forbidden_count",
    "is_good",
    "overlap",
    "planted_p_probability",
    "random_balanced",
    "sample_graph",
    "validate_coloring",
    "CoreResult",
    "CrSets",
    "VertexCensus",
    "check_property",
    "cluster_bound",
    "core",
    "cr_sets",
    "vertex_census",
    "McReport",
    "MomentReport",
    "PartitionLabel",
    "chernoff_tail",
    "exact_moment",
    "exact_overlap_moment",
    "laplace_partition",
    "logscale_gap",
    "mc_colorable",
    "paley_zygmund",
    "realizable_overlaps",
    "round_to_birkhoff",
]
