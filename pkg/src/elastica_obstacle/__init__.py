"""Closed-form elasticae and obstacle-constrained minimization of length-penalized bending energy."""

from .elliptic import (
    EllipticDomainError,
    complete_E,
    complete_K,
    incomplete_E,
    incomplete_F,
    jacobi_am,
    jacobi_cn,
    jacobi_dn,
    jacobi_sn,
)
from .moduli import Branch, Thresholds, invert_g, n_lambda, h_lambda, solve_thresholds
from .elastica_zoo import (
    ElasticaSpec,
    Family,
    ScfSpec,
    closed_form_energy,
    escaping_competitor,
    export,
    large_circle_competitor,
    leaf_segment_competitor,
    make_leaf,
    make_pinned_elastica,
    make_rect,
    make_scf,
    make_segment,
    sample,
    signed_curvature,
)
from .geometry import (
    DiscreteCurve,
    ObstacleMode,
    SampledLipschitz,
    SymmetricCone,
    constraint_slack,
    discrete_energy,
    energy_gradient,
    positions,
    vi_pairing,
)
from .solver import (
    CurveClass,
    SolverConfig,
    SolverReport,
    Verdict,
    drop_minimality_check,
    lambda_sweep,
    minimize,
    scf_stability_probe,
)

__version__ = "0.1.0"
