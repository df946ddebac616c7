"""Finite quasi-metric measure spaces: distances, optimal transport and curvature-dimension checks."""

from ._qms import (
    ComputationError,
    DomainError,
    Error,
    EuclideanBox,
    FunkBall,
    MeasuredSpace,
    ParseError,
    QuasiMetricSpace,
    RandersBall,
    RandersTorus,
    StructureError,
    beta,
    cd_check,
    diameter,
    functional_inequality_suite,
    funk_distance,
    gaussian_line,
    gh_bracket,
    ghp_upper,
    hausdorff,
    iso_defect,
    prokhorov,
    randers_torus_distance,
    reversibility,
    sample,
    symmetrize,
    validate,
    wasserstein,
)

__all__ = [name for name in dir() if not name.startswith("_")]
