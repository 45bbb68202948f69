"""Truncated Hardy-space operators: Toeplitz and weighted composition
matrices, intertwining checks and extended-eigenvalue scans."""

from ._core import (  # noqa: F401
    MathError,
    PowerSeries,
    Symbol,
    cardioid_membership,
    compose,
    deddens,
    disc_samples,
    ee_membership,
    ee_predicate_z2z,
    eigenvector_for_value,
    evaluate,
    finite_dim_partner,
    image_contained,
    intertwine_residual,
    kernel_eigen_residual,
    kernel_vector,
    multiply,
    operator_norm,
    recover_weighted_comp,
    reversion,
    run_cli,
    series_sqrt,
    subordination_solve,
    to_series,
    toeplitz_matrix,
    valence,
    weighted_composition_matrix,
)

__version__ = "0.1.0"
