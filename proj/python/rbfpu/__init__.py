"""Partition-of-unity RBF interpolation with LOOCV-optimized ellipsoidal patches."""

from ._core import (
    CoverageError,
    CoveringError,
    NotNumericallyPD,
    NumericalError,
    ParseError,
    Patch,
    PUModel,
    UsageError,
    ValidationError,
    bench_row,
    brute_force_loocv,
    eval_grid,
    fit_classic,
    fit_loocv,
    gen_tracks,
    kernel_matrix,
    mae,
    nelder_mead,
    phi,
    rippa_loocv,
    rmse,
    sample,
)

__version__ = "0.1.0"
