"""Circuit decoupling, hypergraph analysis and adversarial reconstruction of brain networks."""

from ._decgan import (
    DimensionError,
    DomainError,
    FormatError,
    NumericError,
    UsageError,
    ValidationError,
    __version__,
    auc,
    binary_metrics,
    circuit_recovery,
    cross_validate,
    decouple,
    generate_synthetic,
    laplacian,
    run_cli,
    spatial_similarity,
    spectral_similarity,
)

__all__ = [
    "DimensionError",
    "DomainError",
    "FormatError",
    "NumericError",
    "UsageError",
    "ValidationError",
    "__version__",
    "auc",
    "binary_metrics",
    "circuit_recovery",
    "cross_validate",
    "decouple",
    "generate_synthetic",
    "laplacian",
    "run_cli",
    "spatial_similarity",
    "spectral_similarity",
]
