"""Toy stochastic models for publication and citation counts.

Probability generating functions are expanded as truncated power series to
get exact pmfs, and the same models can be simulated event by event from a
seeded counter-based generator.
"""
from .errors import (
    CitetoyError,
    DomainError,
    FitError,
    InsufficientDataError,
    NumericalError,
    ParameterError,
)
from .models import (
    Atoms,
    AuthorModelParams,
    BetaLike,
    CitationParams,
    DiscreteStableParams,
    EliteModelParams,
    FieldModelParams,
    GeometricParams,
    NormalizerParams,
    TruncatedGeometricParams,
    model_from_dict,
    model_to_dict,
    pgf_eval,
    pgf_series,
    pmf,
)
from .sampler import RngState, simulate
from .series import PowerSeries

__version__ = "0.1.0"

__all__ = [
    "Atoms",
    "AuthorModelParams",
    "BetaLike",
    "CitationParams",
    "CitetoyError",
    "DiscreteStableParams",
    "DomainError",
    "EliteModelParams",
    "FieldModelParams",
    "FitError",
    "GeometricParams",
    "InsufficientDataError",
    "NormalizerParams",
    "NumericalError",
    "ParameterError",
    "PowerSeries",
    "RngState",
    "TruncatedGeometricParams",
    "__version__",
    "model_from_dict",
    "model_to_dict",
    "pgf_eval",
    "pgf_series",
    "pmf",
    "simulate",
]
