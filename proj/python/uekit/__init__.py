"""Uncertainty scores and evaluation for LLM generations."""

from ._uekit import (  # noqa: F401
    SENTINEL,
    Error,
    MetricError,
    ParseError,
    ValidationError,
    are,
    auroc,
    cluster_size_entropy,
    degmat,
    degmat_c,
    eccentricity,
    eccentricity_c,
    inside_eigenscore,
    kle,
    prr,
    recall_at,
    rejection_curve,
    run_cli,
    sum_eigv,
    threshold_at_recall,
    typo,
)

__version__ = "0.1.0"
