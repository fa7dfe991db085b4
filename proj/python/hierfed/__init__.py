"""Hierarchical private gradient aggregation."""

from ._core import (
    MERSENNE31,
    MERSENNE61,
    AuditError,
    BudgetExceeded,
    ConfigError,
    CostError,
    FieldError,
    NumericError,
    Topology,
    TopologyError,
    audit,
    is_prime,
    predict_costs,
    run_cli,
    run_round,
    sweep,
    train,
)

__all__ = [
    "MERSENNE31",
    "MERSENNE61",
    "AuditError",
    "BudgetExceeded",
    "ConfigError",
    "CostError",
    "FieldError",
    "NumericError",
    "Topology",
    "TopologyError",
    "audit",
    "is_prime",
    "predict_costs",
    "run_cli",
    "run_round",
    "sweep",
    "train",
]
