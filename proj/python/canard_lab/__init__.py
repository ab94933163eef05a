"""Slow divergence integrals, slow relations and canard transport for Lienard systems."""

from ._core import (
    BracketError,
    Branch,
    CanardError,
    Interval,
    LienardSystem,
    NumericError,
    ParseError,
    RangeError,
    SdiEvaluator,
    SingularityError,
    SlowRelation,
    StiffnessError,
    ValidationError,
    buffer_point,
    control_lambda,
    exit_measure,
    invariant_measures,
    iterate_orbit,
    run_cli,
)

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "Branch",
    "CanardError",
    "Interval",
    "LienardSystem",
    "NumericError",
    "ParseError",
    "RangeError",
    "SdiEvaluator",
    "SingularityError",
    "SlowRelation",
    "StiffnessError",
    "ValidationError",
    "buffer_point",
    "control_lambda",
    "exit_measure",
    "invariant_measures",
    "iterate_orbit",
    "run_cli",
]
