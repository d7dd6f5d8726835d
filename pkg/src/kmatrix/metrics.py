"""Accuracy metrics for sketch query outcomes.

An outcome pairs an estimate with its exact (oracle) frequency; truth is
always >= 1 because query edges are drawn from the stream itself.
"""

from typing import Iterable, NamedTuple


class QueryOutcome(NamedTuple):
    estimate: int
    truth: int


def relative_error(outcome: QueryOutcome) -> float:
    """estimate/truth - 1; non-negative for overestimating sketches."""
    est, truth = outcome
    if truth < 1:
        raise ValueError(f"truth must be >= 1, got {truth}")
    return est / truth - 1.0


def average_relative_error(outcomes: Iterable[QueryOutcome]) -> float:
    outcomes = list(outcomes)
    if not outcomes:
        raise ValueError("cannot average over zero outcomes")
    return sum(relative_error(o) for o in outcomes) / len(outcomes)


def effective_queries(outcomes: Iterable[QueryOutcome], g0: int) -> int:
    """Count of outcomes with absolute error <= g0."""
    return sum(1 for o in outcomes if abs(o.estimate - o.truth) <= g0)


def percentage_effective(outcomes: Iterable[QueryOutcome], g0: int) -> float:
    outcomes = list(outcomes)
    if not outcomes:
        raise ValueError("cannot take a percentage of zero outcomes")
    return effective_queries(outcomes, g0) / len(outcomes) * 100.0
