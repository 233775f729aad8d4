"""Equilibrium solver, sampler, simulator and verifier for the n-player silent duel."""

from .equilibrium import (
    Equilibrium,
    GameParams,
    firing_pdf,
    score_cdf,
    score_pdf,
    solve_equilibrium,
    solve_miss_probability,
)
from .errors import DomainError, NumericError
from .sampling import (
    FiringStrategy,
    firing_cdf,
    firing_quantile,
    round_rng,
    sample_firing_distance,
)
from .tournament import (
    MISS,
    RoundOutcome,
    Score,
    SimStats,
    allocate_payoffs,
    hit,
    play_round,
    simulate,
    simulate_deviation,
)
from .verifier import (
    CheckReport,
    DeviationReport,
    best_response_report,
    deviation_payoff,
    quadrature,
    run_checks,
)

__all__ = [
    "CheckReport",
    "DeviationReport",
    "DomainError",
    "Equilibrium",
    "FiringStrategy",
    "GameParams",
    "MISS",
    "NumericError",
    "RoundOutcome",
    "Score",
    "SimStats",
    "allocate_payoffs",
    "best_response_report",
    "deviation_payoff",
    "firing_cdf",
    "firing_pdf",
    "firing_quantile",
    "hit",
    "play_round",
    "quadrature",
    "round_rng",
    "run_checks",
    "sample_firing_distance",
    "score_cdf",
    "score_pdf",
    "simulate",
    "simulate_deviation",
    "solve_equilibrium",
    "solve_miss_probability",
]
