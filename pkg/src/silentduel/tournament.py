"""Monte Carlo play of the n-player duel under the equilibrium strategy."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError
from .sampling import (
    FiringStrategy,
    check_seed,
    firing_quantile,
    round_uniforms,
    sample_firing_distance,
)

CHUNK_SIZE = 1 << 16


@dataclass(frozen=True, order=True)
class Score:
    """Outcome of one shot.  Any hit outranks a miss; longer hits outrank shorter."""

    hit: bool
    distance: float = -1.0

    def __post_init__(self):
        if self.hit and not 0.0 <= self.distance < 1.0:
            raise DomainError(f"hit distance must lie in [0, 1), got {self.distance!r}")
        if not self.hit and self.distance != -1.0:
            raise DomainError("a miss carries the sentinel score -1")

    @property
    def value(self) -> float:
        return self.distance


MISS = Score(False)


def hit(y: float) -> Score:
    return Score(True, float(y))


@dataclass(frozen=True)
class RoundOutcome:
    distances: tuple[float, ...]
    hits: tuple[bool, ...]
    payoffs: tuple[float, ...]

    @property
    def scores(self) -> tuple[Score, ...]:
        return tuple(hit(x) if h else MISS for x, h in zip(self.distances, self.hits))


@dataclass(frozen=True)
class SimStats:
    n: int
    c: float
    rounds: int
    seed: int
    mean_payoff: tuple[float, ...]
    std_error: tuple[float, ...]
    all_miss_freq: float
    deviation_distance: float | None = None
    # True when rounds == 1 and the standard errors are the placeholder 0.
    degenerate: bool = field(default=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mean_payoff"] = list(self.mean_payoff)
        d["std_error"] = list(self.std_error)
        return d


def allocate_payoffs(scores, c: float) -> list[float]:
    """Split the unit prize among the best hits, or pay everyone ``c`` if all miss."""
    scores = list(scores)
    if len(scores) < 2:
        raise DomainError("allocate_payoffs needs at least two scores")
    if not 0.0 <= c < 1.0:
        raise DomainError(f"c must satisfy 0 <= c < 1, got {c!r}")
    best = max(scores)
    if not best.hit:
        return [c] * len(scores)
    winners = [s == best for s in scores]
    share = 1.0 / sum(winners)
    return [share if w else 0.0 for w in winners]


def _allocate_rows(score: np.ndarray, c: float) -> np.ndarray:
    """Row-wise allocate_payoffs on a (rounds, n) array with -1 marking misses."""
    best = score.max(axis=1, keepdims=True)
    winners = score == best
    share = winners / winners.sum(axis=1, keepdims=True)
    return np.where(best >= 0.0, share, c)


def play_round(strategy: FiringStrategy, rng: np.random.Generator,
               deviation: float | None = None) -> RoundOutcome:
    """Play one round; player i draws a distance then a hit uniform, in index order.

    With ``deviation`` set, player 0 fires at that distance instead (its
    distance draw is still consumed so the stream layout is unchanged).
    """
    n = strategy.eq.n
    distances, hits = [], []
    for i in range(n):
        x = sample_firing_distance(strategy, rng)
        if i == 0 and deviation is not None:
            x = float(deviation)
        distances.append(x)
        hits.append(bool(rng.random() < 1.0 - x))
    scores = [hit(x) if h else MISS for x, h in zip(distances, hits)]
    payoffs = allocate_payoffs(scores, strategy.eq.c)
    return RoundOutcome(tuple(distances), tuple(hits), tuple(payoffs))


def _chunk_moments(strategy, seed, start, count, deviation):
    n, c = strategy.eq.n, strategy.eq.c
    u = round_uniforms(seed, start, count, n)
    x = firing_quantile(strategy, u[:, 0::2])
    if deviation is not None:
        x[:, 0] = deviation
    hits = u[:, 1::2] < 1.0 - x
    payoff = _allocate_rows(np.where(hits, x, -1.0), c)
    mean = payoff.mean(axis=0)
    m2 = ((payoff - mean) ** 2).sum(axis=0)
    all_miss = int((~hits.any(axis=1)).sum())
    return count, mean, m2, all_miss


def _run(strategy, rounds, seed, deviation, workers, chunk_size):
    if isinstance(rounds, bool) or not isinstance(rounds, (int, np.integer)) or rounds < 1:
        raise DomainError("rounds must be at least 1")
    if workers < 1:
        raise DomainError("workers must be at least 1")
    if chunk_size < 1:
        raise DomainError("chunk_size must be at least 1")
    seed = check_seed(seed)
    starts = range(0, rounds, chunk_size)

    def job(start):
        return _chunk_moments(strategy, seed, start, min(chunk_size, rounds - start), deviation)

    if workers == 1:
        parts = [job(s) for s in starts]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, starts))

    # Merge chunk moments in chunk order so the result ignores scheduling.
    total, mean, m2, all_miss = 0, None, None, 0
    for count, cmean, cm2, cmiss in parts:
        if mean is None:
            total, mean, m2 = count, cmean, cm2
        else:
            merged = total + count
            delta = cmean - mean
            mean = mean + delta * (count / merged)
            m2 = m2 + cm2 + delta**2 * (total * count / merged)
            total = merged
        all_miss += cmiss

    degenerate = rounds == 1
    if degenerate:
        se = np.zeros_like(mean)
    else:
        se = np.sqrt(m2 / (rounds - 1)) / math.sqrt(rounds)
    return SimStats(
        n=strategy.eq.n,
        c=strategy.eq.c,
        rounds=int(rounds),
        seed=seed,
        mean_payoff=tuple(float(m) for m in mean),
        std_error=tuple(float(s) for s in se),
        all_miss_freq=all_miss / rounds,
        deviation_distance=None if deviation is None else float(deviation),
        degenerate=degenerate,
    )


def simulate(strategy: FiringStrategy, rounds: int, seed: int = 0, *,
             workers: int = 1, chunk_size: int = CHUNK_SIZE) -> SimStats:
    """Per-player mean payoff and standard error over ``rounds`` equilibrium rounds.

    Round r always draws from the substream at ``round_rng(seed, r, n)``, and
    chunk results are merged in a fixed order, so the statistics are the
    same for any ``workers``.  ``chunk_size`` does change the floating-point
    summation order and is part of the reproducibility key.
    """
    return _run(strategy, rounds, seed, None, workers, chunk_size)


def simulate_deviation(strategy: FiringStrategy, y_dev: float, rounds: int, seed: int = 0, *,
                       workers: int = 1, chunk_size: int = CHUNK_SIZE) -> SimStats:
    """As :func:`simulate`, but player 0 always fires at ``y_dev``."""
    if not (math.isfinite(y_dev) and 0.0 <= y_dev < 1.0):
        raise DomainError(f"deviation distance must lie in [0, 1), got {y_dev!r}")
    return _run(strategy, rounds, seed, float(y_dev), workers, chunk_size)
