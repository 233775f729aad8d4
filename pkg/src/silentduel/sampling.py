"""Equilibrium firing-distance distribution G, its inverse, and seeded sampling.

Write u = (1 - c*x) / (1 - x) and w = u**(1/(n-1)).  The score CDF on [0, b]
is p*w, and integrating the firing density gives

    G = p/(1-c) * ((w**n - 1)/n - c*(w - 1)),

which runs from 0 at x = 0 (w = 1) to 1 at x = b (w = 1/p).  Both the CDF and
the quantile are evaluated through t = w - 1 with expm1/log1p so that small
distances keep full relative precision.

Random streams are Philox counter blocks keyed by the 64-bit seed.  Round r
of an n-player simulation owns blocks [r*k, (r+1)*k) with k = ceil(2n/4);
each block yields four doubles, so a round's draws never depend on how the
rounds were split into chunks or workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .equilibrium import Equilibrium, firing_pdf
from .errors import DomainError, NumericError

SEED_LIMIT = 2**64
_QUANTILE_MAX_ITER = 200


@dataclass(frozen=True)
class FiringStrategy:
    """The symmetric equilibrium mixed strategy over firing distances."""

    eq: Equilibrium

    def cdf(self, x):
        return firing_cdf(self, x)

    def pdf(self, x):
        return firing_pdf(self.eq, x)

    def quantile(self, q):
        return firing_quantile(self, q)

    def sample(self, rng, size=None):
        return sample_firing_distance(self, rng, size)


def _result(out, like):
    return float(out) if np.ndim(like) == 0 else out


def closed_form_cdf(eq: Equilibrium, x):
    """The antiderivative of the firing density without clamping at b; x < 1."""
    n, c, p = eq.n, eq.c, eq.p
    x = np.asarray(x, dtype=float)
    log_u = np.log1p((1.0 - c) * x / (1.0 - x))
    return p / (1.0 - c) * (
        np.expm1(n / (n - 1) * log_u) / n - c * np.expm1(log_u / (n - 1))
    )


def firing_cdf(strategy: FiringStrategy, x):
    """G(x) for x in [0, 1]; exactly 1 from b upward."""
    eq = strategy.eq
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)) or np.any(xa < 0.0) or np.any(xa > 1.0):
        raise DomainError("firing_cdf is defined for x in [0, 1]")
    inside = xa < eq.b
    big_g = closed_form_cdf(eq, np.where(inside, xa, 0.0))
    return _result(np.where(inside, big_g, 1.0), x)


def _solve_t(eq: Equilibrium, q: np.ndarray) -> np.ndarray:
    """Solve (w**n - 1)/n - c*(w - 1) = q*(1-c)/p for t = w - 1 in [0, 1/p - 1]."""
    n, c, p = eq.n, eq.c, eq.p
    target = q * (1.0 - c) / p
    lo = np.zeros_like(q)
    hi = np.full_like(q, 1.0 / p - 1.0)
    # The residual is increasing and convex in t, so Newton from the upper
    # end decreases monotonically onto the root; bisection is only a guard.
    # Converged entries are frozen so each result is independent of batching.
    t = hi.copy()
    active = np.ones(q.shape, dtype=bool)
    for _ in range(_QUANTILE_MAX_ITER):
        log_w = np.log1p(t)
        phi = np.expm1(n * log_w) / n - c * t - target
        lo = np.where(phi < 0, t, lo)
        hi = np.where(phi > 0, t, hi)
        dphi = np.exp((n - 1) * log_w) - c
        step = t - phi / dphi
        bad = ~((step >= lo) & (step <= hi))
        step = np.where(bad, 0.5 * (lo + hi), step)
        done = np.abs(step - t) <= 4 * np.finfo(float).eps * (1.0 + t)
        t = np.where(active, step, t)
        active &= ~done
        if not active.any():
            return t
    raise NumericError("firing quantile did not converge")


def firing_quantile(strategy: FiringStrategy, q):
    """Distance x in [0, b] with G(x) = q; vectorized over ``q``."""
    eq = strategy.eq
    qa = np.asarray(q, dtype=float)
    if np.any(~np.isfinite(qa)) or np.any(qa < 0.0) or np.any(qa > 1.0):
        raise DomainError("firing_quantile is defined for q in [0, 1]")
    flat = qa.reshape(-1)
    t = _solve_t(eq, flat)
    u_minus_1 = np.expm1((eq.n - 1) * np.log1p(t))
    x = u_minus_1 / (u_minus_1 + (1.0 - eq.c))
    x = np.minimum(x, eq.b)
    x = np.where(flat == 0.0, 0.0, np.where(flat == 1.0, eq.b, x))
    return _result(x.reshape(qa.shape), q)


def sample_firing_distance(strategy: FiringStrategy, rng: np.random.Generator, size=None):
    """Inverse-transform draw(s) of the equilibrium firing distance."""
    return firing_quantile(strategy, rng.random(size))


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise DomainError(f"seed must be an integer, got {seed!r}")
    if not 0 <= seed < SEED_LIMIT:
        raise DomainError("seed must be a 64-bit unsigned integer")
    return int(seed)


def blocks_per_round(n: int) -> int:
    return -(-2 * n // 4)


def round_rng(seed: int, round_index: int, n: int) -> np.random.Generator:
    """Generator positioned at the first draw of ``round_index`` for an n-player game."""
    seed = check_seed(seed)
    counter = round_index * blocks_per_round(n)
    return np.random.Generator(np.random.Philox(key=seed, counter=counter))


def round_uniforms(seed: int, first_round: int, rounds: int, n: int) -> np.ndarray:
    """Uniforms for a run of consecutive rounds, shape (rounds, 2n).

    Column 2i is player i's distance draw and column 2i+1 the hit draw.
    """
    width = 4 * blocks_per_round(n)
    rng = round_rng(seed, first_round, n)
    return rng.random((rounds, width))[:, : 2 * n]
