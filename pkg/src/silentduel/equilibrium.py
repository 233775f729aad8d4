"""Symmetric equilibrium of the n-player silent duel with consolation prize c.

A player who fires at distance x (measured as the probability of missing)
scores x on a hit and -1 on a miss.  At the symmetric equilibrium every
player misses with total probability p, earns v = p**(n-1), and the score
distribution is continuous on [0, b] with an atom of size p at -1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError

DEFAULT_TOL = 1e-12
MAX_ITER = 200
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class GameParams:
    """A duel instance: ``n`` players, consolation prize ``c`` paid when all miss."""

    n: int
    c: float

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise DomainError(f"n must be an integer, got {self.n!r}")
        if self.n < 2:
            raise DomainError("n must be at least 2")
        if not math.isfinite(self.c) or not 0.0 <= self.c < 1.0:
            raise DomainError(f"c must satisfy 0 <= c < 1, got {self.c!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "c", float(self.c))


@dataclass(frozen=True)
class Equilibrium:
    params: GameParams
    p: float  # total miss probability, the atom at -1
    v: float  # equilibrium payoff
    b: float  # upper end of the continuous score support

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def c(self) -> float:
        return self.params.c

    @property
    def z(self) -> float:
        return 1.0 / self.p

    @property
    def residual(self) -> float:
        """Absolute residual of z**n - n*z - (1 - n*c) at z = 1/p."""
        return abs(_poly(self.z, self.n, self.c))


def _poly(z, n, c):
    return z**n - n * z - (1.0 - n * c)


def solve_miss_probability(params: GameParams, tol: float = DEFAULT_TOL,
                           max_iter: int = MAX_ITER) -> float:
    """Return p, where z = 1/p is the root in (1, inf) of z**n = 1 - n*c + n*z.

    Uses Newton's method safeguarded by a bracket: any step that leaves the
    bracket is replaced by bisection.  Iterates until the step is at machine
    precision, then requires ``|z**n - n*z - (1 - n*c)| <= tol * max(1, z**n)``.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    n, c = params.n, params.c

    # h(1) = n*(c - 1) < 0 and h is increasing on (1, inf).
    lo, hi = 1.0, 2.0
    while _poly(hi, n, c) <= 0:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise NumericError("could not bracket the root")

    z = hi
    for _ in range(max_iter):
        zn1 = z ** (n - 1)
        h = zn1 * z - n * z - (1.0 - n * c)
        if h > 0:
            hi = z
        elif h < 0:
            lo = z
        dh = n * (zn1 - 1.0)
        step = z - h / dh if dh > 0 else math.nan
        if not lo <= step <= hi:
            step = 0.5 * (lo + hi)
        if abs(step - z) <= 4 * _EPS * z or h == 0:
            if abs(_poly(step, n, c)) <= tol * max(1.0, step**n):
                return 1.0 / step
            break
        z = step
    raise NumericError(
        f"root of z**{n} - {n}z - (1 - {n}*{c!r}) did not converge in {max_iter} iterations"
    )


def solve_equilibrium(params: GameParams, tol: float = DEFAULT_TOL) -> Equilibrium:
    p = solve_miss_probability(params, tol)
    v = p ** (params.n - 1)
    b = (1.0 - v) / (1.0 - params.c * v)
    return Equilibrium(params=params, p=p, v=v, b=b)


def _scalar_or_array(result, like):
    if np.ndim(like) == 0:
        return float(result)
    return result


def _u(eq: Equilibrium, y):
    # (1 - c*y) / (1 - y); callers keep y < 1.
    return (1.0 - eq.c * y) / (1.0 - y)


def score_cdf(eq: Equilibrium, y):
    """Distribution function F of the score at ``y`` in [-1, 1].

    F equals p on [-1, 0) (the miss atom sits at -1), follows
    ``p * ((1 - c*y) / (1 - y)) ** (1/(n-1))`` on [0, b] and is 1 above b.
    Accepts scalars or arrays.
    """
    ya = np.asarray(y, dtype=float)
    if np.any(~np.isfinite(ya)) or np.any(ya < -1.0) or np.any(ya > 1.0):
        raise DomainError("score_cdf is defined for y in [-1, 1]")
    on_support = (ya >= 0.0) & (ya <= eq.b)
    ys = np.where(on_support, ya, 0.0)
    inner = eq.p * _u(eq, ys) ** (1.0 / (eq.n - 1))
    out = np.where(ya < 0.0, eq.p, np.where(on_support, inner, 1.0))
    return _scalar_or_array(out, y)


def score_pdf(eq: Equilibrium, y):
    """Density f = dF/dy of the continuous part of the score; 0 off [0, b]."""
    ya = np.asarray(y, dtype=float)
    on_support = (ya >= 0.0) & (ya <= eq.b)
    ys = np.where(on_support, ya, 0.0)
    big_f = eq.p * _u(eq, ys) ** (1.0 / (eq.n - 1))
    dens = big_f * (1.0 - eq.c) / ((eq.n - 1) * (1.0 - eq.c * ys) * (1.0 - ys))
    return _scalar_or_array(np.where(on_support, dens, 0.0), y)


def firing_pdf(eq: Equilibrium, x):
    """Density g of the equilibrium firing distance, g(x) = f(x) / (1 - x)."""
    xa = np.asarray(x, dtype=float)
    on_support = (xa >= 0.0) & (xa <= eq.b)
    xs = np.where(on_support, xa, 0.0)
    dens = np.asarray(score_pdf(eq, xs)) / (1.0 - xs)
    return _scalar_or_array(np.where(on_support, dens, 0.0), x)
