"""Numerical certificates for a solved equilibrium.

The main certificate is the deviation payoff: a single player who fires at
a fixed distance y against n-1 equilibrium opponents earns

    (1 - y) * F(y)**(n-1) + c * y * p**(n-1),

which must equal v on [0, b] and fall below v beyond it.  The remaining
checks compare closed forms against independent routes: adaptive Simpson
quadrature, finite differences and the known constant-sum and
prize-competition formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import Equilibrium, firing_pdf, score_cdf, score_pdf
from .errors import DomainError, NumericError
from .sampling import FiringStrategy, closed_form_cdf, firing_cdf, firing_quantile

GRID_EPS = 1e-9
QUAD_MAX_DEPTH = 60

DEFAULT_TOLERANCES = {
    "root_residual": 1e-10,
    "payoff_power": 1e-12,
    "support_endpoint": 1e-12,
    "accounting_identity": 1e-10,
    "atom_at_zero": 1e-12,
    "score_cdf_at_b": 1e-10,
    "score_cdf_nondecreasing": 0.0,
    "score_cdf_strictly_increasing": 0.0,
    "score_pdf_finite_difference": 1e-5,
    "score_firing_relation": 1e-12,
    "firing_density_normalization": 1e-8,
    "firing_cdf_quadrature": 1e-8,
    "firing_cdf_at_b": 1e-10,
    "quantile_round_trip": 1e-9,
    "indifference_on_support": 1e-10,
    "dominance_off_support": 0.0,
    "constant_sum_constants": 1e-10,
    "constant_sum_cdf": 1e-12,
    "constant_sum_density": 1e-10,
    "classic_duel_density": 1e-10,
    "prize_cdf": 1e-12,
    "prize_score_density": 1e-10,
    "prize_firing_density": 1e-10,
}


def quadrature(f, a: float, b: float, tol: float = 1e-10, max_depth: int = QUAD_MAX_DEPTH) -> float:
    """Adaptive Simpson estimate of the integral of ``f`` over [a, b].

    Each panel is accepted once the two-half Simpson sum differs from the
    whole-panel sum by at most 15 times its share of ``tol``; the accepted
    value carries the Richardson correction.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    if a > b:
        raise DomainError("quadrature needs a <= b")
    if a == b:
        return 0.0

    def simpson(fa, fm, fb, h):
        return h / 6.0 * (fa + 4.0 * fm + fb)

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    stack = [(a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, 0)]
    total = 0.0
    while stack:
        lo, hi, flo, fmid, fhi, whole, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = simpson(flo, flm, fmid, mid - lo)
        right = simpson(fmid, frm, fhi, hi - mid)
        diff = left + right - whole
        if abs(diff) <= 15.0 * eps:
            total += left + right + diff / 15.0
        elif depth >= max_depth:
            raise NumericError(f"quadrature hit the subdivision limit near x={mid!r}")
        else:
            stack.append((mid, hi, fmid, frm, fhi, right, 0.5 * eps, depth + 1))
            stack.append((lo, mid, flo, flm, fmid, left, 0.5 * eps, depth + 1))
    return total


def deviation_payoff(eq: Equilibrium, y):
    """Expected payoff of one player firing at ``y`` against equilibrium opponents."""
    ya = np.asarray(y, dtype=float)
    if np.any(~np.isfinite(ya)) or np.any(ya < 0.0) or np.any(ya >= 1.0):
        raise DomainError("deviation distance must lie in [0, 1)")
    big_f = np.asarray(score_cdf(eq, ya))
    out = (1.0 - ya) * big_f ** (eq.n - 1) + eq.c * ya * eq.p ** (eq.n - 1)
    return float(out) if np.ndim(y) == 0 else out


@dataclass(frozen=True)
class DeviationReport:
    grid: np.ndarray
    payoff: np.ndarray
    v: float
    b: float
    max_gap_on_support: float
    max_excess: float

    def to_dict(self, include_grid: bool = False) -> dict:
        d = {
            "grid_size": int(self.grid.size),
            "v": self.v,
            "b": self.b,
            "max_gap_on_support": self.max_gap_on_support,
            "max_excess": self.max_excess,
        }
        if include_grid:
            d["grid"] = self.grid.tolist()
            d["payoff"] = self.payoff.tolist()
        return d


def best_response_report(eq: Equilibrium, grid_size: int = 10_000) -> DeviationReport:
    if grid_size < 2:
        raise DomainError("grid_size must be at least 2")
    grid = np.linspace(0.0, 1.0 - GRID_EPS, grid_size)
    payoff = deviation_payoff(eq, grid)
    gap = payoff - eq.v
    support = grid <= eq.b
    return DeviationReport(
        grid=grid,
        payoff=payoff,
        v=eq.v,
        b=eq.b,
        max_gap_on_support=float(np.max(np.abs(gap[support]))),
        max_excess=float(np.max(gap)),
    )


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float
    passed: bool


@dataclass
class CheckReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def names(self) -> list[str]:
        return [c.name for c in self.checks]

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {"name": c.name, "residual": c.residual, "tolerance": c.tolerance, "passed": c.passed}
                for c in self.checks
            ],
        }


def _max_rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.abs(b)))


def _max_abs(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def density_table_residuals(eq: Equilibrium, y, big_f, f, g, big_g) -> dict[str, float]:
    """Largest absolute differences between a tabulated density table and fresh evaluations."""
    y = np.asarray(y, dtype=float)
    strategy = FiringStrategy(eq)
    return {
        "F": _max_abs(big_f, score_cdf(eq, y)),
        "f": _max_abs(f, score_pdf(eq, y)),
        "g": _max_abs(g, firing_pdf(eq, y)),
        "G": _max_abs(big_g, firing_cdf(strategy, y)),
    }


def _is_constant_sum(eq: Equilibrium) -> bool:
    return abs(eq.c - 1.0 / eq.n) <= 4 * np.finfo(float).eps


def run_checks(eq: Equilibrium, tolerances: dict[str, float] | None = None) -> CheckReport:
    """Evaluate every equilibrium identity; failures are reported, never raised."""
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        unknown = set(tolerances) - set(tol)
        if unknown:
            raise DomainError(f"unknown check names: {sorted(unknown)}")
        tol.update(tolerances)

    n, c, p, v, b = eq.n, eq.c, eq.p, eq.v, eq.b
    strategy = FiringStrategy(eq)
    report = CheckReport()

    def add(name, residual, strict=False):
        residual = float(residual)
        ok = residual < tol[name] if strict else residual <= tol[name]
        report.checks.append(Check(name, residual, tol[name], bool(ok and math.isfinite(residual))))

    z = 1.0 / p
    add("root_residual", abs(z**n - n * z - (1.0 - n * c)))
    add("payoff_power", abs(v - p ** (n - 1)))
    add("support_endpoint", abs(b - (1.0 - v) / (1.0 - c * v)))
    add("accounting_identity", abs(n * v - (1.0 - p**n) - n * c * p**n))
    add("atom_at_zero", abs(score_cdf(eq, 0.0) - p))
    add("score_cdf_at_b", abs(score_cdf(eq, b) - 1.0))

    whole = np.linspace(-1.0, 1.0, 4001)
    add("score_cdf_nondecreasing", max(0.0, -np.min(np.diff(score_cdf(eq, whole)))))
    support = np.linspace(0.0, b, 1001)
    add("score_cdf_strictly_increasing", np.count_nonzero(np.diff(score_cdf(eq, support)) <= 0))

    h = 1e-6
    ys = np.linspace(0.01 * b, 0.99 * b, 199)
    fd = (np.asarray(score_cdf(eq, ys + h)) - np.asarray(score_cdf(eq, ys - h))) / (2 * h)
    add("score_pdf_finite_difference", _max_rel(fd, score_pdf(eq, ys)))
    add("score_firing_relation",
        _max_abs(score_pdf(eq, support), (1.0 - support) * np.asarray(firing_pdf(eq, support))))

    g = lambda x: firing_pdf(eq, x)  # noqa: E731
    add("firing_density_normalization", abs(quadrature(g, 0.0, b, 1e-12) - 1.0))

    xs = np.linspace(0.0, b, 100)
    acc, worst = 0.0, 0.0
    for lo, hi in zip(xs[:-1], xs[1:]):
        acc += quadrature(g, lo, hi, 1e-13)
        worst = max(worst, abs(closed_form_cdf(eq, hi) - acc))
    add("firing_cdf_quadrature", worst)
    add("firing_cdf_at_b", abs(closed_form_cdf(eq, b) - 1.0))

    qs = np.linspace(0.0, 1.0, 102)[1:-1]
    add("quantile_round_trip", _max_abs(firing_cdf(strategy, firing_quantile(strategy, qs)), qs))

    add("indifference_on_support", _max_abs(deviation_payoff(eq, support), v))
    beyond = np.linspace(b + 0.01, 0.99, 200)
    if b + 0.01 <= 0.99:
        add("dominance_off_support", np.max(deviation_payoff(eq, beyond) - v), strict=True)

    if _is_constant_sum(eq):
        add("constant_sum_constants",
            max(abs(p - n ** (-1.0 / (n - 1))), abs(v - 1.0 / n), abs(b - n / (n + 1.0))))
        add("constant_sum_cdf",
            _max_abs(score_cdf(eq, support), ((n - support) / (n**2 * (1.0 - support))) ** (1.0 / (n - 1))))
        xg = support
        expected_g = (n**2 * (1.0 - xg) ** (2 * n - 1) * (n - xg) ** (n - 2)) ** (-1.0 / (n - 1))
        add("constant_sum_density", _max_rel(firing_pdf(eq, xg), expected_g))
        if n == 2:
            add("classic_duel_density", _max_rel(firing_pdf(eq, xg), 1.0 / (4.0 * (1.0 - xg) ** 3)))

    if c == 0.0:
        add("prize_cdf", _max_abs(score_cdf(eq, support), p / (1.0 - support) ** (1.0 / (n - 1))))
        add("prize_score_density",
            _max_rel(score_pdf(eq, support), p / (n - 1) * (1.0 / (1.0 - support)) ** (n / (n - 1))))
        add("prize_firing_density",
            _max_rel(firing_pdf(eq, support),
                     p / (n - 1) * (1.0 / (1.0 - support)) ** ((2 * n - 1) / (n - 1))))
    return report
