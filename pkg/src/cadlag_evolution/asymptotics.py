"""Long-time behaviour: the Cauchy solution approaches the whole-line one.

For a strictly parabolic problem the gap ``|<V_t - Vinf_t, f>|`` between the
Cauchy solution (driven by the source restricted to t > 0) and the steady
solution is bounded by ``C_f exp(-kappa t)``, where ``C_f`` collects the
initial mass and the exponentially discounted source mass on ``s <= 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .evolution import EvolutionProblem, PairedTrajectory, check_mode, snapshot
from .measures import SpaceTimeMeasure, SpectralMeasure, TemporalProfile, TestFunctional, restrict_nonneg_time

__all__ = [
    "AsymptoticsReport",
    "FixedPointReport",
    "cauchy_problem",
    "convergence_gap",
    "c_phi",
    "verify_bound",
    "t_epsilon",
    "translation_sweep",
    "fixed_point_check",
    "BOUND_SLACK",
]

BOUND_SLACK = 1e-9
GAP_FLOOR = 1e-300


def cauchy_problem(prob: EvolutionProblem, initial: SpectralMeasure | None = None) -> EvolutionProblem:
    """Cauchy counterpart of ``prob``: source restricted to t > 0, V0 zero when absent."""
    check_mode(prob, "steady")
    v0 = initial if initial is not None else prob.initial
    if v0 is None:
        v0 = SpectralMeasure.empty(prob.dimension)
    src = restrict_nonneg_time(prob.source, closed=False)
    return EvolutionProblem(prob.symbol, src, v0, prob.time_homogeneous)


class _GapEvaluator:
    def __init__(self, prob: EvolutionProblem, f: TestFunctional):
        self.cauchy = PairedTrajectory(cauchy_problem(prob), "cauchy", f)
        self.steady = PairedTrajectory(prob, "steady", f)

    def __call__(self, t: float) -> float:
        if t < 0:
            raise DomainError("gap is defined for t >= 0")
        return abs(self.cauchy(t) - self.steady(t))


def convergence_gap(prob: EvolutionProblem, f: TestFunctional, t: float) -> float:
    """``|<cauchy(t) - steady(t), f>|``."""
    return _GapEvaluator(prob, f)(float(t))


def _weighted_abs(m: SpectralMeasure, f: TestFunctional) -> float:
    pts, w = m.flat()
    if pts.shape[0] == 0:
        return 0.0
    return float(np.sum(np.abs(f(pts)) * np.abs(w)))


def _discounted_past(p: TemporalProfile, kappa: float) -> float:
    """int_{s <= 0} exp(kappa s) d|mu|(s)."""
    total = 0.0
    past = p.atom_times <= 0
    total += float(np.sum(np.abs(p.atom_masses[past]) * np.exp(kappa * p.atom_times[past])))
    for a, b, r in zip(p.seg_starts, p.seg_ends, p.seg_rates):
        if a < 0:
            hi = min(b, 0.0)
            total += abs(r) * (math.exp(kappa * hi) - math.exp(kappa * a)) / kappa
    return total


def c_phi(prob: EvolutionProblem, f: TestFunctional) -> float:
    """Constant of the bound ``gap(t) <= C exp(-kappa t)``, with kappa = ``prob.kappa()``.

    Separable terms are bounded one at a time (triangle inequality), which
    can only enlarge the constant.
    """
    check_mode(prob, "steady")
    kappa = prob.kappa()
    total = 0.0 if prob.initial is None else _weighted_abs(prob.initial, f)
    for m, p in prob.source.terms:
        past = _discounted_past(p, kappa)
        if past > 0:
            total += _weighted_abs(m, f) * past
    if prob.time_homogeneous is not None:
        total += _weighted_abs(prob.time_homogeneous, f) / kappa
    return total


@dataclass(frozen=True, eq=False)
class AsymptoticsReport:
    times: np.ndarray
    gaps: np.ndarray  # (n_times, n_functionals)
    c_phi: np.ndarray
    kappa_declared: float
    kappa_fitted: tuple  # None where the fit is undefined
    bound_violations: int

    def bounds(self) -> np.ndarray:
        return self.c_phi[None, :] * np.exp(-self.kappa_declared * self.times)[:, None]


def _fit_rate(times: np.ndarray, gaps: np.ndarray):
    half = times.size // 2
    t, g = times[half:], gaps[half:]
    keep = g > GAP_FLOOR
    if np.count_nonzero(keep) < 2 or np.ptp(t[keep]) == 0:
        return None
    slope = np.polyfit(t[keep], np.log(g[keep]), 1)[0]
    return float(-slope)


def verify_bound(prob: EvolutionProblem, f, time_grid) -> AsymptoticsReport:
    """Evaluate the gap on ``time_grid`` for one functional or a list of them.

    Counts samples exceeding ``C exp(-kappa t) (1 + 1e-9)`` and fits the decay
    rate by least squares on ``log gap`` over the last half of the grid.
    """
    funcs = [f] if isinstance(f, TestFunctional) else list(f)
    times = np.asarray(time_grid, dtype=float)
    if times.ndim != 1 or np.any(times < 0):
        raise DomainError("time grid must be a 1-D array of times >= 0")
    kappa = prob.kappa()
    gaps = np.empty((times.size, len(funcs)))
    consts = np.empty(len(funcs))
    for j, fj in enumerate(funcs):
        ev = _GapEvaluator(prob, fj)
        gaps[:, j] = [ev(t) for t in times]
        consts[j] = c_phi(prob, fj)
    bound = consts[None, :] * np.exp(-kappa * times)[:, None] * (1 + BOUND_SLACK)
    violations = int(np.count_nonzero(gaps > bound))
    fitted = tuple(_fit_rate(times, gaps[:, j]) for j in range(len(funcs)))
    return AsymptoticsReport(times, gaps, consts, kappa, fitted, violations)


def t_epsilon(prob: EvolutionProblem, f: TestFunctional, eps: float) -> float:
    """Time after which the bound guarantees ``gap < eps``."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    c = c_phi(prob, f)
    if c <= eps:
        return 0.0
    return math.log(c / eps) / prob.kappa()


def translation_sweep(prob: EvolutionProblem, f: TestFunctional, shifts, t: float) -> float:
    """Largest gap at time ``t`` over the translates of ``f`` by each shift."""
    best = 0.0
    for h in shifts:
        best = max(best, convergence_gap(prob, f.translated(h), t))
    return best


@dataclass(frozen=True)
class FixedPointReport:
    max_tv_discrepancy: float
    discrepancies: tuple


def fixed_point_check(prob: EvolutionProblem, time_grid, initial_offset: SpectralMeasure | None = None) -> FixedPointReport:
    """Start the Cauchy problem from the steady value at 0 and compare in total variation.

    ``initial_offset`` perturbs that initial value (for sensitivity checks).
    """
    check_mode(prob, "steady")
    v0 = snapshot(prob, "steady", 0.0)
    if initial_offset is not None:
        v0 = v0 + initial_offset
    cp = cauchy_problem(prob, v0)
    out = []
    for t in np.asarray(time_grid, dtype=float):
        diff = snapshot(cp, "cauchy", t) - snapshot(prob, "steady", t)
        out.append(diff.total_variation())
    return FixedPointReport(max(out) if out else 0.0, tuple(out))
