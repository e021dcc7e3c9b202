"""Cadlag-in-time evaluation: right values, left limits, jumps and mollifier limits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import DomainError
from .evolution import EvolutionProblem, PairedTrajectory, check_mode, snapshot
from .measures import SpectralMeasure, TestFunctional
from .quadrature import integrate_piecewise

__all__ = ["Trajectory", "MollifierParams", "mollifier_bump"]

JUMP_TOL = 1e-14


def _bump_shape(u: float) -> float:
    # exp(-1/(1 - u^2)) on (-1, 1)
    if abs(u) >= 1:
        return 0.0
    return math.exp(-1.0 / (1.0 - u * u))


@lru_cache(maxsize=1)
def _shape_mass() -> float:
    mass, _ = integrate.quad(_bump_shape, -1.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200)
    return mass


def mollifier_bump(t: float, width: float, side: str = "right"):
    """Unit-mass smooth bump supported in ``[t, t + width]`` (or ``[t - width, t]``).

    The normalizing constant is the quadrature mass of the reference bump on
    [-1, 1] scaled by ``width / 2``, which stays accurate for tiny widths.
    """
    lo = t if side == "right" else t - width
    center = lo + width / 2
    half = width / 2
    norm = 1.0 / (half * _shape_mass())

    def theta(s):
        return _bump_shape((s - center) / half) * norm

    return theta, lo, lo + width


@dataclass(frozen=True)
class MollifierParams:
    widths: tuple = field(default_factory=lambda: tuple(2.0 ** -n for n in range(1, 21)))
    side: str = "right"

    def __post_init__(self):
        w = np.asarray(self.widths, dtype=float)
        if w.size == 0 or np.any(w <= 0) or np.any(np.diff(w) >= 0):
            raise DomainError("mollifier widths must be positive and strictly decreasing")
        if self.side not in ("right", "left"):
            raise DomainError("side must be 'right' or 'left'")

    @classmethod
    def depth(cls, n: int, side: str = "right") -> MollifierParams:
        return cls(tuple(2.0 ** -k for k in range(1, n + 1)), side)


class Trajectory:
    """Lazily evaluated solution family ``t -> V_t`` of one mode."""

    def __init__(self, problem: EvolutionProblem, mode: str):
        check_mode(problem, mode)
        self.problem = problem
        self.mode = mode
        times = problem.jump_times()
        if mode != "steady":
            times = times[times >= 0]
        if mode == "cauchy" and problem.initial.total_variation() > JUMP_TOL:
            times = np.union1d(times, [0.0])
        self.schedule = np.asarray(times, dtype=float)

    def _check_time(self, t: float):
        if self.mode != "steady" and t < 0:
            raise DomainError(f"{self.mode} trajectories are evaluated at t >= 0, got {t}")

    def eval(self, t: float) -> SpectralMeasure:
        self._check_time(t)
        return snapshot(self.problem, self.mode, t, include_t=True)

    def left_limit(self, t: float) -> SpectralMeasure:
        self._check_time(t)
        return snapshot(self.problem, self.mode, t, include_t=False)

    def jump(self, t: float) -> SpectralMeasure:
        return self.eval(t) - self.left_limit(t)

    def jumps(self, window) -> list:
        t0, t1 = map(float, window)
        if t1 < t0:
            raise DomainError("jumps window needs T0 <= T1")
        sel = self.schedule[(self.schedule >= t0) & (self.schedule <= t1)]
        return [(float(t), self.jump(t)) for t in sel]

    def paired(self, f: TestFunctional) -> PairedTrajectory:
        return PairedTrajectory(self.problem, self.mode, f)

    def mollifier_pair(self, f: TestFunctional, t: float, params: MollifierParams | None = None) -> list:
        """Sequence ``(a_n, <T, f (x) theta_n>)`` with theta_n -> delta_t from one side.

        Converges to ``<eval(t), f>`` from the right and to
        ``<left_limit(t), f>`` from the left.
        """
        params = params or MollifierParams()
        pt = self.paired(f)
        bps = pt.breakpoints()
        out = []
        for a in params.widths:
            lo = t if params.side == "right" else t - a
            hi = lo + a
            if self.mode != "steady" and hi <= 0:
                out.append((a, 0j))
                continue
            # integrate in the bump's own variable u in [-1, 1] so narrow
            # bumps are not quantized by the absolute time coordinate
            half = a / 2
            center = lo + half
            ubps = (bps - center) / half

            def integrand(u, center=center, half=half):
                return pt(center + half * u) * _bump_shape(u)

            val = integrate_piecewise(integrand, -1.0, 1.0, ubps) / _shape_mass()
            out.append((a, val))
        return out
