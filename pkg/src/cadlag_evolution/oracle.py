"""Independent references for the closed-form snapshots.

Both oracles work per frequency on the modal ODE ``v' = -g v + y(t)``:
``step_modal`` with implicit Euler or Crank-Nicolson time stepping, and
``quadrature_duhamel`` with composite Simpson quadrature of the Duhamel
integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError
from .evolution import EvolutionProblem, snapshot
from .measures import MERGE_TOL, SpectralMeasure, _merge_atoms

__all__ = ["StepperConfig", "ModalValues", "step_modal", "quadrature_duhamel", "closed_form_modal"]

MAX_STEPS = 10**8


@dataclass(frozen=True)
class StepperConfig:
    method: str = "crank_nicolson"
    dt: float = 1e-4
    t_end: float = 1.0

    def __post_init__(self):
        if self.method not in ("implicit_euler", "crank_nicolson"):
            raise DomainError(f"unknown stepping method {self.method!r}")
        if not self.dt > 0:
            raise DomainError("dt must be positive")
        if self.t_end < 0:
            raise DomainError("t_end must be >= 0")
        if self.t_end / self.dt > MAX_STEPS:
            raise DomainError(f"t_end/dt exceeds the step cap {MAX_STEPS}")


@dataclass(frozen=True, eq=False)
class ModalValues:
    """Per-frequency values: ``values[..., k]`` belongs to ``frequencies[k]``."""

    frequencies: np.ndarray
    values: np.ndarray

    def as_dict(self) -> dict:
        vals = self.values if self.values.ndim == 1 else self.values[-1]
        return {tuple(float(c) for c in xi): complex(v) for xi, v in zip(self.frequencies, vals)}


class _ModalSystem:
    """Problem data laid out on the union of all atom frequencies."""

    def __init__(self, prob: EvolutionProblem):
        measures = [m for m, _ in prob.source.terms]
        for extra in (prob.initial, prob.time_homogeneous):
            if extra is not None:
                measures.append(extra)
        if any(m.grid is not None for m in measures):
            raise DomainError("modal oracles accept atom-only measures (no grid density)")
        if not prob.source.supported_nonneg:
            raise PreconditionError("modal oracles need a source supported in t >= 0")
        d = prob.dimension
        locs = np.vstack([m.locations for m in measures]) if measures else np.zeros((0, d))
        self.frequencies, _ = _merge_atoms(locs, np.zeros(locs.shape[0], dtype=complex))
        self.g = prob.symbol(self.frequencies) if self.frequencies.shape[0] else np.zeros(0, dtype=complex)
        self.initial = self._spread(prob.initial)
        self.terms = [(self._spread(m), p) for m, p in prob.source.terms]
        self.homogeneous = self._spread(prob.time_homogeneous) if prob.time_homogeneous is not None else None

    def _spread(self, m: SpectralMeasure | None) -> np.ndarray:
        out = np.zeros(self.frequencies.shape[0], dtype=complex)
        if m is None:
            return out
        for xi, w in zip(m.locations, m.weights):
            k = np.flatnonzero(np.all(np.abs(self.frequencies - xi) <= MERGE_TOL, axis=1))[0]
            out[k] += w
        return out

    def rate(self, t: float) -> np.ndarray:
        """Source density at ``t`` (constant between breakpoints)."""
        y = np.zeros_like(self.g)
        for w, p in self.terms:
            r = 0j
            for a, b, rate in zip(p.seg_starts, p.seg_ends, p.seg_rates):
                if a <= t < b:
                    r += rate
            if r != 0:
                y = y + w * r
        if self.homogeneous is not None and t >= 0:
            y = y + self.homogeneous
        return y

    def kick(self, t: float) -> np.ndarray:
        out = np.zeros_like(self.g)
        for w, p in self.terms:
            a = p.atom_mass_at(t)
            if a != 0:
                out = out + w * a
        return out

    def breakpoints(self) -> np.ndarray:
        pts = [np.zeros(1)]
        for _, p in self.terms:
            pts.append(p.breakpoints())
        return np.unique(np.concatenate(pts))


def step_modal(prob: EvolutionProblem, cfg: StepperConfig, times=None) -> ModalValues:
    """Time-step the modal ODE from 0 with initial value V0 (zero when absent).

    Step boundaries are forced onto atom times, segment endpoints and the
    requested output times; a temporal atom is applied right after the step
    that reaches it, so the value at an atom time includes its jump.
    ``times`` (sorted, within ``[0, t_end]``) adds intermediate outputs, in
    which case ``values`` has one row per requested time.
    """
    sys = _ModalSystem(prob)
    out_times = np.array([cfg.t_end] if times is None else sorted(times), dtype=float)
    if out_times.size and (out_times[0] < 0 or out_times[-1] > cfg.t_end + 1e-15):
        raise DomainError("output times must lie in [0, t_end]")
    bps = sys.breakpoints()
    edges = np.unique(np.concatenate([[0.0, cfg.t_end], out_times, bps[(bps > 0) & (bps < cfg.t_end)]]))
    total = sum(math.ceil((hi - lo) / cfg.dt - 1e-9) for lo, hi in zip(edges[:-1], edges[1:]))
    if total > MAX_STEPS:
        raise DomainError(f"{total} steps exceed the cap {MAX_STEPS}")

    v = sys.initial + sys.kick(0.0)
    rows = {}
    if 0.0 in out_times:
        rows[0.0] = v.copy()
    g = sys.g
    for lo, hi in zip(edges[:-1], edges[1:]):
        n = max(1, math.ceil((hi - lo) / cfg.dt - 1e-9))
        h = (hi - lo) / n
        y = sys.rate(0.5 * (lo + hi))
        if cfg.method == "implicit_euler":
            amp = 1.0 / (1.0 + h * g)
            inc = h * y * amp
        else:
            amp = (1.0 - 0.5 * h * g) / (1.0 + 0.5 * h * g)
            inc = h * y / (1.0 + 0.5 * h * g)
        for _ in range(n):
            v = amp * v + inc
        v = v + sys.kick(hi)
        if hi in out_times:
            rows[hi] = v.copy()
    vals = np.array([rows[t] for t in out_times])
    return ModalValues(sys.frequencies, vals[0] if times is None else vals)


def _simpson(func, a: float, b: float, panels: int) -> np.ndarray:
    # one panel = two subintervals with weights 1, 4, 1
    n = 2 * max(1, int(panels))
    s = np.linspace(a, b, n + 1)
    wts = np.ones(n + 1)
    wts[1:-1:2] = 4.0
    wts[2:-1:2] = 2.0
    h = (b - a) / n
    return h / 3.0 * sum(wk * func(sk) for wk, sk in zip(wts, s))


def quadrature_duhamel(prob: EvolutionProblem, t: float, n_panels: int = 256) -> ModalValues:
    """Duhamel integral over [0, t] per frequency by composite Simpson quadrature.

    Temporal atoms are summed exactly; each segment piece is integrated with
    ``n_panels`` Simpson panels (``2 n_panels`` subintervals). The initial condition is ignored.
    """
    if t < 0:
        raise DomainError("quadrature_duhamel needs t >= 0")
    sys = _ModalSystem(prob)
    g = sys.g
    acc = np.zeros_like(g)
    for w, p in sys.terms:
        for tk, ak in zip(p.atom_times, p.atom_masses):
            if tk <= t:
                acc = acc + w * (ak * np.exp(-(t - tk) * g))
        for a, b, r in zip(p.seg_starts, p.seg_ends, p.seg_rates):
            end = min(b, t)
            if end > a:
                acc = acc + w * r * _simpson(lambda s: np.exp(-(t - s) * g), a, end, n_panels)
    if sys.homogeneous is not None and t > 0:
        acc = acc + sys.homogeneous * _simpson(lambda s: np.exp(-(t - s) * g), 0.0, t, n_panels)
    return ModalValues(sys.frequencies, acc)


def closed_form_modal(prob: EvolutionProblem, mode: str, t: float, frequencies: np.ndarray) -> np.ndarray:
    """Atom weights of the closed-form snapshot at the given frequencies."""
    snap = snapshot(prob, mode, t)
    return np.array([snap.weight_at(xi) for xi in frequencies], dtype=complex)
