"""Closed-form solutions of dV/dt + g V = Y on the spectral side.

Three solution families are provided, each evaluated at a single time as a
:class:`SpectralMeasure`:

* ``duhamel``: the unique solution supported in t >= 0, integrating the
  source over ``[0, t]``;
* ``cauchy``: ``exp(-t g) V0`` plus the source integrated over ``(0, t]``;
* ``steady``: the whole-line solution integrating the source over
  ``(-inf, t]``, defined when Re g is bounded below by a positive constant
  on the frequencies involved.

All time integrals are exact: temporal atoms contribute ``a exp(-(t - s) g)``
and constant-rate segments contribute through the stable kernel
``phi1(c, tau) = (1 - exp(-c tau)) / c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DimensionError, DomainError, PreconditionError, RepresentationError
from .measures import SpaceTimeMeasure, SpectralMeasure, TemporalProfile, TestFunctional, pair
from .quadrature import integrate_piecewise
from .symbols import Symbol

__all__ = [
    "MODES",
    "EvolutionProblem",
    "exp_kernel",
    "duhamel_snapshot",
    "cauchy_snapshot",
    "steady_snapshot",
    "snapshot",
    "invert_elliptic",
    "PairedTrajectory",
    "ResidualReport",
    "weak_residual",
    "increment_identity",
    "bump",
]

MODES = ("duhamel", "cauchy", "steady")
SERIES_THRESHOLD = 1e-4
INVERT_TOL = 1e-14


def exp_kernel(c, tau):
    """Return ``(exp(-c tau), (1 - exp(-c tau)) / c)`` for Re c >= 0, tau >= 0.

    The second entry uses ``expm1`` when ``|c| tau >= 1e-4`` and a four-term
    Taylor series below, so it stays accurate as c -> 0 (limit: tau).
    Scalar inputs give scalar outputs.
    """
    scalar = np.ndim(c) == 0 and np.ndim(tau) == 0
    c = np.asarray(c, dtype=complex)
    tau = np.asarray(tau, dtype=float)
    if np.any(c.real < 0):
        raise DomainError("exp_kernel needs Re(c) >= 0 (anti-parabolic symbol)")
    if np.any(tau < 0):
        raise DomainError("exp_kernel needs tau >= 0")
    c, tau = np.broadcast_arrays(c, tau)
    z = c * tau
    decay = np.exp(-z)
    phi = np.empty_like(z)
    small = np.abs(z) < SERIES_THRESHOLD
    zs = z[small]
    phi[small] = tau[small] * (1 - zs / 2 + zs * zs / 6 - zs * zs * zs / 24)
    big = ~small
    phi[big] = -np.expm1(-z[big]) / c[big]
    if scalar:
        return complex(decay), complex(phi)
    return decay, phi


def _phi1(g: np.ndarray, tau: float) -> np.ndarray:
    """exp_kernel's second entry for an array ``g`` and scalar ``tau``, unchecked."""
    z = g * tau
    small = np.abs(z) < SERIES_THRESHOLD
    if not small.any():
        return -np.expm1(-z) / g
    out = np.empty_like(z)
    zs = z[small]
    out[small] = tau * (1 - zs / 2 + zs * zs / 6 - zs * zs * zs / 24)
    big = ~small
    out[big] = -np.expm1(-z[big]) / g[big]
    return out


def _profile_active(p: TemporalProfile, t: float, include_t: bool) -> bool:
    if p.atom_times.size and (p.atom_times[0] < t or (include_t and p.atom_times[0] == t)):
        return True
    return bool(p.seg_starts.size and p.seg_starts[0] < t)


def _response(p: TemporalProfile, g: np.ndarray, t: float, include_t: bool = True) -> np.ndarray:
    """sum over the profile mass on (-inf, t] of exp(-(t - s) g), per frequency."""
    acc = np.zeros(g.shape, dtype=complex)
    for tk, ak in zip(p.atom_times, p.atom_masses):
        if tk < t or (include_t and tk == t):
            acc = acc + ak * np.exp(-(t - tk) * g)
    for a, b, r in zip(p.seg_starts, p.seg_ends, p.seg_rates):
        if a < t:
            end = min(b, t)
            decay = np.exp(-(g * (t - end)))
            acc = acc + r * (decay * _phi1(g, end - a))
    return acc


@dataclass(frozen=True, eq=False)
class EvolutionProblem:
    """Spectral-side data of dU/dt + L_g U = X.

    ``source`` is Y = F_S(X); ``initial`` is V0 = F_S(U0);
    ``time_homogeneous`` is a spatial measure lambda standing for the
    stationary source ``lambda (x) dt`` (restricted to t >= 0 outside steady
    mode).
    """

    symbol: Symbol
    source: SpaceTimeMeasure | None = None
    initial: SpectralMeasure | None = None
    time_homogeneous: SpectralMeasure | None = None

    def __post_init__(self):
        d = self.symbol.dimension
        if self.source is None:
            object.__setattr__(self, "source", SpaceTimeMeasure.empty(d))
        for name in ("source", "initial", "time_homogeneous"):
            obj = getattr(self, name)
            if obj is not None and obj.dimension != d:
                raise DimensionError(f"{name} has dimension {obj.dimension}, symbol has {d}")

    @property
    def dimension(self) -> int:
        return self.symbol.dimension

    def _g_flat(self, m: SpectralMeasure) -> np.ndarray:
        pts = m.support_points()
        return self.symbol(pts) if pts.shape[0] else np.zeros(0, dtype=complex)

    @cached_property
    def _term_g(self) -> list:
        return [self._g_flat(m) for m, _ in self.source.terms]

    @cached_property
    def _initial_g(self):
        return None if self.initial is None else self._g_flat(self.initial)

    @cached_property
    def _homogeneous_g(self):
        return None if self.time_homogeneous is None else self._g_flat(self.time_homogeneous)

    def source_frequencies(self) -> np.ndarray:
        pts = [self.source.spatial_points()]
        if self.time_homogeneous is not None:
            pts.append(self.time_homogeneous.support_points())
        return np.vstack(pts)

    def frequencies(self) -> np.ndarray:
        pts = [self.source_frequencies()]
        if self.initial is not None:
            pts.append(self.initial.support_points())
        return np.vstack(pts)

    def source_kappa(self) -> float:
        """Smallest Re g over the source frequencies (inf without any)."""
        pts = self.source_frequencies()
        return float(np.min(self.symbol(pts).real)) if pts.shape[0] else math.inf

    def kappa(self) -> float:
        """Smallest Re g over every frequency present in the problem."""
        pts = self.frequencies()
        return float(np.min(self.symbol(pts).real)) if pts.shape[0] else math.inf

    def with_initial(self, initial: SpectralMeasure | None) -> EvolutionProblem:
        return EvolutionProblem(self.symbol, self.source, initial, self.time_homogeneous)

    def with_source(self, source: SpaceTimeMeasure) -> EvolutionProblem:
        return EvolutionProblem(self.symbol, source, self.initial, self.time_homogeneous)

    def jump_times(self) -> np.ndarray:
        return self.source.jump_times()

    def breakpoints(self) -> np.ndarray:
        return self.source.breakpoints()


def _scaled(m: SpectralMeasure, factors: np.ndarray) -> SpectralMeasure:
    n = m.n_atoms
    dens = None if m.grid is None else m.density.ravel() * factors[n:]
    return m._with(m.weights * factors[:n], dens)


def _combine(parts: list, dimension: int) -> SpectralMeasure:
    if not parts:
        return SpectralMeasure.empty(dimension)
    if len(parts) == 1:
        return parts[0]
    out = parts[0]
    for m in parts[1:]:
        out = out + m
    return out


def check_mode(prob: EvolutionProblem, mode: str) -> None:
    """Raise when ``prob`` violates the preconditions of ``mode``."""
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}; expected one of {MODES}")
    if mode in ("duhamel", "cauchy"):
        if not prob.source.supported_nonneg:
            raise PreconditionError(
                f"{mode} mode needs a source supported in t >= 0 "
                f"(support starts at {prob.source.support_lower_bound:.17g}); restrict it first",
                "source",
            )
        pts = prob.frequencies()
        if pts.shape[0] and np.min(prob.symbol(pts).real) < 0:
            raise PreconditionError("symbol is not parabolic on the problem frequencies", "symbol")
    if mode == "cauchy":
        if prob.initial is None:
            raise PreconditionError("cauchy mode needs an initial condition", "initial")
        if np.any(prob.source.jump_times() == 0.0):
            raise PreconditionError(
                "source has a temporal atom at t = 0; fold it into the initial condition", "source"
            )
    if mode == "steady":
        kappa = prob.source_kappa()
        if not kappa > 0:
            raise PreconditionError(
                f"steady mode needs effective_kappa > 0 on the source frequencies, got {kappa:.17g}", "symbol"
            )
        if not math.isfinite(prob.source.support_lower_bound) and not prob.source.is_empty:
            raise RepresentationError("steady mode needs a source bounded below in time")


def _parts(prob: EvolutionProblem, mode: str, t: float, include_t: bool = True) -> list:
    """Unmerged spectral pieces of the ``mode`` solution at time ``t``."""
    parts = []
    if mode != "steady" and (t < 0 or (t == 0 and not include_t)):
        return parts
    if mode == "cauchy":
        decay = np.exp(-t * prob._initial_g)
        parts.append(_scaled(prob.initial, decay))
    for (m, p), g in zip(prob.source.terms, prob._term_g):
        if _profile_active(p, t, include_t):
            parts.append(_scaled(m, _response(p, g, t, include_t)))
    lam = prob.time_homogeneous
    if lam is not None:
        g = prob._homogeneous_g
        if mode == "steady":
            parts.append(_scaled(lam, 1.0 / g))
        elif t > 0:
            parts.append(_scaled(lam, exp_kernel(g, t)[1]))
    return parts


def snapshot(prob: EvolutionProblem, mode: str, t: float, include_t: bool = True) -> SpectralMeasure:
    """Solution of ``mode`` at time ``t``; ``include_t=False`` gives the left limit."""
    check_mode(prob, mode)
    return _combine(_parts(prob, mode, float(t), include_t), prob.dimension)


def duhamel_snapshot(prob: EvolutionProblem, t: float) -> SpectralMeasure:
    if t < 0:
        raise DomainError("duhamel snapshots are defined for t >= 0")
    return snapshot(prob, "duhamel", t)


def cauchy_snapshot(prob: EvolutionProblem, t: float) -> SpectralMeasure:
    if t < 0:
        raise DomainError("cauchy snapshots are defined for t >= 0")
    return snapshot(prob, "cauchy", t)


def steady_snapshot(prob: EvolutionProblem, t: float) -> SpectralMeasure:
    return snapshot(prob, "steady", t)


def invert_elliptic(m: SpectralMeasure, sym: Symbol) -> SpectralMeasure:
    """Solve g V = m, i.e. divide the weights by g."""
    if m.dimension != sym.dimension:
        raise DimensionError(f"measure dimension {m.dimension} != symbol dimension {sym.dimension}")
    pts = m.support_points()
    if pts.shape[0]:
        gv = np.abs(sym(pts))
        k = int(np.argmin(gv))
        if gv[k] < INVERT_TOL:
            raise PreconditionError(f"symbol vanishes at support point {pts[k].tolist()}")
    return m.divide(sym)


class PairedTrajectory:
    """``t -> <V_t, f>`` and ``t -> <g V_t, f>`` without building measures.

    Used by every quadrature-based check; ``scale`` multiplies the solution
    (a value other than 1 gives a deliberately wrong trajectory).
    """

    def __init__(self, prob: EvolutionProblem, mode: str, f: TestFunctional, scale: complex = 1.0):
        check_mode(prob, mode)
        if f.dimension != prob.dimension:
            raise DimensionError(f"functional dimension {f.dimension} != problem dimension {prob.dimension}")
        self.prob, self.mode, self.f, self.scale = prob, mode, f, complex(scale)

        def weighted(m):
            pts, w = m.flat()
            return f(pts) * w if pts.shape[0] else np.zeros(0, dtype=complex)

        self._terms = [(weighted(m), p, g) for (m, p), g in zip(prob.source.terms, prob._term_g)]
        self._init = None if prob.initial is None else (weighted(prob.initial), prob._initial_g)
        lam = prob.time_homogeneous
        self._hom = None if lam is None else (weighted(lam), prob._homogeneous_g)

    def breakpoints(self) -> np.ndarray:
        bps = self.prob.breakpoints()
        if self.mode != "steady":
            bps = np.union1d(bps, [0.0])
        return bps

    def jump_times(self) -> np.ndarray:
        return self.prob.jump_times()

    def both(self, t: float, include_t: bool = True):
        """Return ``(<V_t, f>, <g V_t, f>)``."""
        t = float(t)
        v = vg = 0j
        if self.mode != "steady" and (t < 0 or (t == 0 and not include_t)):
            return v, vg
        if self.mode == "cauchy":
            hw, g = self._init
            c = hw * np.exp(-t * g)
            v += c.sum()
            vg += (c * g).sum()
        for hw, p, g in self._terms:
            if _profile_active(p, t, include_t):
                c = hw * _response(p, g, t, include_t)
                v += c.sum()
                vg += (c * g).sum()
        if self._hom is not None:
            hw, g = self._hom
            if self.mode == "steady":
                v += (hw / g).sum()
                vg += hw.sum()
            elif t > 0:
                c = hw * exp_kernel(g, t)[1]
                v += c.sum()
                vg += (c * g).sum()
        return self.scale * v, self.scale * vg

    def __call__(self, t: float, include_t: bool = True) -> complex:
        return self.both(t, include_t)[0]

    def with_symbol(self, t: float) -> complex:
        return self.both(t)[1]

    def source_interval(self, s: float, t: float) -> complex:
        """<Y, f (x) 1_(s, t]> for this mode's source."""
        val = sum((hw.sum() * p.mass(s, t) for hw, p, _ in self._terms), 0j)
        if self._hom is not None:
            lo = s if self.mode == "steady" else max(s, 0.0)
            if t > lo:
                val += self._hom[0].sum() * (t - lo)
        return val

    def source_against(self, psi, lo: float, hi: float) -> complex:
        """<Y, f (x) psi> for a smooth ``psi`` supported in ``[lo, hi]``."""
        from scipy import integrate

        val = 0j
        for hw, p, _ in self._terms:
            coef = hw.sum()
            acc = 0j
            for tk, ak in zip(p.atom_times, p.atom_masses):
                if lo <= tk <= hi:
                    acc += ak * psi(tk)
            for a, b, r in zip(p.seg_starts, p.seg_ends, p.seg_rates):
                a2, b2 = max(a, lo), min(b, hi)
                if b2 > a2:
                    acc += r * integrate.quad(psi, a2, b2, epsabs=1e-15, epsrel=1e-12, limit=200)[0]
            val += coef * acc
        if self._hom is not None:
            a2 = lo if self.mode == "steady" else max(lo, 0.0)
            if hi > a2:
                val += self._hom[0].sum() * integrate.quad(psi, a2, hi, epsabs=1e-15, epsrel=1e-12, limit=200)[0]
        return val


def bump(center: float, radius: float):
    """Smooth bump exp(-1/(1-u^2)), u = (t - center)/radius, and its derivative."""

    def psi(t):
        u = (t - center) / radius
        if abs(u) >= 1:
            return 0.0
        return math.exp(-1.0 / (1.0 - u * u))

    def dpsi(t):
        u = (t - center) / radius
        if abs(u) >= 1:
            return 0.0
        q = 1.0 - u * u
        return math.exp(-1.0 / q) * (-2.0 * u / (q * q)) / radius

    return psi, dpsi


@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    residuals: tuple = field(default_factory=tuple)
    centers: tuple = field(default_factory=tuple)


def weak_residual(
    prob: EvolutionProblem,
    mode: str,
    f: TestFunctional,
    window: tuple,
    n_test: int = 5,
    scale: complex = 1.0,
) -> ResidualReport:
    """Weak-form residual of dV/dt + g V = Y against bumps ``f (x) psi``.

    For each bump psi inside ``window`` computes
    ``|<V, -psi'> + <g V, psi> - <Y, psi>|``. In cauchy mode the window must
    start after 0, where the initial jump lives.
    """
    t0, t1 = map(float, window)
    if not t1 > t0:
        raise DomainError("window needs T0 < T1")
    if mode == "cauchy" and t0 <= 0:
        raise PreconditionError("cauchy residuals need a window with T0 > 0")
    if mode == "duhamel" and t0 < 0:
        raise PreconditionError("duhamel residuals need a window with T0 >= 0")
    if n_test < 1:
        raise DomainError("n_test must be >= 1")
    traj = PairedTrajectory(prob, mode, f, scale)
    width = (t1 - t0) / 2 if n_test > 1 else (t1 - t0)
    starts = [t0] if n_test == 1 else list(np.linspace(t0, t1 - width, n_test))
    bps = traj.breakpoints()
    residuals, centers = [], []
    for lo in starts:
        r = width / 2
        c = lo + r
        psi, dpsi = bump(c, r)

        def integrand(t):
            v, vg = traj.both(t)
            return -v * dpsi(t) + vg * psi(t)

        lhs = integrate_piecewise(integrand, c - r, c + r, bps, relative_to_magnitude=True)
        rhs = traj.source_against(psi, c - r, c + r)
        residuals.append(abs(lhs - rhs))
        centers.append(c)
    return ResidualReport(max(residuals), tuple(residuals), tuple(centers))


def increment_identity(prob: EvolutionProblem, mode: str, f: TestFunctional, s: float, t: float):
    """Both sides of <V_t - V_s, f> = <Y, f (x) 1_(s,t]> - int_s^t <g V_u, f> du.

    Returns ``(lhs, rhs)``.
    """
    if t < s:
        raise DomainError("increment identity needs s <= t")
    if mode != "steady" and s < 0:
        raise DomainError(f"{mode} increments need s >= 0")
    traj = PairedTrajectory(prob, mode, f)
    lhs = traj(t) - traj(s)
    drift = integrate_piecewise(traj.with_symbol, s, t, traj.breakpoints(), relative_to_magnitude=True)
    return lhs, traj.source_interval(s, t) - drift
