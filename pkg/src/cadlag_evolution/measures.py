"""Discrete slow-growing measures on frequency space and frequency x time.

Spectral measures are finite sums of weighted Dirac atoms, optionally plus a
density tabulated on a uniform rectangular frequency grid. Space-time
measures are finite sums of separable terms ``spatial (x) temporal`` whose
temporal factor is a :class:`TemporalProfile`: point masses plus piecewise
constant rates on bounded intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy import integrate
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import DimensionError, DomainError, RepresentationError
from .symbols import as_frequencies

__all__ = [
    "MERGE_TOL",
    "FrequencyGrid",
    "SpectralMeasure",
    "TemporalProfile",
    "SpaceTimeMeasure",
    "TestFunctional",
    "pair",
    "total_variation",
    "weighted_mass",
    "restrict_nonneg_time",
    "primitive_1d",
    "hermitian_symmetrize",
    "convexity_inequality_holds",
]

# atoms closer than this in every coordinate are the same atom
MERGE_TOL = 1e-12
HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform rectangular grid: node ``k`` on axis ``a`` is ``starts[a] + k * spacings[a]``."""

    starts: tuple
    spacings: tuple
    counts: tuple

    def __post_init__(self):
        starts = tuple(float(v) for v in np.atleast_1d(self.starts))
        spacings = tuple(float(v) for v in np.atleast_1d(self.spacings))
        counts = tuple(int(v) for v in np.atleast_1d(self.counts))
        if not (len(starts) == len(spacings) == len(counts)):
            raise DimensionError("grid starts, spacings and counts differ in length")
        if len(starts) > 3:
            raise DomainError("frequency grids are limited to d <= 3")
        if any(h <= 0 for h in spacings) or any(n < 1 for n in counts):
            raise DomainError("grid spacing must be > 0 and counts >= 1")
        object.__setattr__(self, "starts", starts)
        object.__setattr__(self, "spacings", spacings)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_axes(cls, axes: Iterable) -> FrequencyGrid:
        starts, spacings, counts = [], [], []
        for a in axes:
            a = np.asarray(a, dtype=float)
            if a.size == 1:
                h = 1.0
            else:
                steps = np.diff(a)
                h = float(steps.mean())
                if np.max(np.abs(steps - h)) > 1e-9 * max(abs(h), 1.0):
                    raise DomainError("grid axis is not uniformly spaced")
            starts.append(float(a[0]))
            spacings.append(h)
            counts.append(a.size)
        return cls(tuple(starts), tuple(spacings), tuple(counts))

    @property
    def dimension(self) -> int:
        return len(self.starts)

    @property
    def axes(self) -> list:
        return [s + h * np.arange(n) for s, h, n in zip(self.starts, self.spacings, self.counts)]

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    def nodes(self) -> np.ndarray:
        """All nodes as an ``(N, d)`` array in C order."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def same_as(self, other: FrequencyGrid) -> bool:
        return (
            self.counts == other.counts
            and np.allclose(self.starts, other.starts, rtol=0, atol=MERGE_TOL)
            and np.allclose(self.spacings, other.spacings, rtol=0, atol=MERGE_TOL)
        )


def _merge_atoms(locs: np.ndarray, weights: np.ndarray):
    """Merge atoms closer than MERGE_TOL per coordinate and sort lexicographically."""
    n = locs.shape[0]
    if n > 1:
        pairs = cKDTree(locs).query_pairs(r=MERGE_TOL, p=np.inf, output_type="ndarray")
        if len(pairs):
            graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
            ncomp, labels = connected_components(graph, directed=False)
            first = np.full(ncomp, n)
            np.minimum.at(first, labels, np.arange(n))
            merged = np.zeros(ncomp, dtype=complex)
            np.add.at(merged, labels, weights)
            locs, weights = locs[first], merged
    if locs.shape[0] > 1:
        order = np.lexsort(locs.T[::-1])
        locs, weights = locs[order], weights[order]
    return locs, weights


class SpectralMeasure:
    """Atoms plus an optional grid density on frequency space R^d.

    Values are treated as immutable; every operation returns a new measure.
    """

    __slots__ = ("dimension", "locations", "weights", "grid", "density")

    def __init__(self, dimension, locations=None, weights=None, grid=None, density=None, *, merge=True):
        self.dimension = int(dimension)
        if self.dimension < 1:
            raise DomainError("dimension must be a positive integer")
        if locations is None:
            locs = np.zeros((0, self.dimension))
            w = np.zeros(0, dtype=complex)
        else:
            locs = as_frequencies(locations, self.dimension) if len(np.asarray(locations)) else np.zeros((0, self.dimension))
            w = np.asarray(weights, dtype=complex).reshape(-1)
            if w.shape[0] != locs.shape[0]:
                raise DimensionError("number of weights differs from number of atom locations")
        if merge:
            locs, w = _merge_atoms(locs, w)
        if (grid is None) != (density is None):
            raise DomainError("grid and density must be given together")
        if grid is not None:
            if grid.dimension != self.dimension:
                raise DimensionError(f"grid dimension {grid.dimension} != {self.dimension}")
            density = np.asarray(density, dtype=complex).reshape(grid.counts)
            density.flags.writeable = False
        locs.flags.writeable = False
        w.flags.writeable = False
        self.locations = locs
        self.weights = w
        self.grid = grid
        self.density = density

    # construction helpers

    @classmethod
    def empty(cls, dimension: int) -> SpectralMeasure:
        return cls(dimension)

    @classmethod
    def atom(cls, xi, w, dimension: int | None = None) -> SpectralMeasure:
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        d = dimension or xi.shape[0]
        return cls(d, xi.reshape(1, d), [w])

    @classmethod
    def from_atoms(cls, atoms: Iterable, dimension: int) -> SpectralMeasure:
        atoms = list(atoms)
        if not atoms:
            return cls.empty(dimension)
        locs = np.array([np.atleast_1d(np.asarray(x, dtype=float)) for x, _ in atoms])
        return cls(dimension, locs, [w for _, w in atoms])

    @classmethod
    def on_grid(cls, grid: FrequencyGrid, density) -> SpectralMeasure:
        return cls(grid.dimension, grid=grid, density=density)

    def _with(self, weights=None, density=None, locations=None) -> SpectralMeasure:
        out = SpectralMeasure.__new__(SpectralMeasure)
        out.dimension = self.dimension
        out.locations = self.locations if locations is None else locations
        w = self.weights if weights is None else np.asarray(weights, dtype=complex)
        w.flags.writeable = False
        out.weights = w
        out.grid = self.grid
        if density is not None:
            density = np.asarray(density, dtype=complex).reshape(self.grid.counts)
            density.flags.writeable = False
        out.density = self.density if density is None else density
        return out

    # basic queries

    @property
    def n_atoms(self) -> int:
        return self.locations.shape[0]

    @property
    def is_empty(self) -> bool:
        return self.n_atoms == 0 and self.grid is None

    def flat(self):
        """All support points and their masses (grid nodes weighted by cell volume)."""
        if self.grid is None:
            return self.locations, self.weights
        nodes = self.grid.nodes()
        masses = self.density.ravel() * self.grid.cell_volume
        return np.vstack([self.locations, nodes]), np.concatenate([self.weights, masses])

    def support_points(self) -> np.ndarray:
        return self.flat()[0]

    def atoms(self) -> list:
        return [(self.locations[k].copy(), complex(self.weights[k])) for k in range(self.n_atoms)]

    def weight_at(self, xi) -> complex:
        """Atom weight at ``xi`` (0 when there is no atom there)."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if self.n_atoms == 0:
            return 0j
        hit = np.all(np.abs(self.locations - xi) <= MERGE_TOL, axis=1)
        return complex(self.weights[hit].sum())

    # algebra

    def _check_dim(self, other):
        if other.dimension != self.dimension:
            raise DimensionError(f"dimension {self.dimension} != {other.dimension}")

    def __add__(self, other: SpectralMeasure) -> SpectralMeasure:
        self._check_dim(other)
        grid, density = self.grid, self.density
        if other.grid is not None:
            if grid is None:
                grid, density = other.grid, other.density
            elif grid.same_as(other.grid):
                density = self.density + other.density
            else:
                raise RepresentationError("cannot add grid densities on different grids")
        locs = np.vstack([self.locations, other.locations])
        w = np.concatenate([self.weights, other.weights])
        return SpectralMeasure(self.dimension, locs, w, grid, density)

    def __neg__(self) -> SpectralMeasure:
        return self * -1.0

    def __sub__(self, other: SpectralMeasure) -> SpectralMeasure:
        return self + (-other)

    def __mul__(self, a) -> SpectralMeasure:
        a = complex(a)
        return self._with(self.weights * a, None if self.density is None else self.density * a)

    __rmul__ = __mul__

    def multiply(self, func: Callable[[np.ndarray], np.ndarray]) -> SpectralMeasure:
        """Multiplication measure ``func * self`` for a function of frequency."""
        w = self.weights * np.asarray(func(self.locations)) if self.n_atoms else self.weights
        dens = None
        if self.grid is not None:
            vals = np.asarray(func(self.grid.nodes())).reshape(self.grid.counts)
            dens = self.density * vals
        return self._with(w, dens)

    def divide(self, func: Callable[[np.ndarray], np.ndarray]) -> SpectralMeasure:
        w = self.weights / np.asarray(func(self.locations)) if self.n_atoms else self.weights
        dens = None
        if self.grid is not None:
            vals = np.asarray(func(self.grid.nodes())).reshape(self.grid.counts)
            dens = self.density / vals
        return self._with(w, dens)

    def conj_reflect(self) -> SpectralMeasure:
        """The measure A -> conj(m(-A))."""
        out = SpectralMeasure(self.dimension, -self.locations, np.conj(self.weights))
        if self.grid is None:
            return out
        g = self.grid
        starts = tuple(-(s + h * (n - 1)) for s, h, n in zip(g.starts, g.spacings, g.counts))
        flipped = np.conj(self.density[(slice(None, None, -1),) * g.dimension])
        return out + SpectralMeasure.on_grid(FrequencyGrid(starts, g.spacings, g.counts), flipped)

    def total_variation(self) -> float:
        tv = float(np.sum(np.abs(self.weights)))
        if self.grid is not None:
            tv += float(np.sum(np.abs(self.density))) * self.grid.cell_volume
        return tv

    def pair(self, f: TestFunctional) -> complex:
        return pair(self, f)

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        """True when every atom (xi, w) has a partner (-xi, conj w) within ``tol``."""
        refl = SpectralMeasure(self.dimension, -self.locations, np.conj(self.weights))
        diff = SpectralMeasure(
            self.dimension,
            np.vstack([self.locations, refl.locations]),
            np.concatenate([self.weights, -refl.weights]),
        )
        if np.any(np.abs(diff.weights) > tol):
            return False
        if self.grid is None:
            return True
        return _grid_hermitian_violation(self.grid, self.density) <= tol

    def __repr__(self):
        extra = f", grid={self.grid.counts}" if self.grid is not None else ""
        return f"SpectralMeasure(d={self.dimension}, atoms={self.n_atoms}{extra})"


def _mirror_index(grid: FrequencyGrid):
    """Per axis: index of the node at -x for every node x, or -1 when absent."""
    out = []
    for s, h, n in zip(grid.starts, grid.spacings, grid.counts):
        k = np.arange(n)
        j = (-(s + h * k) - s) / h
        jr = np.rint(j)
        ok = (np.abs(j - jr) * h <= MERGE_TOL) & (jr >= 0) & (jr < n)
        out.append(np.where(ok, jr, -1).astype(int))
    return out


def _grid_hermitian_violation(grid: FrequencyGrid, density: np.ndarray) -> float:
    mirrors = _mirror_index(grid)
    worst = 0.0
    for idx in np.ndindex(*grid.counts):
        partner = tuple(mirrors[a][i] for a, i in enumerate(idx))
        if min(partner) < 0:
            continue
        worst = max(worst, abs(density[partner] - np.conj(density[idx])))
    return float(worst)


@dataclass(frozen=True, eq=False)
class TemporalProfile:
    """Measure on the time line: point masses plus rates on ``[start, end)`` intervals.

    Construction normalizes the input: coincident atom times are merged and
    overlapping segments are split with their rates summed.
    """

    atom_times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    atom_masses: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))
    seg_starts: np.ndarray = field(default_factory=lambda: np.zeros(0))
    seg_ends: np.ndarray = field(default_factory=lambda: np.zeros(0))
    seg_rates: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        t = np.asarray(self.atom_times, dtype=float).reshape(-1)
        a = np.asarray(self.atom_masses, dtype=complex).reshape(-1)
        if t.shape != a.shape:
            raise DimensionError("atom times and masses differ in length")
        if not np.all(np.isfinite(t)):
            raise RepresentationError("temporal atoms must sit at finite times")
        t, a = _merge_atoms(t.reshape(-1, 1), a)
        t = t.reshape(-1)
        s, e, r = _normalize_segments(self.seg_starts, self.seg_ends, self.seg_rates)
        for name, arr in (("atom_times", t), ("atom_masses", a), ("seg_starts", s), ("seg_ends", e), ("seg_rates", r)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def atoms(cls, pairs) -> TemporalProfile:
        pairs = list(pairs)
        return cls([p[0] for p in pairs], [p[1] for p in pairs])

    @classmethod
    def segment(cls, start, end, rate=1.0) -> TemporalProfile:
        return cls(seg_starts=[start], seg_ends=[end], seg_rates=[rate])

    @classmethod
    def build(cls, atoms=(), segments=()) -> TemporalProfile:
        atoms, segments = list(atoms), list(segments)
        return cls(
            [p[0] for p in atoms],
            [p[1] for p in atoms],
            [s[0] for s in segments],
            [s[1] for s in segments],
            [s[2] for s in segments],
        )

    def __add__(self, other: TemporalProfile) -> TemporalProfile:
        return TemporalProfile(
            np.concatenate([self.atom_times, other.atom_times]),
            np.concatenate([self.atom_masses, other.atom_masses]),
            np.concatenate([self.seg_starts, other.seg_starts]),
            np.concatenate([self.seg_ends, other.seg_ends]),
            np.concatenate([self.seg_rates, other.seg_rates]),
        )

    def scaled(self, c) -> TemporalProfile:
        c = complex(c)
        return TemporalProfile(self.atom_times, self.atom_masses * c, self.seg_starts, self.seg_ends, self.seg_rates * c)

    def conj(self) -> TemporalProfile:
        """Profile with conjugated masses and rates."""
        return TemporalProfile(self.atom_times, np.conj(self.atom_masses), self.seg_starts, self.seg_ends, np.conj(self.seg_rates))

    def shifted(self, dt: float) -> TemporalProfile:
        """Profile translated by ``dt`` in time."""
        return TemporalProfile(self.atom_times + dt, self.atom_masses, self.seg_starts + dt, self.seg_ends + dt, self.seg_rates)

    @property
    def is_empty(self) -> bool:
        return self.atom_times.size == 0 and self.seg_starts.size == 0

    @property
    def support_lower_bound(self) -> float:
        cands = np.concatenate([self.atom_times, self.seg_starts])
        return float(cands.min()) if cands.size else math.inf

    @property
    def support_upper_bound(self) -> float:
        cands = np.concatenate([self.atom_times, self.seg_ends])
        return float(cands.max()) if cands.size else -math.inf

    def breakpoints(self) -> np.ndarray:
        """Atom times and segment endpoints, sorted and unique."""
        return np.unique(np.concatenate([self.atom_times, self.seg_starts, self.seg_ends]))

    def total_variation(self) -> float:
        return float(np.sum(np.abs(self.atom_masses)) + np.sum(np.abs(self.seg_rates) * (self.seg_ends - self.seg_starts)))

    def mass(self, s: float, t: float) -> complex:
        """mu((s, t]) for s <= t."""
        if t < s:
            raise DomainError("mass(s, t) needs s <= t")
        acc = 0j
        for tk, ak in zip(self.atom_times, self.atom_masses):
            if s < tk <= t:
                acc += ak
        for a, b, r in zip(self.seg_starts, self.seg_ends, self.seg_rates):
            overlap = min(b, t) - max(a, s)
            if overlap > 0:
                acc += r * overlap
        return acc

    def atom_mass_at(self, t: float) -> complex:
        hit = np.abs(self.atom_times - t) <= MERGE_TOL
        return complex(self.atom_masses[hit].sum())

    def integrate(self, func: Callable[[float], float], epsrel: float = 1e-10) -> complex:
        """Integral of a smooth function against the profile."""
        acc = 0j
        for tk, ak in zip(self.atom_times, self.atom_masses):
            acc += ak * func(tk)
        for a, b, r in zip(self.seg_starts, self.seg_ends, self.seg_rates):
            val, _ = integrate.quad(func, a, b, epsabs=0.0, epsrel=epsrel, limit=200)
            acc += r * val
        return acc

    def restrict(self, lower: float = 0.0, closed: bool = True) -> TemporalProfile:
        """Restriction to ``[lower, inf)`` (or ``(lower, inf)`` when not closed)."""
        keep = self.atom_times >= lower if closed else self.atom_times > lower
        ends = self.seg_ends
        live = ends > lower
        return TemporalProfile(
            self.atom_times[keep],
            self.atom_masses[keep],
            np.maximum(self.seg_starts[live], lower),
            ends[live],
            self.seg_rates[live],
        )

    def to_record(self) -> dict:
        return {
            "atoms": [{"t": float(t), "mass": [a.real, a.imag]} for t, a in zip(self.atom_times, self.atom_masses)],
            "segments": [
                {"from": float(a), "to": float(b), "rate": [r.real, r.imag]}
                for a, b, r in zip(self.seg_starts, self.seg_ends, self.seg_rates)
            ],
        }


def _normalize_segments(starts, ends, rates):
    s = np.asarray(starts, dtype=float).reshape(-1)
    e = np.asarray(ends, dtype=float).reshape(-1)
    r = np.asarray(rates, dtype=complex).reshape(-1)
    if not (s.shape == e.shape == r.shape):
        raise DimensionError("segment starts, ends and rates differ in length")
    if not (np.all(np.isfinite(s)) and np.all(np.isfinite(e))):
        raise RepresentationError("segments must be bounded; unbounded sources need the time-homogeneous flag")
    if np.any(e <= s):
        raise DomainError("segments need start < end")
    if s.size <= 1:
        return s, e, r
    bps = np.unique(np.concatenate([s, e]))
    out_s, out_e, out_r = [], [], []
    for lo, hi in zip(bps[:-1], bps[1:]):
        cover = (s <= lo) & (e >= hi)
        if not cover.any():
            continue
        rate = 0j
        for rj in r[cover]:
            rate += rj
        out_s.append(lo)
        out_e.append(hi)
        out_r.append(rate)
    return np.array(out_s), np.array(out_e), np.array(out_r, dtype=complex)


@dataclass(frozen=True, eq=False)
class SpaceTimeMeasure:
    """Finite sum of separable terms ``spatial (x) temporal``."""

    dimension: int
    terms: tuple = ()

    def __post_init__(self):
        terms = tuple((m, p) for m, p in self.terms)
        for m, p in terms:
            if m.dimension != self.dimension:
                raise DimensionError(f"term of dimension {m.dimension} in a {self.dimension}-d measure")
            if not isinstance(p, TemporalProfile):
                raise DomainError("temporal factor must be a TemporalProfile")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def empty(cls, dimension: int) -> SpaceTimeMeasure:
        return cls(dimension, ())

    @classmethod
    def separable(cls, spatial: SpectralMeasure, temporal: TemporalProfile) -> SpaceTimeMeasure:
        return cls(spatial.dimension, ((spatial, temporal),))

    def __add__(self, other: SpaceTimeMeasure) -> SpaceTimeMeasure:
        if other.dimension != self.dimension:
            raise DimensionError(f"dimension {self.dimension} != {other.dimension}")
        return SpaceTimeMeasure(self.dimension, self.terms + other.terms)

    def __mul__(self, c) -> SpaceTimeMeasure:
        return SpaceTimeMeasure(self.dimension, tuple((m * c, p) for m, p in self.terms))

    __rmul__ = __mul__

    @property
    def is_empty(self) -> bool:
        return all(m.is_empty or p.is_empty for m, p in self.terms)

    @property
    def support_lower_bound(self) -> float:
        return min((p.support_lower_bound for _, p in self.terms), default=math.inf)

    @property
    def supported_nonneg(self) -> bool:
        """The t >= 0 support predicate."""
        return all(p.support_lower_bound >= 0 for _, p in self.terms)

    def jump_times(self) -> np.ndarray:
        times = [p.atom_times for m, p in self.terms if not m.is_empty]
        return np.unique(np.concatenate(times)) if times else np.zeros(0)

    def breakpoints(self) -> np.ndarray:
        pts = [p.breakpoints() for m, p in self.terms if not m.is_empty]
        return np.unique(np.concatenate(pts)) if pts else np.zeros(0)

    def spatial_points(self) -> np.ndarray:
        pts = [m.support_points() for m, _ in self.terms]
        return np.vstack(pts) if pts else np.zeros((0, self.dimension))

    def multiply_spatial(self, func) -> SpaceTimeMeasure:
        return SpaceTimeMeasure(self.dimension, tuple((m.multiply(func), p) for m, p in self.terms))

    def shifted(self, dt: float) -> SpaceTimeMeasure:
        return SpaceTimeMeasure(self.dimension, tuple((m, p.shifted(dt)) for m, p in self.terms))

    def total_variation(self) -> float:
        return float(sum(m.total_variation() * p.total_variation() for m, p in self.terms))

    def pair_interval(self, f: TestFunctional, s: float, t: float) -> complex:
        """<Y, f (x) 1_(s, t]>."""
        return sum((pair(m, f) * p.mass(s, t) for m, p in self.terms), 0j)

    def slice_at(self, t: float) -> SpectralMeasure:
        """Spatial measure carried by the temporal atoms at exactly ``t``."""
        out = SpectralMeasure.empty(self.dimension)
        for m, p in self.terms:
            a = p.atom_mass_at(t)
            if a != 0:
                out = out + m * a
        return out


@dataclass(frozen=True, eq=False)
class TestFunctional:
    """Spatial test function given by its frequency-side weight ``hat = F^{-1}(phi)``.

    ``hat`` maps an ``(n, d)`` frequency array to complex values.
    """

    __test__ = False  # not a pytest class

    dimension: int
    hat: Callable[[np.ndarray], np.ndarray]
    kind: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, xi) -> np.ndarray:
        return np.asarray(self.hat(as_frequencies(xi, self.dimension)), dtype=complex)

    @classmethod
    def point_evaluation(cls, x0) -> TestFunctional:
        """Pairing yields the synthesized field value at ``x0``."""
        x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        d = x0.shape[0]
        norm = (2 * np.pi) ** (-d / 2)
        return cls(d, lambda xi: norm * np.exp(1j * (xi @ x0)), "point", {"x0": x0.tolist()})

    @classmethod
    def gaussian(cls, center, width: float) -> TestFunctional:
        """phi(x) = exp(-|x - center|^2 / (2 width^2)).

        Its inverse transform is ``width^d exp(i center.xi) exp(-width^2 |xi|^2 / 2)``.
        """
        c = np.atleast_1d(np.asarray(center, dtype=float))
        d = c.shape[0]
        if width <= 0:
            raise DomainError("gaussian width must be positive")
        amp = float(width) ** d

        def hat(xi):
            return amp * np.exp(1j * (xi @ c) - 0.5 * width**2 * np.sum(xi * xi, axis=1))

        return cls(d, hat, "gaussian", {"center": c.tolist(), "width": float(width)})

    @classmethod
    def tabulated(cls, grid: FrequencyGrid, values) -> TestFunctional:
        """Nearest-node lookup on ``grid``; zero off the grid."""
        vals = np.asarray(values, dtype=complex).reshape(grid.counts)
        starts, h, n = np.array(grid.starts), np.array(grid.spacings), np.array(grid.counts)

        def hat(xi):
            k = np.rint((xi - starts) / h).astype(int)
            inside = np.all((k >= 0) & (k < n), axis=1)
            out = np.zeros(xi.shape[0], dtype=complex)
            if inside.any():
                out[inside] = vals[tuple(k[inside].T)]
            return out

        return cls(grid.dimension, hat, "tabulated", {})

    def decay_radius(self, level: float = 1e-300) -> float:
        """Radius beyond which a gaussian hat is below ``level`` in modulus."""
        if self.kind != "gaussian":
            raise DomainError("decay radius is only defined for gaussian functionals")
        w = self.params["width"]
        amp = w**self.dimension
        return math.sqrt(max(2.0 * math.log(amp / level), 0.0)) / w

    def translated(self, h) -> TestFunctional:
        """Functional of phi(. - h): its hat gains the factor exp(i h.xi)."""
        h = np.atleast_1d(np.asarray(h, dtype=float))
        if h.shape[0] != self.dimension:
            raise DimensionError("translation vector has the wrong dimension")
        base = self.hat
        return TestFunctional(self.dimension, lambda xi: np.exp(1j * (xi @ h)) * base(xi), self.kind + "+shift", {**self.params, "shift": h.tolist()})

    def conj_reflected(self) -> TestFunctional:
        """The functional with hat(xi) = conj(hat(-xi))."""
        base = self.hat
        return TestFunctional(self.dimension, lambda xi: np.conj(base(-xi)), self.kind + "~", dict(self.params))

    def to_record(self) -> dict:
        return {"kind": self.kind, **self.params}


def pair(m: SpectralMeasure, f: TestFunctional) -> complex:
    """Integral of ``f.hat`` against the measure."""
    if m.dimension != f.dimension:
        raise DimensionError(f"measure dimension {m.dimension} != functional dimension {f.dimension}")
    acc = 0j
    if m.n_atoms:
        acc += complex(np.sum(f(m.locations) * m.weights))
    if m.grid is not None:
        acc += complex(np.sum(f(m.grid.nodes()) * m.density.ravel())) * m.grid.cell_volume
    return acc


def total_variation(m) -> float:
    return m.total_variation()


def weighted_mass(st: SpaceTimeMeasure, n_space: int, n_time: int) -> float:
    """Integral of (1+|xi|^2)^-n_space (1+t^2)^-n_time against |st|."""
    total = 0.0
    for m, p in st.terms:
        locs, w = m.flat()
        spatial = float(np.sum(np.abs(w) * (1.0 + np.sum(locs * locs, axis=1)) ** (-n_space)))
        temporal = float(np.sum(np.abs(p.atom_masses) * (1.0 + p.atom_times**2) ** (-n_time)))
        for a, b, r in zip(p.seg_starts, p.seg_ends, p.seg_rates):
            val, _ = integrate.quad(lambda t: (1.0 + t * t) ** (-n_time), a, b, epsabs=0.0, epsrel=1e-10, limit=200)
            temporal += abs(r) * val
        total += spatial * temporal
    return total


def restrict_nonneg_time(st: SpaceTimeMeasure, closed: bool = True) -> SpaceTimeMeasure:
    """Restriction to t >= 0 (t > 0 when ``closed`` is False)."""
    terms = []
    for m, p in st.terms:
        q = p.restrict(0.0, closed)
        if not q.is_empty:
            terms.append((m, q))
    return SpaceTimeMeasure(st.dimension, tuple(terms))


def primitive_1d(p: TemporalProfile, t: float) -> complex:
    """The cadlag primitive vanishing at 0: mu((0, t]) for t >= 0, -mu((t, 0)) for t < 0."""
    if t >= 0:
        # accumulation order matches the Duhamel kernel so g = 0 agrees bitwise
        acc = 0j
        for tk, ak in zip(p.atom_times, p.atom_masses):
            if 0 < tk <= t:
                acc = acc + ak
        for a, b, r in zip(p.seg_starts, p.seg_ends, p.seg_rates):
            lo = max(a, 0.0)
            hi = min(b, t)
            if hi > lo:
                acc = acc + r * (hi - lo)
        return acc
    acc = 0j
    for tk, ak in zip(p.atom_times, p.atom_masses):
        if t < tk < 0:
            acc += ak
    for a, b, r in zip(p.seg_starts, p.seg_ends, p.seg_rates):
        overlap = min(b, 0.0) - max(a, t)
        if overlap > 0:
            acc += r * overlap
    return -acc


def _symmetric_grid(grid: FrequencyGrid) -> FrequencyGrid:
    """Smallest origin-symmetric grid with the same lattice containing ``grid``."""
    starts, counts = [], []
    for s, h, n in zip(grid.starts, grid.spacings, grid.counts):
        off = 2 * s / h
        if abs(off - round(off)) > 1e-9:
            raise RepresentationError("grid lattice is not symmetric about the origin")
        reach = max(abs(s), abs(s + h * (n - 1)))
        m = int(round(reach / h * 2))  # 2*reach/h nodes span
        starts.append(-m * h / 2)
        counts.append(m + 1)
    return FrequencyGrid(tuple(starts), grid.spacings, tuple(counts))


def hermitian_symmetrize(m: SpectralMeasure) -> SpectralMeasure:
    """(m + conj-reflected m) / 2."""
    atoms = SpectralMeasure(
        m.dimension,
        np.vstack([m.locations, -m.locations]),
        np.concatenate([0.5 * m.weights, 0.5 * np.conj(m.weights)]),
    )
    if m.grid is None:
        return atoms
    sym = _symmetric_grid(m.grid)
    dens = np.zeros(sym.counts, dtype=complex)
    offs = tuple(int(round((s0 - s1) / h)) for s0, s1, h in zip(m.grid.starts, sym.starts, sym.spacings))
    dens[tuple(slice(o, o + n) for o, n in zip(offs, m.grid.counts))] = m.density
    dens = 0.5 * (dens + np.conj(dens[(slice(None, None, -1),) * m.dimension]))
    return atoms + SpectralMeasure.on_grid(sym, dens)


def convexity_inequality_holds(x, y, m: int, rtol: float = 1e-12) -> bool:
    """(1+|x|^2)^m <= 2^(m-1) [(1+2|x-y|^2)^m + 2^m |y|^(2m)], with rounding slack ``rtol``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lhs = (1.0 + x @ x) ** m
    dxy = x - y
    rhs = 2.0 ** (m - 1) * ((1.0 + 2.0 * (dxy @ dxy)) ** m + 2.0**m * (y @ y) ** m)
    return bool(lhs <= rhs * (1.0 + rtol))
