"""Physical-space synthesis and grid Fourier transforms.

Convention: ``F(phi)(xi) = (2 pi)^(-d/2) int exp(-i xi.x) phi(x) dx`` and the
inverse with ``exp(+i xi.x)``. No other normalization is offered.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError
from .measures import FrequencyGrid, SpectralMeasure

__all__ = ["SpatialGrid", "FieldSample", "synthesize_field", "forward_grid_transform", "GRID_NODE_CAP"]

GRID_NODE_CAP = 2**24
# nodes x atoms per block of the direct sum
_BLOCK = 2**22


@dataclass(frozen=True)
class SpatialGrid:
    starts: tuple
    spacings: tuple
    counts: tuple
    cap: int = GRID_NODE_CAP

    def __post_init__(self):
        starts = tuple(float(v) for v in np.atleast_1d(self.starts))
        spacings = tuple(float(v) for v in np.atleast_1d(self.spacings))
        counts = tuple(int(v) for v in np.atleast_1d(self.counts))
        if not (len(starts) == len(spacings) == len(counts)):
            raise DimensionError("grid starts, spacings and counts differ in length")
        if len(starts) > 3:
            raise DomainError("spatial grids are limited to d <= 3")
        if any(h <= 0 for h in spacings) or any(n < 1 for n in counts):
            raise DomainError("grid spacing must be > 0 and counts >= 1")
        if int(np.prod(counts)) > self.cap:
            raise DomainError(f"grid has {int(np.prod(counts))} nodes, cap is {self.cap}")
        object.__setattr__(self, "starts", starts)
        object.__setattr__(self, "spacings", spacings)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_axes(cls, axes) -> SpatialGrid:
        g = FrequencyGrid.from_axes(axes)
        return cls(g.starts, g.spacings, g.counts)

    @classmethod
    def centered(cls, length: float, count: int, dimension: int = 1) -> SpatialGrid:
        """``count`` nodes per axis covering ``[-length/2, length/2)``."""
        h = length / count
        return cls((-length / 2,) * dimension, (h,) * dimension, (count,) * dimension)

    @property
    def dimension(self) -> int:
        return len(self.starts)

    @property
    def axes(self) -> list:
        return [s + h * np.arange(n) for s, h, n in zip(self.starts, self.spacings, self.counts)]

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    def nodes(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


@dataclass(frozen=True, eq=False)
class FieldSample:
    grid: SpatialGrid
    values: np.ndarray
    time_tag: float = 0.0

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.size != self.grid.size:
            raise DimensionError(f"{vals.size} values for a grid of {self.grid.size} nodes")
        object.__setattr__(self, "values", vals.reshape(self.grid.counts))

    def write_csv(self, path) -> None:
        nodes = self.grid.nodes()
        vals = self.values.ravel()
        with open(path, "w", newline="") as fh:
            fh.write(f"# time_tag={self.time_tag:.17g}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"x{a + 1}" for a in range(self.grid.dimension)] + ["re", "im"])
            for x, v in zip(nodes, vals):
                w.writerow([f"{c:.17g}" for c in x] + [f"{v.real:.17g}", f"{v.imag:.17g}"])


def _direct_sum(x: np.ndarray, xi: np.ndarray, w: np.ndarray) -> np.ndarray:
    """sum_j w_j exp(i x.xi_j) for every row of ``x``; fixed summation order per node."""
    out = np.zeros(x.shape[0], dtype=complex)
    if xi.shape[0] == 0:
        return out
    step = max(1, _BLOCK // xi.shape[0])
    for lo in range(0, x.shape[0], step):
        phase = x[lo : lo + step] @ xi.T
        out[lo : lo + step] = np.exp(1j * phase) @ w
    return out


def _commensurate(fgrid: FrequencyGrid, sgrid: SpatialGrid) -> bool:
    if fgrid.counts != sgrid.counts:
        return False
    return all(
        abs(hx * hk * n - 2 * np.pi) <= 1e-12 * 2 * np.pi
        for hx, hk, n in zip(sgrid.spacings, fgrid.spacings, sgrid.counts)
    )


def _fft_density_sum(fgrid: FrequencyGrid, density: np.ndarray, sgrid: SpatialGrid) -> np.ndarray:
    """sum_k rho_k exp(i x_n.xi_k) on commensurate grids via an inverse FFT."""
    c = np.array(density, dtype=complex)
    d = fgrid.dimension
    for a in range(d):
        x0, k0 = sgrid.starts[a], fgrid.starts[a]
        hk, hx, n = fgrid.spacings[a], sgrid.spacings[a], fgrid.counts[a]
        shape = [1] * d
        shape[a] = n
        idx = np.arange(n).reshape(shape)
        c = c * np.exp(1j * x0 * hk * idx)
    s = np.fft.ifftn(c) * np.prod(fgrid.counts)
    for a in range(d):
        x0, k0 = sgrid.starts[a], fgrid.starts[a]
        hx, n = sgrid.spacings[a], sgrid.counts[a]
        shape = [1] * d
        shape[a] = n
        idx = np.arange(n).reshape(shape)
        s = s * np.exp(1j * (x0 * k0 + idx * hx * k0))
    return s


def synthesize_field(m: SpectralMeasure, grid: SpatialGrid, time_tag: float = 0.0, use_fft: bool = True) -> FieldSample:
    """Field ``x -> (2 pi)^(-d/2) int exp(i x.xi) dm(xi)`` sampled on ``grid``."""
    if m.dimension != grid.dimension:
        raise DimensionError(f"measure dimension {m.dimension} != grid dimension {grid.dimension}")
    x = grid.nodes()
    vals = _direct_sum(x, m.locations, m.weights)
    if m.grid is not None:
        if use_fft and _commensurate(m.grid, grid):
            vals = vals + _fft_density_sum(m.grid, m.density, grid).ravel() * m.grid.cell_volume
        else:
            vals = vals + _direct_sum(x, m.grid.nodes(), m.density.ravel()) * m.grid.cell_volume
    vals *= (2 * np.pi) ** (-m.dimension / 2)
    return FieldSample(grid, vals.reshape(grid.counts), time_tag)


def forward_grid_transform(f: FieldSample) -> SpectralMeasure:
    """Riemann-sum Fourier transform of a sampled field, as a grid density.

    Frequency nodes are ``2 pi k / (N h)`` per axis with ``k`` running over
    ``-floor(N/2) .. ceil(N/2) - 1`` (numpy ``fftshift`` order), so the output
    grid is commensurate with the input grid.
    """
    g = f.grid
    d = g.dimension
    spec = np.fft.fftn(f.values)
    spec = np.fft.fftshift(spec)
    starts, spacings = [], []
    for a in range(d):
        n, hx, x0 = g.counts[a], g.spacings[a], g.starts[a]
        hk = 2 * np.pi / (n * hx)
        kmin = -(n // 2)
        xi = hk * (kmin + np.arange(n))
        shape = [1] * d
        shape[a] = n
        spec = spec * np.exp(-1j * xi * x0).reshape(shape)
        starts.append(hk * kmin)
        spacings.append(hk)
    spec *= (2 * np.pi) ** (-d / 2) * np.prod(g.spacings)
    fg = FrequencyGrid(tuple(starts), tuple(spacings), g.counts)
    return SpectralMeasure.on_grid(fg, spec)
