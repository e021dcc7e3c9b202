"""Random problem generators shared by the test suite and fixture scripts.

Every generator takes a ``numpy.random.Generator`` so runs are reproducible.
"""

from __future__ import annotations

import numpy as np

from .evolution import EvolutionProblem
from .measures import SpaceTimeMeasure, SpectralMeasure, TemporalProfile, TestFunctional
from .symbols import Advection, Damping, FractionalLaplacian, FractionalMatern, LinearCombination, Symbol

SYMBOL_KINDS = ("fractional_matern", "fractional_laplacian", "advection", "damping", "sum")


def random_complex(rng: np.random.Generator, scale: float = 1.0) -> complex:
    return complex(rng.normal(scale=scale), rng.normal(scale=scale))


def random_symbol(rng: np.random.Generator, kind: str | None = None, kappa_max: float = 2.0, alpha_max: float = 2.0) -> Symbol:
    """Hermitian parabolic 1-D symbol; matern/damping parameters drawn from [0, kappa_max]."""
    kind = kind or SYMBOL_KINDS[rng.integers(len(SYMBOL_KINDS))]
    if kind == "fractional_matern":
        return FractionalMatern(float(rng.uniform(0, alpha_max)), float(rng.uniform(0, kappa_max)))
    if kind == "fractional_laplacian":
        return FractionalLaplacian(float(rng.uniform(0, alpha_max)))
    if kind == "advection":
        return Advection((float(rng.uniform(-1, 1)),))
    if kind == "damping":
        return Damping(float(rng.uniform(0, kappa_max)))
    parts = [random_symbol(rng, k, kappa_max, alpha_max) for k in ("fractional_matern", "damping", "advection")]
    coefs = rng.uniform(0, 1, size=3)
    return LinearCombination(tuple((float(c), s) for c, s in zip(coefs, parts)))


def strictly_parabolic_symbol(rng: np.random.Generator, kappa: float = 0.5) -> Symbol:
    """Random symbol with Re g >= kappa everywhere."""
    base = random_symbol(rng, kind=("fractional_matern", "fractional_laplacian", "sum")[rng.integers(3)])
    return LinearCombination(((1.0, Damping(kappa)), (1.0, base), (1.0, Advection((float(rng.uniform(-1, 1)),)))))


def random_spatial(rng: np.random.Generator, n_atoms: int, xi_max: float = 2.0, hermitian: bool = False) -> SpectralMeasure:
    xi = rng.uniform(-xi_max, xi_max, size=n_atoms)
    w = np.array([random_complex(rng) for _ in range(n_atoms)])
    if hermitian:
        xi = np.concatenate([xi, -xi])
        w = np.concatenate([w, np.conj(w)]) / 2
    return SpectralMeasure(1, xi.reshape(-1, 1), w)


def random_profile(
    rng: np.random.Generator,
    max_atoms: int = 5,
    max_segments: int = 3,
    t_range=(0.0, 3.0),
    open_at_zero: bool = True,
) -> TemporalProfile:
    """Up to ``max_atoms`` atoms and ``max_segments`` segments inside ``t_range``.

    With ``open_at_zero`` no atom sits exactly at t = 0.
    """
    lo, hi = t_range
    n_a = int(rng.integers(0, max_atoms + 1))
    n_s = int(rng.integers(0, max_segments + 1))
    if n_a + n_s == 0:
        n_s = 1
    atoms = []
    for _ in range(n_a):
        t = float(rng.uniform(lo, hi))
        if open_at_zero and t == 0.0:
            t = 1e-3
        atoms.append((t, random_complex(rng)))
    segs = []
    for _ in range(n_s):
        a, b = sorted(rng.uniform(lo, hi, size=2))
        if b - a < 1e-3:
            b = a + 0.1
        segs.append((float(a), float(b), random_complex(rng)))
    return TemporalProfile.build(atoms, segs)


def random_source(rng: np.random.Generator, n_terms: int = 2, t_range=(0.0, 3.0), max_atoms: int = 5, max_segments: int = 3, xi_max: float = 2.0) -> SpaceTimeMeasure:
    st = SpaceTimeMeasure.empty(1)
    for _ in range(n_terms):
        m = random_spatial(rng, int(rng.integers(1, 3)), xi_max)
        st = st + SpaceTimeMeasure.separable(m, random_profile(rng, max_atoms, max_segments, t_range))
    return st


def random_problem(rng: np.random.Generator, mode: str = "duhamel", xi_max: float = 2.0) -> EvolutionProblem:
    """Admissible 1-D problem for ``mode`` with at most 5 atoms and 3 segments per term."""
    if mode == "steady":
        sym = strictly_parabolic_symbol(rng, float(rng.uniform(0.5, 1.5)))
        src = random_source(rng, t_range=(-3.0, 3.0), xi_max=xi_max)
        lam = random_spatial(rng, 1, xi_max) if rng.uniform() < 0.5 else None
        return EvolutionProblem(sym, src, None, lam)
    sym = random_symbol(rng)
    src = random_source(rng, xi_max=xi_max)
    initial = random_spatial(rng, int(rng.integers(1, 3)), xi_max) if mode == "cauchy" else None
    return EvolutionProblem(sym, src, initial)


def random_asymptotic_problem(rng: np.random.Generator, kappa: float = 0.5) -> EvolutionProblem:
    """Strictly parabolic problem with past source mass, V0 and sometimes lambda."""
    sym = strictly_parabolic_symbol(rng, kappa)
    src = random_source(rng, t_range=(-3.0, 3.0))
    initial = random_spatial(rng, int(rng.integers(1, 3)))
    lam = random_spatial(rng, 1) if rng.uniform() < 0.5 else None
    return EvolutionProblem(sym, src, initial, lam)


def random_gaussian(rng: np.random.Generator) -> TestFunctional:
    return TestFunctional.gaussian([float(rng.uniform(-1, 1))], float(rng.uniform(0.3, 1.5)))


def unit_functional(xi0, dimension: int = 1) -> TestFunctional:
    """Functional with hat(xi0) = 1: a one-node tabulated grid at ``xi0``."""
    from .measures import FrequencyGrid

    xi0 = np.atleast_1d(np.asarray(xi0, dtype=float))
    grid = FrequencyGrid(tuple(xi0.tolist()), (1.0,) * dimension, (1,) * dimension)
    return TestFunctional.tabulated(grid, [1.0])
