"""Adaptive quadrature of piecewise-smooth complex integrands."""

from __future__ import annotations

import warnings

import numpy as np
from scipy import integrate

from .errors import QuadratureError

EPSREL = 1e-10
EPSABS = 1e-14


def magnitude(func, a: float, b: float, n: int = 65) -> float:
    """Rough size of int |func| over [a, b] from ``n`` equispaced samples."""
    if b <= a:
        return 0.0
    vals = [abs(func(t)) for t in np.linspace(a, b, n)]
    return float(max(vals)) * (b - a)


def integrate_piecewise(func, a: float, b: float, breakpoints=(), epsrel: float = EPSREL, epsabs: float = EPSABS, limit: int = 200, relative_to_magnitude: bool = False) -> complex:
    """Integrate ``func`` over ``[a, b]`` after splitting at every breakpoint inside.

    Splitting at the known jump times keeps each adaptive run on a smooth
    piece. With ``relative_to_magnitude`` the absolute tolerance becomes
    ``epsrel`` times the sampled size of ``int |func|``, which is what keeps
    integrals that cancel to ~0 from chasing roundoff. Non-convergence raises
    :class:`QuadratureError` naming the piece.
    """
    if relative_to_magnitude:
        epsabs = max(epsabs, epsrel * magnitude(func, min(a, b), max(a, b)))
    if b < a:
        return -integrate_piecewise(func, b, a, breakpoints, epsrel, epsabs, limit)
    bps = np.asarray(breakpoints, dtype=float)
    inner = np.unique(bps[(bps > a) & (bps < b)])
    edges = np.concatenate([[a], inner, [b]])
    total = 0j
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi <= lo:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("error", integrate.IntegrationWarning)
            try:
                val, _ = integrate.quad(func, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit, complex_func=True)
            except integrate.IntegrationWarning as exc:
                raise QuadratureError(f"quadrature did not converge on [{lo:.17g}, {hi:.17g}]: {exc}") from exc
        total += val
    return total
