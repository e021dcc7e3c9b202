"""Symbol functions g(xi) and the multiplier action of L_g on spectral data.

A symbol is evaluated on arrays of frequencies of shape ``(n, d)`` and
returns complex arrays of shape ``(n,)``. Every built-in kind is Hermitian
(real part even, imaginary part odd) and parabolic (real part >= 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, DomainError

__all__ = [
    "Symbol",
    "FractionalMatern",
    "FractionalLaplacian",
    "Advection",
    "Damping",
    "LinearCombination",
    "HermitianReport",
    "as_frequencies",
    "evaluate",
    "check_hermitian",
    "effective_kappa",
    "apply_symbol",
]


def as_frequencies(xi, dimension: int) -> np.ndarray:
    """Coerce ``xi`` to a float array of shape ``(n, dimension)``.

    A flat vector of length ``dimension`` is read as a single point; for
    ``dimension == 1`` a flat vector is read as a list of scalar frequencies.
    """
    arr = np.asarray(xi, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(-1, 1) if dimension == 1 else arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != dimension:
        raise DimensionError(
            f"expected frequencies of dimension {dimension}, got shape {np.shape(xi)}"
        )
    return arr


class Symbol:
    """Base class. Subclasses implement ``_values`` on validated ``(n, d)`` input."""

    dimension: int
    declared_kappa: float

    def __call__(self, xi) -> np.ndarray:
        return self._values(as_frequencies(xi, self.dimension))

    def _values(self, xi: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def real_part(self, xi) -> np.ndarray:
        return self(xi).real

    def __add__(self, other: Symbol) -> LinearCombination:
        return LinearCombination(((1.0, self), (1.0, other)))

    def __rmul__(self, coef: float) -> LinearCombination:
        return LinearCombination(((coef, self),))

    def to_record(self) -> dict:  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True)
class FractionalMatern(Symbol):
    """(kappa^2 + |xi|^2)^(alpha/2). Negative ``alpha`` needs ``kappa > 0``."""

    alpha: float
    kappa: float = 0.0
    dimension: int = 1

    def __post_init__(self):
        if self.kappa < 0:
            raise DomainError("FractionalMatern kappa must be >= 0")
        if self.alpha < 0 and self.kappa == 0:
            raise DomainError("FractionalMatern with alpha < 0 requires kappa > 0")

    @property
    def declared_kappa(self) -> float:
        # infimum of g over R^d: attained at xi = 0 when alpha >= 0, zero otherwise
        if self.alpha >= 0:
            return float(self.kappa**self.alpha)
        return 0.0

    def _values(self, xi):
        r2 = np.sum(xi * xi, axis=1)
        return ((self.kappa**2 + r2) ** (0.5 * self.alpha)).astype(complex)

    def to_record(self):
        return {"kind": "fractional_matern", "alpha": self.alpha, "kappa": self.kappa}


@dataclass(frozen=True)
class FractionalLaplacian(Symbol):
    """|xi|^alpha with alpha >= 0."""

    alpha: float
    dimension: int = 1

    def __post_init__(self):
        if self.alpha < 0:
            raise DomainError("FractionalLaplacian requires alpha >= 0")

    @property
    def declared_kappa(self) -> float:
        return 1.0 if self.alpha == 0 else 0.0

    def _values(self, xi):
        r = np.sqrt(np.sum(xi * xi, axis=1))
        return (r**self.alpha).astype(complex)

    def to_record(self):
        return {"kind": "fractional_laplacian", "alpha": self.alpha}


@dataclass(frozen=True)
class Advection(Symbol):
    """i b^T xi, the symbol of the transport term b . grad."""

    b: tuple

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(float(v) for v in np.atleast_1d(self.b)))

    @property
    def dimension(self) -> int:
        return len(self.b)

    @property
    def declared_kappa(self) -> float:
        return 0.0

    def _values(self, xi):
        return 1j * (xi @ np.asarray(self.b))

    def to_record(self):
        return {"kind": "advection", "b": list(self.b)}


@dataclass(frozen=True)
class Damping(Symbol):
    """Constant symbol c >= 0."""

    c: float
    dimension: int = 1

    def __post_init__(self):
        if self.c < 0:
            raise DomainError("Damping requires c >= 0")

    @property
    def declared_kappa(self) -> float:
        return float(self.c)

    def _values(self, xi):
        return np.full(xi.shape[0], complex(self.c))

    def to_record(self):
        return {"kind": "damping", "c": self.c}


@dataclass(frozen=True)
class LinearCombination(Symbol):
    """Real-coefficient combination sum_i coef_i * symbol_i."""

    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        terms = []
        for coef, sym in self.terms:
            if isinstance(coef, complex) or np.iscomplexobj(coef):
                raise DomainError("linear combination coefficients must be real")
            terms.append((float(coef), sym))
        if not terms:
            raise DomainError("linear combination needs at least one term")
        dims = {sym.dimension for _, sym in terms}
        if len(dims) != 1:
            raise DimensionError(f"terms have mixed dimensions {sorted(dims)}")
        object.__setattr__(self, "terms", tuple(terms))

    @property
    def dimension(self) -> int:
        return self.terms[0][1].dimension

    @property
    def declared_kappa(self) -> float:
        total = 0.0
        for coef, sym in self.terms:
            if isinstance(sym, Advection):
                continue
            if coef < 0:
                # no analytic lower bound survives a negative dissipative term
                return 0.0
            total += coef * sym.declared_kappa
        return total

    def _values(self, xi):
        out = np.zeros(xi.shape[0], dtype=complex)
        for coef, sym in self.terms:
            out += coef * sym._values(xi)
        return out

    def to_record(self):
        return {
            "kind": "sum",
            "terms": [{"coef": c, "symbol": s.to_record()} for c, s in self.terms],
        }


def evaluate(sym: Symbol, xi) -> complex:
    """g(xi) at a single frequency vector."""
    arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if arr.ndim != 1 or arr.shape[0] != sym.dimension:
        raise DimensionError(
            f"symbol has dimension {sym.dimension}, got point of shape {np.shape(xi)}"
        )
    return complex(sym(arr.reshape(1, -1))[0])


@dataclass(frozen=True)
class HermitianReport:
    passed: bool
    worst_violation: float
    witness: np.ndarray


def check_hermitian(
    sym: Symbol | Callable[[np.ndarray], np.ndarray],
    sample_points,
    tol: float = 1e-12,
    dimension: int | None = None,
) -> HermitianReport:
    """Sampled test of g(-xi) == conj(g(xi)).

    ``sym`` may be any callable mapping ``(n, d)`` frequency arrays to complex
    values; ``dimension`` is then required unless ``sym`` carries one.
    """
    d = dimension if dimension is not None else sym.dimension
    pts = as_frequencies(sample_points, d)
    if pts.shape[0] == 0:
        raise DomainError("check_hermitian needs at least one sample point")
    viol = np.abs(np.asarray(sym(-pts)) - np.conj(np.asarray(sym(pts))))
    k = int(np.argmax(viol))
    worst = float(viol[k])
    return HermitianReport(worst <= tol, worst, pts[k].copy())


def effective_kappa(sym: Symbol, sample_points, include_declared: bool = False) -> float:
    """Smallest real part of g over the sample points.

    With ``include_declared`` the result is additionally capped by the
    analytic bound ``sym.declared_kappa``.
    """
    pts = as_frequencies(sample_points, sym.dimension)
    if pts.shape[0] == 0:
        raise DomainError("effective_kappa needs at least one sample point")
    kappa = float(np.min(sym(pts).real))
    if include_declared:
        kappa = min(kappa, sym.declared_kappa)
    return kappa


def apply_symbol(sym: Symbol, m):
    """Multiplication measure g * m."""
    if m.dimension != sym.dimension:
        raise DimensionError(
            f"symbol dimension {sym.dimension} != measure dimension {m.dimension}"
        )
    return m.multiply(sym)


def from_record(record: dict, dimension: int) -> Symbol:
    """Build a symbol from its config record (see ``to_record``)."""
    kind = record.get("kind")
    if kind == "fractional_matern":
        return FractionalMatern(float(record["alpha"]), float(record.get("kappa", 0.0)), dimension)
    if kind == "fractional_laplacian":
        return FractionalLaplacian(float(record["alpha"]), dimension)
    if kind == "advection":
        b = tuple(float(v) for v in record["b"])
        if len(b) != dimension:
            raise DimensionError(f"advection vector has length {len(b)}, expected {dimension}")
        return Advection(b)
    if kind == "damping":
        return Damping(float(record["c"]), dimension)
    if kind == "sum":
        terms: Sequence = record["terms"]
        return LinearCombination(
            tuple((float(t["coef"]), from_record(t["symbol"], dimension)) for t in terms)
        )
    raise DomainError(f"unknown symbol kind {kind!r}")
