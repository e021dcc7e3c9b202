"""Experiment configuration: JSON documents with complex numbers as ``[re, im]``.

Every parse error is raised as :class:`ConfigError` carrying the dotted path
of the offending entry (``source.terms[0].temporal.segments[1].to``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, EvolutionError
from .evolution import MODES, EvolutionProblem
from .measures import FrequencyGrid, SpaceTimeMeasure, SpectralMeasure, TemporalProfile, TestFunctional
from .symbols import from_record
from .transform import SpatialGrid

__all__ = ["ExperimentConfig", "load_config", "parse_config"]


def _get(rec: dict, key: str, path: str, default=...):
    if not isinstance(rec, dict):
        raise ConfigError(path, "expected an object")
    if key in rec:
        return rec[key]
    if default is ...:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required entry")
    return default


def _real(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"expected a real number, got {v!r}")
    if not np.isfinite(v):
        raise ConfigError(path, "value must be finite")
    return float(v)


def _complex(v, path: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(_real(v, path))
    if isinstance(v, list) and len(v) == 2:
        return complex(_real(v[0], path + "[0]"), _real(v[1], path + "[1]"))
    raise ConfigError(path, f"expected a complex number as [re, im], got {v!r}")


def _vector(v, d: int, path: str) -> list:
    if isinstance(v, (int, float)) and not isinstance(v, bool) and d == 1:
        v = [v]
    if not isinstance(v, list) or len(v) != d:
        raise ConfigError(path, f"expected a vector of length {d}")
    return [_real(c, f"{path}[{i}]") for i, c in enumerate(v)]


def _cpair(z: complex) -> list:
    return [z.real, z.imag]


def _grid(rec, d: int, path: str) -> FrequencyGrid:
    starts = _vector(_get(rec, "starts", path), d, path + ".starts")
    spacings = _vector(_get(rec, "spacings", path), d, path + ".spacings")
    counts = _get(rec, "counts", path)
    if not isinstance(counts, list) or len(counts) != d or not all(isinstance(n, int) and n >= 1 for n in counts):
        raise ConfigError(path + ".counts", f"expected {d} positive integers")
    try:
        return FrequencyGrid(tuple(starts), tuple(spacings), tuple(counts))
    except EvolutionError as exc:
        raise ConfigError(path, str(exc)) from exc


def _grid_record(g) -> dict:
    return {"starts": list(g.starts), "spacings": list(g.spacings), "counts": list(g.counts)}


def _measure(rec, d: int, path: str) -> SpectralMeasure:
    atoms = _get(rec, "atoms", path, [])
    if not isinstance(atoms, list):
        raise ConfigError(path + ".atoms", "expected a list")
    locs, wts = [], []
    for i, a in enumerate(atoms):
        p = f"{path}.atoms[{i}]"
        locs.append(_vector(_get(a, "xi", p), d, p + ".xi"))
        key = "weight" if isinstance(a, dict) and "weight" in a and "w" not in a else "w"
        wts.append(_complex(_get(a, key, p), f"{p}.{key}"))
    grid = dens = None
    if "grid" in rec:
        grid = _grid(rec["grid"], d, path + ".grid")
        raw = _get(rec, "density", path)
        if not isinstance(raw, list) or len(raw) != grid.size:
            raise ConfigError(path + ".density", f"expected {grid.size} values in C order")
        dens = np.array([_complex(v, f"{path}.density[{i}]") for i, v in enumerate(raw)]).reshape(grid.counts)
    try:
        return SpectralMeasure(d, np.array(locs, dtype=float).reshape(-1, d), np.array(wts, dtype=complex), grid, dens)
    except EvolutionError as exc:
        raise ConfigError(path, str(exc)) from exc


def _measure_record(m: SpectralMeasure) -> dict:
    out = {"atoms": [{"xi": xi.tolist(), "w": _cpair(complex(w))} for xi, w in zip(m.locations, m.weights)]}
    if m.grid is not None:
        out["grid"] = _grid_record(m.grid)
        out["density"] = [_cpair(complex(v)) for v in m.density.ravel()]
    return out


def _profile(rec, path: str) -> TemporalProfile:
    atoms = []
    for i, a in enumerate(_get(rec, "atoms", path, [])):
        p = f"{path}.atoms[{i}]"
        atoms.append((_real(_get(a, "t", p), p + ".t"), _complex(_get(a, "mass", p), p + ".mass")))
    segs = []
    for i, s in enumerate(_get(rec, "segments", path, [])):
        p = f"{path}.segments[{i}]"
        lo, hi = _real(_get(s, "from", p), p + ".from"), _real(_get(s, "to", p), p + ".to")
        if not hi > lo:
            raise ConfigError(p, "segment needs from < to")
        segs.append((lo, hi, _complex(_get(s, "rate", p, 1.0), p + ".rate")))
    try:
        return TemporalProfile.build(atoms, segs)
    except EvolutionError as exc:
        raise ConfigError(path, str(exc)) from exc


def _functional(rec, d: int, path: str) -> TestFunctional:
    kind = _get(rec, "kind", path)
    if kind == "gaussian":
        width = _real(_get(rec, "width", path), path + ".width")
        if width <= 0:
            raise ConfigError(path + ".width", "must be positive")
        return TestFunctional.gaussian(_vector(_get(rec, "center", path, [0.0] * d), d, path + ".center"), width)
    if kind == "point":
        return TestFunctional.point_evaluation(_vector(_get(rec, "x0", path, [0.0] * d), d, path + ".x0"))
    if kind == "tabulated":
        grid = _grid(_get(rec, "grid", path), d, path + ".grid")
        raw = _get(rec, "values", path)
        if not isinstance(raw, list) or len(raw) != grid.size:
            raise ConfigError(path + ".values", f"expected {grid.size} values in C order")
        vals = [_complex(v, f"{path}.values[{i}]") for i, v in enumerate(raw)]
        f = TestFunctional.tabulated(grid, vals)
        f.params.update({"grid": _grid_record(grid), "values": [_cpair(v) for v in vals]})
        return f
    raise ConfigError(path + ".kind", f"unknown functional kind {kind!r} (gaussian, point, tabulated)")


def _time_grid(rec, path: str) -> dict:
    lo = _real(_get(rec, "from", path), path + ".from")
    hi = _real(_get(rec, "to", path), path + ".to")
    n = _get(rec, "count", path)
    if not isinstance(n, int) or n < 1:
        raise ConfigError(path + ".count", "expected a positive integer")
    if hi < lo or (n > 1 and hi == lo):
        raise ConfigError(path, "needs from < to (or from == to with count 1)")
    return {"from": lo, "to": hi, "count": n}


def _options(rec, path: str, spec: dict) -> dict:
    """Validate a flat options block against ``{key: (kind, default)}``."""
    rec = {} if rec is None else rec
    if not isinstance(rec, dict):
        raise ConfigError(path, "expected an object")
    unknown = sorted(set(rec) - set(spec))
    if unknown:
        raise ConfigError(f"{path}.{unknown[0]}", "unknown option")
    out = {}
    for key, (kind, default) in spec.items():
        p = f"{path}.{key}"
        v = rec.get(key, default)
        if v is None:
            out[key] = None
        elif kind == "real":
            out[key] = _real(v, p)
        elif kind == "int":
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(p, "expected an integer")
            out[key] = v
        elif kind == "str":
            if not isinstance(v, str):
                raise ConfigError(p, "expected a string")
            out[key] = v
        elif kind == "reals":
            if not isinstance(v, list):
                raise ConfigError(p, "expected a list")
            out[key] = [_real(x, f"{p}[{i}]") for i, x in enumerate(v)]
        else:  # raw JSON value, checked by the caller
            out[key] = v
    return out


_ORACLE = {"method": ("str", "crank_nicolson"), "dt": ("real", 1e-4), "t_end": ("real", None), "n_panels": ("int", 256)}
_ASYMP = {"shifts": ("raw", []), "eps": ("real", 1e-6)}
_MOLL = {"depth": ("int", 20), "times": ("reals", None)}
_VERIFY = {
    "window": ("reals", None),
    "n_test": ("int", 5),
    "increment_pairs": ("raw", None),
    "residual_tol": ("real", 1e-7),
    "increment_tol": ("real", 1e-8),
    "corrupt_scale": ("real", 1.0),
}


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    dimension: int
    mode: str
    problem: EvolutionProblem
    functionals: tuple  # (id, TestFunctional)
    time_grid: dict
    spatial_grid: SpatialGrid | None = None
    field_times: tuple = ()
    oracle: dict = field(default_factory=dict)
    asymptotics: dict = field(default_factory=dict)
    mollifier: dict = field(default_factory=dict)
    verify: dict = field(default_factory=dict)

    def times(self) -> np.ndarray:
        g = self.time_grid
        return np.linspace(g["from"], g["to"], g["count"])

    def normalized(self) -> dict:
        """Canonical JSON-ready form; parsing it yields an equivalent config."""
        prob = self.problem
        src = {
            "terms": [
                {"spatial": _measure_record(m), "temporal": p.to_record()} for m, p in prob.source.terms
            ]
        }
        if prob.time_homogeneous is not None:
            src["time_homogeneous"] = _measure_record(prob.time_homogeneous)
        out = {
            "dimension": self.dimension,
            "mode": self.mode,
            "symbol": prob.symbol.to_record(),
            "source": src,
            "functionals": [{"id": fid, **f.to_record()} for fid, f in self.functionals],
            "time_grid": dict(self.time_grid),
            "oracle": dict(self.oracle),
            "asymptotics": dict(self.asymptotics),
            "mollifier": dict(self.mollifier),
            "verify": dict(self.verify),
        }
        if prob.initial is not None:
            out["initial"] = _measure_record(prob.initial)
        if self.spatial_grid is not None:
            out["spatial_grid"] = _grid_record(self.spatial_grid)
            out["field_times"] = list(self.field_times)
        return out


def parse_config(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "expected a JSON object")
    d = _get(doc, "dimension", "")
    if not isinstance(d, int) or isinstance(d, bool) or not 1 <= d <= 3:
        raise ConfigError("dimension", "expected an integer in 1..3")
    try:
        sym = from_record(_get(doc, "symbol", ""), d)
    except ConfigError:
        raise
    except (EvolutionError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError("symbol", str(exc)) from exc

    src_rec = _get(doc, "source", "", {})
    terms = []
    for i, t in enumerate(_get(src_rec, "terms", "source", [])):
        p = f"source.terms[{i}]"
        terms.append((_measure(_get(t, "spatial", p), d, p + ".spatial"), _profile(_get(t, "temporal", p), p + ".temporal")))
    lam = None
    if "time_homogeneous" in src_rec:
        lam = _measure(src_rec["time_homogeneous"], d, "source.time_homogeneous")
    initial = _measure(doc["initial"], d, "initial") if "initial" in doc else None
    prob = EvolutionProblem(sym, SpaceTimeMeasure(d, tuple(terms)), initial, lam)

    mode = _get(doc, "mode", "", "cauchy" if initial is not None else "duhamel")
    if mode not in MODES:
        raise ConfigError("mode", f"expected one of {MODES}")

    funcs = []
    seen = set()
    for i, rec in enumerate(_get(doc, "functionals", "", [])):
        p = f"functionals[{i}]"
        fid = str(_get(rec, "id", p, f"f{i}"))
        if fid in seen:
            raise ConfigError(p + ".id", f"duplicate functional id {fid!r}")
        seen.add(fid)
        body = {k: v for k, v in rec.items() if k != "id"}
        funcs.append((fid, _functional(body, d, p)))
    if not funcs:
        raise ConfigError("functionals", "at least one functional is required")

    tg = _time_grid(_get(doc, "time_grid", ""), "time_grid")

    sgrid, ftimes = None, ()
    if "spatial_grid" in doc:
        g = _grid(doc["spatial_grid"], d, "spatial_grid")
        try:
            sgrid = SpatialGrid(g.starts, g.spacings, g.counts)
        except EvolutionError as exc:
            raise ConfigError("spatial_grid", str(exc)) from exc
        raw = doc.get("field_times", [tg["to"]])
        if not isinstance(raw, list):
            raise ConfigError("field_times", "expected a list")
        ftimes = tuple(_real(v, f"field_times[{i}]") for i, v in enumerate(raw))

    oracle = _options(doc.get("oracle"), "oracle", _ORACLE)
    if oracle["method"] not in ("implicit_euler", "crank_nicolson", "simpson"):
        raise ConfigError("oracle.method", "expected implicit_euler, crank_nicolson or simpson")
    if oracle["dt"] <= 0:
        raise ConfigError("oracle.dt", "must be positive")
    if oracle["t_end"] is None:
        oracle["t_end"] = tg["to"]
    if oracle["n_panels"] < 1:
        raise ConfigError("oracle.n_panels", "must be >= 1")

    asym = _options(doc.get("asymptotics"), "asymptotics", _ASYMP)
    if not isinstance(asym["shifts"], list):
        raise ConfigError("asymptotics.shifts", "expected a list of vectors")
    asym["shifts"] = [_vector(h, d, f"asymptotics.shifts[{i}]") for i, h in enumerate(asym["shifts"])]
    if asym["eps"] <= 0:
        raise ConfigError("asymptotics.eps", "must be positive")

    moll = _options(doc.get("mollifier"), "mollifier", _MOLL)
    if not 1 <= moll["depth"] <= 60:
        raise ConfigError("mollifier.depth", "expected an integer in 1..60")

    ver = _options(doc.get("verify"), "verify", _VERIFY)
    if ver["window"] is not None and (len(ver["window"]) != 2 or not ver["window"][1] > ver["window"][0]):
        raise ConfigError("verify.window", "expected [T0, T1] with T0 < T1")
    if ver["n_test"] < 1:
        raise ConfigError("verify.n_test", "must be >= 1")
    if ver["increment_pairs"] is not None:
        pairs = ver["increment_pairs"]
        if not isinstance(pairs, list):
            raise ConfigError("verify.increment_pairs", "expected a list of [s, t] pairs")
        out = []
        for i, st in enumerate(pairs):
            p = f"verify.increment_pairs[{i}]"
            if not isinstance(st, list) or len(st) != 2:
                raise ConfigError(p, "expected [s, t]")
            s, t = _real(st[0], p + "[0]"), _real(st[1], p + "[1]")
            if t < s:
                raise ConfigError(p, "needs s <= t")
            out.append([s, t])
        ver["increment_pairs"] = out

    return ExperimentConfig(d, mode, prob, tuple(funcs), tg, sgrid, ftimes, oracle, asym, moll, ver)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return parse_config(doc)
