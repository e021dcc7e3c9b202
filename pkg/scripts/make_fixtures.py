"""Write the JSON experiment fixtures under fixtures/.

Run from the repository root: ``python3 scripts/make_fixtures.py``.
The manifest records the exit code ``verify`` must return for each fixture.
"""

import json
import math
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "fixtures"


def c(z):
    z = complex(z)
    return [z.real, z.imag]


def atoms(*pairs):
    return [{"xi": [float(x)], "w": c(w)} for x, w in pairs]


def unit_at(xi0, fid="unit"):
    # tabulated functional with hat(xi0) = 1
    return {"id": fid, "kind": "tabulated", "grid": {"starts": [xi0], "spacings": [1.0], "counts": [1]}, "values": [[1.0, 0.0]]}


GAUSS = {"id": "gauss", "kind": "gaussian", "center": [0.3], "width": 0.8}
POINT = {"id": "point0", "kind": "point", "x0": [0.0]}
FIELD_GRID = {"starts": [-8.0], "spacings": [0.25], "counts": [64]}

MATERN = {"kind": "sum", "terms": [
    {"coef": 1.0, "symbol": {"kind": "fractional_matern", "alpha": 2.0, "kappa": 1.0}},
    {"coef": 1.0, "symbol": {"kind": "advection", "b": [0.5]}},
]}

fixtures = {}

fixtures["duhamel_atom"] = {
    "dimension": 1,
    "mode": "duhamel",
    "symbol": {"kind": "damping", "c": 1.0},
    "source": {"terms": [{"spatial": {"atoms": atoms((0.5, 1.0))}, "temporal": {"atoms": [{"t": 0.5, "mass": c(2.0)}]}}]},
    "functionals": [unit_at(0.5), GAUSS],
    "time_grid": {"from": 0.0, "to": 1.5, "count": 16},
    "verify": {"window": [0.0, 1.5]},
    "oracle": {"method": "crank_nicolson", "dt": 1e-4, "t_end": 1.5},
}

fixtures["duhamel_segments"] = {
    "dimension": 1,
    "mode": "duhamel",
    "symbol": MATERN,
    "source": {"terms": [
        {"spatial": {"atoms": atoms((1.0, 0.5 + 0.25j), (-1.0, 0.5 - 0.25j))},
         "temporal": {"atoms": [{"t": 0.8, "mass": c(1.5)}], "segments": [{"from": 0.2, "to": 1.2, "rate": c(1.0)}]}},
        {"spatial": {"atoms": atoms((0.0, 0.7))},
         "temporal": {"segments": [{"from": 0.0, "to": 2.0, "rate": c(-0.4)}, {"from": 1.0, "to": 1.7, "rate": c(0.9)}]}},
    ]},
    "functionals": [GAUSS, POINT],
    "time_grid": {"from": 0.0, "to": 2.0, "count": 21},
    "spatial_grid": FIELD_GRID,
    "field_times": [0.5, 1.0, 2.0],
    "verify": {"window": [0.0, 2.0]},
    "oracle": {"method": "simpson", "n_panels": 256, "t_end": 1.5},
}

fixtures["cauchy_decay"] = {
    "dimension": 1,
    "mode": "cauchy",
    "symbol": {"kind": "sum", "terms": [
        {"coef": 1.0, "symbol": {"kind": "fractional_laplacian", "alpha": 1.5}},
        {"coef": 0.3, "symbol": {"kind": "damping", "c": 1.0}},
    ]},
    "initial": {"atoms": atoms((0.7, 1.0 + 0.5j), (-0.7, 1.0 - 0.5j), (0.0, 0.25))},
    "source": {"terms": [
        {"spatial": {"atoms": atoms((1.3, 0.2j), (-1.3, -0.2j))},
         "temporal": {"atoms": [{"t": 0.4, "mass": c(1.0)}], "segments": [{"from": 0.0, "to": 0.9, "rate": c(0.5)}]}},
    ]},
    "functionals": [GAUSS, POINT],
    "time_grid": {"from": 0.0, "to": 1.0, "count": 11},
    "spatial_grid": FIELD_GRID,
    "field_times": [0.0, 0.4, 1.0],
    "verify": {"window": [0.1, 1.0]},
    "oracle": {"method": "crank_nicolson", "dt": 1e-4, "t_end": 1.0},
}

fixtures["steady_homogeneous"] = {
    "dimension": 1,
    "mode": "steady",
    "symbol": {"kind": "damping", "c": 2.0},
    "initial": {"atoms": atoms((0.0, 1.0))},
    "source": {"terms": [], "time_homogeneous": {"atoms": atoms((0.0, 1.0))}},
    "functionals": [unit_at(0.0), GAUSS],
    "time_grid": {"from": 0.0, "to": 10.0, "count": 50},
    "verify": {"window": [-1.0, 2.0]},
    "asymptotics": {"shifts": [[0.0], [math.pi], [1.0]], "eps": 1e-6},
}

fixtures["steady_mixed"] = {
    "dimension": 1,
    "mode": "steady",
    "symbol": MATERN,
    "initial": {"atoms": atoms((1.0, 0.3), (-1.0, 0.3), (math.sqrt(2.0), 0.2), (-math.sqrt(2.0), 0.2))},
    "source": {"terms": [
        {"spatial": {"atoms": atoms((1.0, 1.0), (-1.0, 1.0))},
         "temporal": {"atoms": [{"t": -1.0, "mass": c(1.0)}, {"t": 0.5, "mass": c(-0.5)}],
                      "segments": [{"from": -2.0, "to": 1.0, "rate": c(0.6)}]}},
        {"spatial": {"atoms": atoms((math.sqrt(2.0), 0.4j), (-math.sqrt(2.0), -0.4j))},
         "temporal": {"segments": [{"from": -0.5, "to": 3.0, "rate": c(1.0)}]}},
    ],
        "time_homogeneous": {"atoms": atoms((0.5, 0.2), (-0.5, 0.2))}},
    "functionals": [GAUSS, POINT],
    "time_grid": {"from": 0.0, "to": 10.0, "count": 50},
    "spatial_grid": FIELD_GRID,
    "field_times": [0.0, 1.0],
    "verify": {"window": [-2.5, 3.5]},
    "asymptotics": {"shifts": [[0.0], [math.pi], [1.0]], "eps": 1e-6},
}

fixtures["asymptotics_two_mode"] = {
    "dimension": 1,
    "mode": "steady",
    "symbol": {"kind": "fractional_matern", "alpha": 2.0, "kappa": 1.0},
    "initial": {"atoms": atoms((0.0, 1.0), (math.sqrt(2.0), 1.0))},
    "source": {"terms": []},
    "functionals": [unit_at(0.0, "unit0"), {"id": "tab", "kind": "tabulated",
                    "grid": {"starts": [0.0], "spacings": [math.sqrt(2.0)], "counts": [2]}, "values": [[1.0, 0.0], [1.0, 0.0]]}],
    "time_grid": {"from": 0.0, "to": 6.0, "count": 61},
    "verify": {"window": [0.0, 3.0]},
}

# heat kernel: V0 = exp(-xi^2/2) on [-16, 16), g = |xi|^2
n = 1024
h = 32.0 / n
xi = -16.0 + h * np.arange(n)
fixtures["heat_kernel"] = {
    "dimension": 1,
    "mode": "cauchy",
    "symbol": {"kind": "fractional_laplacian", "alpha": 2.0},
    "initial": {"atoms": [], "grid": {"starts": [-16.0], "spacings": [h], "counts": [n]},
                "density": [c(math.exp(-v * v / 2)) for v in xi]},
    "source": {"terms": []},
    "functionals": [POINT, {"id": "point1", "kind": "point", "x0": [1.0]}],
    "time_grid": {"from": 0.0, "to": 1.0, "count": 5},
    "spatial_grid": {"starts": [-4.0], "spacings": [0.125], "counts": [65]},
    "field_times": [0.5],
    "verify": {"window": [0.1, 1.0], "n_test": 3},
}

fixtures["zero_symbol_jump"] = {
    "dimension": 1,
    "mode": "duhamel",
    "symbol": {"kind": "damping", "c": 0.0},
    "source": {"terms": [{"spatial": {"atoms": atoms((0.25, 1.0))}, "temporal": {"atoms": [{"t": 0.5, "mass": c(2.0)}]}}]},
    "functionals": [unit_at(0.25)],
    "time_grid": {"from": 0.0, "to": 1.0, "count": 11},
    "mollifier": {"depth": 20, "times": [0.5]},
    "verify": {"window": [0.0, 1.0]},
}

corrupted = json.loads(json.dumps(fixtures["duhamel_segments"]))
corrupted["verify"]["corrupt_scale"] = 1.01
fixtures["corrupted_segments"] = corrupted

fixtures["steady_laplacian_origin"] = {
    "dimension": 1,
    "mode": "steady",
    "symbol": {"kind": "fractional_laplacian", "alpha": 1.0},
    "source": {"terms": [{"spatial": {"atoms": atoms((0.0, 1.0), (1.0, 0.5))}, "temporal": {"segments": [{"from": 0.0, "to": 1.0, "rate": c(1.0)}]}}]},
    "functionals": [GAUSS],
    "time_grid": {"from": 0.0, "to": 1.0, "count": 5},
}

manifest = {name: 0 for name in fixtures}
manifest["corrupted_segments"] = 4
manifest["steady_laplacian_origin"] = 3

OUT.mkdir(exist_ok=True)
for name, doc in fixtures.items():
    (OUT / f"{name}.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
(OUT / "manifest.json").write_text(json.dumps({"verify_exit_codes": manifest}, indent=2, sort_keys=True) + "\n")
print(f"wrote {len(fixtures)} fixtures to {OUT}")
