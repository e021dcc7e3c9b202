import math

import numpy as np
import pytest

from cadlag_evolution.errors import DomainError, PreconditionError
from cadlag_evolution.evolution import EvolutionProblem, duhamel_snapshot
from cadlag_evolution.measures import FrequencyGrid, SpaceTimeMeasure, SpectralMeasure, TemporalProfile
from cadlag_evolution.oracle import StepperConfig, closed_form_modal, quadrature_duhamel, step_modal
from cadlag_evolution.symbols import Damping, FractionalLaplacian
from cadlag_evolution.testing import random_problem

XI0 = [0.5]


def decay_problem():
    return EvolutionProblem(Damping(1.0), None, SpectralMeasure.atom(XI0, 1.0))


def segment_problem(g=1.0, seg=(0.0, 1.0)):
    src = SpaceTimeMeasure.separable(SpectralMeasure.atom(XI0, 1.0), TemporalProfile.segment(*seg))
    return EvolutionProblem(Damping(g), src)


def error(method, dt, prob=None):
    prob = prob or decay_problem()
    v = step_modal(prob, StepperConfig(method, dt, 1.0)).values[0]
    return abs(v - math.exp(-1))


def test_implicit_euler_example():
    assert error("implicit_euler", 1e-4) <= 5e-5


def test_crank_nicolson_example():
    assert error("crank_nicolson", 1e-3) <= 1e-6


def test_implicit_euler_halving_ratio():
    errs = [error("implicit_euler", dt) for dt in (1e-2, 5e-3, 2.5e-3)]
    for a, b in zip(errs, errs[1:]):
        assert a / b == pytest.approx(2.0, rel=0.2)


@pytest.mark.parametrize("method,order", [("implicit_euler", 1), ("crank_nicolson", 2)])
def test_order_of_convergence(method, order):
    src = SpaceTimeMeasure.separable(
        SpectralMeasure.atom(XI0, 1.0), TemporalProfile.build([(0.3, 1.0)], [(0.1, 0.7, 2.0)])
    )
    prob = EvolutionProblem(Damping(3.0), src, SpectralMeasure.atom(XI0, 1.0))
    exact = closed_form_modal(prob, "cauchy", 1.0, np.array([XI0]))[0]
    dts = np.array([2e-2, 1e-2, 5e-3, 2.5e-3])
    errs = [abs(step_modal(prob, StepperConfig(method, dt, 1.0)).values[0] - exact) for dt in dts]
    slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
    assert slope == pytest.approx(order, rel=0.15)


def test_atom_lands_on_step_boundary():
    src = SpaceTimeMeasure.separable(SpectralMeasure.atom(XI0, 1.0), TemporalProfile.atoms([(0.123456, 2.0)]))
    prob = EvolutionProblem(Damping(0.0), src)
    vals = step_modal(prob, StepperConfig("implicit_euler", 0.01, 1.0), times=[0.1, 0.123456, 1.0]).values
    assert vals[:, 0].tolist() == [0, 2, 2]


def test_step_cap():
    with pytest.raises(DomainError):
        StepperConfig("crank_nicolson", 1e-9, 1.0)
    with pytest.raises(DomainError):
        StepperConfig("rk4", 1e-3, 1.0)


def test_grid_density_rejected():
    grid = FrequencyGrid((0.0,), (0.5,), (4,))
    src = SpaceTimeMeasure.separable(SpectralMeasure.on_grid(grid, np.ones(4)), TemporalProfile.segment(0.0, 1.0))
    with pytest.raises(DomainError):
        step_modal(EvolutionProblem(Damping(1.0), src), StepperConfig())


def test_negative_time_source_rejected():
    src = SpaceTimeMeasure.separable(SpectralMeasure.atom(XI0, 1.0), TemporalProfile.segment(-1.0, 1.0))
    with pytest.raises(PreconditionError):
        step_modal(EvolutionProblem(Damping(1.0), src), StepperConfig())


def test_simpson_segment_example():
    v = quadrature_duhamel(segment_problem(), 1.0, n_panels=64).values[0]
    assert abs(v - (1 - math.exp(-1))) <= 1e-10


def test_simpson_constant_integrand_exact():
    assert quadrature_duhamel(segment_problem(0.0, (0.0, 2.0)), 1.0, n_panels=7).values[0] == 1.0


def test_simpson_atoms_only_exact(rng):
    for _ in range(5):
        prob = random_problem(rng, "duhamel")
        src = SpaceTimeMeasure(1, tuple((m, TemporalProfile.atoms(zip(p.atom_times, p.atom_masses))) for m, p in prob.source.terms))
        prob = prob.with_source(src)
        t = 2.5
        q = quadrature_duhamel(prob, t, n_panels=3)
        closed = closed_form_modal(prob, "duhamel", t, q.frequencies)
        assert np.max(np.abs(q.values - closed)) <= 1e-14 * (1 + np.max(np.abs(closed)))


def test_simpson_fourth_order():
    prob = segment_problem(4.0, (0.0, 1.0))
    exact = duhamel_snapshot(prob, 1.0).weight_at(XI0)
    errs = [abs(quadrature_duhamel(prob, 1.0, n).values[0] - exact) for n in (4, 8, 16)]
    slope = np.polyfit(np.log([4, 8, 16]), np.log(errs), 1)[0]
    assert slope == pytest.approx(-4, rel=0.1)


def test_oracle_agreement_random(rng):
    for _ in range(10):
        prob = random_problem(rng, "cauchy")
        times = np.sort(rng.uniform(0, 3.5, size=3))
        res = step_modal(prob, StepperConfig("crank_nicolson", 1e-4, float(times[-1])), times=times)
        for t, row in zip(times, res.values):
            closed = closed_form_modal(prob, "cauchy", t, res.frequencies)
            assert np.max(np.abs(row - closed)) <= 1e-6


def test_as_dict():
    res = step_modal(decay_problem(), StepperConfig("crank_nicolson", 1e-3, 1.0))
    (key, val), = res.as_dict().items()
    assert key == (0.5,)
    assert abs(val - math.exp(-1)) <= 1e-6


def test_homogeneous_source_in_oracles():
    prob = EvolutionProblem(FractionalLaplacian(2.0), None, None, SpectralMeasure.atom([1.0], 1.0))
    closed = closed_form_modal(prob, "duhamel", 1.0, np.array([[1.0]]))[0]
    assert closed == pytest.approx(1 - math.exp(-1), rel=1e-15)
    assert abs(quadrature_duhamel(prob, 1.0).values[0] - closed) <= 1e-10
    assert abs(step_modal(prob, StepperConfig("crank_nicolson", 1e-3, 1.0)).values[0] - closed) <= 1e-6
