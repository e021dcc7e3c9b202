import math

import numpy as np
import pytest

from cadlag_evolution.asymptotics import (
    c_phi,
    cauchy_problem,
    convergence_gap,
    fixed_point_check,
    t_epsilon,
    translation_sweep,
    verify_bound,
)
from cadlag_evolution.errors import PreconditionError
from cadlag_evolution.evolution import EvolutionProblem, steady_snapshot
from cadlag_evolution.measures import FrequencyGrid, SpaceTimeMeasure, SpectralMeasure, TemporalProfile, TestFunctional, pair
from cadlag_evolution.symbols import Damping, FractionalLaplacian, FractionalMatern
from cadlag_evolution.testing import random_asymptotic_problem, random_gaussian, unit_functional

XI0 = [0.0]
UNIT = unit_functional(XI0)


def single_mode(v0=1.0, lam=1.0, g=2.0, source=None):
    return EvolutionProblem(
        Damping(g), source, SpectralMeasure.atom(XI0, v0), SpectralMeasure.atom(XI0, lam) if lam is not None else None
    )


def two_mode():
    # g = 1 + xi^2 gives 1 at xi = 0 and 3 at xi = sqrt(2)
    v0 = SpectralMeasure.from_atoms([([0.0], 1.0), ([math.sqrt(2.0)], 1.0)], 1)
    f = TestFunctional.tabulated(FrequencyGrid((0.0,), (math.sqrt(2.0),), (2,)), [1.0, 1.0])
    return EvolutionProblem(FractionalMatern(2.0, 1.0), None, v0), f


class TestGap:
    def test_single_mode_example(self):
        assert convergence_gap(single_mode(), UNIT, 1.0) == pytest.approx(0.5 * math.exp(-2), rel=1e-14)

    def test_fixed_point_has_zero_gap(self):
        prob = single_mode(v0=0.5)
        assert all(convergence_gap(prob, UNIT, t) == 0.0 for t in (0.0, 0.3, 4.0))

    def test_gap_at_zero_is_initial_mismatch(self, rng):
        prob = random_asymptotic_problem(rng)
        f = random_gaussian(rng)
        expected = abs(pair(prob.initial - steady_snapshot(prob, 0.0), f))
        assert convergence_gap(prob, f, 0.0) == pytest.approx(expected, rel=1e-12, abs=1e-15)

    def test_preconditions(self):
        src = SpaceTimeMeasure.separable(SpectralMeasure.atom([0.0], 1.0), TemporalProfile.segment(0.0, 1.0))
        with pytest.raises(PreconditionError):
            convergence_gap(EvolutionProblem(FractionalLaplacian(2.0), src), UNIT, 1.0)

    def test_cauchy_problem_drops_past_and_origin(self):
        src = SpaceTimeMeasure.separable(SpectralMeasure.atom(XI0, 1.0), TemporalProfile.build([(-1.0, 1.0), (0.0, 2.0), (1.0, 3.0)], [(-1.0, 2.0, 1.0)]))
        cp = cauchy_problem(EvolutionProblem(Damping(1.0), src))
        (_, p), = cp.source.terms
        assert p.atom_times.tolist() == [1.0]
        assert (p.seg_starts.tolist(), p.seg_ends.tolist()) == ([0.0], [2.0])
        assert cp.initial.is_empty


class TestCPhi:
    def test_examples(self):
        assert c_phi(single_mode(lam=None, g=2.0), UNIT) == 1.0
        past = SpaceTimeMeasure.separable(SpectralMeasure.atom(XI0, 1.0), TemporalProfile.atoms([(-1.0, 1.0)]))
        assert c_phi(single_mode(lam=None, g=2.0, source=past), UNIT) == pytest.approx(1 + math.exp(-2), rel=1e-15)
        assert c_phi(single_mode(), unit_functional([5.0])) == 0.0

    def test_segment_past_in_closed_form(self):
        past = SpaceTimeMeasure.separable(SpectralMeasure.atom(XI0, 1.0), TemporalProfile.segment(-2.0, 1.0, 3.0))
        prob = single_mode(v0=0.0, lam=None, g=0.5, source=past)
        assert c_phi(prob, UNIT) == pytest.approx(3.0 * (1 - math.exp(-1.0)) / 0.5, rel=1e-14)


class TestVerifyBound:
    def test_single_mode(self):
        rep = verify_bound(single_mode(), UNIT, np.linspace(0, 5, 26))
        assert rep.bound_violations == 0
        assert rep.kappa_fitted[0] == pytest.approx(2.0, abs=1e-6)
        assert rep.kappa_declared == 2.0

    def test_two_mode_late_fit(self):
        prob, f = two_mode()
        rep = verify_bound(prob, f, np.linspace(0.0, 6.0, 61))
        assert rep.bound_violations == 0
        late = verify_bound(prob, f, np.linspace(3.0, 6.0, 31)).kappa_fitted[0]
        assert 1.0 < late < 3.0
        assert late >= 0.95 * rep.kappa_declared

    def test_zero_gap_flags_undefined_fit(self):
        rep = verify_bound(single_mode(v0=0.5), UNIT, np.linspace(0, 2, 11))
        assert rep.bound_violations == 0
        assert rep.kappa_fitted == (None,)

    def test_random_problems_respect_bound(self, rng):
        for _ in range(5):
            prob = random_asymptotic_problem(rng, kappa=0.5)
            funcs = [random_gaussian(rng) for _ in range(2)]
            rep = verify_bound(prob, funcs, np.linspace(0, 10, 50))
            assert rep.bound_violations == 0
            assert np.all(rep.gaps >= 0)
            assert rep.bounds().shape == rep.gaps.shape


class TestTranslationAndThreshold:
    def test_single_mode_is_shift_invariant(self):
        prob = single_mode()
        f = TestFunctional.gaussian([0.0], 1.0)
        base = convergence_gap(prob, f, 0.7)
        assert translation_sweep(prob, f, [[0.0], [math.pi], [1.0]], 0.7) == pytest.approx(base, rel=1e-14)

    def test_two_modes_shifts_differ_but_bounded(self):
        prob, f = two_mode()
        t = 0.4
        gaps = [convergence_gap(prob, f.translated(h), t) for h in ([0.0], [math.pi], [1.0])]
        assert max(gaps) - min(gaps) > 1e-3
        bound = c_phi(prob, f) * math.exp(-prob.kappa() * t) * (1 + 1e-9)
        assert translation_sweep(prob, f, [[0.0], [math.pi], [1.0]], t) <= bound

    def test_empty_shifts(self):
        assert translation_sweep(single_mode(), UNIT, [], 1.0) == 0.0

    def test_t_epsilon_guarantees_small_gap(self, rng):
        for _ in range(5):
            prob = random_asymptotic_problem(rng)
            f = random_gaussian(rng)
            eps = 1e-6
            te = t_epsilon(prob, f, eps)
            for t in te + np.linspace(0, 5, 11):
                assert convergence_gap(prob, f, t) < eps


class TestFixedPoint:
    def test_single_mode(self):
        assert fixed_point_check(single_mode(), np.linspace(0, 5, 11)).max_tv_discrepancy <= 1e-12

    def test_multi_mode_with_segments(self, rng):
        for _ in range(5):
            prob = random_asymptotic_problem(rng)
            assert fixed_point_check(prob, np.linspace(0, 5, 21)).max_tv_discrepancy <= 1e-10

    def test_perturbed_initial(self):
        times = np.linspace(0, 3, 7)
        rep = fixed_point_check(single_mode(g=1.0), times, SpectralMeasure.atom(XI0, 1e-3))
        np.testing.assert_allclose(rep.discrepancies, 1e-3 * np.exp(-times), rtol=1e-9)
