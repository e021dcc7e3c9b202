import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cadlag_evolution.errors import DimensionError, DomainError, RepresentationError
from cadlag_evolution.measures import (
    FrequencyGrid,
    SpaceTimeMeasure,
    SpectralMeasure,
    TemporalProfile,
    TestFunctional,
    convexity_inequality_holds,
    hermitian_symmetrize,
    pair,
    primitive_1d,
    restrict_nonneg_time,
    total_variation,
    weighted_mass,
)

reals = st.floats(-5, 5, allow_nan=False)
cplx = st.builds(complex, reals, reals)
atom_lists = st.lists(st.tuples(reals, cplx), min_size=0, max_size=6)
profile_atoms = st.lists(st.tuples(st.floats(-4, 4, allow_nan=False), cplx), max_size=5)
segments = st.lists(
    st.tuples(st.floats(-4, 4, allow_nan=False), st.floats(0.01, 3, allow_nan=False), cplx).map(lambda s: (s[0], s[0] + s[1], s[2])),
    max_size=3,
)


def measure(atoms):
    return SpectralMeasure.from_atoms([([x], w) for x, w in atoms], 1)


class TestSpectralMeasure:
    def test_duplicate_atoms_merge(self):
        m = SpectralMeasure.from_atoms([([1.0], 1.0), ([1.0 + 1e-13], 2.0), ([2.0], 1j)], 1)
        assert m.n_atoms == 2
        assert m.weight_at([1.0]) == 3.0

    def test_dimension_checks(self):
        with pytest.raises(DimensionError):
            SpectralMeasure.atom([0.0], 1.0) + SpectralMeasure.atom([0.0, 1.0], 1.0)
        with pytest.raises(DimensionError):
            pair(SpectralMeasure.atom([0.0], 1.0), TestFunctional.point_evaluation([0.0, 0.0]))

    def test_mismatched_grids_are_rejected(self):
        g1 = FrequencyGrid((0.0,), (1.0,), (3,))
        g2 = FrequencyGrid((0.5,), (1.0,), (3,))
        with pytest.raises(RepresentationError):
            SpectralMeasure.on_grid(g1, np.ones(3)) + SpectralMeasure.on_grid(g2, np.ones(3))

    def test_pair_examples(self):
        f = TestFunctional.tabulated(FrequencyGrid((0.3,), (1.0,), (1,)), [3.0])
        assert pair(SpectralMeasure.atom([0.3], 0.5), f) == 1.5
        assert pair(SpectralMeasure.empty(1), f) == 0
        m = measure([(1.0, 0.5), (-1.0, 0.5)])
        assert pair(m, TestFunctional.point_evaluation([0.0])) == pytest.approx((2 * math.pi) ** -0.5, rel=1e-15)

    def test_total_variation_examples(self):
        assert total_variation(SpectralMeasure.atom([1.0], 3 - 4j)) == 5.0
        st_ = SpaceTimeMeasure.separable(SpectralMeasure.atom([0.0], 1.0), TemporalProfile.segment(0.0, 2.0, 1.0))
        assert total_variation(st_) == 2.0
        assert total_variation(SpectralMeasure.empty(2)) == 0.0

    def test_grid_density_total_variation(self):
        g = FrequencyGrid((0.0,), (0.5,), (4,))
        m = SpectralMeasure.on_grid(g, [1, -1, 1j, 0])
        assert m.total_variation() == pytest.approx(1.5)

    def test_hermitian_symmetrize_examples(self):
        h = hermitian_symmetrize(SpectralMeasure.atom([1.0], 1.0))
        assert h.weight_at([1.0]) == 0.5 and h.weight_at([-1.0]) == 0.5
        m = measure([(1.0, 1 + 2j), (-1.0, 1 - 2j)])
        assert (hermitian_symmetrize(m) - m).total_variation() == 0.0
        assert hermitian_symmetrize(SpectralMeasure.atom([0.0], 2j)).weight_at([0.0]) == 0

    def test_hermitian_symmetrize_grid(self):
        g = FrequencyGrid((-1.0,), (0.5,), (4,))
        m = SpectralMeasure.on_grid(g, [1, 2j, 3, 4])
        h = hermitian_symmetrize(m)
        assert h.is_hermitian()

    @settings(max_examples=60, deadline=None)
    @given(atom_lists, atom_lists, cplx)
    def test_tv_is_a_norm(self, a1, a2, c):
        m1, m2 = measure(a1), measure(a2)
        assert (m1 * c).total_variation() == pytest.approx(abs(c) * m1.total_variation(), rel=1e-12, abs=1e-12)
        assert (m1 + m2).total_variation() <= m1.total_variation() + m2.total_variation() + 1e-12

    @settings(max_examples=60, deadline=None)
    @given(atom_lists, atom_lists, cplx)
    def test_pair_linear_and_conjugate_consistent(self, a1, a2, c):
        m1, m2 = measure(a1), measure(a2)
        f = TestFunctional.gaussian([0.4], 0.9)
        lhs = pair(m1 * c + m2, f)
        assert lhs == pytest.approx(c * pair(m1, f) + pair(m2, f), abs=1e-10)
        assert pair(m1.conj_reflect(), f) == pytest.approx(np.conj(pair(m1, f.conj_reflected())), abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(atom_lists)
    def test_symmetrized_is_hermitian_and_idempotent(self, atoms):
        h = hermitian_symmetrize(measure(atoms))
        assert h.is_hermitian()
        assert (hermitian_symmetrize(h) - h).total_variation() <= 1e-12 * (1 + h.total_variation())


class TestTemporalProfile:
    def test_overlapping_segments_are_split(self):
        p = TemporalProfile.build(segments=[(0.0, 2.0, 1.0), (1.0, 3.0, 2.0)])
        assert p.seg_starts.tolist() == [0.0, 1.0, 2.0]
        assert p.seg_ends.tolist() == [1.0, 2.0, 3.0]
        assert p.seg_rates.tolist() == [1, 3, 2]

    def test_invalid_segments(self):
        with pytest.raises(DomainError):
            TemporalProfile.segment(1.0, 1.0)
        with pytest.raises(RepresentationError):
            TemporalProfile.segment(-math.inf, 0.0)

    def test_primitive_examples(self):
        p = TemporalProfile.atoms([(1.0, 1.0), (2.0, -2.0)])
        assert primitive_1d(p, 1.5) == 1
        assert primitive_1d(p, 2.5) == -1
        assert primitive_1d(p, 0.5) == 0
        assert primitive_1d(TemporalProfile.segment(0.0, 1.0, 1.0), 0.5) == 0.5
        assert primitive_1d(TemporalProfile.atoms([(-1.0, 3.0)]), -2.0) == -3

    def test_primitive_is_cadlag_at_atoms(self):
        p = TemporalProfile.atoms([(1.0, 1.0)])
        assert primitive_1d(p, 1.0) == 1
        assert primitive_1d(p, np.nextafter(1.0, 0)) == 0

    @settings(max_examples=80, deadline=None)
    @given(profile_atoms, segments, st.floats(-5, 5), st.floats(0, 5))
    def test_primitive_increment_rule(self, atoms, segs, s, dt):
        p = TemporalProfile.build(atoms, segs)
        t = s + dt
        assert primitive_1d(p, t) - primitive_1d(p, s) == pytest.approx(p.mass(s, t), abs=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(profile_atoms, segments)
    def test_restriction_idempotent_and_tv_nonincreasing(self, atoms, segs):
        st_ = SpaceTimeMeasure.separable(SpectralMeasure.atom([0.5], 1.0), TemporalProfile.build(atoms, segs))
        r = restrict_nonneg_time(st_)
        assert r.supported_nonneg
        assert r.total_variation() <= st_.total_variation() + 1e-12
        rr = restrict_nonneg_time(r)
        assert rr.total_variation() == r.total_variation()


class TestSpaceTime:
    def test_restrict_examples(self):
        m = SpectralMeasure.atom([0.0], 1.0)
        st_ = SpaceTimeMeasure.separable(m, TemporalProfile.atoms([(-1.0, 1.0), (1.0, 1.0)]))
        (_, p), = restrict_nonneg_time(st_).terms
        assert p.atom_times.tolist() == [1.0]
        (_, p), = restrict_nonneg_time(SpaceTimeMeasure.separable(m, TemporalProfile.segment(-1.0, 1.0, 2.0))).terms
        assert (p.seg_starts.tolist(), p.seg_ends.tolist(), p.seg_rates.tolist()) == ([0.0], [1.0], [2.0])
        (_, p), = restrict_nonneg_time(SpaceTimeMeasure.separable(m, TemporalProfile.atoms([(0.0, 1.0)]))).terms
        assert p.atom_times.tolist() == [0.0]

    def test_weighted_mass_examples(self):
        at = lambda xi, t, w: SpaceTimeMeasure.separable(SpectralMeasure.atom([xi], w), TemporalProfile.atoms([(t, 1.0)]))
        assert weighted_mass(at(0.0, 0.0, 1.0), 3, 5) == 1.0
        assert weighted_mass(at(1.0, 1.0, 4.0), 1, 1) == pytest.approx(1.0)
        seg = SpaceTimeMeasure.separable(SpectralMeasure.atom([0.0], 1.0), TemporalProfile.segment(0.0, 1.0, 1.0))
        assert weighted_mass(seg, 0, 1) == pytest.approx(math.atan(1.0), rel=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(atom_lists, profile_atoms, segments, st.integers(0, 3), st.integers(0, 3))
    def test_weighted_mass_monotone(self, spatial, atoms, segs, ns, nt):
        if not spatial or not (atoms or segs):
            return
        st_ = SpaceTimeMeasure.separable(measure(spatial), TemporalProfile.build(atoms, segs))
        base = weighted_mass(st_, ns, nt)
        assert weighted_mass(st_, ns + 1, nt) <= base * (1 + 1e-12) + 1e-300
        assert weighted_mass(st_, ns, nt + 1) <= base * (1 + 1e-12) + 1e-300


class TestFunctionals:
    def test_point_evaluation_hat(self):
        f = TestFunctional.point_evaluation([0.5, -1.0])
        xi = np.array([[1.0, 2.0]])
        assert f(xi)[0] == pytest.approx((2 * math.pi) ** -1 * np.exp(1j * (0.5 - 2.0)))

    def test_gaussian_decay_radius(self):
        f = TestFunctional.gaussian([0.0], 0.7)
        r = f.decay_radius()
        assert abs(f([r * 1.0001])[0]) < 1e-300
        assert abs(f([r * 0.99])[0]) > 1e-300

    def test_translation_is_modulation(self):
        f = TestFunctional.gaussian([0.2], 1.0)
        g = f.translated([0.5])
        xi = np.array([[1.3]])
        assert g(xi)[0] == pytest.approx(np.exp(0.5j * 1.3) * f(xi)[0])


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.floats(-20, 20), min_size=3, max_size=3),
    st.lists(st.floats(-20, 20), min_size=3, max_size=3),
    st.integers(1, 8),
)
def test_convexity_inequality(x, y, m):
    assert convexity_inequality_holds(np.array(x), np.array(y), m)
