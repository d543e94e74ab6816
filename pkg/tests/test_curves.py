import math

import numpy as np
import pytest
from scipy.spatial import cKDTree

from curves import (RefinementPolicy, advance, arclength_elements, expansion_rate, grow, seed_arbitrary,
                    seed_segment, theta_winding)
from errors import BadDelta, BadSeed, MissingHistory, PointBudgetExceeded, TangentToStable

LOG_LAMBDA = math.log((3 + math.sqrt(5)) / 2)


def test_policy_validation():
    with pytest.raises(ValueError):
        RefinementPolicy(max_spacing=0.0)
    with pytest.raises(ValueError):
        RefinementPolicy(max_points=1)
    with pytest.raises(ValueError):
        RefinementPolicy(insertion='resample')


def test_cat_seed_segment(cat):
    curve = seed_segment(cat, (0.0, 0.0), 1.0)
    alpha = (math.sqrt(5) - 1) / 2
    assert np.allclose(curve.points[0], [0.0, 0.0])
    end = curve.points[-1]
    assert end[1] / end[0] == pytest.approx(alpha, abs=1e-12)
    assert np.hypot(*end) == pytest.approx(1.0, abs=1e-12)
    assert curve.arclength() == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(curve.tangents, cat.unstable_vector, atol=1e-9)
    assert np.all(curve.gaps() <= 1e-2)
    assert np.all(np.diff(curve.params) > 0)
    assert curve.generation == 0
    assert not curve.non_invariant


@pytest.mark.parametrize('delta', [0.0, -1.0])
def test_bad_delta(cat, delta):
    with pytest.raises(BadDelta):
        seed_segment(cat, (0.0, 0.0), delta)


def test_waypoints_along_unstable_direction_match_segment(cat):
    direction = np.asarray(cat.unstable_vector)
    start = np.array([0.1, 0.2])
    polyline = seed_arbitrary(cat, [start, start + 0.8 * direction])
    segment = seed_segment(cat, start, 0.8)
    assert len(polyline) == len(segment)
    assert np.max(cat.distance(polyline.points, segment.points)) < 1e-12
    assert polyline.non_invariant


def test_horizontal_seed_accepted(cat):
    curve = seed_arbitrary(cat, [(0.0, 0.5), (0.5, 0.5)])
    assert curve.arclength() == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(curve.points[:, 1], 0.5)


def test_stable_direction_rejected(cat):
    start = np.array([0.2, 0.2])
    with pytest.raises(TangentToStable):
        seed_arbitrary(cat, [start, start + 0.3 * np.asarray(cat.stable_vector)])


def test_bad_waypoints(cat):
    with pytest.raises(BadSeed):
        seed_arbitrary(cat, [(0.1, 0.1)])
    with pytest.raises(BadSeed):
        seed_arbitrary(cat, [(0.1, 0.1), (0.1, 0.1)])


def test_arclength_elements_uniform_segment(cat):
    curve = seed_segment(cat, (0.3, 0.3), 1.0)
    elements = arclength_elements(curve)
    assert np.ptp(elements[1:-1]) < 1e-12
    assert elements.sum() == pytest.approx(curve.arclength(), rel=1e-12)
    normalized = elements / elements.sum()
    assert normalized.sum() == pytest.approx(1.0, abs=1e-12)


def test_cat_length_grows_exponentially(cat):
    curve = seed_segment(cat, (0.0, 0.0), 1.0)
    for n in range(1, 7):
        curve = advance(curve, cat)
        assert curve.arclength() == pytest.approx(math.exp(LOG_LAMBDA * n), rel=1e-6)
        assert curve.transported_length() == pytest.approx(math.exp(LOG_LAMBDA * n), rel=1e-9)
        if n >= 3:
            assert math.log(curve.arclength()) / n == pytest.approx(LOG_LAMBDA, abs=1e-6)
            assert expansion_rate(curve) == pytest.approx(LOG_LAMBDA, abs=1e-9)


def test_spacing_invariant_random_seeds(cat, rng):
    policy = RefinementPolicy(max_spacing=0.05)
    for _ in range(10):
        curve = seed_segment(cat, rng.random(2), 0.1 + 0.9 * rng.random(), policy)
        for _ in range(6):
            curve = advance(curve, cat, policy)
            assert np.all(curve.gaps() <= policy.max_spacing)
            assert np.all(np.diff(curve.params) > 0)


def test_history_consistency(cat, coarse_policy):
    curve = grow(seed_segment(cat, (0.2, 0.1), 1.0, coarse_policy), 4, cat, coarse_policy)
    ancestors = curve.ancestors(3)
    assert np.max(cat.distance(cat.apply(ancestors), curve.points)) < 1e-10

    history = curve.history(len(curve) // 2)
    assert len(history) == 4
    assert np.max(cat.distance(cat.apply(history.preimage(1)), curve.points[len(curve) // 2])) < 1e-10


def test_at_generation_recovers_earlier_curve(cat, coarse_policy):
    seed = seed_segment(cat, (0.0, 0.0), 1.0, coarse_policy)
    early = grow(seed, 3, cat, coarse_policy)
    late = grow(early, 2, cat, coarse_policy)
    view = late.at_generation(3)
    assert np.array_equal(view.params, early.params)
    assert np.max(cat.distance(view.points, early.points)) < 1e-12
    with pytest.raises(MissingHistory):
        late.at_generation(6)


def test_refinement_is_resolution_independent(cat):
    coarse, fine = RefinementPolicy(max_spacing=0.05), RefinementPolicy(max_spacing=0.01)
    a = grow(seed_segment(cat, (0.0, 0.0), 1.0, coarse), 5, cat, coarse)
    b = grow(seed_segment(cat, (0.0, 0.0), 1.0, fine), 5, cat, fine)
    distance_ab, _ = cKDTree(b.points, boxsize=1.0).query(a.points)
    distance_ba, _ = cKDTree(a.points, boxsize=1.0).query(b.points)
    assert max(distance_ab.max(), distance_ba.max()) < 2 * coarse.max_spacing


def test_point_budget(cat):
    policy = RefinementPolicy(max_spacing=0.01, max_points=300)
    curve = seed_segment(cat, (0.0, 0.0), 1.0, policy)
    with pytest.raises(PointBudgetExceeded):
        grow(curve, 3, cat, policy)


def test_curve_frame(cat, coarse_policy):
    frame = seed_segment(cat, (0.0, 0.0), 1.0, coarse_policy).to_frame()
    assert list(frame.columns) == ['generation', 'param', 'x', 'y']


def test_solenoid_arc_winds_over_its_extent(solenoid):
    curve = seed_segment(solenoid, (0.0, 0.0, 0.0), 1.0, RefinementPolicy(max_spacing=0.02))
    assert 0.0 < curve.seed.extent < 1.0
    assert theta_winding(curve) == pytest.approx(curve.seed.extent, abs=1e-9)
    assert np.all(solenoid.contains(curve.points))


@pytest.mark.parametrize('delta', [0.1, 1.0, 2.5])
def test_solenoid_segment_has_arclength_delta(solenoid, delta):
    curve = seed_segment(solenoid, (0.0, 0.0, 0.0), delta, RefinementPolicy(max_spacing=1e-3))
    assert curve.seed.volume == pytest.approx(delta, abs=1e-10)
    assert curve.seed_elements().sum() == pytest.approx(delta, abs=1e-12)
    assert curve.arclength() == pytest.approx(delta, rel=1e-4)


def test_solenoid_winding_doubles(solenoid):
    policy = RefinementPolicy(max_spacing=0.05)
    curve = seed_segment(solenoid, (0.3, 0.2, -0.1), 1.0, policy)
    extent = curve.seed.extent
    for n in range(1, 7):
        curve = advance(curve, solenoid, policy)
        assert theta_winding(curve) == pytest.approx(2 ** n * extent, abs=1e-6)
        assert np.all(solenoid.contains(curve.points))
        assert np.all(curve.gaps() <= policy.max_spacing)


def test_solenoid_history_consistency(solenoid):
    policy = RefinementPolicy(max_spacing=0.05)
    curve = grow(seed_segment(solenoid, (0.3, 0.2, -0.1), 1.0, policy), 3, solenoid, policy)
    index = len(curve) // 3
    history = curve.history(index)
    assert np.allclose(solenoid.apply_inverse(curve.points[index], history=history), history.points[-1])


def test_solenoid_length_growth(solenoid):
    policy = RefinementPolicy(max_spacing=0.02)
    curve = grow(seed_segment(solenoid, (0.0, 0.0, 0.0), 1.0, policy), 8, solenoid, policy)
    assert expansion_rate(curve) == pytest.approx(math.log(2), abs=5e-2)
