import math

import numpy as np
import pytest

from errors import DegenerateTangent, InvalidPoint, InvalidSystem, NoHistory
from potentials import FourierMode, Potential
from systems import (CatMap, OrbitHistory, SolenoidMap, SolenoidPoint, TangentVector, TorusPoint,
                     apply, apply_inverse, birkhoff_sum, unstable_log_jacobian)

LOG_LAMBDA = math.log((3 + math.sqrt(5)) / 2)


def test_torus_point_reduces_coordinates():
    p = TorusPoint(1.25, -0.25)
    assert (p.x, p.y) == (0.25, 0.75)


def test_solenoid_point_outside_disc():
    with pytest.raises(InvalidPoint):
        SolenoidPoint(0.1, 0.9, 0.9)


def test_cat_apply_examples(cat):
    assert apply(cat, TorusPoint(0.0, 0.0)) == TorusPoint(0.0, 0.0)
    assert apply(cat, TorusPoint(0.5, 0.5)) == TorusPoint(0.5, 0.0)


def test_cat_apply_inverse_example(cat):
    assert cat.inverse_entries == (1, -1, -1, 2)
    assert apply_inverse(cat, TorusPoint(0.5, 0.0)) == TorusPoint(0.5, 0.5)


def test_cat_inverse_undoes_forward(cat, rng):
    points = rng.random((100, 2))
    back = cat.apply_inverse(cat.apply(points))
    assert np.max(cat.distance(back, points)) < 1e-12


def test_cat_eigen_data(cat):
    assert cat.lambda_u == pytest.approx((3 + math.sqrt(5)) / 2, abs=1e-14)
    assert cat.lambda_u * (1.0 / cat.lambda_u) == pytest.approx(1.0, abs=1e-14)
    assert cat.slope_u == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-12)
    assert cat.slope_s == pytest.approx(-(1 + math.sqrt(5)) / 2, abs=1e-12)


@pytest.mark.parametrize('entries', [(1, 1, 0, 1), (2, 1, 1, 2), (0, 1, -1, 0), (1, 0, 0, 1), (2.5, 1, 1, 1)])
def test_cat_rejects_non_hyperbolic(entries):
    with pytest.raises(InvalidSystem):
        CatMap(*entries)


def test_cat_accepts_negative_trace():
    system = CatMap(-2, 1, 1, -1)
    assert system.lambda_u > 1
    assert system.eigenvalue_u < 0


def test_cat_matrix_power_is_exact(cat):
    a, b, c, d = cat.matrix_power(14)
    assert a * d - b * c == 1
    assert a + d - 2 == 710645


def test_cat_log_jacobian_constant(cat, rng):
    points = rng.random((1000, 2))
    values, _ = cat.log_stretch(points, cat.default_tangent(points))
    assert np.max(np.abs(values - LOG_LAMBDA)) < 1e-12


def test_unstable_log_jacobian_returns_image_tangent(cat):
    value, image = unstable_log_jacobian(cat, TorusPoint(0.3, 0.4), TangentVector(cat.unstable_vector))
    assert value == pytest.approx(0.9624236501, abs=1e-10)
    assert np.allclose(image.as_array(), cat.unstable_vector, atol=1e-12)
    assert image.base == apply(cat, TorusPoint(0.3, 0.4))


def test_degenerate_tangent(cat):
    with pytest.raises(DegenerateTangent):
        unstable_log_jacobian(cat, TorusPoint(0.1, 0.1), TangentVector((0.0, 0.0)))


def test_chain_rule_identity(cat, rng):
    for _ in range(1000):
        n = int(rng.integers(1, 21))
        angle = rng.random() * math.pi
        u = np.array([[math.cos(angle), math.sin(angle)]])
        points = rng.random((1, 2))
        tangents = u.copy()
        stretch = np.zeros(1)
        for _ in range(n):
            points, tangents, stretch = cat.step(points, tangents, stretch)
        a, b, c, d = cat.matrix_power(n)
        direct = np.array([a * u[0, 0] + b * u[0, 1], c * u[0, 0] + d * u[0, 1]])
        assert stretch[0] == pytest.approx(math.log(np.hypot(*direct)), abs=1e-9)


def test_cat_preserves_lebesgue(cat):
    ticks = (np.arange(1000) + 0.5) / 1000
    xs, ys = np.meshgrid(ticks, ticks, indexing='ij')
    image = cat.apply(np.column_stack([xs.ravel(), ys.ravel()]))
    inside = cat.distance(image, np.array([0.5, 0.5])) < 1.0 / 3.0
    assert inside.mean() == pytest.approx(math.pi / 9, abs=2e-2)


def test_birkhoff_sum_empty_and_constant(cat):
    p = TorusPoint(0.2, 0.7)
    assert birkhoff_sum(cat, Potential.fourier([FourierMode(1, 0, 1.0)]), p, 0) == 0.0
    assert birkhoff_sum(cat, Potential.constant(2.5), p, 7) == pytest.approx(17.5)
    assert birkhoff_sum(cat, Potential.constant(2.5), p, 7, direction='backward') == pytest.approx(17.5)


def test_birkhoff_sum_of_unstable_expansion(cat):
    value = birkhoff_sum(cat, Potential.unstable_expansion(), TorusPoint(0.1, 0.9), 5)
    assert value == pytest.approx(-5 * LOG_LAMBDA, abs=1e-12)


def test_backward_sum_matches_forward_from_preimage(cat):
    G = Potential.fourier([FourierMode(1, 2, 0.3, 0.1)])
    p = np.array([0.31, 0.77])
    start = p
    for _ in range(5):
        start = cat.apply_inverse(start)
    backward = birkhoff_sum(cat, G, p, 5, direction='backward')
    forward = birkhoff_sum(cat, G, start, 5)
    assert backward == pytest.approx(forward, abs=1e-9)


def test_unknown_direction(cat):
    with pytest.raises(ValueError):
        birkhoff_sum(cat, Potential.zero(), TorusPoint(0, 0), 2, direction='sideways')


@pytest.mark.parametrize('contraction', [0.0, 0.5, 0.7, -0.1])
def test_solenoid_contraction_range(contraction):
    with pytest.raises(InvalidSystem):
        SolenoidMap(contraction)


def test_solenoid_unknown_variant():
    with pytest.raises(InvalidSystem):
        SolenoidMap(0.1, 'printed')


@pytest.mark.parametrize('variant', ['corrected', 'verbatim'])
def test_solenoid_maps_into_interior(variant):
    assert SolenoidMap(0.1, variant).maps_into_interior(resolution=64)


def test_solenoid_apply_formula(solenoid):
    image = apply(solenoid, SolenoidPoint(0.25, 0.2, -0.4))
    assert image.theta == pytest.approx(0.5)
    assert image.x == pytest.approx(0.02 + math.cos(math.pi / 2) / 2)
    assert image.y == pytest.approx(-0.04 + math.sin(math.pi / 2) / 2)


def test_solenoid_inverse_needs_history(solenoid):
    with pytest.raises(NoHistory):
        apply_inverse(solenoid, SolenoidPoint(0.1, 0.2, 0.3))


def test_solenoid_inverse_from_history(solenoid):
    preimage = np.array([0.3, 0.1, -0.2])
    image = solenoid.apply(preimage)
    history = OrbitHistory(np.array([preimage]))
    assert np.allclose(solenoid.apply_inverse(image, history=history), preimage)
    with pytest.raises(NoHistory):
        solenoid.apply_inverse(image + np.array([0.0, 0.01, 0.0]), history=history)


def test_solenoid_backward_sum_uses_history(solenoid):
    orbit = [np.array([0.1, 0.0, 0.0])]
    for _ in range(3):
        orbit.append(solenoid.apply(orbit[-1]))
    history = OrbitHistory(np.array(orbit[:3]))
    G = Potential.fourier([FourierMode(1, 0, 1.0)])
    expected = sum(G.evaluate(p)[0] for p in orbit[:3])
    assert birkhoff_sum(solenoid, G, orbit[3], 3, direction='backward', history=history) == pytest.approx(expected)
    with pytest.raises(NoHistory):
        birkhoff_sum(solenoid, G, orbit[3], 4, direction='backward', history=history)


def test_solenoid_orbit_average_stretch(solenoid):
    points, tangents, _ = solenoid.unstable_tangent(np.array([0.123, 0.0, 0.0]))
    stretch = np.zeros(1)
    for _ in range(200):
        points, tangents, stretch = solenoid.step(points, tangents, stretch)
    assert stretch[0] / 200 == pytest.approx(math.log(2), abs=5e-2)


def test_solenoid_stretch_matches_finite_difference(solenoid):
    points, tangents, _ = solenoid.unstable_tangent(np.array([0.37, 0.2, 0.1]))
    value, _ = unstable_log_jacobian(solenoid, points[0], tangents[0])
    h = 1e-7
    nearby = points[0] + h * tangents[0]
    ratio = solenoid.distance(solenoid.apply(points[0]), solenoid.apply(nearby)) / h
    assert value == pytest.approx(math.log(ratio), abs=1e-4)
    assert 0.5 < value < 1.0
