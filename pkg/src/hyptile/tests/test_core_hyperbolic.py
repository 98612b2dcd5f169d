"""
Testing hyperboloid geometry in :mod:`hyptile.core.hyperbolic`.
"""
import numpy as np
import pytest
from hyptile.config import NumericalDomainError
from hyptile.core import hyperbolic as hb

ATOL = 1e-10


def test_minkowski_form():
    origin = hb.HPoint.origin().coords
    x = np.array([np.sinh(1), 0, np.cosh(1)])
    np.testing.assert_allclose(hb.minkowski_form(origin, x), -1.5430806, atol=1e-7)
    np.testing.assert_allclose(hb.minkowski_form(x, x), -1, atol=1e-14)
    with pytest.raises(ValueError):
        hb.minkowski_form(origin, np.zeros(4))
    with pytest.raises(ValueError):
        hb.minkowski_form(np.zeros(2), np.zeros(2))


def test_minkowski_metric():
    np.testing.assert_allclose(hb.minkowski_metric(3), np.diag([1, 1, -1]))


def test_hpoint_validation():
    with pytest.raises(ValueError):
        hb.HPoint([1.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        hb.HPoint([0.0, 0.0, -1.0])
    with pytest.raises(ValueError):
        hb.HPoint([0.0, 1.0])
    point = hb.HPoint([0.0, 0.0, 2.0], normalize=True)
    np.testing.assert_allclose(point.coords, [0, 0, 1])
    assert point.dim == 2


def test_hpoint_is_immutable():
    point = hb.HPoint.origin()
    with pytest.raises(ValueError):
        point.coords[0] = 1.0


def test_chart_coordinates():
    point = hb.HPoint.from_polar(1.0, 0.0)
    np.testing.assert_allclose(point.klein(), [0.7615942, 0.0], atol=1e-7)
    np.testing.assert_allclose(point.poincare(), [0.4621172, 0.0], atol=1e-7)
    np.testing.assert_allclose(hb.HPoint.from_klein(point.klein()).coords,
                               point.coords, atol=ATOL)
    np.testing.assert_allclose(hb.HPoint.from_poincare(point.poincare()).coords,
                               point.coords, atol=ATOL)


def test_charts_of_point_rows():
    points = hb.sample_ball(np.random.default_rng(1), 6, 3.0)
    np.testing.assert_allclose(hb.to_poincare(points),
                               [hb.to_poincare(x) for x in points])
    np.testing.assert_allclose(hb.to_beltrami_klein(points),
                               [hb.to_beltrami_klein(x) for x in points])
    assert hb.to_poincare(points).shape == (6, 2)


def test_normalize_keeps_points_on_hyperboloid():
    far = hb.HPoint.from_polar(9.0, 0.7).coords
    assert np.array_equal(hb._normalize(far), far)
    np.testing.assert_allclose(hb._normalize(2 * far), far, rtol=1e-7)
    np.testing.assert_allclose(hb._normalize(-far), far)


@pytest.mark.parametrize("chart", [hb.from_beltrami_klein, hb.from_poincare])
def test_chart_outside_ball(chart):
    with pytest.raises(ValueError):
        chart([0.6, 0.8])


def test_from_direction():
    point = hb.HPoint.from_direction(2.0, [0.0, 3.0])
    np.testing.assert_allclose(point.coords, [0, np.sinh(2), np.cosh(2)])
    with pytest.raises(ValueError):
        hb.HPoint.from_direction(1.0, [0.0, 0.0])


@pytest.mark.parametrize("radius", [0.0, 1e-6, 0.5, 2.0, 8.0])
@pytest.mark.parametrize("angle", [0.0, 1.0, 4.0])
def test_distance_to_origin(radius, angle):
    point = hb.HPoint.from_polar(radius, angle)
    origin = hb.HPoint.origin()
    np.testing.assert_allclose(hb.distance(origin, point), radius, rtol=1e-10, atol=1e-15)


def test_distance_clamp():
    x = np.array([0.0, 0.0, 1.0])
    assert hb.distance(x, np.array([0.0, 0.0, 1 - 1e-11])) == 0.0
    with pytest.raises(NumericalDomainError):
        hb.distance(x, np.array([0.0, 0.0, 0.999]))
    with pytest.raises(ValueError):
        hb.distance(x, np.zeros(4))


def test_distances_vectorized():
    rng = np.random.default_rng(123)
    points = hb.sample_ball(rng, 10, 3.0)
    x = hb.HPoint.from_polar(1.0, 2.0)
    expected = [hb.distance(x, y) for y in points]
    np.testing.assert_allclose(hb.distances(x, points), expected, atol=1e-7)


def test_sample_ball():
    rng = np.random.default_rng(0)
    points = hb.sample_ball(rng, 50, 2.5)
    assert points.shape == (50, 3)
    np.testing.assert_allclose(np.sum(points[:, :2] ** 2, axis=1) - points[:, 2] ** 2,
                               -1, atol=1e-10)
    assert np.all(np.arccosh(points[:, 2]) <= 2.5 + 1e-12)


def test_cross_model_distance():
    rng = np.random.default_rng(1)
    first = hb.sample_ball(rng, 50, 4.0)
    second = hb.sample_ball(rng, 50, 4.0)
    for x, y in zip(first, second):
        klein = hb.bk_distance(hb.to_beltrami_klein(x), hb.to_beltrami_klein(y))
        np.testing.assert_allclose(klein, hb.distance(x, y), atol=1e-9)
    assert hb.bk_distance([0.1, 0.2], [0.1, 0.2]) == 0.0
    with pytest.raises(ValueError):
        hb.bk_distance([1.0, 0.0], [0.0, 0.0])


def test_hyperplane_orientation():
    hyperplane = hb.Hyperplane.at_distance(1.0, 0.3)
    flipped = hb.Hyperplane(-hyperplane.normal)
    np.testing.assert_allclose(flipped.normal, hyperplane.normal)
    assert hyperplane.normal[-1] > 0
    origin = hb.HPoint.origin()
    assert hyperplane.positive_side(origin)
    np.testing.assert_allclose(hyperplane.evaluate(origin), -np.sinh(1.0))
    foot = hb.HPoint.from_polar(1.0, 0.3)
    assert hyperplane.contains(foot)
    with pytest.raises(ValueError):
        hb.Hyperplane([0.0, 0.0, 1.0])


def test_hyperplane_through_origin():
    hyperplane = hb.Hyperplane([0.0, -1.0, 0.0])
    np.testing.assert_allclose(hyperplane.normal, [0, 1, 0])
    with pytest.raises(ValueError):
        hb.canonical_normal(np.zeros(3))


def test_hyperplane_through_points():
    a = hb.HPoint.from_polar(1.0, 0.4)
    b = hb.HPoint.from_polar(2.0, 2.0)
    hyperplane = hb.Hyperplane.through(a, b)
    assert hyperplane.contains(a)
    assert hyperplane.contains(b)
    with pytest.raises(ValueError):
        hb.Hyperplane.through(a, a)


@pytest.mark.parametrize("distance", [0.0, 0.7, 3.0])
def test_reflection(distance):
    hyperplane = hb.Hyperplane.at_distance(distance, 1.2)
    reflection = hb.reflect(hyperplane)
    matrix = reflection.matrix
    np.testing.assert_allclose(matrix @ matrix, np.eye(3), atol=1e-9 * np.max(np.abs(matrix)) ** 2)
    assert reflection.defect() <= 1e-10 * np.max(np.abs(matrix)) ** 2
    image = reflection(hb.HPoint.origin())
    np.testing.assert_allclose(hb.distance(hb.HPoint.origin(), image), 2 * distance,
                               atol=1e-9)
    np.testing.assert_allclose(hb.dist_to_hyperplane(hb.HPoint.origin(), hyperplane),
                               distance, atol=1e-12)


def test_reflect_needs_unit_normal():
    with pytest.raises(ValueError):
        hb.reflect(np.array([2.0, 0.0, 0.0]))


def test_point_reflection():
    isometry = hb.point_reflection(hb.HPoint.origin())
    image = isometry(hb.HPoint.from_polar(1.0, 0.25))
    np.testing.assert_allclose(image.coords, hb.HPoint.from_polar(1.0, 0.25 + np.pi).coords,
                               atol=ATOL)


def test_lorentz_isometry():
    reflection = hb.reflect(hb.Hyperplane.at_distance(0.5, 0.0))
    rotation = hb.reflect(hb.Hyperplane([0.0, 1.0, 0.0])) @ reflection
    product = rotation @ rotation.inverse()
    np.testing.assert_allclose(product.matrix, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(hb.LorentzIsometry.identity().matrix, np.eye(3))
    with pytest.raises(ValueError):
        hb.LorentzIsometry(2 * np.eye(3))
    with pytest.raises(ValueError):
        hb.LorentzIsometry(-np.eye(3))
    with pytest.raises(ValueError):
        hb.LorentzIsometry(np.eye(2))
    normal = hb.Hyperplane.at_distance(2.0, 0.0).normal
    assert rotation.apply_normal(normal)[-1] > 0


def test_geodesic_point():
    x = hb.HPoint.from_polar(1.0, 0.0)
    y = hb.HPoint.from_polar(2.0, 2.0)
    length = hb.distance(x, y)
    middle = hb.geodesic_point(x, y, 0.5)
    np.testing.assert_allclose(hb.distance(x, middle), length / 2, atol=ATOL)
    np.testing.assert_allclose(hb.distance(middle, y), length / 2, atol=ATOL)
    assert hb.geodesic_point(x, y, 0) is x
    with pytest.raises(ValueError):
        hb.geodesic_point(x, y, 1.5)
    with pytest.raises(ValueError):
        hb.geodesic_point(x, x, 0.5)


def test_geodesic_samples():
    x = hb.HPoint.from_polar(1.0, 0.0)
    y = hb.HPoint.from_polar(1.5, 1.0)
    samples = hb.geodesic_samples(x, y, 4)
    assert samples.shape == (5, 3)
    gaps = [hb.distance(a, b) for a, b in zip(samples[:-1], samples[1:])]
    np.testing.assert_allclose(gaps, hb.distance(x, y) / 4, atol=ATOL)


def test_segment_distance():
    origin = hb.HPoint.origin()
    a = hb.HPoint.from_polar(1.0, 0.5)
    b = hb.HPoint.from_polar(1.0, -0.5)
    foot = hb.project_to_geodesic(origin, a, b)
    np.testing.assert_allclose(foot.coords[1], 0, atol=ATOL)
    np.testing.assert_allclose(hb.segment_distance(origin, a, b),
                               hb.distance(origin, foot), atol=ATOL)
    beyond = hb.HPoint.from_polar(3.0, 0.5)
    np.testing.assert_allclose(hb.segment_distance(beyond, a, b), 2.0, atol=ATOL)


def test_angle_at():
    origin = hb.HPoint.origin()
    y = hb.HPoint.from_polar(1.0, 0.0)
    z = hb.HPoint.from_polar(2.0, np.pi / 3)
    np.testing.assert_allclose(hb.angle_at(origin, y, z), np.pi / 3, atol=ATOL)


def test_bk_local_distortion():
    rng = np.random.default_rng(5)
    low, high = hb.bk_local_distortion(rng, 50, 2.0, scale=1e-3)
    assert 1 - 1e-3 <= low <= high <= 1 / (1 - (np.tanh(2.0) + 1e-3) ** 2)
