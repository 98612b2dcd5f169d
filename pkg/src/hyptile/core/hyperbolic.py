# -*- coding: utf-8 -*-
"""Hyperboloid model of the hyperbolic space with Beltrami-Klein and
Poincaré charts, reflections, distances and angles.

Points live on the upper sheet ``<x, x> = -1, x_{d+1} > 0`` of the Minkowski
space ``R^{d,1}`` with ``<x, y> = x_1 y_1 + ... + x_d y_d - x_{d+1} y_{d+1}``.
The dimension ``d`` is a runtime parameter.
"""
import numpy as np
from hyptile.config import raise_error, TOL_ARITH, TOL_CONSTRUCT, ACOSH_CLAMP, \
                           NumericalDomainError


def minkowski_metric(size):
    """Diagonal metric ``J = diag(1, ..., 1, -1)`` of the given size."""
    diag = np.ones(size)
    diag[-1] = -1.0
    return np.diag(diag)


def minkowski_form(x, y):
    """Minkowski bilinear form ``<x, y>``.

    Args:
        x (np.ndarray): vector with ``d + 1 >= 3`` entries.
        y (np.ndarray): vector with the same number of entries.

    Returns:
        The real number ``sum_{i<=d} x_i y_i - x_{d+1} y_{d+1}``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise_error(ValueError, "Cannot contract Minkowski vectors of shapes "
                                "{} and {}.".format(x.shape, y.shape))
    if x.ndim != 1 or x.shape[0] < 3:
        raise_error(ValueError, "Minkowski vectors need at least three "
                                "coordinates but have shape {}."
                                "".format(x.shape))
    return _form(x, y)


def _form(x, y):
    return float(np.dot(x[:-1], y[:-1]) - x[-1] * y[-1])


def _scale(x):
    """Magnitude used to scale tolerances that involve ``x``."""
    return max(1.0, float(np.max(np.abs(x))))


def _coords(x):
    if isinstance(x, HPoint):
        return x.coords
    return np.asarray(x, dtype=float)


def _normalize(x):
    """Rescale a future timelike vector onto the hyperboloid.

    Vectors already on the hyperboloid within ``TOL_ARITH`` (scaled like the
    form, whose rounding error grows like ``|x|^2``) are returned unscaled.
    """
    x = np.array(x, dtype=float)
    norm = -_form(x, x)
    if norm <= 0:
        raise_error(NumericalDomainError, "Vector {} is not timelike and cannot "
                                          "be placed on the hyperboloid."
                                          "".format(x))
    if abs(norm - 1) > TOL_ARITH * _scale(x) ** 2:
        x = x / np.sqrt(norm)
    if x[-1] < 0:
        x = -x
    return x


class HPoint:
    """Point of the hyperbolic space in hyperboloid coordinates.

    Args:
        coords (np.ndarray): ``d + 1`` coordinates with ``<x, x> = -1`` and
            positive last coordinate.
        normalize (bool): If ``True`` any future timelike vector is accepted
            and rescaled onto the hyperboloid. Otherwise the coordinates are
            validated and only re-normalized.
    """

    __slots__ = ("_coords",)

    def __init__(self, coords, normalize=False):
        coords = np.array(coords, dtype=float)
        if coords.ndim != 1 or coords.shape[0] < 3:
            raise_error(ValueError, "Hyperboloid coordinates need at least three "
                                    "entries but have shape {}."
                                    "".format(coords.shape))
        if not normalize:
            defect = abs(_form(coords, coords) + 1)
            if defect > TOL_ARITH * _scale(coords) ** 2:
                raise_error(ValueError, "Coordinates {} do not lie on the "
                                        "hyperboloid (defect {})."
                                        "".format(coords, defect))
            if coords[-1] <= 0:
                raise_error(ValueError, "Coordinates {} lie on the lower sheet."
                                        "".format(coords))
        coords = _normalize(coords)
        coords.flags.writeable = False
        self._coords = coords

    @property
    def coords(self):
        return self._coords

    @property
    def dim(self):
        """Dimension ``d`` of the hyperbolic space."""
        return self._coords.shape[0] - 1

    def __array__(self, dtype=None):
        if dtype is None:
            return self._coords
        return self._coords.astype(dtype)

    def __repr__(self):
        return "HPoint({})".format(list(self._coords))

    @classmethod
    def origin(cls, dim=2):
        """Basepoint ``(0, ..., 0, 1)``."""
        coords = np.zeros(dim + 1)
        coords[-1] = 1.0
        return cls(coords)

    @classmethod
    def from_direction(cls, radius, direction):
        """Point at distance ``radius`` from the origin along ``direction``."""
        direction = np.asarray(direction, dtype=float)
        norm = np.linalg.norm(direction)
        if norm == 0:
            raise_error(ValueError, "Direction must be a non-zero vector.")
        coords = np.append(np.sinh(radius) * direction / norm, np.cosh(radius))
        return cls(coords, normalize=True)

    @classmethod
    def from_polar(cls, radius, angle):
        """Point of the hyperbolic plane given by polar coordinates."""
        return cls.from_direction(radius, [np.cos(angle), np.sin(angle)])

    @classmethod
    def from_klein(cls, k):
        return cls(from_beltrami_klein(k))

    @classmethod
    def from_poincare(cls, u):
        return cls(from_poincare(u))

    def klein(self):
        return to_beltrami_klein(self)

    def poincare(self):
        return to_poincare(self)


class Hyperplane:
    """Oriented geodesic hyperplane ``H = {x : <x, v> = 0}``.

    The unit spacelike normal is canonicalized so that ``v_{d+1} > 0``. Then
    ``H+ = {x : <x, v> <= 0}`` is the closed half-space whose interior
    contains the origin. Hyperplanes through the origin keep the
    lexicographically positive normal.

    Args:
        normal (np.ndarray): spacelike vector with ``<v, v> = 1``.
        index (int): optional 1-based position in an atlas hyperplane list.
    """

    __slots__ = ("_normal", "index")

    def __init__(self, normal, index=None):
        normal = np.array(normal, dtype=float)
        if normal.ndim != 1 or normal.shape[0] < 3:
            raise_error(ValueError, "Hyperplane normals need at least three "
                                    "entries but have shape {}."
                                    "".format(normal.shape))
        norm = _form(normal, normal)
        if abs(norm - 1) > TOL_ARITH * _scale(normal) ** 2:
            raise_error(ValueError, "Hyperplane normal {} is not a unit "
                                    "spacelike vector (<v,v> = {})."
                                    "".format(normal, norm))
        normal = canonical_normal(normal / np.sqrt(norm))
        normal.flags.writeable = False
        self._normal = normal
        self.index = index

    @property
    def normal(self):
        return self._normal

    @property
    def dim(self):
        return self._normal.shape[0] - 1

    def __repr__(self):
        return "Hyperplane({}, index={})".format(list(self._normal), self.index)

    def evaluate(self, x):
        """Returns ``<x, v>``, negative on the origin side."""
        return _form(_coords(x), self._normal)

    def contains(self, x, tol=TOL_CONSTRUCT):
        x = _coords(x)
        return abs(self.evaluate(x)) <= tol * _scale(x)

    def positive_side(self, x):
        """``True`` when ``x`` lies in the closed half-space ``H+``."""
        return self.evaluate(x) <= 0

    def reflection(self):
        return reflect(self)

    @classmethod
    def at_distance(cls, distance, angle):
        """Line of the hyperbolic plane whose closest point to the origin is
        at ``distance`` in direction ``angle``."""
        normal = [np.cosh(distance) * np.cos(angle),
                  np.cosh(distance) * np.sin(angle),
                  np.sinh(distance)]
        return cls(normal)

    @classmethod
    def through(cls, a, b):
        """Line of the hyperbolic plane through two distinct points."""
        a, b = _coords(a), _coords(b)
        if a.shape != (3,) or b.shape != (3,):
            raise_error(ValueError, "Lines through two points are only "
                                    "available in the hyperbolic plane.")
        normal = minkowski_metric(3) @ np.cross(a, b)
        norm = _form(normal, normal)
        if norm <= 0:
            raise_error(ValueError, "Points {} and {} do not span a line."
                                    "".format(a, b))
        return cls(normal / np.sqrt(norm))


def canonical_normal(normal, tol=TOL_ARITH):
    """Orient a hyperplane normal so that its last coordinate is positive.

    Normals of hyperplanes through the origin are made lexicographically
    positive instead.
    """
    normal = np.array(normal, dtype=float)
    threshold = tol * _scale(normal)
    if normal[-1] > threshold:
        return normal
    if normal[-1] < -threshold:
        return -normal
    for value in normal:
        if value > threshold:
            return normal
        if value < -threshold:
            return -normal
    raise_error(ValueError, "Cannot orient the zero normal.")


class LorentzIsometry:
    """Isometry of the hyperboloid given by a matrix ``M`` with
    ``M^T J M = J`` and ``M_{d+1,d+1} > 0``.

    Args:
        matrix (np.ndarray): ``(d + 1) x (d + 1)`` real matrix.
        check (bool): validate the Minkowski form preservation. The defect is
            compared with ``TOL_CONSTRUCT`` scaled by the squared magnitude of
            the matrix entries.
    """

    __slots__ = ("_matrix",)

    def __init__(self, matrix, check=True):
        matrix = np.array(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or \
                matrix.shape[0] < 3:
            raise_error(ValueError, "Lorentz matrices must be square with size "
                                    "at least 3 but have shape {}."
                                    "".format(matrix.shape))
        if check:
            defect = isometry_defect(matrix)
            if defect > TOL_CONSTRUCT * _scale(matrix) ** 2:
                raise_error(ValueError, "Matrix does not preserve the Minkowski "
                                        "form (defect {}).".format(defect))
            if matrix[-1, -1] <= 0:
                raise_error(ValueError, "Matrix swaps the sheets of the "
                                        "hyperboloid.")
        matrix.flags.writeable = False
        self._matrix = matrix

    @property
    def matrix(self):
        return self._matrix

    @property
    def dim(self):
        return self._matrix.shape[0] - 1

    @classmethod
    def identity(cls, dim=2):
        return cls(np.eye(dim + 1), check=False)

    def __call__(self, x):
        return HPoint(self.apply(_coords(x)))

    def apply(self, coords):
        """Apply to raw coordinates and re-normalize onto the hyperboloid."""
        return _normalize(self._matrix @ coords)

    def apply_normal(self, normal):
        """Image of a hyperplane normal, canonically oriented."""
        return canonical_normal(self._matrix @ np.asarray(normal, dtype=float))

    def __matmul__(self, other):
        if not isinstance(other, LorentzIsometry):
            return NotImplemented
        return LorentzIsometry(self._matrix @ other._matrix, check=False)

    def inverse(self):
        metric = minkowski_metric(self._matrix.shape[0])
        return LorentzIsometry(metric @ self._matrix.T @ metric, check=False)

    def defect(self):
        return isometry_defect(self._matrix)


def isometry_defect(matrix):
    """Returns ``max |M^T J M - J|``."""
    metric = minkowski_metric(matrix.shape[0])
    return float(np.max(np.abs(matrix.T @ metric @ matrix - metric)))


def reflect(v):
    """Reflection ``R(x) = x - 2 <x, v> v`` across a hyperplane.

    Args:
        v (:class:`Hyperplane` or np.ndarray): the hyperplane or its unit
            spacelike normal.

    Returns:
        The :class:`LorentzIsometry` of the reflection.
    """
    if not isinstance(v, Hyperplane):
        v = np.asarray(v, dtype=float)
        norm = minkowski_form(v, v)
        if abs(norm - 1) > TOL_ARITH * _scale(v) ** 2:
            raise_error(ValueError, "Reflections need a unit spacelike normal "
                                    "but <v,v> = {}.".format(norm))
        normal = v
    else:
        normal = v.normal
    size = normal.shape[0]
    metric = minkowski_metric(size)
    matrix = np.eye(size) - 2 * np.outer(normal, metric @ normal)
    return LorentzIsometry(matrix, check=False)


def point_reflection(c):
    """Isometry fixing ``c`` and acting as ``-Id`` on its tangent space."""
    c = _coords(c)
    size = c.shape[0]
    matrix = -np.eye(size) - 2 * np.outer(c, minkowski_metric(size) @ c)
    return LorentzIsometry(matrix, check=False)


def distance(x, y):
    """Hyperbolic distance ``arcosh(-<x, y>)``.

    Arguments of arcosh within ``ACOSH_CLAMP`` (scaled with the coordinate
    magnitudes) below 1 are clamped, smaller ones raise
    :class:`hyptile.config.NumericalDomainError`. The value is evaluated
    through the equivalent chord formula ``2 arsinh(|x - y|_M / 2)``.
    """
    x, y = _coords(x), _coords(y)
    if x.shape != y.shape:
        raise_error(ValueError, "Cannot measure the distance between points of "
                                "shapes {} and {}.".format(x.shape, y.shape))
    argument = -_form(x, y)
    if argument < 1:
        if argument < 1 - ACOSH_CLAMP * _scale(x) * _scale(y):
            raise_error(NumericalDomainError, "Argument {} of arcosh is below 1."
                                              "".format(argument))
        return 0.0
    diff = x - y
    chord = _form(diff, diff)
    if chord <= 0:
        return 0.0
    return float(2 * np.arcsinh(np.sqrt(chord) / 2))


def distances(x, points):
    """Vectorized distances from ``x`` to the rows of ``points``."""
    x = _coords(x)
    points = np.asarray(points, dtype=float)
    products = points[:, :-1] @ x[:-1] - points[:, -1] * x[-1]
    return np.arccosh(np.maximum(-products, 1.0))


def dist_to_hyperplane(x, v):
    """Distance ``arsinh(|<x, v>|)`` from a point to a hyperplane."""
    normal = v.normal if isinstance(v, Hyperplane) else np.asarray(v, dtype=float)
    return float(np.arcsinh(abs(_form(_coords(x), normal))))


def to_beltrami_klein(x):
    """Central projection ``(x_1, ..., x_d) / x_{d+1}`` into the unit ball.

    Also accepts an array with one point per row.
    """
    x = _coords(x)
    return x[..., :-1] / x[..., -1:]


def from_beltrami_klein(k):
    """Inverse of :meth:`hyptile.core.hyperbolic.to_beltrami_klein`."""
    k = np.asarray(k, dtype=float)
    norm = float(k @ k)
    if norm >= 1:
        raise_error(ValueError, "Point {} is not inside the open unit ball."
                                "".format(k))
    return np.append(k, 1.0) / np.sqrt(1 - norm)


def bk_distance(x, y):
    """Beltrami-Klein distance through the cross ratio.

    With ``a`` and ``b`` the ends of the chord through ``x`` and ``y``
    (ordered ``a, x, y, b``) the distance is
    ``log(|ay| |xb| / (|ax| |yb|)) / 2``.

    Args:
        x (np.ndarray): point of the open unit ball.
        y (np.ndarray): point of the open unit ball.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for k in (x, y):
        if float(k @ k) >= 1:
            raise_error(ValueError, "Point {} is not inside the open unit ball."
                                    "".format(k))
    u = y - x
    a = float(u @ u)
    if a == 0:
        return 0.0
    # chord ends solve |x + t u| = 1
    b = float(x @ u)
    c = float(x @ x) - 1
    q = -(b + np.copysign(np.sqrt(b * b - a * c), b))
    roots = (q / a, c / q)
    lower, upper = min(roots), max(roots)
    return float(0.5 * np.log((1 - lower) * upper / ((-lower) * (upper - 1))))


def to_poincare(x):
    """Stereographic projection ``(x_1, ..., x_d) / (1 + x_{d+1})``, also
    row by row for arrays of points."""
    x = _coords(x)
    return x[..., :-1] / (1 + x[..., -1:])


def from_poincare(u):
    """Inverse of :meth:`hyptile.core.hyperbolic.to_poincare`."""
    u = np.asarray(u, dtype=float)
    norm = float(u @ u)
    if norm >= 1:
        raise_error(ValueError, "Point {} is not inside the open unit ball."
                                "".format(u))
    return np.append(2 * u, 1 + norm) / (1 - norm)


def geodesic_point(x, y, t):
    """Point ``gamma(t)`` of the unit-speed geodesic from ``x`` to ``y``
    rescaled to ``[0, 1]``.

    Args:
        x (:class:`HPoint`): start point.
        y (:class:`HPoint`): end point, distinct from ``x``.
        t (float): parameter in ``[0, 1]``.

    Returns:
        The :class:`HPoint` at distance ``t * distance(x, y)`` from ``x``.
    """
    if not 0 <= t <= 1:
        raise_error(ValueError, "Geodesic parameter must lie in [0, 1] but is "
                                "{}.".format(t))
    xc, yc = _coords(x), _coords(y)
    length = distance(xc, yc)
    if length == 0:
        raise_error(ValueError, "Geodesics need two distinct endpoints.")
    if t == 0:
        return x if isinstance(x, HPoint) else HPoint(xc)
    if t == 1:
        return y if isinstance(y, HPoint) else HPoint(yc)
    return HPoint(_geodesic(xc, yc, t, length), normalize=True)


def _geodesic(x, y, t, length):
    return (np.sinh((1 - t) * length) * x + np.sinh(t * length) * y) / np.sinh(length)


def geodesic_samples(x, y, segments):
    """Array with ``segments + 1`` equally spaced points from ``x`` to ``y``."""
    xc, yc = _coords(x), _coords(y)
    length = distance(xc, yc)
    ts = np.linspace(0, 1, segments + 1)
    if length == 0:
        return np.tile(xc, (segments + 1, 1))
    weights = np.sinh(np.outer(1 - ts, [length])) * xc + \
              np.sinh(np.outer(ts, [length])) * yc
    samples = weights / np.sinh(length)
    samples[0], samples[-1] = xc, yc
    return samples


def _project_flat(x, normals):
    """Nearest point of ``x`` on the flat ``{<., n> = 0 for n in normals}``.

    Returns ``None`` when the normals are dependent or the flat misses the
    hyperboloid.
    """
    metric = np.diag(minkowski_metric(x.shape[0]))
    jn = normals * metric
    gram = jn @ normals.T
    try:
        coefficients = np.linalg.solve(gram, jn @ x)
    except np.linalg.LinAlgError:
        return None
    foot = x - coefficients @ normals
    if _form(foot, foot) >= 0:
        return None
    return _normalize(foot)


def project_to_geodesic(x, a, b):
    """Nearest point to ``x`` on the full geodesic through ``a`` and ``b``."""
    x, a, b = _coords(x), _coords(a), _coords(b)
    return HPoint(_foot_on_geodesic(x, a, b)[0])


def _foot_on_geodesic(x, a, b):
    basis = np.stack([a, b])
    metric = np.diag(minkowski_metric(x.shape[0]))
    jb = basis * metric
    coefficients = np.linalg.solve(jb @ basis.T, jb @ x)
    foot = coefficients @ basis
    scale = np.sqrt(-_form(foot, foot))
    return foot / scale, coefficients / scale


def segment_distance(x, a, b):
    """Distance from ``x`` to the geodesic segment ``[a, b]``."""
    x, a, b = _coords(x), _coords(a), _coords(b)
    foot, coefficients = _foot_on_geodesic(x, a, b)
    # points of the segment are non-negative combinations of its ends
    if np.all(coefficients >= 0):
        return distance(x, foot)
    return min(distance(x, a), distance(x, b))


def angle_at(x, y, z):
    """Angle at ``x`` between the geodesics towards ``y`` and ``z``."""
    x, y, z = _coords(x), _coords(y), _coords(z)
    u = y + _form(x, y) * x
    w = z + _form(x, z) * x
    cosine = _form(u, w) / np.sqrt(_form(u, u) * _form(w, w))
    return float(np.arccos(np.clip(cosine, -1.0, 1.0)))


def sample_ball(rng, samples, max_radius, dim=2):
    """Random points at distance at most ``max_radius`` from the origin.

    Args:
        rng (np.random.Generator): random generator.
        samples (int): number of points.
        max_radius (float): radius of the ball.
        dim (int): dimension of the hyperbolic space.

    Returns:
        Array of shape ``(samples, dim + 1)`` with hyperboloid coordinates.
    """
    directions = rng.normal(size=(samples, dim))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    radii = max_radius * np.sqrt(rng.uniform(size=samples))
    return np.column_stack([np.sinh(radii)[:, None] * directions, np.cosh(radii)])


def bk_local_distortion(rng, samples, max_radius, scale=1e-3, dim=2):
    """Sampled ratios between Beltrami-Klein and Euclidean distances of nearby
    points of the Klein ball.

    Args:
        rng (np.random.Generator): random generator.
        samples (int): number of sampled pairs.
        max_radius (float): hyperbolic radius of the sampled region.
        scale (float): maximal Euclidean distance of the pairs.

    Returns:
        Tuple ``(min_ratio, max_ratio)``.
    """
    points = sample_ball(rng, samples, max_radius, dim=dim)
    klein = points[:, :-1] / points[:, -1:]
    steps = rng.normal(size=klein.shape)
    steps *= (scale * rng.uniform(0.1, 1, size=samples) /
              np.linalg.norm(steps, axis=1))[:, None]
    ratios = []
    for k, step in zip(klein, steps):
        other = k + step
        if other @ other >= 1:
            continue
        ratios.append(bk_distance(k, other) / np.linalg.norm(step))
    return min(ratios), max(ratios)
