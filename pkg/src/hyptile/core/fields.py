# -*- coding: utf-8 -*-
import numpy as np
from hyptile.abstractions.fields import ScalarField
from hyptile.config import raise_error, TOL_ARITH
from hyptile.core.hyperbolic import HPoint, distance, _coords, _scale


class ConstantField(ScalarField):
    """Field with the same value everywhere."""

    memoized = False

    def __init__(self, value):
        super().__init__()
        self.value = float(value)

    def _evaluate(self, x, query):
        return self.value


class FunctionField(ScalarField):
    """Leaf field wrapping a python function of the hyperboloid coordinates.

    Args:
        function (callable): maps an array of ``d + 1`` coordinates to a float.
        name (str): optional name used in reports.
    """

    memoized = False

    def __init__(self, function, name=None):
        super().__init__()
        self.function = function
        if name is not None:
            self.name = name

    def _evaluate(self, x, query):
        return float(self.function(x))


class DistanceField(ScalarField):
    """Distance ``rho(x, point)`` to a fixed point, the origin by default."""

    memoized = False

    def __init__(self, point=None):
        super().__init__()
        if point is None:
            point = HPoint.origin(2)
        self.point = np.array(_coords(point))

    def _evaluate(self, x, query):
        return distance(x, self.point)


class KleinCoordinate(ScalarField):
    """Beltrami-Klein coordinate ``x_axis / x_{d+1}``."""

    memoized = False

    def __init__(self, axis=0):
        super().__init__()
        self.axis = axis

    def _evaluate(self, x, query):
        return float(x[self.axis] / x[-1])


class MappedField(ScalarField):
    """Pointwise image ``function(field(x))`` of another field."""

    def __init__(self, field, function, name=None):
        super().__init__()
        self.field = field
        self.function = function
        if name is not None:
            self.name = name

    def _evaluate(self, x, query):
        return float(self.function(query.evaluate(self.field, x)))


class LinearCombination(ScalarField):
    """Finite sum ``sum_i c_i f_i`` of fields.

    Args:
        terms (list): ``(coefficient, field)`` pairs.
    """

    def __init__(self, terms):
        super().__init__()
        self.terms = []
        for coefficient, field in terms:
            # flatten nested sums
            if isinstance(field, LinearCombination):
                self.terms.extend((coefficient * c, f) for c, f in field.terms)
            else:
                self.terms.append((float(coefficient), field))

    def _evaluate(self, x, query):
        total = 0.0
        for coefficient, field in self.terms:
            if coefficient != 0:
                total += coefficient * query.evaluate(field, x)
        return total


class Product(ScalarField):
    """Pointwise product of fields."""

    def __init__(self, factors):
        super().__init__()
        self.factors = list(factors)

    def _evaluate(self, x, query):
        value = 1.0
        for field in self.factors:
            value *= query.evaluate(field, x)
            if value == 0:
                break
        return value


class CutoffField(ScalarField):
    """Tent ``max(1 - dist(x, H) / epsilon, 0)`` around a hyperplane.

    Args:
        hyperplane (:class:`hyptile.core.hyperbolic.Hyperplane`): the hyperplane.
        epsilon (float): width of the support.
    """

    memoized = False

    def __init__(self, hyperplane, epsilon):
        super().__init__()
        if epsilon <= 0:
            raise_error(ValueError, "Cutoff width must be positive but is {}."
                                    "".format(epsilon))
        self.hyperplane = hyperplane
        self.epsilon = float(epsilon)

    def _evaluate(self, x, query):
        gap = np.arcsinh(abs(self.hyperplane.evaluate(x)))
        return float(max(1.0 - gap / self.epsilon, 0.0))


class BumpField(ScalarField):
    """Tent on a tile: ``min_j dist(x, H_j) / scale`` inside, zero outside.

    Args:
        atlas (:class:`hyptile.core.tiling.TilingAtlas`): the atlas.
        tile_id (int): the tile.
        faces (list): 0-based faces entering the minimum, all by default.
            With all faces the bump vanishes on the whole tile boundary.
        scale (float): normalization, the in-radius by default so that the
            value at the incentre is one.
    """

    memoized = False

    def __init__(self, atlas, tile_id, faces=None, scale=None):
        super().__init__()
        self.atlas = atlas
        self.tile = atlas.tile(tile_id)
        self.faces = list(range(atlas.p)) if faces is None else sorted(faces)
        if not self.faces:
            raise_error(ValueError, "Bump fields need at least one face.")
        self.scale = atlas.delta if scale is None else float(scale)

    def _evaluate(self, x, query):
        y = self.tile.to_template(x)
        values = self.atlas.template.face_values(y)
        if np.max(values) > TOL_ARITH * _scale(y):
            return 0.0
        gap = max(-np.max(values[self.faces]), 0.0)
        return float(np.arcsinh(gap) / self.scale)


class TileRestriction(ScalarField):
    """A field on the closed tile ``P_m`` and zero elsewhere."""

    def __init__(self, atlas, tile_id, field):
        super().__init__()
        self.atlas = atlas
        self.tile_id = tile_id
        self.tile = atlas.tile(tile_id)
        self.field = field

    def _evaluate(self, x, query):
        if not self.atlas.template.contains(self.tile.to_template(x)):
            return 0.0
        return query.evaluate(self.field, x)


class ChiSweep(ScalarField):
    """Composition of the reflection operators ``chi_n`` (or their inverses)
    applied to a base field.

    The operator for hyperplane ``H_n`` is
    ``g(x) -/+ psi_n(x) g(R_n x)`` on ``H_n+`` and the identity on ``H_n-``.

    Args:
        atlas (:class:`hyptile.core.tiling.TilingAtlas`): atlas holding the
            hyperplanes and the cutoff width ``epsilon``.
        base (:class:`hyptile.abstractions.fields.ScalarField`): the field
            the operators act on.
        indices (list): 1-based hyperplane indices in application order.
        inverse (bool): apply ``chi_n^{-1}`` instead of ``chi_n``.
        check_coverage (bool): raise
            :class:`hyptile.config.OutOfAtlasError` when a reflected point
            with non-zero cutoff leaves the atlas tiles.
    """

    def __init__(self, atlas, base, indices, inverse=False, check_coverage=True):
        super().__init__()
        indices = np.asarray(indices, dtype=int).reshape(-1)
        if len(indices) and (indices.min() < 1 or indices.max() > len(atlas.hyperplanes)):
            raise_error(ValueError, "Hyperplane indices must lie in [1, {}]."
                                    "".format(len(atlas.hyperplanes)))
        self.atlas = atlas
        self.base = base
        self.indices = indices
        self.inverse = inverse
        self.check_coverage = check_coverage
        self.sign = 1.0 if inverse else -1.0
        self.epsilon = atlas.epsilon
        self._threshold = np.sinh(atlas.epsilon)
        self._normals = atlas.normals[indices - 1]
        self._products = atlas.normal_products[indices - 1]

    def active_positions(self, x):
        """Positions of the hyperplanes whose cutoff is positive at ``x`` on
        their ``H+`` side, with all the form values."""
        values = self._products @ x
        mask = (values <= 0) & (np.abs(values) < self._threshold)
        return np.nonzero(mask)[0], values

    def _evaluate(self, x, query):
        return self._value(x, len(self.indices), query)

    def _value(self, x, upto, query):
        positions, values = self.active_positions(x)
        k = int(np.searchsorted(positions, upto)) - 1
        if k < 0:
            query.base_evaluations += 1
            return query.evaluate(self.base, x)
        position = int(positions[k])
        key = (self.id, position, query.point_key(x))
        value = query.lookup(key)
        if value is not None:
            return value
        value = values[position]
        psi = 1.0 - np.arcsinh(-value) / self.epsilon
        reflected = x - 2 * value * self._normals[position]
        if self.check_coverage:
            self.atlas.locate(reflected)
        result = self._value(x, position, query) + \
                 self.sign * psi * self._value(reflected, position, query)
        return query.store(key, result)


class PartitionField(ScalarField):
    """Single member ``phi_n`` of a partition of unity."""

    memoized = False

    def __init__(self, partition, tile_id):
        super().__init__()
        self.partition = partition
        self.tile_id = tile_id

    def _evaluate(self, x, query):
        return self.partition.tile_weights(x).get(self.tile_id, 0.0)


class NetExtension(ScalarField):
    """Extension ``sum_n f(p_n) phi_n`` of a function on the net."""

    def __init__(self, partition, net):
        super().__init__()
        self.partition = partition
        self.net = net

    def _evaluate(self, x, query):
        if self.net.is_empty:
            return 0.0
        incentres, weights = self.partition.local_weights(x)
        return float(sum(w * self.net.value(c, query) for c, w in zip(incentres, weights)))


class RetractExtension(ScalarField):
    """Extension ``f(r(x)) * max(1 - dist(x, N) / epsilon, 0)`` of a field
    given on a convex polytope ``N`` with nearest-point retraction ``r``."""

    def __init__(self, polytope, field, epsilon):
        super().__init__()
        self.polytope = polytope
        self.field = field
        self.epsilon = float(epsilon)

    def _evaluate(self, x, query):
        foot = self.polytope.project(x).coords
        weight = 1.0 - distance(x, foot) / self.epsilon
        if weight <= 0:
            return 0.0
        return weight * query.evaluate(self.field, foot)


class TileSum(ScalarField):
    """Pointwise sum of per-tile extensions plus a net extension.

    Only tiles whose closure meets the tile containing the point are
    visited, and among those only tiles closer than ``reach``.

    Args:
        atlas (:class:`hyptile.core.tiling.TilingAtlas`): the atlas.
        extensions (dict): tile id to extended field.
        net_field (:class:`hyptile.abstractions.fields.ScalarField`):
            optional extension of the net values.
        constant (float): value added everywhere.
        reach (float): distance beyond which an extension vanishes.
    """

    def __init__(self, atlas, extensions, net_field=None, constant=0.0, reach=None):
        super().__init__()
        self.atlas = atlas
        self.extensions = dict(extensions)
        self.net_field = net_field
        self.constant = float(constant)
        self.reach = 2 * atlas.epsilon if reach is None else float(reach)

    def terms(self, x):
        """Tile ids whose extension may be non-zero at ``x``."""
        tile_id, _ = self.atlas.locate(x)
        candidates = {tile_id}
        candidates.update(self.atlas.closure_graph().neighbors(tile_id))
        return [m for m in sorted(candidates) if m in self.extensions and
                self.atlas.tile_distance(m, x) < self.reach]

    def _evaluate(self, x, query):
        total = self.constant
        if self.net_field is not None:
            total += query.evaluate(self.net_field, x)
        for m in self.terms(x):
            total += query.evaluate(self.extensions[m], x)
        return total
