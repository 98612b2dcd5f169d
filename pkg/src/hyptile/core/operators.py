# -*- coding: utf-8 -*-
"""Extension and decomposition operators for Lipschitz functions on a
``{p,4}`` tiling.

A field ``g`` is split into its values on the net of tile incentres and a
sequence of tile functions ``g_m`` obtained by sweeping the reflection
operators ``chi_n`` over the atlas hyperplanes. :meth:`reconstruct` inverts
the decomposition with the inverse sweeps ``E_m``.
"""
import weakref
import numpy as np
from hyptile.config import raise_error, log, TOL_ARITH, TOL_IDENTITY, \
                           FACE_OFFSET, OutOfCoreError
from hyptile.core.hyperbolic import HPoint, distance, _coords, _normalize
from hyptile.core.fields import ChiSweep, CutoffField, NetExtension, \
                                PartitionField, RetractExtension, \
                                TileRestriction, TileSum


class PartitionOfUnity:
    """Partition of unity ``phi_n = rho_n / sum_k rho_k`` subordinate to the
    tiles, with ``rho_n(x) = max(1 - dist(x, P_n) / delta, 0)``.

    Weights are computed on the full tiling: the point is folded into the
    template and the tiles meeting the template are checked, so the values
    do not depend on the truncation of the atlas.

    Args:
        atlas (:class:`hyptile.core.tiling.TilingAtlas`): the atlas.
    """

    def __init__(self, atlas):
        template = atlas.template
        if min(template.nonadjacent_gap, template.side_length) < template.inradius:
            raise_error(ValueError, "Tiles outside the closed star of a {}-gon come "
                                    "closer than its in-radius.".format(template.p))
        self.atlas = atlas
        self.delta = template.inradius
        # all star isometries are involutions
        self._star = np.array(template.star_matrices())
        self._lipschitz = {}

    def local_weights(self, x):
        """Non-zero weights at ``x``.

        Returns:
            Tuple ``(incentres, weights)`` with the incentres of the weighted
            tiles as rows.
        """
        template = self.atlas.template
        y, matrix = template.fold(_coords(x))
        gaps = template.distance_many(self._star @ y)
        rho = 1.0 - gaps / self.delta
        # tiles at distance delta only carry rounding noise
        mask = rho > TOL_ARITH
        weights = rho[mask] / np.sum(rho[mask])
        incentres = np.array([_normalize(matrix @ s[:, -1]) for s in self._star[mask]])
        return incentres, weights

    def tile_weights(self, x):
        """Non-zero weights at ``x`` keyed by atlas tile id.

        Raises :class:`hyptile.config.OutOfCoreError` when a weighted tile is
        missing from the atlas.
        """
        result = {}
        for incentre, weight in zip(*self.local_weights(x)):
            tile_id = self.atlas.find_tile(incentre)
            if tile_id is None:
                raise_error(OutOfCoreError, "Point {} is weighted by a tile outside "
                                            "the atlas.".format(_coords(x)))
            result[tile_id] = float(weight)
        return result

    def phi(self, tile_id):
        """Member ``phi_n`` as a field."""
        self.atlas.tile(tile_id)
        return PartitionField(self, tile_id)

    def lipschitz_witness(self, samples=500, seed=0):
        """Sampled Lipschitz constant ``L_N`` shared by all ``phi_n``."""
        from hyptile.core.estimators import sample_pairs
        key = (samples, seed)
        if key not in self._lipschitz:
            best = 0.0
            for x, y in sample_pairs(self.atlas, seed, samples):
                gap = distance(x, y)
                if gap == 0:
                    continue
                wx, wy = self.tile_weights(x), self.tile_weights(y)
                for k in set(wx) | set(wy):
                    best = max(best, abs(wx.get(k, 0.0) - wy.get(k, 0.0)) / gap)
            self._lipschitz[key] = best
            log.info("Partition of unity Lipschitz witness {:.6f} from {} pairs."
                     "".format(best, samples))
        return self._lipschitz[key]


_PARTITIONS = weakref.WeakKeyDictionary()


def partition_of_unity(atlas):
    """Partition of unity of the atlas tiles, shared per atlas.

    Returns:
        A :class:`hyptile.core.operators.PartitionOfUnity`.
    """
    if atlas not in _PARTITIONS:
        _PARTITIONS[atlas] = PartitionOfUnity(atlas)
    return _PARTITIONS[atlas]


class NetFunction:
    """Function on the net of tile incentres, vanishing at the seed incentre.

    Use the constructors :meth:`table`, :meth:`lazy` and :meth:`empty`.

    Args:
        atlas (:class:`hyptile.core.tiling.TilingAtlas`): the atlas.
        values (dict): tile id to value.
        field (:class:`hyptile.abstractions.fields.ScalarField`): field
            restricted on demand instead of a table.
        constant (float): value ``g(p_1)`` removed from the field, added back
            by :meth:`hyptile.core.operators.reconstruct`.
        outside (str): ``"raise"`` to raise
            :class:`hyptile.config.OutOfCoreError` for incentres without a
            value, ``"zero"`` for finitely supported net functions.
    """

    def __init__(self, atlas, values=None, field=None, constant=0.0, outside="raise"):
        if outside not in ("raise", "zero"):
            raise_error(ValueError, "Unknown policy {} for values outside the "
                                    "table.".format(outside))
        self.atlas = atlas
        self.field = field
        self.constant = float(constant)
        self.outside = outside
        self._values = {} if values is None else {int(k): float(v) for k, v in values.items()}
        for tile_id in self._values:
            atlas.tile(tile_id)
        if self._values.get(1, 0.0) != 0:
            raise_error(ValueError, "Net functions must vanish at the seed incentre "
                                    "but the value is {}.".format(self._values[1]))

    @classmethod
    def table(cls, atlas, values, constant=0.0, outside="raise"):
        if not isinstance(values, dict):
            values = {tile_id: v for tile_id, v in enumerate(values, start=1)}
        return cls(atlas, values=values, constant=constant, outside=outside)

    @classmethod
    def lazy(cls, atlas, field, constant=None):
        """Restriction ``field - field(p_1)`` evaluated on demand."""
        if constant is None:
            constant = field.evaluate(HPoint.origin(atlas.dim).coords)
        return cls(atlas, field=field, constant=constant)

    @classmethod
    def empty(cls, atlas):
        return cls(atlas)

    @property
    def is_lazy(self):
        return self.field is not None

    @property
    def is_empty(self):
        return self.field is None and not self._values

    def value(self, incentre, query=None):
        """Value at an incentre given by its coordinates.

        Lazy values are evaluated through ``query`` when one is given, so
        repeated incentres are memoized by the query and not by the net
        function, which holds no evaluation state.
        """
        incentre = _coords(incentre)
        if self.field is not None:
            if query is None:
                return self.field.evaluate(incentre) - self.constant
            return query.evaluate(self.field, incentre) - self.constant
        tile_id = self.atlas.find_tile(incentre)
        if tile_id is not None and tile_id in self._values:
            return self._values[tile_id]
        if tile_id == 1 or self.outside == "zero" or self.is_empty:
            return 0.0
        raise_error(OutOfCoreError, "No net value for the tile with incentre {}."
                                    "".format(incentre))

    def __getitem__(self, tile_id):
        return self.value(self.atlas.tile(tile_id).incentre.coords)

    @property
    def values(self):
        """Tile id to value for every tabulated (or atlas, if lazy) tile."""
        if self.field is not None:
            return {t.id: self[t.id] for t in self.atlas.tiles}
        return dict(self._values)

    def lipschitz(self, tile_ids=None):
        """Exact Lipschitz constant of the restriction to the given tiles."""
        if tile_ids is None:
            tile_ids = sorted(self.values)
        values = np.array([self[t] for t in tile_ids])
        points = np.array([self.atlas.tile(t).incentre.coords for t in tile_ids])
        best = 0.0
        for i in range(len(tile_ids)):
            gaps = np.arccosh(np.maximum(-(points[i + 1:, :-1] @ points[i, :-1] -
                                           points[i + 1:, -1] * points[i, -1]), 1.0))
            if len(gaps):
                best = max(best, float(np.max(np.abs(values[i + 1:] - values[i]) / gaps)))
        return best


def extend_from_net(atlas, f):
    """Extension ``E_N f = sum_n f(p_n) phi_n`` of a net function.

    Args:
        atlas (:class:`hyptile.core.tiling.TilingAtlas`): the atlas.
        f (:class:`hyptile.core.operators.NetFunction` or dict): the net
            values, required on all core tiles.

    Returns:
        A :class:`hyptile.abstractions.fields.ScalarField`.
    """
    if not isinstance(f, NetFunction):
        f = NetFunction.table(atlas, f)
    if f.atlas is not atlas:
        raise_error(ValueError, "Net function belongs to a different atlas.")
    if not f.is_lazy and not f.is_empty:
        missing = [m for m in atlas.core_tile_ids if m != 1 and m not in f._values]
        if missing:
            raise_error(ValueError, "Net values missing for core tiles {}."
                                    "".format(missing[:10]))
    return NetExtension(partition_of_unity(atlas), f)


def net_extension_bound(atlas, lipschitz_witness):
    """Constant ``C = 2 diam(P) L_N K`` with ``K`` the neighbour count of a
    core tile, bounding ``Lip(E_N f) / Lip(f|N)``."""
    if atlas.core_tile_ids:
        neighbors = atlas.neighbor_count(atlas.core_tile_ids[0])
    else:
        neighbors = atlas.template.neighbor_bound
    return 2 * atlas.template.diameter * lipschitz_witness * neighbors


def cutoff_psi(atlas, n):
    """Cutoff ``psi_n(x) = max(1 - dist(x, H_n) / epsilon, 0)``."""
    return CutoffField(atlas.hyperplane(n), atlas.epsilon)


def chi(atlas, n, g, inverse=False):
    """Reflection operator ``chi_n`` (or its inverse) applied to ``g``.

    On ``H_n-`` the field is unchanged, on ``H_n+`` the operator subtracts
    (adds for the inverse) ``psi_n(x) g(R_n x)``.
    """
    atlas.hyperplane(n)
    return ChiSweep(atlas, g, [n], inverse=inverse)


def _vanishing_set(atlas, m):
    tile = atlas.tile(m)
    return [(k, face) for face, k in enumerate(tile.face_hyperplanes)
            if atlas.hyperplane(k).evaluate(tile.incentre) < 0]


def compute_S(atlas, m):
    """Faces of a core tile lying on hyperplanes that keep the tile on the
    origin side.

    Returns:
        List of ``(hyperplane index, face)`` pairs.
    """
    atlas.check_core(m)
    return _vanishing_set(atlas, m)


def support_tile_ids(atlas):
    """Core tiles together with every tile whose closure meets a core tile."""
    graph = atlas.closure_graph()
    ids = set(atlas.core_tile_ids)
    for m in atlas.core_tile_ids:
        ids.update(graph.neighbors(m))
    return sorted(ids)


def vanishing_residual(atlas, m, h, samples=100, offset=FACE_OFFSET, basepoint=True):
    """Largest ``|h|`` at face samples of ``S_m`` moved ``offset`` into the
    tile, and at the incentre when ``basepoint`` is set."""
    residual = 0.0
    if basepoint:
        residual = abs(h.evaluate(atlas.tile(m).incentre.coords))
    for _, face in _vanishing_set(atlas, m):
        for point in atlas.face_samples(m, face, samples, offset=offset):
            residual = max(residual, abs(h.evaluate(point)))
    return residual


class TileFunctionSeq:
    """Sequence of tile functions ``g_m`` on the closed tiles.

    Args:
        atlas (:class:`hyptile.core.tiling.TilingAtlas`): the atlas.
        components (dict): tile id to field. Tiles without a component carry
            the zero function.
        bounded (bool): components of the bounded variant, which need not
            vanish at the incentres.
    """

    def __init__(self, atlas, components, bounded=False):
        self.atlas = atlas
        self.components = {}
        for m in sorted(components):
            field = components[m]
            if not isinstance(field, TileRestriction) or field.tile_id != m:
                field = TileRestriction(atlas, m, field)
            self.components[m] = field
        self.vanishing = {m: _vanishing_set(atlas, m) for m in self.components}
        self.bounded = bounded
        self.witness = None

    def __getitem__(self, m):
        return self.components[m]

    def __contains__(self, m):
        return m in self.components

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def tile_ids(self):
        return list(self.components)

    def residuals(self, samples=100, tile_ids=None):
        """Largest incentre value and largest value on the vanishing sets.

        Returns:
            Tuple ``(basepoint, vanishing)`` of maxima over the tiles.
        """
        if tile_ids is None:
            tile_ids = self.tile_ids()
        basepoint, vanishing = 0.0, 0.0
        for m in tile_ids:
            g = self.components[m]
            if not self.bounded:
                basepoint = max(basepoint, abs(g.evaluate(self.atlas.tile(m).incentre.coords)))
            vanishing = max(vanishing, vanishing_residual(self.atlas, m, g, samples,
                                                          basepoint=False))
        return basepoint, vanishing


def decompose(atlas, g, subtract_net=True, tile_ids=None, full_sweep=False):
    """Split a field into net values and tile functions.

    With ``subtract_net`` the field is reduced to
    ``h = g - g(p_1) - E_N(g|N)``, which vanishes on the net. Without it
    (bounded variant) ``h = g`` and the net function is empty. The component
    on ``P_m`` is ``chi_{k_r} ... chi_{k_1} h`` restricted to the tile, with
    ``k_1 < ... < k_r`` the hyperplanes supporting the faces of ``P_m``; all
    other ``chi_n`` act as the identity on ``P_m``.

    Args:
        atlas (:class:`hyptile.core.tiling.TilingAtlas`): the atlas.
        g (:class:`hyptile.abstractions.fields.ScalarField`): the field.
        subtract_net (bool): remove the net values first.
        tile_ids (list): tiles with a component, defaults to
            :meth:`hyptile.core.operators.support_tile_ids`.
        full_sweep (bool): sweep over every hyperplane up to the largest face
            index instead of the faces only.

    Returns:
        Tuple ``(net, seq)`` with a :class:`NetFunction` and a
        :class:`TileFunctionSeq`.
    """
    if subtract_net:
        net = NetFunction.lazy(atlas, g)
        reduced = g - net.constant - extend_from_net(atlas, net)
    else:
        net = NetFunction.empty(atlas)
        reduced = g
    if tile_ids is None:
        tile_ids = support_tile_ids(atlas)
    components = {}
    for m in tile_ids:
        faces = atlas.tile(m).face_hyperplanes
        if full_sweep:
            indices = np.arange(1, max(faces) + 1)
        else:
            indices = sorted(faces)
        components[m] = TileRestriction(atlas, m, ChiSweep(atlas, reduced, indices))
    log.info("Decomposed field {} into {} tile functions (subtract_net={})."
             "".format(g.name, len(components), subtract_net))
    return net, TileFunctionSeq(atlas, components, bounded=not subtract_net)


def extend_from_tile(atlas, m, h, check=True, basepoint=True, mode="full", samples=16):
    """Extension ``E_m h`` of a function on ``P_m`` vanishing on ``S_m``.

    The restriction of ``h`` to the closed tile is swept with the inverse
    operators ``chi_n^{-1}`` in descending hyperplane order. In ``"full"``
    mode every index up to the largest face hyperplane outside ``S_m`` is
    swept, in ``"faces"`` mode only the faces outside ``S_m``; both give the
    same field.

    Args:
        atlas (:class:`hyptile.core.tiling.TilingAtlas`): the atlas.
        m (int): the tile.
        h (:class:`hyptile.abstractions.fields.ScalarField`): function on
            the tile.
        check (bool): sample ``h`` on ``S_m`` (and at the incentre when
            ``basepoint`` is set) and raise ``ValueError`` if it does not
            vanish within ``TOL_IDENTITY``.
        mode (str): ``"full"`` or ``"faces"``.
        samples (int): face samples used by the check.

    Returns:
        A :class:`hyptile.abstractions.fields.ScalarField` vanishing on the
        net.
    """
    if mode not in ("full", "faces"):
        raise_error(ValueError, "Unknown sweep mode {}.".format(mode))
    tile = atlas.tile(m)
    if check:
        residual = vanishing_residual(atlas, m, h, samples, basepoint=basepoint)
        if residual > TOL_IDENTITY:
            raise_error(ValueError, "Tile function does not vanish on the hidden "
                                    "faces of tile {} (residual {}).".format(m, residual))
    hidden = {k for k, _ in _vanishing_set(atlas, m)}
    swept = sorted((k for k in tile.face_hyperplanes if k not in hidden), reverse=True)
    base = TileRestriction(atlas, m, h)
    if not swept:
        return base
    if mode == "full":
        indices = np.arange(swept[0], 0, -1)
    else:
        indices = swept
    # the base only looks at P_m, reflected points may leave the atlas
    return ChiSweep(atlas, base, indices, inverse=True, check_coverage=False)


def reconstruct(atlas, net, seq, mode="full"):
    """Inverse of :meth:`hyptile.core.operators.decompose`.

    Returns the field ``g(p_1) + E_N(net) + sum_m E_m g_m``, where the sum
    is taken pointwise over the tiles near the evaluation point.
    """
    if net.atlas is not atlas or seq.atlas is not atlas:
        raise_error(ValueError, "Net values and tile functions must belong to the "
                                "atlas used for reconstruction.")
    extensions = {m: extend_from_tile(atlas, m, seq[m], check=False, mode=mode)
                  for m in seq}
    net_field = None if net.is_empty else extend_from_net(atlas, net)
    return TileSum(atlas, extensions, net_field=net_field, constant=net.constant)


def extend_from_retract(polytope, f, epsilon):
    """Extension ``(f o r) * max(1 - dist(x, N) / epsilon, 0)`` of a field
    given on a convex polytope ``N``, with ``r`` the nearest-point
    projection onto ``N``."""
    if epsilon <= 0:
        raise_error(ValueError, "Extension width must be positive but is {}."
                                "".format(epsilon))
    polytope.interior_witness
    return RetractExtension(polytope, f, epsilon)


def retract_norm_bound(diameter, epsilon):
    """Bound ``Lip(r) + diam(N) / epsilon`` of the retract extension."""
    return 1.0 + diameter / epsilon


def chi_norm_bound(atlas, bounded=False):
    """Upper bound for the norm of a single ``chi_n`` on tile functions.

    The product rule gives ``Lip(chi g) <= 2 Lip(g) + sup|g| / epsilon`` on
    the support of ``psi_n``. For functions vanishing somewhere on a tile
    ``sup|g| <= diam(P) Lip(g)``; for the bounded norm ``sup + Lip`` the
    sup-part is bounded by ``2 sup|g|``.
    """
    if bounded:
        return 2.0 + 1.0 / atlas.epsilon
    return 2.0 + atlas.template.diameter / atlas.epsilon
