# -*- coding: utf-8 -*-
"""Regular right-angled tilings ``{p,4}`` of the hyperbolic plane.

The template polygon is reflected across its faces breadth-first; tiles are
deduplicated through their incentres and every face is registered on one of
the ordered atlas hyperplanes ``H_1, H_2, ...``.
"""
import itertools
from dataclasses import dataclass, field
from typing import List, Tuple
import numpy as np
import networkx as nx
from hyptile.config import raise_error, log, get_max_tiles, TOL_ARITH, \
                           TOL_CONSTRUCT, TOL_IDENTITY, QUANTUM, EPSILON_MARGIN, \
                           MAX_LOCATE_STEPS, MAX_FOLD_RADIUS, OutOfAtlasError, \
                           NumericalDomainError, \
                           BoundaryTruncationError, ResourceLimitError
from hyptile.core.hyperbolic import HPoint, Hyperplane, LorentzIsometry, \
                                    minkowski_metric, canonical_normal, \
                                    distance, distances, segment_distance, \
                                    point_reflection, reflect, geodesic_point, \
                                    _coords, _form, _normalize, _scale
from hyptile.core.polytopes import ConvexPolytope


# Right-angled regular tessellations of hyperbolic spaces; only the planar
# family can be enumerated here
RIGHT_ANGLED_TILINGS = {
    "{p,4}": {"dim": 2, "enumerable": True, "condition": "p >= 5"},
    "{5,3,4}": {"dim": 3, "enumerable": False, "condition": None},
    "{5,3,3,4}": {"dim": 4, "enumerable": False, "condition": None},
}

_METRIC = np.diag(minkowski_metric(3))


class _QuantizedIndex:
    """Vectors keyed by their coordinates quantized relative to their size.

    Coordinates of far tiles grow like ``cosh r`` and so does their rounding
    drift, so two vectors match when they differ by at most ``quantum``
    times the magnitude of the stored one. Vectors are filed under the power
    of two bounding their magnitude with cells of ``quantum`` times that
    power; lookups search the neighbouring cells and magnitudes.
    """

    def __init__(self, quantum=QUANTUM):
        self.quantum = quantum
        self._cells = {}
        self._offsets = None

    @staticmethod
    def _magnitude(vector):
        return max(1.0, float(np.max(np.abs(vector))))

    @staticmethod
    def _exponent(magnitude):
        return int(np.ceil(np.log2(magnitude)))

    def _base(self, vector, exponent):
        return tuple(np.floor(vector / (self.quantum * 2.0 ** exponent)).astype(np.int64))

    def find(self, vector):
        vector = np.asarray(vector, dtype=float)
        if self._offsets is None:
            self._offsets = np.array(list(itertools.product((-1, 0, 1),
                                                            repeat=len(vector))))
        centre = self._exponent(self._magnitude(vector))
        for exponent in (centre, centre - 1, centre + 1):
            base = np.array(self._base(vector, exponent))
            for offset in self._offsets:
                for stored, value in self._cells.get((exponent,) + tuple(base + offset), ()):
                    tolerance = self.quantum * self._magnitude(stored)
                    if np.max(np.abs(stored - vector)) <= tolerance:
                        return value
        return None

    def add(self, vector, value):
        vector = np.array(vector, dtype=float)
        exponent = self._exponent(self._magnitude(vector))
        key = (exponent,) + self._base(vector, exponent)
        self._cells.setdefault(key, []).append((vector, value))

    def __len__(self):
        return sum(len(cell) for cell in self._cells.values())


def _line_intersection(n1, n2):
    """Intersection point of two lines of the hyperbolic plane, or ``None``."""
    point = _METRIC * np.cross(n1, n2)
    if -_form(point, point) <= 0:
        return None
    return _normalize(point)


class PolytopeTemplate:
    """Regular right-angled ``p``-gon with incentre at the origin.

    Face ``j`` joins vertices ``j`` and ``j + 1`` and its outward normal is
    the canonical normal of its supporting line, since the origin lies on the
    ``H+`` side of every face.

    Use :meth:`hyptile.core.tiling.build_template` to create templates.
    """

    def __init__(self, p, face_normals, vertices):
        self.p = p
        self.face_normals = tuple(Hyperplane(n) for n in face_normals)
        self.vertices = tuple(HPoint(v) for v in vertices)
        self.incentre = HPoint.origin(2)
        self._faces = np.array([h.normal for h in self.face_normals])
        self._products = self._faces * _METRIC
        self._vertices = np.array([v.coords for v in self.vertices])
        self.reflection_matrices = tuple(reflect(h).matrix for h in self.face_normals)
        self.polytope = ConvexPolytope(self.face_normals)

        origin = self.incentre.coords
        self.inradius = float(np.arcsinh(np.min(np.abs(self._products @ origin))))
        self.circumradius = float(np.max(distances(origin, self._vertices)))
        self.side_length = distance(self._vertices[0], self._vertices[1])
        self.diameter = float(max(distance(a, b) for a, b in
                                  itertools.combinations(self._vertices, 2)))
        self.nonadjacent_gap = self._nonadjacent_gap()
        self.epsilon = EPSILON_MARGIN * min(self.inradius, self.nonadjacent_gap / 2)

    @property
    def delta(self):
        """In-radius of the template."""
        return self.inradius

    @property
    def face_count(self):
        """Number of faces of every tile."""
        return self.p

    @property
    def neighbor_bound(self):
        """Upper bound ``2^d`` times the number of vertices for the tiles
        meeting a tile."""
        return 4 * self.p

    @property
    def face_array(self):
        return self._faces

    @property
    def vertex_array(self):
        return self._vertices

    def face_values(self, y):
        """Returns ``<y, n_j>`` for all faces, all non-positive inside."""
        return self._products @ y

    def contains(self, y, tol=TOL_ARITH):
        return bool(np.max(self.face_values(y)) <= tol * _scale(y))

    def distance(self, y):
        """Distance from ``y`` to the template polygon.

        Candidates are the perpendicular feet that land inside their edge and
        the vertices. Adjacent faces are orthogonal, so the foot on face ``j``
        lies in the edge exactly when ``y`` is inside faces ``j - 1`` and
        ``j + 1``.
        """
        return float(self.distance_many(np.asarray(y)[None, :])[0])

    def distance_many(self, points):
        """Vectorized :meth:`distance` for the rows of ``points``."""
        values = points @ self._products.T
        inside = (np.roll(values, 1, axis=1) <= 0) & (np.roll(values, -1, axis=1) <= 0)
        faces = np.where(inside, np.arcsinh(np.abs(values)), np.inf)
        products = points[:, :-1] @ self._vertices[:, :-1].T - \
                   np.outer(points[:, -1], self._vertices[:, -1])
        corners = np.arccosh(np.maximum(-products, 1.0))
        result = np.minimum(faces.min(axis=1), corners.min(axis=1))
        result[values.max(axis=1) <= 0] = 0.0
        return result

    def boundary_distance(self, y):
        """Distance from a point inside the template to its boundary."""
        return float(np.arcsinh(max(-np.max(self.face_values(y)), 0.0)))

    def fold(self, x, max_steps=MAX_LOCATE_STEPS):
        """Reflect ``x`` across the most violated face until it lies inside
        the template.

        Returns:
            Tuple ``(y, matrix)`` with ``y`` inside the template and
            ``x = matrix @ y``.

        Raises :class:`hyptile.config.OutOfAtlasError` for points farther
        than ``MAX_FOLD_RADIUS`` from the origin.
        """
        y = np.array(_coords(x), dtype=float)
        if y[-1] > np.cosh(MAX_FOLD_RADIUS):
            raise_error(OutOfAtlasError, "Point {} lies farther than {} from the "
                                         "origin.".format(y, MAX_FOLD_RADIUS))
        matrix = np.eye(3)
        for _ in range(max_steps):
            values = self.face_values(y)
            j = int(np.argmax(values))
            if values[j] <= TOL_ARITH * _scale(y):
                return y, matrix
            reflection = self.reflection_matrices[j]
            try:
                y = _normalize(reflection @ y)
            except NumericalDomainError:
                raise_error(OutOfAtlasError, "Point {} lost precision while folding "
                                             "into the template.".format(x))
            matrix = matrix @ reflection
        raise_error(OutOfAtlasError, "Point {} did not fold into the template "
                                     "after {} reflections.".format(x, max_steps))

    def star_matrices(self):
        """Isometries of the template and of the tiles meeting it: identity,
        the ``p`` face reflections and the ``p`` vertex compositions."""
        matrices = [np.eye(3)]
        matrices.extend(self.reflection_matrices)
        for j in range(self.p):
            k = (j + 1) % self.p
            matrices.append(self.reflection_matrices[j] @ self.reflection_matrices[k])
        return matrices

    def sample(self, rng, samples):
        """Random interior points, uniform in Beltrami-Klein coordinates."""
        bound = np.tanh(self.circumradius)
        points = []
        while len(points) < samples:
            k = rng.uniform(-bound, bound, size=(2 * samples, 2))
            k = k[np.sum(k ** 2, axis=1) < 1]
            coords = np.column_stack([k, np.ones(len(k))])
            coords /= np.sqrt(1 - np.sum(k ** 2, axis=1))[:, None]
            inside = np.max(coords @ self._products.T, axis=1) < 0
            points.extend(coords[inside])
        return np.array(points[:samples])

    def grid(self, resolution):
        """Interior points of a ``resolution x resolution`` Beltrami-Klein grid."""
        bound = np.tanh(self.circumradius)
        axis = np.linspace(-bound, bound, resolution)
        k = np.array([(a, b) for b in axis for a in axis])
        k = k[np.sum(k ** 2, axis=1) < 1]
        coords = np.column_stack([k, np.ones(len(k))])
        coords /= np.sqrt(1 - np.sum(k ** 2, axis=1))[:, None]
        inside = np.max(coords @ self._products.T, axis=1) < 0
        return coords[inside]

    def _nonadjacent_gap(self):
        """Minimal distance between two non-adjacent edges of the template."""
        p = self.p
        edges = [(self._vertices[j], self._vertices[(j + 1) % p]) for j in range(p)]
        best = np.inf
        for i, k in itertools.combinations(range(p), 2):
            if (k - i) % p in (1, p - 1):
                continue
            (a, b), (c, d) = edges[i], edges[k]
            best = min(best, segment_distance(a, c, d), segment_distance(b, c, d),
                       segment_distance(c, a, b), segment_distance(d, a, b))
            # interior minimum along the common perpendicular
            product = abs(_form(self._faces[i], self._faces[k]))
            if product > 1:
                normal = _METRIC * np.cross(self._faces[i], self._faces[k])
                feet = [_line_intersection(self._faces[i], normal),
                        _line_intersection(self._faces[k], normal)]
                if all(f is not None for f in feet) and \
                        self._inside_edge(feet[0], i) and self._inside_edge(feet[1], k):
                    best = min(best, float(np.arccosh(product)))
        return float(best)

    def _inside_edge(self, y, j):
        values = self.face_values(y)
        return values[(j - 1) % self.p] <= 0 and values[(j + 1) % self.p] <= 0


def build_template(p):
    """Regular right-angled ``p``-gon of the hyperbolic plane.

    The in-radius is ``arcosh(cos(pi/4) / sin(pi/p))`` and the vertices lie at
    the circumradius ``arcosh(cot(pi/p) cot(pi/4))`` in directions
    ``2 pi k / p``.

    Args:
        p (int): number of sides, at least 5.

    Returns:
        A :class:`hyptile.core.tiling.PolytopeTemplate`.

    Example:
        ::

            from hyptile.core.tiling import build_template
            template = build_template(8)
            template.inradius  # 1.2242261...
    """
    if isinstance(p, bool) or not isinstance(p, (int, np.integer)):
        raise_error(TypeError, "Number of sides must be an integer but is {}."
                               "".format(type(p)))
    if p <= 4:
        raise_error(ValueError, "No regular right-angled {}-gon exists in the "
                                "hyperbolic plane: right angles need at least "
                                "5 sides.".format(p))
    inradius = np.arccosh(np.cos(np.pi / 4) / np.sin(np.pi / p))
    faces = [Hyperplane.at_distance(inradius, 2 * np.pi * j / p + np.pi / p).normal
             for j in range(p)]
    # vertex j closes face j - 1 and opens face j
    vertices = [_line_intersection(faces[j - 1], faces[j]) for j in range(p)]
    return PolytopeTemplate(int(p), faces, vertices)


def build_template_from_symbol(symbol):
    """Template for a Schläfli symbol ``{p,4}``; higher-dimensional right-angled
    tessellations are documented in ``RIGHT_ANGLED_TILINGS`` only."""
    entries = symbol.strip("{} ").split(",")
    if len(entries) == 2 and entries[1].strip() == "4":
        return build_template(int(entries[0]))
    if symbol in RIGHT_ANGLED_TILINGS:
        raise_error(NotImplementedError, "Tessellation {} of dimension {} cannot "
                                         "be enumerated.".format(
                                             symbol, RIGHT_ANGLED_TILINGS[symbol]["dim"]))
    raise_error(ValueError, "Unknown right-angled tessellation {}.".format(symbol))


class Tile:
    """Image of the template under an element of the reflection group.

    Args:
        id (int): 1-based tile identifier, ``1`` is the seed.
        word (tuple): face indices whose reflections compose the isometry.
        isometry (:class:`hyptile.core.hyperbolic.LorentzIsometry`): maps the
            template onto the tile.
        generation (int): breadth-first depth.
    """

    __slots__ = ("id", "word", "isometry", "generation", "incentre",
                 "face_hyperplanes", "face_neighbors", "_inverse")

    def __init__(self, id, word, isometry, generation):
        self.id = id
        self.word = tuple(int(j) for j in word)
        self.isometry = isometry
        self.generation = generation
        self.incentre = HPoint(isometry.matrix[:, -1], normalize=True)
        self.face_hyperplanes = ()
        self.face_neighbors = ()
        self._inverse = isometry.inverse().matrix

    @property
    def neighbors(self):
        """Identifiers of the atlas tiles sharing a face with this tile."""
        return tuple(n for n in self.face_neighbors if n is not None)

    def to_template(self, x):
        """Coordinates of ``x`` in the template frame."""
        return _normalize(self._inverse @ _coords(x))

    def __repr__(self):
        return "Tile(id={}, generation={}, word={})".format(self.id, self.generation,
                                                           self.word)


@dataclass
class ClosureReport:
    """Result of :meth:`hyptile.core.tiling.hyperplane_closure_check`."""
    face: int
    radius: float
    checked: int
    within_radius: int = 0
    misses: List[int] = field(default_factory=list)


@dataclass
class OrthogonalityReport:
    """Result of :meth:`hyptile.core.tiling.orthogonality_census`."""
    pairs: int
    max_product: float
    max_commutator: float
    max_point_defect: float
    violations: List[Tuple[int, int]] = field(default_factory=list)


class TilingAtlas:
    """Finite truncation of a ``{p,4}`` tiling.

    Args:
        template (:class:`hyptile.core.tiling.PolytopeTemplate`): the template.
        records (list): ``(word, matrix, generation)`` triples in tile order.
        generations (int): number of enumerated generations ``G``.
        epsilon (float): cutoff width, defaults to the template choice.
        core_tile_ids (list): tiles with a complete neighbourhood, defaults to
            the tiles of generation at most ``G - 2``.
    """

    def __init__(self, template, records, generations, epsilon=None,
                 core_tile_ids=None):
        self.template = template
        self.generations = generations
        self.tiles = []
        self._tile_index = _QuantizedIndex()
        for id, (word, matrix, generation) in enumerate(records, start=1):
            tile = Tile(id, word, LorentzIsometry(matrix, check=False), generation)
            self.tiles.append(tile)
            self._tile_index.add(tile.incentre.coords, id)
        self._register_hyperplanes()
        for tile in self.tiles:
            neighbors = []
            for reflection in template.reflection_matrices:
                centre = _normalize(tile.isometry.matrix @ reflection[:, -1])
                neighbors.append(self._tile_index.find(centre))
            tile.face_neighbors = tuple(neighbors)

        self.net = [tile.incentre for tile in self.tiles]
        self.net_array = np.array([p.coords for p in self.net])
        self.delta = template.inradius
        self.epsilon = template.epsilon if epsilon is None else float(epsilon)
        if core_tile_ids is None:
            core_tile_ids = [t.id for t in self.tiles if t.generation <= generations - 2]
        self.core_tile_ids = sorted(core_tile_ids)
        self._core = set(self.core_tile_ids)
        self._face_graph = None
        self._closure_graph = None
        self._vertices = None
        self._coverage_radius = None
        self.reach = float(np.arccosh(np.max(self.net_array[:, -1]))) + template.circumradius

    def _register_hyperplanes(self):
        template = self.template
        index = _QuantizedIndex()
        normals, faces = [], []
        for tile in self.tiles:
            tile_faces = []
            for normal in (tile.isometry.matrix @ template.face_array.T).T:
                normal = canonical_normal(normal)
                position = index.find(normal)
                if position is None:
                    position = len(normals)
                    index.add(normal, position)
                    normals.append(normal)
                tile_faces.append(position)
            faces.append(tile_faces)

        def order_key(position):
            normal = normals[position]
            distance_key = int(np.round(np.arcsinh(normal[-1]) / QUANTUM))
            angle = np.arctan2(normal[1], normal[0])
            if angle <= -np.pi:
                angle = np.pi
            angle_key = int(np.round(angle / QUANTUM))
            return (distance_key, angle_key) + tuple(np.round(normal / QUANTUM).astype(np.int64))

        order = sorted(range(len(normals)), key=order_key)
        rank = {position: k for k, position in enumerate(order, start=1)}
        self.hyperplanes = [Hyperplane(normals[position], index=k)
                            for k, position in enumerate(order, start=1)]
        self.normals = np.array([h.normal for h in self.hyperplanes])
        self.normal_products = self.normals * _METRIC
        self._hyperplane_index = _QuantizedIndex()
        for h in self.hyperplanes:
            self._hyperplane_index.add(h.normal, h.index)
        for tile, tile_faces in zip(self.tiles, faces):
            tile.face_hyperplanes = tuple(rank[position] for position in tile_faces)

    @property
    def p(self):
        return self.template.p

    @property
    def dim(self):
        return 2

    def __len__(self):
        return len(self.tiles)

    def tile(self, tile_id):
        if not 1 <= tile_id <= len(self.tiles):
            raise_error(ValueError, "Tile {} is not part of the atlas with {} "
                                    "tiles.".format(tile_id, len(self.tiles)))
        return self.tiles[tile_id - 1]

    def hyperplane(self, index):
        if not 1 <= index <= len(self.hyperplanes):
            raise_error(ValueError, "Hyperplane {} is not part of the atlas with "
                                    "{} hyperplanes.".format(index, len(self.hyperplanes)))
        return self.hyperplanes[index - 1]

    def find_tile(self, incentre):
        """Identifier of the atlas tile with the given incentre, or ``None``."""
        return self._tile_index.find(_coords(incentre))

    def find_hyperplane(self, normal):
        """Index of the atlas hyperplane with the given normal, or ``None``."""
        return self._hyperplane_index.find(canonical_normal(normal))

    def is_core(self, tile_id):
        return tile_id in self._core

    def check_core(self, tile_id):
        self.tile(tile_id)
        if tile_id not in self._core:
            raise_error(BoundaryTruncationError, "Tile {} is not a core tile of the "
                                                 "atlas.".format(tile_id))

    def tile_vertices(self, tile_id):
        """World coordinates of the tile vertices, vertex ``j`` opening face ``j``."""
        vertices = (self.tile(tile_id).isometry.matrix @ self.template.vertex_array.T).T
        return np.array([_normalize(v) for v in vertices])

    def outward_normals(self, tile_id):
        """Outward face normals of the tile in face order (not canonicalized)."""
        return (self.tile(tile_id).isometry.matrix @ self.template.face_array.T).T

    def tile_polytope(self, tile_id):
        """The tile as a :class:`hyptile.core.polytopes.ConvexPolytope`."""
        tile = self.tile(tile_id)
        hyperplanes = [self.hyperplanes[k - 1] for k in tile.face_hyperplanes]
        sides = [h.evaluate(tile.incentre) < 0 for h in hyperplanes]
        return ConvexPolytope(hyperplanes, sides)

    def tile_distance(self, tile_id, x):
        """Distance from ``x`` to the closed tile."""
        return self.template.distance(self.tile(tile_id).to_template(x))

    def tile_contains(self, tile_id, x, tol=TOL_ARITH):
        return self.template.contains(self.tile(tile_id).to_template(x), tol=tol)

    def locate(self, x):
        """Tile whose closure contains ``x``.

        Returns:
            Tuple ``(tile_id, is_interior)``; ``is_interior`` is ``True`` when
            ``x`` is farther than ``TOL_IDENTITY`` from every face.
        """
        x = _coords(x)
        if x[-1] > np.cosh(self.reach) * (1 + TOL_CONSTRUCT):
            raise_error(OutOfAtlasError, "Point {} lies beyond the reach {} of the "
                                         "atlas.".format(x, self.reach))
        y, matrix = self.template.fold(x)
        tile_id = self._tile_index.find(_normalize(matrix[:, -1]))
        if tile_id is None:
            raise_error(OutOfAtlasError, "Point {} lies outside the tiles of the "
                                         "atlas.".format(_coords(x)))
        return tile_id, self.template.boundary_distance(y) > TOL_IDENTITY

    def face_graph(self):
        """``networkx.Graph`` joining tiles that share a face."""
        if self._face_graph is None:
            graph = nx.Graph()
            graph.add_nodes_from(t.id for t in self.tiles)
            graph.add_edges_from((t.id, n) for t in self.tiles for n in t.neighbors)
            self._face_graph = graph
        return self._face_graph

    def closure_graph(self):
        """``networkx.Graph`` joining tiles whose closures intersect."""
        if self._closure_graph is None:
            graph = nx.Graph()
            graph.add_nodes_from(t.id for t in self.tiles)
            for _, incident in self.vertex_incidence():
                graph.add_edges_from(itertools.combinations(sorted(incident), 2))
            self._closure_graph = graph
        return self._closure_graph

    def vertex_incidence(self):
        """List of ``(vertex coordinates, incident tile ids)`` pairs."""
        if self._vertices is None:
            index = _QuantizedIndex()
            vertices = []
            for tile in self.tiles:
                for vertex in self.tile_vertices(tile.id):
                    position = index.find(vertex)
                    if position is None:
                        position = len(vertices)
                        index.add(vertex, position)
                        vertices.append((vertex, set()))
                    vertices[position][1].add(tile.id)
            self._vertices = vertices
        return self._vertices

    def neighbor_count(self, tile_id):
        return neighbor_count(self, tile_id)

    @property
    def coverage_radius(self):
        """Distance from the origin to the boundary of the union of tiles."""
        if self._coverage_radius is None:
            origin = HPoint.origin(2).coords
            best = np.inf
            p = self.p
            for tile in self.tiles:
                if None not in tile.face_neighbors:
                    continue
                vertices = self.tile_vertices(tile.id)
                for j, neighbor in enumerate(tile.face_neighbors):
                    if neighbor is None:
                        best = min(best, segment_distance(origin, vertices[j],
                                                          vertices[(j + 1) % p]))
            self._coverage_radius = float(best)
        return self._coverage_radius

    def face_samples(self, tile_id, face, count, offset=0.0):
        """Points along a face, moved ``offset`` into the tile interior."""
        vertices = self.tile_vertices(tile_id)
        a, b = vertices[face], vertices[(face + 1) % self.p]
        normal = self.outward_normals(tile_id)[face]
        points = []
        for t in (np.arange(count) + 0.5) / count:
            point = geodesic_point(a, b, t).coords
            points.append(_normalize(np.cosh(offset) * point - np.sinh(offset) * normal))
        return np.array(points)

    def sample_tiles(self, rng, samples, tile_ids=None):
        """Random interior points of randomly chosen tiles.

        Returns:
            Tuple ``(points, tile_ids)`` of arrays.
        """
        if tile_ids is None:
            tile_ids = self.core_tile_ids
        tile_ids = np.asarray(tile_ids)
        if not len(tile_ids):
            raise_error(ValueError, "Cannot sample an empty set of tiles.")
        chosen = rng.choice(tile_ids, size=samples)
        local = self.template.sample(rng, samples)
        points = np.array([_normalize(self.tile(int(t)).isometry.matrix @ y)
                           for t, y in zip(chosen, local)])
        return points, chosen


def enumerate_tiling(template, generations, face_order=None):
    """Breadth-first enumeration of the tiling generated by the template.

    Args:
        template (:class:`hyptile.core.tiling.PolytopeTemplate`): the template.
        generations (int): number of generations ``G >= 0``.
        face_order (list): order in which faces are reflected, defaults to
            ``0, ..., p - 1``. The resulting tile set does not depend on it.

    Returns:
        A :class:`hyptile.core.tiling.TilingAtlas`.
    """
    if isinstance(generations, bool) or not isinstance(generations, (int, np.integer)):
        raise_error(TypeError, "Generations must be an integer but is {}."
                               "".format(type(generations)))
    if generations < 0:
        raise_error(ValueError, "Generations must be non-negative but is {}."
                                "".format(generations))
    if face_order is None:
        face_order = range(template.p)
    cap = get_max_tiles()
    records = [((), np.eye(3), 0)]
    index = _QuantizedIndex()
    index.add(template.incentre.coords, 0)
    frontier = [0]
    for generation in range(1, generations + 1):
        next_frontier = []
        for parent in frontier:
            word, matrix, _ = records[parent]
            for j in face_order:
                child = matrix @ template.reflection_matrices[j]
                centre = _normalize(child[:, -1])
                if index.find(centre) is not None:
                    continue
                if len(records) >= cap:
                    raise_error(ResourceLimitError, "Enumerating {} generations "
                                                    "exceeds the cap of {} tiles."
                                                    "".format(generations, cap))
                index.add(centre, len(records))
                next_frontier.append(len(records))
                records.append((word + (j,), child, generation))
        frontier = next_frontier
    atlas = TilingAtlas(template, records, generations)
    log.info("Enumerated {{{},4}} with {} generations: {} tiles, {} hyperplanes."
             "".format(template.p, generations, len(atlas.tiles),
                       len(atlas.hyperplanes)))
    return atlas


def closed_star(atlas, tile_id):
    """Atlas restricted to a tile and all tiles whose closure meets it."""
    graph = atlas.closure_graph()
    keep = {tile_id} | set(graph.neighbors(tile_id))
    records = [(t.word, t.isometry.matrix, t.generation)
               for t in atlas.tiles if t.id in keep]
    centre = sorted(keep).index(tile_id) + 1
    core = [centre] if atlas.is_core(tile_id) else []
    return TilingAtlas(atlas.template, records, atlas.generations,
                       epsilon=atlas.epsilon, core_tile_ids=core)


def neighbor_count(atlas, tile_id):
    """Number of tiles whose closure meets the closure of a core tile."""
    atlas.check_core(tile_id)
    return atlas.closure_graph().degree(tile_id)


def locate_tile(atlas, x):
    """Tile of the atlas containing ``x``, see :meth:`TilingAtlas.locate`."""
    return atlas.locate(x)


def hyperplane_closure_check(atlas, face_index):
    """Check that the seed-face reflection maps atlas hyperplanes to atlas
    hyperplanes.

    A hyperplane is checked when its distance from the origin is at most
    ``coverage radius - diameter``, so that its image still crosses the
    covered region, or when it carries a face of a tile whose mirror image
    is an atlas tile, since the mirrored face then lies on the image.

    Args:
        atlas (:class:`hyptile.core.tiling.TilingAtlas`): the atlas.
        face_index (int): 0-based face of the seed tile.

    Returns:
        A :class:`hyptile.core.tiling.ClosureReport` listing the misses.
    """
    if not 0 <= face_index < atlas.p:
        raise_error(ValueError, "Seed face {} does not exist for p = {}."
                                "".format(face_index, atlas.p))
    radius = atlas.coverage_radius - atlas.template.diameter
    reflection = atlas.template.reflection_matrices[face_index]
    mirrored = set()
    for tile in atlas.tiles:
        if atlas.find_tile(reflection @ tile.incentre.coords) is not None:
            mirrored.update(tile.face_hyperplanes)
    report = ClosureReport(face=face_index, radius=radius, checked=0)
    for hyperplane in atlas.hyperplanes:
        near = np.arcsinh(hyperplane.normal[-1]) <= radius
        if not near and hyperplane.index not in mirrored:
            continue
        report.checked += 1
        report.within_radius += int(near)
        if atlas.find_hyperplane(reflection @ hyperplane.normal) is None:
            report.misses.append(hyperplane.index)
    return report


def orthogonality_census(atlas):
    """Check every pair of atlas hyperplanes meeting inside the covered region.

    Intersecting pairs must be orthogonal, their reflections must commute and
    the composition must be the point reflection of the intersection point.

    Returns:
        An :class:`hyptile.core.tiling.OrthogonalityReport`.
    """
    normals = atlas.normals
    gram = atlas.normal_products @ normals.T
    radius = atlas.coverage_radius
    first, second = np.nonzero(np.triu(np.abs(gram) < 1, 1))
    report = OrthogonalityReport(pairs=0, max_product=0.0, max_commutator=0.0,
                                 max_point_defect=0.0)
    for a, b in zip(first, second):
        point = _line_intersection(normals[a], normals[b])
        if point is None or np.arccosh(point[-1]) > radius:
            continue
        report.pairs += 1
        ra = reflect(normals[a]).matrix
        rb = reflect(normals[b]).matrix
        composite = ra @ rb
        scale = _scale(ra) * _scale(rb)
        product = abs(gram[a, b]) / (_scale(normals[a]) * _scale(normals[b]))
        commutator = float(np.max(np.abs(composite - rb @ ra))) / scale
        point_defect = float(np.max(np.abs(composite - point_reflection(point).matrix))) / scale
        report.max_product = max(report.max_product, product)
        report.max_commutator = max(report.max_commutator, commutator)
        report.max_point_defect = max(report.max_point_defect, point_defect)
        if max(product, commutator, point_defect) > TOL_CONSTRUCT:
            report.violations.append((a + 1, b + 1))
    return report


def invisible_faces(atlas, tile_id, samples=3, offset=1e-6):
    """Faces of a tile hidden from the origin by the tile itself.

    For sample points on each face the geodesic from the origin is followed
    up to ``offset`` before the face; the face is invisible when that point
    already lies inside the tile.

    Returns:
        Sorted list of 0-based face indices.
    """
    origin = HPoint.origin(2)
    tile = atlas.tile(tile_id)
    hidden = []
    for face in range(atlas.p):
        flags = []
        for point in atlas.face_samples(tile_id, face, samples):
            length = distance(origin, point)
            before = geodesic_point(origin, HPoint(point, normalize=True),
                                    1 - offset / length)
            flags.append(atlas.template.face_values(tile.to_template(before)).max() < 0)
        if all(flags):
            hidden.append(face)
    return hidden
