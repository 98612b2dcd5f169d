"""
Invariant suites run by ``hyptile verify``.

Every check records the measured value, the threshold and whether it passed.
Exceptions raised while measuring are turned into failed checks.
"""
import json
from dataclasses import dataclass, asdict
from typing import Optional
import numpy as np
from hyptile.config import log, TOL_ARITH, TOL_CONSTRUCT, TOL_IDENTITY, FACE_OFFSET, \
                           HyptileError
from hyptile import fields
from hyptile.abstractions.fields import EvaluationQuery
from hyptile.core import hyperbolic as hb
from hyptile.core import tiling
from hyptile.core import operators as ops
from hyptile.core.estimators import estimate_lipschitz, uniform_bound_check
from hyptile.core.fields import BumpField, ChiSweep, DistanceField

SUITES = ("core", "tiling", "operators", "all")

# Templates measured by the core suite
TEMPLATE_SIDES = (5, 6, 7, 8, 9)

# Fields decomposed by the operators suite
DECOMPOSED_FIELDS = ("dist-origin", "bump:1", "netinterp:7")


@dataclass
class Check:
    """Outcome of a single named check."""
    name: str
    measured: Optional[float]
    threshold: float
    comparison: str
    passed: bool
    detail: str = ""


def _compare(measured, threshold, comparison):
    if comparison == "<=":
        return measured <= threshold
    if comparison == ">=":
        return measured >= threshold
    return measured == threshold


class Report:
    """Ordered collection of checks."""

    def __init__(self, suite, seed, samples, tolerance):
        self.suite = suite
        self.seed = seed
        self.samples = samples
        self.tolerance = tolerance
        self.checks = []

    def add(self, name, measured, threshold, comparison="<=", detail=""):
        measured = float(measured)
        passed = bool(_compare(measured, threshold, comparison))
        self.checks.append(Check(name, measured, float(threshold), comparison, passed, detail))
        if not passed:
            log.warning("Check {} failed: {} {} {}.".format(name, measured, comparison,
                                                            threshold))

    def fail(self, name, exception):
        self.checks.append(Check(name, None, float("nan"), "error", False,
                                 "{}: {}".format(type(exception).__name__, exception)))
        log.warning("Check {} raised {}.".format(name, exception))

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    def to_dict(self):
        checks = []
        for check in self.checks:
            entry = asdict(check)
            if check.comparison == "error":
                entry["threshold"] = None
            checks.append(entry)
        return {"suite": self.suite, "seed": self.seed, "samples": self.samples,
                "tolerance": self.tolerance, "passed": self.passed, "checks": checks}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self):
        lines = ["{:<6} {:<52} {:>14} {:>5} {:>11}".format("status", "check", "measured",
                                                          "", "threshold")]
        for check in self.checks:
            status = "PASS" if check.passed else "FAIL"
            if check.measured is None:
                lines.append("{:<6} {:<52} {}".format(status, check.name, check.detail))
                continue
            lines.append("{:<6} {:<52} {:>14.6e} {:>5} {:>11.3e}".format(
                status, check.name, check.measured, check.comparison, check.threshold))
        lines.append("{} of {} checks passed.".format(
            sum(c.passed for c in self.checks), len(self.checks)))
        return "\n".join(lines) + "\n"


def _guard(report, name, function):
    try:
        function()
    except (HyptileError, ValueError, ArithmeticError, NotImplementedError) as exception:
        report.fail(name, exception)


def core_checks(report, rng, samples):
    """Template geometry, cross-model distances and reflection algebra."""
    origin = hb.HPoint.origin(2).coords
    for p in TEMPLATE_SIDES:
        def template_geometry(p=p):
            template = tiling.build_template(p)
            vertices = template.vertex_array
            inradius = np.arccosh(np.cos(np.pi / 4) / np.sin(np.pi / p))
            circumradius = np.arccosh(1 / np.tan(np.pi / p))
            measured = min(hb.segment_distance(origin, vertices[j], vertices[(j + 1) % p])
                           for j in range(p))
            report.add("core.template.p{}.inradius".format(p),
                       abs(measured - inradius), TOL_CONSTRUCT)
            measured = max(hb.distance(origin, v) for v in vertices)
            report.add("core.template.p{}.circumradius".format(p),
                       abs(measured - circumradius), TOL_CONSTRUCT)
            angles = [hb.angle_at(vertices[k], vertices[k - 1], vertices[(k + 1) % p])
                      for k in range(p)]
            report.add("core.template.p{}.right_angles".format(p),
                       max(abs(a - np.pi / 2) for a in angles), TOL_CONSTRUCT)
        _guard(report, "core.template.p{}".format(p), template_geometry)

    def cross_model():
        first = hb.sample_ball(rng, samples, 6.0)
        second = hb.sample_ball(rng, samples, 6.0)
        error = 0.0
        for x, y in zip(first, second):
            error = max(error, abs(hb.distance(x, y) -
                                   hb.bk_distance(hb.to_beltrami_klein(x),
                                                  hb.to_beltrami_klein(y))))
        report.add("core.cross_model.distance", error, TOL_IDENTITY)
    _guard(report, "core.cross_model.distance", cross_model)

    def reflections():
        involution, defect = 0.0, 0.0
        for _ in range(samples):
            hyperplane = hb.Hyperplane.at_distance(rng.uniform(0, 4), rng.uniform(0, 2 * np.pi))
            matrix = hb.reflect(hyperplane).matrix
            scale = hb._scale(matrix) ** 2
            involution = max(involution, np.max(np.abs(matrix @ matrix - np.eye(3))) / scale)
            defect = max(defect, hb.isometry_defect(matrix) / scale)
        report.add("core.reflection.involution", involution, TOL_CONSTRUCT)
        report.add("core.reflection.isometry_defect", defect, TOL_CONSTRUCT)
    _guard(report, "core.reflection", reflections)

    def distortion():
        radius, scale = 2.0, 1e-3
        low, high = hb.bk_local_distortion(rng, samples, radius, scale)
        # Klein metric factor at the outermost reachable point
        bound = 1 / (1 - (np.tanh(radius) + scale) ** 2)
        report.add("core.klein.distortion_min", low, 1 - 1e-3, ">=")
        report.add("core.klein.distortion_max", high / bound, 1.0)
    _guard(report, "core.klein.distortion", distortion)


def tiling_checks(report, atlas):
    """Combinatorics, reflection algebra and hyperplane closure of the atlas."""
    p = atlas.p

    def star():
        if atlas.generations < 2:
            raise ValueError("closed star of the seed needs two generations")
        report.add("tiling.seed_star.tiles", len(tiling.closed_star(atlas, 1)), 2 * p + 1, "==")
    _guard(report, "tiling.seed_star.tiles", star)

    def incidence():
        core = set(atlas.core_tile_ids)
        worst = 0
        for _, incident in atlas.vertex_incidence():
            if incident & core:
                worst = max(worst, abs(len(incident) - 4))
        report.add("tiling.core_vertices.incidence_defect", worst, 0, "==")
        counts = [atlas.neighbor_count(m) for m in atlas.core_tile_ids]
        report.add("tiling.neighbor_count.max", max(counts, default=0),
                   atlas.template.neighbor_bound)
        report.add("tiling.neighbor_count.min", min(counts, default=0), 2 * p, ">=")
    _guard(report, "tiling.incidence", incidence)

    def faces():
        worst = 0.0
        for tile in atlas.tiles:
            vertices = atlas.tile_vertices(tile.id)
            for j, k in enumerate(tile.face_hyperplanes):
                hyperplane = atlas.hyperplane(k)
                for vertex in (vertices[j], vertices[(j + 1) % p]):
                    worst = max(worst, abs(hyperplane.evaluate(vertex)) / hb._scale(vertex) ** 2)
        report.add("tiling.faces_on_hyperplanes", worst, TOL_CONSTRUCT)
    _guard(report, "tiling.faces_on_hyperplanes", faces)

    def orthogonality():
        census = tiling.orthogonality_census(atlas)
        report.add("tiling.orthogonality.pairs", census.pairs, 1, ">=")
        report.add("tiling.orthogonality.product", census.max_product, TOL_CONSTRUCT)
        report.add("tiling.orthogonality.commutator", census.max_commutator, TOL_CONSTRUCT)
        report.add("tiling.orthogonality.point_reflection", census.max_point_defect,
                   TOL_CONSTRUCT)
        report.add("tiling.orthogonality.violations", len(census.violations), 0, "==")
    _guard(report, "tiling.orthogonality", orthogonality)

    def closure():
        reports = [tiling.hyperplane_closure_check(atlas, j) for j in range(p)]
        report.add("tiling.hyperplane_closure.checked",
                   min(r.checked for r in reports), 1, ">=")
        report.add("tiling.hyperplane_closure.misses",
                   sum(len(r.misses) for r in reports), 0, "==")
    _guard(report, "tiling.hyperplane_closure", closure)

    def order():
        reverse = tiling.enumerate_tiling(atlas.template, atlas.generations,
                                          face_order=range(p - 1, -1, -1))
        missing = sum(atlas.find_tile(t.incentre) is None for t in reverse.tiles)
        report.add("tiling.enumeration.order_mismatch",
                   missing + abs(len(reverse.tiles) - len(atlas.tiles)), 0, "==")
    _guard(report, "tiling.enumeration.order", order)


def _points(atlas, rng, samples, tile_ids=None):
    points, _ = atlas.sample_tiles(rng, samples, tile_ids)
    return points


def partition_checks(report, atlas, rng, samples):
    """Partition of unity and net extension."""
    partition = ops.partition_of_unity(atlas)

    def normalization():
        error, terms = 0.0, 0
        for x in _points(atlas, rng, samples):
            weights = partition.tile_weights(x)
            error = max(error, abs(sum(weights.values()) - 1))
            terms = max(terms, len(weights))
        report.add("operators.partition.sum", error, TOL_ARITH)
        report.add("operators.partition.terms", terms, atlas.neighbor_count(1) + 1)
        error = 0.0
        for k in atlas.core_tile_ids:
            weights = partition.tile_weights(atlas.tile(k).incentre)
            error = max(error, abs(weights.get(k, 0.0) - 1),
                        max((w for n, w in weights.items() if n != k), default=0.0))
        report.add("operators.partition.interpolation", error, TOL_ARITH)
    _guard(report, "operators.partition", normalization)

    def net_extension():
        witness = partition.lipschitz_witness(samples, int(rng.integers(2 ** 31)))
        constant = ops.net_extension_bound(atlas, witness)
        region = ops.support_tile_ids(atlas)
        reproduction, ratio = 0.0, 0.0
        for _ in range(5):
            values = rng.uniform(-1, 1, size=len(atlas.tiles))
            values[0] = 0.0
            net = ops.NetFunction.table(atlas, list(values), outside="zero")
            extension = ops.extend_from_net(atlas, net)
            for k in atlas.core_tile_ids:
                reproduction = max(reproduction,
                                   abs(extension(atlas.tile(k).incentre) - net[k]))
            slope = estimate_lipschitz(extension, atlas, samples, int(rng.integers(2 ** 31)))
            ratio = max(ratio, slope / (constant * net.lipschitz(region)))
        report.add("operators.net_extension.reproduction", reproduction, TOL_ARITH)
        report.add("operators.net_extension.lipschitz_ratio", ratio, 1.0)
    _guard(report, "operators.net_extension", net_extension)


def chi_checks(report, atlas, rng, samples, tolerance):
    """Inverse identity and branching of the reflection operators."""
    g = fields.dist_origin()

    def inverse():
        error, branching = 0.0, 0
        for x in _points(atlas, rng, samples):
            m, _ = atlas.locate(x)
            tile = atlas.tile(m)
            j = int(np.argmax(atlas.template.face_values(tile.to_template(x))))
            n = tile.face_hyperplanes[j]
            twice = ops.chi(atlas, n, ops.chi(atlas, n, g), inverse=True)
            error = max(error, abs(twice(x) - g(x)))
            sweep = ChiSweep(atlas, g, sorted(tile.face_hyperplanes))
            query = EvaluationQuery()
            sweep.evaluate(x, query)
            branching = max(branching, query.base_evaluations)
        report.add("operators.chi.inverse", error, tolerance)
        report.add("operators.chi.branching", branching, 2 ** atlas.dim)
    _guard(report, "operators.chi", inverse)

    def vanishing_sets():
        report.add("operators.S.seed_faces", len(ops.compute_S(atlas, 1)), atlas.p, "==")
        mismatches = 0
        for m in atlas.core_tile_ids:
            faces = sorted(j for _, j in ops.compute_S(atlas, m))
            mismatches += faces != tiling.invisible_faces(atlas, m)
        report.add("operators.S.visibility_mismatches", mismatches, 0, "==")
    _guard(report, "operators.S", vanishing_sets)


def decomposition_checks(report, atlas, rng, samples, tolerance):
    """Vanishing, round trips and uniform bounds of the decomposition."""
    for descriptor in DECOMPOSED_FIELDS:
        name = "operators.decompose.{}".format(descriptor)

        def field_round_trip(descriptor=descriptor, name=name):
            g = fields.parse_field(descriptor, atlas)
            net, seq = ops.decompose(atlas, g)
            basepoint, vanishing = seq.residuals(samples, atlas.core_tile_ids)
            report.add(name + ".incentres", basepoint, TOL_ARITH)
            report.add(name + ".vanishing", vanishing, tolerance)
            psi = ops.reconstruct(atlas, net, seq)
            error = max(abs(psi(x) - g(x)) for x in _points(atlas, rng, samples))
            report.add(name + ".round_trip", error, tolerance)
            bound = uniform_bound_check(atlas, g, seq, max(10, samples // 10),
                                        int(rng.integers(2 ** 31)))
            report.add(name + ".uniform_bound", bound.components / bound.bound, 1.0)
        _guard(report, name, field_round_trip)

    def inverse_round_trip():
        seq = random_admissible_sequence(atlas, rng)
        psi = ops.reconstruct(atlas, ops.NetFunction.empty(atlas), seq)
        # psi vanishes on the net, so no net values are removed
        _, again = ops.decompose(atlas, psi, subtract_net=False,
                                 tile_ids=atlas.core_tile_ids)
        per_tile = max(1, samples // max(1, len(atlas.core_tile_ids)))
        error = 0.0
        for m in atlas.core_tile_ids:
            for x in _points(atlas, rng, per_tile, [m]):
                error = max(error, abs(again[m](x) - seq[m](x)))
        report.add("operators.decompose.inverse_round_trip", error, tolerance)
    _guard(report, "operators.decompose.inverse_round_trip", inverse_round_trip)

    def bounded_variant():
        g = fields.tanh_bk_x()
        net, seq = ops.decompose(atlas, g, subtract_net=False)
        psi = ops.reconstruct(atlas, net, seq)
        error = max(abs(psi(x) - g(x)) for x in _points(atlas, rng, samples))
        report.add("operators.bounded.round_trip", error, tolerance)
    _guard(report, "operators.bounded", bounded_variant)

    def linearity():
        f, g = fields.dist_origin(), fields.bk_x()
        a, b = rng.uniform(-2, 2, size=2)
        _, combined = ops.decompose(atlas, a * f + b * g, tile_ids=atlas.core_tile_ids)
        _, first = ops.decompose(atlas, f, tile_ids=atlas.core_tile_ids)
        _, second = ops.decompose(atlas, g, tile_ids=atlas.core_tile_ids)
        error = 0.0
        for x in _points(atlas, rng, samples):
            m, _ = atlas.locate(x)
            error = max(error, abs(combined[m](x) - a * first[m](x) - b * second[m](x)))
        report.add("operators.decompose.linearity", error, 1e-10)
    _guard(report, "operators.decompose.linearity", linearity)


def extension_checks(report, atlas, rng, samples):
    """Continuity and sweep parity of the tile extensions, retract extension
    and the Lipschitz estimator."""

    def tile_extension():
        m = atlas.core_tile_ids[-1]
        _, seq = ops.decompose(atlas, fields.dist_origin(), tile_ids=[m])
        full = ops.extend_from_tile(atlas, m, seq[m], mode="full")
        faces = ops.extend_from_tile(atlas, m, seq[m], mode="faces")
        hidden = {j for _, j in ops.compute_S(atlas, m)}
        jump = 0.0
        normals = atlas.outward_normals(m)
        for j in range(atlas.p):
            if j in hidden:
                continue
            mirror = hb.reflect(normals[j]).matrix
            for x in atlas.face_samples(m, j, 5, offset=FACE_OFFSET):
                jump = max(jump, abs(full(x) - full(mirror @ x)))
        report.add("operators.extension.continuity", jump, 1e-8)
        star = sorted(set(atlas.closure_graph().neighbors(m)) | {m})
        parity = max(abs(full(x) - faces(x)) for x in _points(atlas, rng, samples, star))
        report.add("operators.extension.sweep_parity", parity, 1e-10)
        # tiles away from the closed star whose reflections stay in the atlas
        outside = [t.id for t in atlas.tiles
                   if t.generation < atlas.generations and t.id not in star]
        far = _points(atlas, rng, samples, outside) if outside else []
        report.add("operators.extension.far_support",
                   max((abs(full(x)) for x in far), default=0.0), 0, "==")
    _guard(report, "operators.extension", tile_extension)

    def retract():
        polytope = atlas.tile_polytope(1)
        g = fields.dist_origin()
        extension = ops.extend_from_retract(polytope, g, atlas.epsilon)
        inside = max(abs(extension(x) - g(x)) for x in _points(atlas, rng, samples, [1]))
        report.add("operators.retract.extension", inside, TOL_ARITH)
        far = max((abs(extension(x)) for x in _points(atlas, rng, samples, atlas.core_tile_ids)
                   if polytope.distance(x) >= atlas.epsilon), default=0.0)
        report.add("operators.retract.support", far, 0, "==")
        slope = estimate_lipschitz(extension, atlas, samples, int(rng.integers(2 ** 31)))
        bound = ops.retract_norm_bound(atlas.template.diameter, atlas.epsilon)
        report.add("operators.retract.norm_ratio", slope / bound, 1.0)
    _guard(report, "operators.retract", retract)

    def estimator():
        value = estimate_lipschitz(DistanceField(), atlas, max(samples, 1000),
                                   int(rng.integers(2 ** 31)))
        report.add("operators.lipschitz.dist_origin_low", value, 1 - 1e-3, ">=")
        report.add("operators.lipschitz.dist_origin_high", value, 1 + TOL_IDENTITY)
    _guard(report, "operators.lipschitz", estimator)


def random_admissible_sequence(atlas, rng, tile_ids=None):
    """Random tile functions vanishing on ``S_m`` and at the incentres.

    The component on ``P_m`` is ``c_m b_m(x) rho(x, p_m)`` where ``b_m`` is
    the tent of the hidden faces of ``P_m``.
    """
    if tile_ids is None:
        tile_ids = ops.support_tile_ids(atlas)
    components = {}
    for m in tile_ids:
        hidden = [j for _, j in ops._vanishing_set(atlas, m)] or None
        bump = BumpField(atlas, m, faces=hidden)
        radial = DistanceField(atlas.tile(m).incentre)
        components[m] = rng.uniform(-1, 1) * (bump * radial)
    return ops.TileFunctionSeq(atlas, components)


def run_suite(atlas, suite="all", tolerance=TOL_IDENTITY, samples=100, seed=0):
    """Run a verification suite.

    Args:
        atlas (:class:`hyptile.core.tiling.TilingAtlas`): the atlas.
        suite (str): ``"core"``, ``"tiling"``, ``"operators"`` or ``"all"``.
        tolerance (float): threshold of the identity checks.
        samples (int): sampling budget per check.
        seed (int): seed of all random draws.

    Returns:
        A :class:`hyptile.verification.Report`.
    """
    if suite not in SUITES:
        raise ValueError("Unknown suite {}, use one of {}.".format(suite, ", ".join(SUITES)))
    rng = np.random.default_rng(seed)
    report = Report(suite, seed, samples, tolerance)
    if suite in ("core", "all"):
        core_checks(report, rng, samples)
    if suite in ("tiling", "all"):
        tiling_checks(report, atlas)
    if suite in ("operators", "all"):
        report.add("operators.core_tiles", len(atlas.core_tile_ids), 1, ">=")
        if atlas.core_tile_ids:
            partition_checks(report, atlas, rng, samples)
            chi_checks(report, atlas, rng, samples, tolerance)
            decomposition_checks(report, atlas, rng, samples, tolerance)
            extension_checks(report, atlas, rng, samples)
    log.info("Suite {}: {} of {} checks passed.".format(
        suite, sum(c.passed for c in report.checks), len(report.checks)))
    return report
