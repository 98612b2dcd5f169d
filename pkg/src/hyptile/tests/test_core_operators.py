"""
Testing the partition of unity, net functions, decomposition and extensions.
"""
import numpy as np
import pytest
from hyptile import fields
from hyptile.abstractions.fields import EvaluationQuery
from hyptile.config import BoundaryTruncationError, OutOfCoreError, TOL_ARITH, \
                           TOL_IDENTITY
from hyptile.core import operators as ops
from hyptile.core import tiling
from hyptile.core.fields import BumpField, ConstantField, DistanceField
from hyptile.core.polytopes import ConvexPolytope
from hyptile.core import hyperbolic as hb
from hyptile.verification import random_admissible_sequence


@pytest.fixture(scope="module")
def decomposed(atlas3):
    g = fields.dist_origin()
    net, seq = ops.decompose(atlas3, g)
    return g, net, seq


def _points(atlas, count, tile_ids=None, seed=0):
    points, _ = atlas.sample_tiles(np.random.default_rng(seed), count, tile_ids)
    return points


def test_partition_sums_to_one(atlas3, samples):
    partition = ops.partition_of_unity(atlas3)
    assert ops.partition_of_unity(atlas3) is partition
    for x in _points(atlas3, samples):
        weights = partition.tile_weights(x)
        np.testing.assert_allclose(sum(weights.values()), 1.0, atol=TOL_ARITH)
        assert all(w > 0 for w in weights.values())
        assert len(weights) <= atlas3.neighbor_count(1) + 1


def test_partition_interpolates(atlas3):
    partition = ops.partition_of_unity(atlas3)
    for k in atlas3.core_tile_ids:
        weights = partition.tile_weights(atlas3.tile(k).incentre)
        assert list(weights) == [k]
        np.testing.assert_allclose(weights[k], 1.0, atol=TOL_ARITH)
    phi = partition.phi(2)
    np.testing.assert_allclose(phi(atlas3.tile(2).incentre), 1.0, atol=TOL_ARITH)
    assert phi(atlas3.tile(3).incentre) == 0.0


def test_partition_needs_atlas_tiles(atlas3):
    partition = ops.partition_of_unity(atlas3)
    vertices = atlas3.tile_vertices(len(atlas3))
    farthest = vertices[int(np.argmax(vertices[:, -1]))]
    with pytest.raises(OutOfCoreError):
        partition.tile_weights(farthest)
    # local weights only depend on the template
    _, weights = partition.local_weights(farthest)
    np.testing.assert_allclose(np.sum(weights), 1.0, atol=TOL_ARITH)


def test_partition_drops_tiles_at_distance_delta(atlas3):
    # the face neighbours of tile 2 lie at distance delta from its incentre
    partition = ops.partition_of_unity(atlas3)
    _, weights = partition.local_weights(atlas3.tile(2).incentre)
    assert len(weights) == 1
    np.testing.assert_allclose(weights[0], 1.0, atol=TOL_ARITH)
    assert partition.tile_weights(atlas3.tile(2).incentre) == {2: 1.0}


def test_extend_from_net_reproduces_core_values(atlas4):
    rng = np.random.default_rng(11)
    values = {k: rng.uniform(-1, 1) for k in atlas4.core_tile_ids if k != 1}
    extension = ops.extend_from_net(atlas4, values)
    for k in atlas4.core_tile_ids:
        np.testing.assert_allclose(extension(atlas4.tile(k).incentre), values.get(k, 0.0),
                                   atol=TOL_ARITH)


def test_net_function_errors(atlas3):
    with pytest.raises(ValueError):
        ops.NetFunction.table(atlas3, {1: 0.5})
    with pytest.raises(ValueError):
        ops.NetFunction(atlas3, outside="ignore")
    with pytest.raises(ValueError):
        ops.NetFunction.table(atlas3, {len(atlas3) + 1: 1.0})
    net = ops.NetFunction.table(atlas3, {2: 1.0})
    assert net[1] == 0.0
    assert net[2] == 1.0
    with pytest.raises(OutOfCoreError):
        net[3]
    zero = ops.NetFunction.table(atlas3, {2: 1.0}, outside="zero")
    assert zero[3] == 0.0


def test_net_function_lazy(atlas3):
    g = fields.bk_x() + 1
    net = ops.NetFunction.lazy(atlas3, g)
    assert net.is_lazy
    np.testing.assert_allclose(net.constant, 1.0)
    assert net[1] == 0.0
    for k in range(2, 10):
        np.testing.assert_allclose(net[k], g(atlas3.tile(k).incentre) - 1.0, atol=TOL_ARITH)
    assert len(net.values) == len(atlas3)
    assert ops.NetFunction.empty(atlas3).is_empty


def test_net_function_lazy_query(atlas3):
    g = fields.tanh_bk_x()
    net = ops.NetFunction.lazy(atlas3, g)
    incentre = atlas3.tile(5).incentre.coords
    query = EvaluationQuery()
    first = net.value(incentre, query)
    second = net.value(incentre, query)
    assert first == second
    assert query.memo_hits == 1
    assert not hasattr(net, "_cache")
    np.testing.assert_allclose(net.value(incentre), first)


def test_net_function_lipschitz(atlas3):
    net = ops.NetFunction.table(atlas3, {2: 3.0})
    np.testing.assert_allclose(net.lipschitz([1, 2]), 3.0 / (2 * atlas3.delta), atol=1e-10)
    assert ops.NetFunction.table(atlas3, {2: 0.0}).lipschitz() == 0.0


def test_extend_from_net(atlas3, samples):
    with pytest.raises(ValueError):
        ops.extend_from_net(atlas3, ops.NetFunction.table(atlas3, {2: 1.0}))
    rng = np.random.default_rng(8)
    values = {k: rng.uniform(-1, 1) for k in atlas3.core_tile_ids if k != 1}
    extension = ops.extend_from_net(atlas3, values)
    for k in atlas3.core_tile_ids:
        expected = values.get(k, 0.0)
        np.testing.assert_allclose(extension(atlas3.tile(k).incentre), expected,
                                   atol=TOL_ARITH)
    table = ops.NetFunction.table(atlas3, [0.0] + [1.0] * (len(atlas3) - 1), outside="zero")
    constant = ops.extend_from_net(atlas3, table)
    # convex combinations of zeros and ones
    for x in _points(atlas3, samples, [2, 3]):
        assert 0.0 <= constant(x) <= 1.0 + TOL_ARITH


def test_extend_from_net_other_atlas(atlas2, atlas3):
    net = ops.NetFunction.empty(atlas2)
    with pytest.raises(ValueError):
        ops.extend_from_net(atlas3, net)


def test_net_extension_bound(atlas3):
    bound = ops.net_extension_bound(atlas3, 2.0)
    np.testing.assert_allclose(bound, 2 * atlas3.template.diameter * 2.0 * 16)


def test_compute_S(atlas3):
    seed = ops.compute_S(atlas3, 1)
    assert len(seed) == 8
    assert sorted(k for k, _ in seed) == list(range(1, 9))
    for m in atlas3.core_tile_ids:
        faces = sorted(j for _, j in ops.compute_S(atlas3, m))
        assert faces == tiling.invisible_faces(atlas3, m)
    with pytest.raises(BoundaryTruncationError):
        ops.compute_S(atlas3, 10)


def test_support_tile_ids(atlas3):
    support = ops.support_tile_ids(atlas3)
    assert set(atlas3.core_tile_ids) <= set(support)
    graph = atlas3.closure_graph()
    assert set(graph.neighbors(2)) <= set(support)


def test_norm_bounds(atlas3):
    epsilon = atlas3.epsilon
    np.testing.assert_allclose(ops.chi_norm_bound(atlas3),
                               2 + atlas3.template.diameter / epsilon)
    np.testing.assert_allclose(ops.chi_norm_bound(atlas3, bounded=True), 2 + 1 / epsilon)
    assert ops.retract_norm_bound(2.0, 0.5) == 5.0


def test_cutoff_psi(atlas3):
    psi = ops.cutoff_psi(atlas3, 1)
    assert psi.epsilon == atlas3.epsilon
    assert psi(atlas3.tile(1).incentre) == 0.0


def test_decompose_residuals(atlas3, decomposed):
    _, net, seq = decomposed
    assert not seq.bounded
    assert set(seq.tile_ids()) == set(ops.support_tile_ids(atlas3))
    basepoint, vanishing = seq.residuals(8, atlas3.core_tile_ids)
    assert basepoint <= TOL_ARITH
    assert vanishing <= TOL_IDENTITY
    np.testing.assert_allclose(net[2], 2 * atlas3.delta, atol=1e-10)


def test_decompose_round_trip(atlas3, decomposed, samples):
    g, net, seq = decomposed
    psi = ops.reconstruct(atlas3, net, seq)
    for x in _points(atlas3, samples, seed=1):
        np.testing.assert_allclose(psi(x), g(x), atol=TOL_IDENTITY)


def test_decompose_round_trip_netinterp(atlas3, samples):
    g = fields.parse_field("netinterp:7", atlas3)
    net, seq = ops.decompose(atlas3, g)
    psi = ops.reconstruct(atlas3, net, seq)
    for x in _points(atlas3, samples, seed=2):
        np.testing.assert_allclose(psi(x), g(x), atol=TOL_IDENTITY)


def test_bounded_round_trip(atlas3, samples):
    g = fields.tanh_bk_x()
    net, seq = ops.decompose(atlas3, g, subtract_net=False)
    assert seq.bounded
    assert net.is_empty
    assert net.constant == 0.0
    psi = ops.reconstruct(atlas3, net, seq)
    for x in _points(atlas3, samples, seed=3):
        np.testing.assert_allclose(psi(x), g(x), atol=TOL_IDENTITY)


def test_full_sweep_matches_faces(atlas3):
    g = fields.dist_origin()
    _, faces = ops.decompose(atlas3, g, tile_ids=[2])
    _, full = ops.decompose(atlas3, g, tile_ids=[2], full_sweep=True)
    for x in _points(atlas3, 10, [2], seed=4):
        np.testing.assert_allclose(full[2](x), faces[2](x), atol=1e-10)


def test_decompose_bump_locality(atlas4):
    g = BumpField(atlas4, 1)
    star = {1} | set(atlas4.closure_graph().neighbors(1))
    far = [t.id for t in atlas4.tiles if t.generation == 2 and t.id not in star][:3]
    _, seq = ops.decompose(atlas4, g, subtract_net=False, tile_ids=[1] + far)
    np.testing.assert_allclose(seq[1](atlas4.tile(1).incentre), 1.0, atol=1e-12)
    for m in far:
        for x in _points(atlas4, 5, [m], seed=m):
            assert seq[m](x) == 0.0


def test_decompose_linearity(atlas3, samples):
    f, g = fields.dist_origin(), fields.bk_x()
    core = atlas3.core_tile_ids
    _, combined = ops.decompose(atlas3, 2 * f - 0.5 * g, tile_ids=core)
    _, first = ops.decompose(atlas3, f, tile_ids=core)
    _, second = ops.decompose(atlas3, g, tile_ids=core)
    for x in _points(atlas3, samples, seed=5):
        m, _ = atlas3.locate(x)
        np.testing.assert_allclose(combined[m](x), 2 * first[m](x) - 0.5 * second[m](x),
                                   atol=1e-10)


def test_decompose_inverse_round_trip(atlas3):
    seq = random_admissible_sequence(atlas3, np.random.default_rng(12))
    basepoint, vanishing = seq.residuals(8, atlas3.core_tile_ids)
    assert basepoint <= TOL_ARITH
    assert vanishing <= TOL_IDENTITY
    psi = ops.reconstruct(atlas3, ops.NetFunction.empty(atlas3), seq)
    # psi vanishes on the net, so it is decomposed without net values
    for k in atlas3.core_tile_ids:
        assert abs(psi(atlas3.tile(k).incentre)) <= TOL_IDENTITY
    _, again = ops.decompose(atlas3, psi, subtract_net=False,
                             tile_ids=atlas3.core_tile_ids)
    for m in atlas3.core_tile_ids:
        for x in _points(atlas3, 3, [m], seed=m):
            np.testing.assert_allclose(again[m](x), seq[m](x), atol=TOL_IDENTITY)


def test_tile_function_seq(atlas3):
    seq = ops.TileFunctionSeq(atlas3, {2: DistanceField()})
    assert 2 in seq
    assert 3 not in seq
    assert len(seq) == 1
    assert list(seq) == [2]
    assert seq[2](atlas3.tile(1).incentre) == 0.0
    assert seq.witness is None


def test_extend_from_tile_errors(atlas3):
    with pytest.raises(ValueError, match="does not vanish"):
        ops.extend_from_tile(atlas3, 1, ConstantField(1.0))
    with pytest.raises(ValueError):
        ops.extend_from_tile(atlas3, 1, ConstantField(0.0), mode="partial")


def test_extend_from_tile_seed(atlas3):
    # every face of the seed tile is hidden, no sweep is needed
    h = BumpField(atlas3, 1)
    extension = ops.extend_from_tile(atlas3, 1, h, basepoint=False)
    x = _points(atlas3, 1, [1])[0]
    np.testing.assert_allclose(extension(x), h(x))
    assert extension(atlas3.tile(2).incentre) == 0.0


def test_extend_from_tile_sweep_parity(atlas3, decomposed):
    _, _, seq = decomposed
    m = 2
    full = ops.extend_from_tile(atlas3, m, seq[m], mode="full")
    faces = ops.extend_from_tile(atlas3, m, seq[m], mode="faces")
    star = sorted(set(atlas3.closure_graph().neighbors(m)) | {m})
    for x in _points(atlas3, 10, star, seed=6):
        np.testing.assert_allclose(full(x), faces(x), atol=1e-10)
    # the extension agrees with the tile function on its tile
    for x in _points(atlas3, 5, [m], seed=7):
        np.testing.assert_allclose(full(x), seq[m](x), atol=TOL_IDENTITY)


def test_reconstruct_other_atlas(atlas2, atlas3, decomposed):
    _, net, seq = decomposed
    with pytest.raises(ValueError):
        ops.reconstruct(atlas2, net, seq)


def test_extend_from_retract(atlas3):
    polytope = atlas3.tile_polytope(1)
    g = fields.dist_origin()
    extension = ops.extend_from_retract(polytope, g, atlas3.epsilon)
    for x in _points(atlas3, 5, [1]):
        np.testing.assert_allclose(extension(x), g(x), atol=TOL_ARITH)
    x = hb.HPoint.from_polar(atlas3.delta + atlas3.epsilon / 2, np.pi / 8)
    np.testing.assert_allclose(extension(x), 0.5 * atlas3.delta, atol=1e-9)
    assert extension(atlas3.tile(2).incentre) == 0.0


def test_extend_from_retract_errors(atlas3):
    g = fields.dist_origin()
    with pytest.raises(ValueError):
        ops.extend_from_retract(atlas3.tile_polytope(1), g, 0.0)
    near = hb.Hyperplane.at_distance(0.5, 0.0)
    far = hb.Hyperplane.at_distance(1.0, 0.0)
    with pytest.raises(ValueError):
        ops.extend_from_retract(ConvexPolytope([near, far], [True, False]), g, 1.0)
