# -*- coding: utf-8 -*-
"""Sampled lower bounds for Lipschitz constants and sup norms."""
from dataclasses import dataclass
import numpy as np
from hyptile.config import raise_error, log
from hyptile.core.hyperbolic import distance, geodesic_point
from hyptile.core.operators import chi_norm_bound
from hyptile.parallel import parallel_map

# Share of the pairs taken inside a single tile at scale below the in-radius
LOCAL_FRACTION = 0.7


def _generator(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_pairs(atlas, seed, samples, tile_ids=None, local_fraction=LOCAL_FRACTION):
    """Point pairs for slope estimation.

    A share ``local_fraction`` of the pairs lies inside a single tile at a
    log-uniform scale below the in-radius, the rest joins random points of
    random tiles.

    Args:
        atlas (:class:`hyptile.core.tiling.TilingAtlas`): the atlas.
        seed (int): seed or ``np.random.Generator``.
        samples (int): number of pairs.
        tile_ids (list): tiles to sample, the core tiles by default.

    Returns:
        List of ``(x, y)`` coordinate pairs.
    """
    if samples < 1:
        raise_error(ValueError, "Number of samples must be positive but is {}."
                                "".format(samples))
    rng = _generator(seed)
    local = int(round(local_fraction * samples))
    pairs = []
    if local:
        points, chosen = atlas.sample_tiles(rng, local, tile_ids)
        others = atlas.template.sample(rng, local)
        scales = atlas.delta * 10 ** rng.uniform(-4, 0, size=local)
        for x, tile_id, y, scale in zip(points, chosen, others, scales):
            z = atlas.tile(int(tile_id)).isometry.apply(y)
            gap = distance(x, z)
            if gap == 0:
                continue
            pairs.append((x, geodesic_point(x, z, min(1.0, scale / gap)).coords))
    remote = samples - local
    if remote:
        first, _ = atlas.sample_tiles(rng, remote, tile_ids)
        second, _ = atlas.sample_tiles(rng, remote, tile_ids)
        pairs.extend(zip(first, second))
    return pairs


def estimate_lipschitz(field, atlas, samples=1000, seed=0, tile_ids=None, threads=None):
    """Largest slope ``|f(x) - f(y)| / rho(x, y)`` over sampled pairs.

    The value is a lower bound on the Lipschitz constant of the field on the
    union of the sampled tiles.

    Args:
        field (:class:`hyptile.abstractions.fields.ScalarField`): the field.
        atlas (:class:`hyptile.core.tiling.TilingAtlas`): the atlas.
        samples (int): number of pairs.
        seed (int): seed of the pair sampling.
        tile_ids (list): tiles to sample, the core tiles by default.
        threads (int): threads of the evaluation sweep.

    Returns:
        The estimate as a float.
    """
    pairs = sample_pairs(atlas, seed, samples, tile_ids)

    def slope(pair):
        x, y = pair
        gap = distance(x, y)
        if gap == 0:
            return 0.0
        return abs(field.evaluate(x) - field.evaluate(y)) / gap

    value = max(parallel_map(slope, pairs, threads), default=0.0)
    log.debug("Lipschitz estimate {} for {} from {} pairs.".format(value, field.name,
                                                                  len(pairs)))
    return float(value)


def estimate_sup(field, atlas, samples=1000, seed=0, tile_ids=None, threads=None):
    """Largest ``|f(x)|`` over sampled points of the tiles."""
    rng = _generator(seed)
    points, _ = atlas.sample_tiles(rng, samples, tile_ids)
    values = parallel_map(lambda x: abs(field.evaluate(x)), list(points), threads)
    return float(max(values, default=0.0))


@dataclass
class UniformBound:
    """Both sides of ``max_m ||g_m|| <= ||chi||^F ||g||``."""
    components: float
    field: float
    chi_bound: float
    faces: int

    @property
    def bound(self):
        return self.chi_bound ** self.faces * self.field

    @property
    def passed(self):
        return self.components <= self.bound


def uniform_bound_check(atlas, g, seq, samples=200, seed=0, tile_ids=None, threads=None):
    """Compare the tile functions of a decomposition with the formula bound.

    In the bounded variant the norms are ``sup + Lip``, otherwise the
    Lipschitz constants alone.

    Args:
        atlas (:class:`hyptile.core.tiling.TilingAtlas`): the atlas.
        g (:class:`hyptile.abstractions.fields.ScalarField`): the decomposed
            field.
        seq (:class:`hyptile.core.operators.TileFunctionSeq`): its tile
            functions.
        samples (int): pairs per tile.
        tile_ids (list): tiles to check, the core tiles by default.

    Returns:
        A :class:`hyptile.core.estimators.UniformBound`.
    """
    if tile_ids is None:
        tile_ids = [m for m in atlas.core_tile_ids if m in seq]
    components = 0.0
    for m in tile_ids:
        norm = estimate_lipschitz(seq[m], atlas, samples, seed, [m], threads)
        if seq.bounded:
            norm += estimate_sup(seq[m], atlas, samples, seed, [m], threads)
        components = max(components, norm)
    region = sorted(set(tile_ids) | set(atlas.core_tile_ids))
    norm = estimate_lipschitz(g, atlas, samples * len(tile_ids), seed, region, threads)
    if seq.bounded:
        norm += estimate_sup(g, atlas, samples * len(tile_ids), seed, region, threads)
    result = UniformBound(components=components, field=norm,
                          chi_bound=chi_norm_bound(atlas, seq.bounded),
                          faces=atlas.template.face_count)
    seq.witness = components
    log.info("Uniform bound: components {:.6g} <= {:.6g}.".format(result.components,
                                                                 result.bound))
    return result
