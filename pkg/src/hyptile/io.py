"""
Serialization of atlases and decompositions to versioned JSON files.
"""
import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from typing import Dict, List, Optional
import numpy as np
from hyptile.config import raise_error, log, FORMAT_VERSION, TOL_ARITH, \
                           TOL_CONSTRUCT, TOL_IDENTITY
from hyptile.core.tiling import TilingAtlas, build_template


def canonical_json(value):
    """Compact JSON with sorted keys; floats use the shortest representation
    that round-trips exactly."""
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(value):
    """SHA-256 of the canonical JSON of a payload."""
    return hashlib.sha256(canonical_json(value).encode("utf-8")).hexdigest()


def write_text(path, text):
    """Atomically replace ``path`` with ``text``."""
    directory = os.path.dirname(os.path.abspath(path))
    handle, temporary = tempfile.mkstemp(dir=directory, prefix=".hyptile-", suffix=".tmp")
    try:
        with os.fdopen(handle, "w", encoding="utf-8") as stream:
            stream.write(text)
        os.replace(temporary, path)
    except BaseException:
        if os.path.exists(temporary):
            os.remove(temporary)
        raise


def _read(path, kind):
    with open(path, "r", encoding="utf-8") as stream:
        try:
            payload = json.load(stream)
        except json.JSONDecodeError as exception:
            raise_error(ValueError, "File {} is not valid JSON: {}.".format(path, exception))
    version = str(payload.get("format_version", ""))
    if version.split(".")[0] != FORMAT_VERSION.split(".")[0]:
        raise_error(ValueError, "Unsupported format version {} in {}, expected {}."
                                "".format(version or "<missing>", path, FORMAT_VERSION))
    if payload.get("kind") != kind:
        raise_error(ValueError, "File {} holds a {} but a {} was expected."
                                "".format(path, payload.get("kind"), kind))
    return payload


def atlas_payload(atlas):
    """JSON payload of an atlas."""
    template = atlas.template
    header = {"p": template.p, "generations": atlas.generations,
              "delta": atlas.delta, "epsilon": atlas.epsilon,
              "tolerances": {"arith": TOL_ARITH, "construct": TOL_CONSTRUCT,
                             "identity": TOL_IDENTITY}}
    tiles = []
    for tile in atlas.tiles:
        tiles.append({"id": tile.id,
                      "word": list(tile.word),
                      "matrix": [float(v) for v in tile.isometry.matrix.reshape(-1)],
                      "incentre": [float(v) for v in tile.incentre.coords],
                      "face_hyperplanes": list(tile.face_hyperplanes),
                      "neighbors": list(tile.neighbors),
                      "generation": tile.generation})
    return {"format_version": FORMAT_VERSION, "kind": "atlas", "header": header,
            "hyperplanes": [[float(v) for v in h.normal] for h in atlas.hyperplanes],
            "tiles": tiles, "core_tile_ids": list(atlas.core_tile_ids)}


def atlas_digest(atlas):
    return digest(atlas_payload(atlas))


def save_atlas(atlas, path):
    """Write an atlas file and return its digest."""
    payload = atlas_payload(atlas)
    write_text(path, canonical_json(payload) + "\n")
    log.info("Saved atlas with {} tiles to {}.".format(len(atlas.tiles), path))
    return digest(payload)


def load_atlas(path):
    """Read an atlas file written by :meth:`hyptile.io.save_atlas`.

    Tile matrices are restored bit-exactly and the hyperplanes are rebuilt
    from them; a file whose hyperplanes disagree is rejected.
    """
    payload = _read(path, "atlas")
    header = payload["header"]
    template = build_template(int(header["p"]))
    records = []
    for position, entry in enumerate(payload["tiles"], start=1):
        if entry["id"] != position:
            raise_error(ValueError, "Tile ids in {} must be consecutive from 1."
                                    "".format(path))
        records.append((entry["word"], np.array(entry["matrix"], dtype=float).reshape(3, 3),
                        entry["generation"]))
    atlas = TilingAtlas(template, records, int(header["generations"]),
                        epsilon=header["epsilon"], core_tile_ids=payload["core_tile_ids"])
    stored = np.array(payload["hyperplanes"], dtype=float).reshape(-1, 3)
    if stored.shape != atlas.normals.shape or \
            np.max(np.abs(stored - atlas.normals), initial=0.0) > TOL_CONSTRUCT:
        raise_error(ValueError, "Hyperplanes stored in {} do not match the tiles."
                                "".format(path))
    return atlas


@dataclass
class Decomposition:
    """Contents of a decomposition file."""
    atlas_digest: str
    field: Dict
    subtract_net: bool
    constant: float
    resolution: int
    grid: np.ndarray
    net: Dict[int, float]
    tiles: Dict[int, np.ndarray] = field(default_factory=dict)
    lipschitz: Optional[float] = None
    bound: Optional[float] = None


def template_grid(atlas, resolution):
    """Beltrami-Klein coordinates of the template grid points."""
    points = atlas.template.grid(resolution)
    return points[:, :-1] / points[:, -1:]


def decomposition_payload(atlas, descriptor, net, seq, resolution, lipschitz=None,
                          bound=None):
    """JSON payload of a decomposition sampled on the template grid of the
    core tiles."""
    klein = template_grid(atlas, resolution)
    local = np.column_stack([klein, np.ones(len(klein))]) / \
            np.sqrt(1 - np.sum(klein ** 2, axis=1))[:, None]
    tiles = []
    for m in atlas.core_tile_ids:
        if m not in seq:
            continue
        matrix = atlas.tile(m).isometry.matrix
        values = [seq[m].evaluate(matrix @ y) for y in local]
        tiles.append({"id": m, "values": [float(v) for v in values]})
    net_values = sorted(net.values.items())
    return {"format_version": FORMAT_VERSION, "kind": "decomposition",
            "atlas_digest": atlas_digest(atlas), "field": descriptor,
            "subtract_net": not seq.bounded, "constant": net.constant,
            "grid": {"resolution": resolution,
                     "points": [[float(a), float(b)] for a, b in klein]},
            "net": [[int(k), float(v)] for k, v in net_values],
            "tiles": tiles,
            "estimates": {"lipschitz": lipschitz, "bound": bound}}


def save_decomposition(payload, path):
    write_text(path, canonical_json(payload) + "\n")
    return digest(payload)


def load_decomposition(path, atlas):
    """Read a decomposition file and check it against the atlas digest."""
    payload = _read(path, "decomposition")
    expected = atlas_digest(atlas)
    if payload["atlas_digest"] != expected:
        raise_error(ValueError, "Decomposition {} was computed on a different atlas "
                                "(digest {} instead of {}).".format(
                                    path, payload["atlas_digest"][:12], expected[:12]))
    estimates = payload.get("estimates", {})
    return Decomposition(atlas_digest=payload["atlas_digest"], field=payload["field"],
                         subtract_net=bool(payload["subtract_net"]),
                         constant=float(payload["constant"]),
                         resolution=int(payload["grid"]["resolution"]),
                         grid=np.array(payload["grid"]["points"], dtype=float).reshape(-1, 2),
                         net={int(k): float(v) for k, v in payload["net"]},
                         tiles={int(t["id"]): np.array(t["values"], dtype=float)
                                for t in payload["tiles"]},
                         lipschitz=estimates.get("lipschitz"),
                         bound=estimates.get("bound"))
