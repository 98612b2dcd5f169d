"""
Testing atlas and decomposition files.
"""
import json
import os
import numpy as np
import pytest
from hyptile import fields, io
from hyptile.config import FORMAT_VERSION
from hyptile.core import operators as ops


def test_canonical_json():
    assert io.canonical_json({"b": 1, "a": [1.5, None]}) == '{"a":[1.5,null],"b":1}'
    assert len(io.digest({"a": 1})) == 64
    assert io.digest({"a": 1, "b": 2}) == io.digest({"b": 2, "a": 1})


def test_write_text(tmp_path):
    path = tmp_path / "out.txt"
    io.write_text(str(path), "first")
    io.write_text(str(path), "second")
    assert path.read_text() == "second"
    assert os.listdir(tmp_path) == ["out.txt"]


def test_write_text_missing_directory(tmp_path):
    with pytest.raises(OSError):
        io.write_text(str(tmp_path / "missing" / "out.txt"), "text")


def test_atlas_round_trip(tmp_path, atlas2):
    path = str(tmp_path / "atlas.json")
    digest = io.save_atlas(atlas2, path)
    loaded = io.load_atlas(path)
    assert io.atlas_digest(loaded) == digest
    assert len(loaded) == len(atlas2)
    assert loaded.core_tile_ids == atlas2.core_tile_ids
    assert loaded.epsilon == atlas2.epsilon
    for tile, other in zip(atlas2.tiles, loaded.tiles):
        assert np.array_equal(tile.isometry.matrix, other.isometry.matrix)
        assert tile.face_hyperplanes == other.face_hyperplanes
        assert tile.word == other.word


def _rewrite(path, **changes):
    with open(path) as stream:
        payload = json.load(stream)
    payload.update(changes)
    with open(path, "w") as stream:
        json.dump(payload, stream)


def test_load_atlas_rejects(tmp_path, atlas2):
    path = str(tmp_path / "atlas.json")
    io.save_atlas(atlas2, path)
    _rewrite(path, format_version="2.0")
    with pytest.raises(ValueError, match="format version"):
        io.load_atlas(path)
    _rewrite(path, format_version=FORMAT_VERSION, kind="decomposition")
    with pytest.raises(ValueError):
        io.load_atlas(path)
    with open(path, "w") as stream:
        stream.write("{not json")
    with pytest.raises(ValueError):
        io.load_atlas(path)


def test_load_atlas_rejects_hyperplanes(tmp_path, atlas2):
    path = str(tmp_path / "atlas.json")
    io.save_atlas(atlas2, path)
    with open(path) as stream:
        payload = json.load(stream)
    payload["hyperplanes"] = payload["hyperplanes"][:-1]
    with open(path, "w") as stream:
        json.dump(payload, stream)
    with pytest.raises(ValueError, match="do not match"):
        io.load_atlas(path)


def test_decomposition_file(tmp_path, atlas2, atlas3):
    g = fields.dist_origin()
    net, seq = ops.decompose(atlas3, g, tile_ids=[1, 2])
    payload = io.decomposition_payload(atlas3, fields.field_descriptor("dist-origin"),
                                       net, seq, 3, lipschitz=0.5, bound=2.0)
    assert [t["id"] for t in payload["tiles"]] == [1, 2]
    path = str(tmp_path / "decomposition.json")
    digest = io.save_decomposition(payload, path)
    assert digest == io.digest(payload)
    stored = io.load_decomposition(path, atlas3)
    assert stored.field == {"name": "dist-origin", "parameter": None}
    assert stored.subtract_net
    assert stored.resolution == 3
    assert stored.lipschitz == 0.5
    assert stored.bound == 2.0
    assert len(stored.net) == len(atlas3)
    assert stored.net[1] == 0.0
    np.testing.assert_allclose(stored.net[2], 2 * atlas3.delta, atol=1e-10)
    assert set(stored.tiles) == {1, 2}
    assert len(stored.tiles[1]) == len(stored.grid)
    assert np.all(np.sum(stored.grid ** 2, axis=1) < 1)
    with pytest.raises(ValueError, match="different atlas"):
        io.load_decomposition(path, atlas2)
    with pytest.raises(ValueError):
        io.load_atlas(path)
