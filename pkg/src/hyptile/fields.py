import re
import numpy as np
from hyptile.config import raise_error
from hyptile.core.fields import BumpField, DistanceField, KleinCoordinate, MappedField
from hyptile.core.operators import NetFunction, extend_from_net


def dist_origin(atlas=None):
    """Distance ``rho(x, 0)`` to the origin."""
    field = DistanceField()
    field.name = "dist-origin"
    return field


def bk_x(atlas=None):
    """First Beltrami-Klein coordinate."""
    field = KleinCoordinate(0)
    field.name = "bk-x"
    return field


def bk_y(atlas=None):
    """Second Beltrami-Klein coordinate."""
    field = KleinCoordinate(1)
    field.name = "bk-y"
    return field


def tanh_bk_x(atlas=None):
    """Bounded field ``tanh`` of the first Beltrami-Klein coordinate, which
    vanishes on no net."""
    return MappedField(KleinCoordinate(0), np.tanh, name="tanh-bk-x")


def bump(atlas, tile_id):
    """Tent on tile ``tile_id`` vanishing on its boundary, one at its incentre."""
    field = BumpField(atlas, int(tile_id))
    field.name = "bump:{}".format(tile_id)
    return field


def netinterp(atlas, seed):
    """Net extension of pseudorandom values in ``[-1, 1]`` on the atlas tiles.

    The values vanish at the seed tile and outside the atlas.
    """
    rng = np.random.default_rng(int(seed))
    values = rng.uniform(-1, 1, size=len(atlas.tiles))
    values[0] = 0.0
    net = NetFunction.table(atlas, list(values), outside="zero")
    field = extend_from_net(atlas, net)
    field.name = "netinterp:{}".format(seed)
    return field


BUILTIN_FIELDS = {
    "dist-origin": (dist_origin, False),
    "bk-x": (bk_x, False),
    "bk-y": (bk_y, False),
    "tanh-bk-x": (tanh_bk_x, False),
    "bump": (bump, True),
    "netinterp": (netinterp, True),
}


def parse_field(descriptor, atlas=None):
    """Build a built-in field from a descriptor ``name[:parameter]``.

    Example:
        ::

            from hyptile import fields
            g = fields.parse_field("dist-origin")
            h = fields.parse_field("bump:1", atlas)

    Args:
        descriptor (str): field name, optionally followed by ``:`` (or ``,``)
            and an integer parameter.
        atlas (:class:`hyptile.core.tiling.TilingAtlas`): atlas required by
            the parametrized fields.

    Returns:
        A :class:`hyptile.abstractions.fields.ScalarField`.
    """
    match = re.fullmatch(r"\s*([a-z\-]+)\s*(?:[:,]\s*(-?\d+))?\s*", descriptor)
    if match is None:
        raise_error(ValueError, "Cannot parse field descriptor {}.".format(descriptor))
    name, parameter = match.group(1), match.group(2)
    if name not in BUILTIN_FIELDS:
        raise_error(ValueError, "Unknown field {}, available fields are {}."
                                "".format(name, ", ".join(sorted(BUILTIN_FIELDS))))
    builder, parametrized = BUILTIN_FIELDS[name]
    if parametrized:
        if parameter is None:
            raise_error(ValueError, "Field {} needs an integer parameter.".format(name))
        if atlas is None:
            raise_error(ValueError, "Field {} needs an atlas.".format(name))
        return builder(atlas, int(parameter))
    if parameter is not None:
        raise_error(ValueError, "Field {} takes no parameter.".format(name))
    return builder(atlas)


def field_descriptor(descriptor):
    """Normalized ``{"name", "parameter"}`` record of a descriptor."""
    match = re.fullmatch(r"\s*([a-z\-]+)\s*(?:[:,]\s*(-?\d+))?\s*", descriptor)
    if match is None or match.group(1) not in BUILTIN_FIELDS:
        raise_error(ValueError, "Unknown field descriptor {}.".format(descriptor))
    parameter = match.group(2)
    return {"name": match.group(1),
            "parameter": None if parameter is None else int(parameter)}
