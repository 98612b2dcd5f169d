"""
SVG rendering of atlases in the Poincaré or Beltrami-Klein disk.
"""
import xml.etree.ElementTree as etree
import numpy as np
from hyptile.config import raise_error
from hyptile.core.hyperbolic import geodesic_samples, to_beltrami_klein, to_poincare

MODELS = ("poincare", "klein")

# Stroke width in disk units
STROKE_WIDTH = 0.004

SVG_NAMESPACE = "http://www.w3.org/2000/svg"


def _chart(points, model):
    if model == "poincare":
        return to_poincare(points)
    return to_beltrami_klein(points)


def tile_outline(atlas, tile_id, model="poincare", segments=32):
    """Disk coordinates of the closed outline of a tile.

    Each edge is sampled at ``segments + 1`` points along its geodesic; the
    shared endpoints appear once.
    """
    vertices = atlas.tile_vertices(tile_id)
    p = len(vertices)
    outline = []
    for j in range(p):
        samples = geodesic_samples(vertices[j], vertices[(j + 1) % p], segments)
        outline.append(_chart(samples[:-1], model))
    return np.concatenate(outline)


def _path(outline):
    commands = ["M{:.6f},{:.6f}".format(outline[0, 0], -outline[0, 1])]
    commands.extend("L{:.6f},{:.6f}".format(x, -y) for x, y in outline[1:])
    commands.append("Z")
    return " ".join(commands)


def render_svg(atlas, model="poincare", segments=32, tile_ids=None):
    """SVG document drawing the tiles of an atlas.

    Args:
        atlas (:class:`hyptile.core.tiling.TilingAtlas`): the atlas.
        model (str): ``"poincare"`` or ``"klein"``.
        segments (int): geodesic samples per edge.
        tile_ids (list): tiles to draw, all by default.

    Returns:
        The SVG document as a string; equal inputs give identical strings.
    """
    if model not in MODELS:
        raise_error(ValueError, "Unknown disk model {}, use one of {}."
                                "".format(model, ", ".join(MODELS)))
    if not isinstance(segments, int) or segments < 1:
        raise_error(ValueError, "Number of segments must be a positive integer "
                                "but is {}.".format(segments))
    if tile_ids is None:
        tile_ids = [t.id for t in atlas.tiles]
    root = etree.Element("svg", {"xmlns": SVG_NAMESPACE,
                                 "viewBox": "-1.05 -1.05 2.1 2.1",
                                 "width": "800", "height": "800"})
    etree.SubElement(root, "circle", {"cx": "0", "cy": "0", "r": "1",
                                      "fill": "none", "stroke": "black",
                                      "stroke-width": "{:.3f}".format(STROKE_WIDTH)})
    group = etree.SubElement(root, "g", {"fill": "none", "stroke": "black",
                                         "stroke-width": "{:.3f}".format(STROKE_WIDTH),
                                         "stroke-linejoin": "round"})
    for tile_id in tile_ids:
        outline = tile_outline(atlas, tile_id, model, segments)
        etree.SubElement(group, "path", {"id": "tile-{}".format(tile_id),
                                         "d": _path(outline)})
    return etree.tostring(root, encoding="unicode") + "\n"


def path_points(svg):
    """Disk coordinates of every path vertex in a rendered document, with the
    mathematical orientation restored."""
    root = etree.fromstring(svg)
    points = []
    for element in root.iter():
        if element.tag.split("}")[-1] != "path":
            continue
        for command in element.get("d").split():
            if command == "Z":
                continue
            x, y = command[1:].split(",")
            points.append((float(x), -float(y)))
    return np.array(points)
