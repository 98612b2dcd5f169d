"""
Command line interface ``hyptile``.

Exit codes: 0 success, 1 failed checks, 2 usage errors, 3 resource limits.
"""
import argparse
import sys
import numpy as np
from hyptile import __version__
from hyptile.config import log, TOL_IDENTITY, ResourceLimitError, HyptileError
from hyptile import fields, io, render, verification
from hyptile.core import operators as ops
from hyptile.core.estimators import uniform_bound_check
from hyptile.core.tiling import build_template, closed_star, enumerate_tiling

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


def _boolean(value):
    lowered = value.strip().lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise argparse.ArgumentTypeError("expected true or false but got {}".format(value))


def _positive(value):
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError("expected a positive integer but got {}".format(value))
    return number


def cmd_tile(args):
    template = build_template(args.p)
    generations = max(args.generations, 2) if args.star else args.generations
    atlas = enumerate_tiling(template, generations)
    if args.star:
        atlas = closed_star(atlas, 1)
    io.save_atlas(atlas, args.out)
    print("tiles: {}".format(len(atlas.tiles)))
    print("hyperplanes: {}".format(len(atlas.hyperplanes)))
    print("core tiles: {}".format(len(atlas.core_tile_ids)))
    print("delta: {:.10f}".format(atlas.delta))
    print("epsilon: {:.10f}".format(atlas.epsilon))
    print("coverage radius: {:.10f}".format(atlas.coverage_radius))
    return EXIT_OK


def cmd_render(args):
    atlas = io.load_atlas(args.atlas)
    io.write_text(args.out, render.render_svg(atlas, args.model, args.segments))
    print("rendered {} tiles to {}".format(len(atlas.tiles), args.out))
    return EXIT_OK


def cmd_decompose(args):
    atlas = io.load_atlas(args.atlas)
    descriptor = fields.field_descriptor(args.field)
    g = fields.parse_field(args.field, atlas)
    net, seq = ops.decompose(atlas, g, subtract_net=args.subtract_net)
    bound = uniform_bound_check(atlas, g, seq, args.samples, args.seed)
    payload = io.decomposition_payload(atlas, descriptor, net, seq, args.grid,
                                       lipschitz=bound.components, bound=bound.bound)
    digest = io.save_decomposition(payload, args.out)
    print("tile functions: {}".format(len(payload["tiles"])))
    print("max sampled component norm: {:.6e}".format(bound.components))
    print("formula upper bound: {:.6e}".format(bound.bound))
    print("digest: {}".format(digest))
    return EXIT_OK


def cmd_reconstruct(args):
    atlas = io.load_atlas(args.atlas)
    stored = io.load_decomposition(args.decomposition, atlas)
    descriptor = stored.field
    text = descriptor["name"] if descriptor["parameter"] is None else \
        "{}:{}".format(descriptor["name"], descriptor["parameter"])
    g = fields.parse_field(text, atlas)
    _, seq = ops.decompose(atlas, g, subtract_net=stored.subtract_net)
    # stored grids against the rebuilt tile functions
    klein = stored.grid
    local = np.column_stack([klein, np.ones(len(klein))]) / \
            np.sqrt(1 - np.sum(klein ** 2, axis=1))[:, None]
    grid_residual = 0.0
    for m, values in stored.tiles.items():
        matrix = atlas.tile(m).isometry.matrix
        rebuilt = np.array([seq[m].evaluate(matrix @ y) for y in local])
        grid_residual = max(grid_residual, float(np.max(np.abs(rebuilt - values), initial=0.0)))
    if stored.subtract_net:
        net = ops.NetFunction.table(atlas, stored.net, constant=stored.constant)
    else:
        net = ops.NetFunction.empty(atlas)
    psi = ops.reconstruct(atlas, net, seq)
    rng = np.random.default_rng(args.seed)
    points, _ = atlas.sample_tiles(rng, args.samples)
    residual = max(abs(psi(x) - g(x)) for x in points)
    print("grid residual: {:.6e}".format(grid_residual))
    print("round-trip residual: {:.6e} at {} points".format(residual, args.samples))
    if max(residual, grid_residual) > args.tolerance:
        print("residual exceeds tolerance {:.3e}".format(args.tolerance))
        return EXIT_FAILED
    return EXIT_OK


def cmd_verify(args):
    atlas = io.load_atlas(args.atlas)
    report = verification.run_suite(atlas, args.suite, args.tolerance, args.samples,
                                    args.seed)
    sys.stdout.write(report.to_text())
    if args.report:
        io.write_text(args.report, report.to_json())
    return EXIT_OK if report.passed else EXIT_FAILED


def build_parser():
    parser = argparse.ArgumentParser(prog="hyptile", description="Right-angled "
                                     "hyperbolic tilings and Lipschitz function "
                                     "decompositions.")
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", required=True)

    tile = commands.add_parser("tile", help="enumerate a {p,4} tiling")
    tile.add_argument("--p", type=int, required=True)
    tile.add_argument("--generations", type=int, required=True)
    tile.add_argument("--out", required=True)
    tile.add_argument("--star", action="store_true",
                      help="keep only the closed star of the seed tile")
    tile.set_defaults(function=cmd_tile)

    draw = commands.add_parser("render", help="draw an atlas as SVG")
    draw.add_argument("--atlas", required=True)
    draw.add_argument("--out", required=True)
    draw.add_argument("--model", choices=render.MODELS, default="poincare")
    draw.add_argument("--segments", type=_positive, default=32)
    draw.set_defaults(function=cmd_render)

    decompose = commands.add_parser("decompose", help="decompose a built-in field")
    decompose.add_argument("--atlas", required=True)
    decompose.add_argument("--field", required=True)
    decompose.add_argument("--subtract-net", type=_boolean, default=True)
    decompose.add_argument("--grid", type=_positive, default=16)
    decompose.add_argument("--samples", type=_positive, default=200)
    decompose.add_argument("--seed", type=int, default=0)
    decompose.add_argument("--out", required=True)
    decompose.set_defaults(function=cmd_decompose)

    rebuild = commands.add_parser("reconstruct", help="check a stored decomposition")
    rebuild.add_argument("--atlas", required=True)
    rebuild.add_argument("--decomposition", required=True)
    rebuild.add_argument("--samples", type=_positive, default=100)
    rebuild.add_argument("--seed", type=int, default=0)
    rebuild.add_argument("--tolerance", type=float, default=TOL_IDENTITY)
    rebuild.set_defaults(function=cmd_reconstruct)

    verify = commands.add_parser("verify", help="run the invariant suites")
    verify.add_argument("--atlas", required=True)
    verify.add_argument("--suite", choices=verification.SUITES, default="all")
    verify.add_argument("--tolerance", type=float, default=TOL_IDENTITY)
    verify.add_argument("--samples", type=_positive, default=100)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--report", help="write the JSON report to this path")
    verify.set_defaults(function=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit:
        return exit.code if isinstance(exit.code, int) else EXIT_USAGE
    try:
        return args.function(args)
    except ResourceLimitError as exception:
        print("resource limit: {}".format(exception), file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, TypeError, OSError) as exception:
        print("error: {}".format(exception), file=sys.stderr)
        return EXIT_USAGE
    except HyptileError as exception:
        log.error("Command {} failed: {}".format(args.command, exception))
        return EXIT_FAILED


if __name__ == "__main__": # pragma: no cover
    sys.exit(main())
