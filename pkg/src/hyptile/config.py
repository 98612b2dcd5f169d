"""
Define tolerances, resource caps, error types and the package logger.
"""
import os
import logging

# Logging level name, overridable through the environment
LOG_LEVEL = os.environ.get("HYPTILE_LOG_LEVEL", "INFO").upper()

# Raw floating point arithmetic tolerance
TOL_ARITH = 1e-12

# Construction invariants (templates, isometries, atlas geometry)
TOL_CONSTRUCT = 1e-10

# Identities between composed operators (round trips, vanishing sets)
TOL_IDENTITY = 1e-9

# Arguments of arcosh within this distance below 1 are clamped to 1
ACOSH_CLAMP = 1e-9

# Quantum used for the canonical keys of tiles, hyperplanes and vertices
QUANTUM = 1e-7

# Quantum used for the per-query memoization keys of field evaluations
MEMO_QUANTUM = 1e-12

# Distance from a face at which vanishing sets are sampled
FACE_OFFSET = 1e-11

# Safety factor applied to min(delta, eta / 2) when choosing epsilon
EPSILON_MARGIN = 0.9

# Maximum number of reflections used to bring a point into the seed tile
MAX_LOCATE_STEPS = 10000

# Points farther from the origin are not folded into the template
MAX_FOLD_RADIUS = 15.0

# Version written to atlas and decomposition files
FORMAT_VERSION = "1.0"

# Maximum number of tiles generated by a single enumeration
MAX_TILES = 250000


class HyptileError(RuntimeError):
    """Base class of the runtime errors raised by hyptile."""


class NumericalDomainError(ValueError):
    """A numerical argument fell outside the domain of a function."""


class OutOfAtlasError(HyptileError):
    """A point fell outside the region covered by the atlas tiles."""


class OutOfCoreError(HyptileError):
    """An evaluation needed tiles that the truncated atlas does not hold."""


class BoundaryTruncationError(HyptileError):
    """A query was made on a tile whose neighbourhood is truncated."""


class ResourceLimitError(HyptileError):
    """A configured resource cap was exceeded."""


def raise_error(exception, message=None, args=None):
    """Raise exception with logging error.

    Args:
        exception (Exception): python exception.
        message (str): the error message.
    """
    log.error(message)
    if args:
        raise exception(message, args)
    else:
        raise exception(message)


# Set the number of threads from the environment variable
HYPTILE_THREADS = None
if "HYPTILE_THREADS" not in os.environ:
    import psutil
    # using physical cores by default
    cores = psutil.cpu_count(logical=False)
    HYPTILE_THREADS = cores if cores else 1
else: # pragma: no cover
    HYPTILE_THREADS = int(os.environ.get("HYPTILE_THREADS"))


def get_threads():
    """Returns number of threads used by the sampling sweeps."""
    return HYPTILE_THREADS


def set_threads(num_threads):
    """Set number of threads used by the sampling sweeps.

    Args:
        num_threads (int): number of threads.
    """
    if not isinstance(num_threads, int):
        raise_error(TypeError, "Number of threads must be integer.")
    if num_threads < 1:
        raise_error(ValueError, "Number of threads must be positive.")
    global HYPTILE_THREADS
    HYPTILE_THREADS = num_threads


def get_max_tiles():
    """Returns the maximum number of tiles an enumeration may create."""
    return MAX_TILES


def set_max_tiles(max_tiles):
    if not isinstance(max_tiles, int):
        raise_error(TypeError, "Tile cap must be integer.")
    elif max_tiles < 1:
        raise_error(ValueError, "Tile cap must be a positive integer.")
    global MAX_TILES
    MAX_TILES = max_tiles


# Configuration for logging mechanism
class CustomHandler(logging.StreamHandler):
    """Custom handler for logging algorithm."""
    def format(self, record):
        """Format the record with specific format."""
        fmt = '[HypTile|%(levelname)s|%(asctime)s]: %(message)s'
        return logging.Formatter(fmt, datefmt='%Y-%m-%d %H:%M:%S').format(record)


# allocate logger object
log = logging.getLogger(__name__)
log.setLevel(getattr(logging, LOG_LEVEL, logging.INFO))
log.addHandler(CustomHandler())
