"""
Resources for parallel sampling sweeps.
"""
import joblib
from hyptile.config import raise_error, get_threads, log


def parallel_map(function, items, threads=None):
    """Evaluate ``function`` on every item using a pool of threads.

    Field evaluations are pure, so the items can be processed in any order;
    the results are returned in the order of ``items``.

    Example:
        ::

            import numpy as np
            from hyptile import fields
            from hyptile.parallel import parallel_map
            field = fields.parse_field("dist-origin")
            points = [np.array([0.0, 0.0, 1.0]), np.array([np.sinh(1), 0, np.cosh(1)])]
            values = parallel_map(field, points, threads=2)

    Args:
        function (callable): function of a single item.
        items (list): items to evaluate.
        threads (int): number of threads. Defaults to
            :meth:`hyptile.config.get_threads`.

    Returns:
        List with the values of ``function`` on ``items``.
    """
    if not isinstance(items, list):
        raise_error(TypeError, "Items must be a list but are {}.".format(type(items)))
    if threads is None:
        threads = get_threads()
    _check_parallel_configuration(threads)
    if threads == 1 or len(items) < 2:
        return [function(item) for item in items]
    pool = joblib.Parallel(n_jobs=threads, prefer="threads")
    return pool(joblib.delayed(function)(item) for item in items)


def _check_parallel_configuration(threads):
    """Check if configuration is suitable for efficient parallel execution."""
    import psutil
    if not isinstance(threads, int) or threads < 1:
        raise_error(ValueError, "Number of threads must be a positive integer "
                                "but is {}.".format(threads))
    if threads > psutil.cpu_count():  # pragma: no cover
        log.warning("Requested {} threads but only {} cores are available, "
                    "sampling sweeps may run slower.".format(threads, psutil.cpu_count()))
