# -*- coding: utf-8 -*-
"""Convex polytopes as finite intersections of closed half-spaces and the
nearest-point projection onto them."""
import itertools
import numpy as np
from scipy.optimize import linprog, minimize
from hyptile.config import raise_error, log, TOL_ARITH, TOL_CONSTRUCT
from hyptile.core.hyperbolic import HPoint, Hyperplane, minkowski_metric, \
                                    distance, _coords, _scale, _project_flat


class ConvexPolytope:
    """Intersection of closed half-spaces of the hyperbolic space.

    Args:
        hyperplanes (list): :class:`hyptile.core.hyperbolic.Hyperplane`
            objects bounding the polytope.
        sides (list): for every hyperplane ``True`` when the polytope lies in
            ``H+ = {<x, v> <= 0}`` and ``False`` when it lies in ``H-``.
            Defaults to ``H+`` for all of them.
    """

    def __init__(self, hyperplanes, sides=None):
        hyperplanes = tuple(hyperplanes)
        if not hyperplanes:
            raise_error(ValueError, "A polytope needs at least one half-space.")
        if sides is None:
            sides = len(hyperplanes) * (True,)
        sides = tuple(bool(s) for s in sides)
        if len(sides) != len(hyperplanes):
            raise_error(ValueError, "Got {} side flags for {} hyperplanes."
                                    "".format(len(sides), len(hyperplanes)))
        dims = {h.dim for h in hyperplanes}
        if len(dims) != 1:
            raise_error(ValueError, "Hyperplanes of mixed dimensions {}."
                                    "".format(sorted(dims)))
        self.hyperplanes = hyperplanes
        self.sides = sides
        signs = np.where(sides, 1.0, -1.0)
        # outward normals: the polytope is {x : <x, n> <= 0}
        self._outward = signs[:, None] * np.array([h.normal for h in hyperplanes])
        metric = np.diag(minkowski_metric(self.dim + 1))
        self._products = self._outward * metric
        self._witness = None

    @property
    def dim(self):
        return self.hyperplanes[0].dim

    @property
    def outward_normals(self):
        return self._outward

    def constraint_values(self, x):
        """Returns ``<x, n_i>`` for all outward normals."""
        return self._products @ _coords(x)

    def contains(self, x, tol=TOL_ARITH):
        x = _coords(x)
        return bool(np.all(self.constraint_values(x) <= tol * _scale(x)))

    @property
    def interior_witness(self):
        """Beltrami-Klein coordinates of an interior point.

        Raises ``ValueError`` when the polytope has empty interior.
        """
        if self._witness is None:
            witness = _interior_witness(self._outward)
            if witness is None:
                raise_error(ValueError, "Polytope bounded by {} half-spaces is "
                                        "empty.".format(len(self.hyperplanes)))
            self._witness = witness
        return self._witness

    def is_empty(self):
        try:
            self.interior_witness
        except ValueError:
            return True
        return False

    def project(self, x):
        """Nearest-point projection onto the polytope.

        Enumerates the active sets of at most ``d`` constraints, projects onto
        the flat they define and keeps the nearest feasible foot.

        Args:
            x (:class:`hyptile.core.hyperbolic.HPoint`): point to project.

        Returns:
            The nearest :class:`hyptile.core.hyperbolic.HPoint` of the polytope.
        """
        coords = _coords(x)
        if self.contains(coords):
            return x if isinstance(x, HPoint) else HPoint(coords)
        # fails for empty polytopes
        self.interior_witness
        best, best_distance = None, np.inf
        count = len(self.hyperplanes)
        for size in range(1, min(self.dim, count) + 1):
            for subset in itertools.combinations(range(count), size):
                foot = _project_flat(coords, self._outward[list(subset)])
                if foot is None or not self.contains(foot, tol=TOL_CONSTRUCT):
                    continue
                value = distance(coords, foot)
                if value < best_distance:
                    best, best_distance = foot, value
        if best is None: # pragma: no cover
            raise_error(RuntimeError, "No feasible foot found while projecting "
                                      "{}.".format(coords))
        return HPoint(best)

    def distance(self, x):
        """Distance from ``x`` to the polytope."""
        return distance(_coords(x), self.project(x).coords)


def _interior_witness(outward):
    """Chebyshev centre of the polytope in Beltrami-Klein coordinates.

    In Klein coordinates ``k`` the constraint ``<x, n> <= 0`` is the linear
    inequality ``sum_i k_i n_i <= n_{d+1}``.
    """
    lhs, rhs = outward[:, :-1], outward[:, -1]
    dim = lhs.shape[1]
    norms = np.linalg.norm(lhs, axis=1)
    cost = np.zeros(dim + 1)
    cost[-1] = -1.0
    result = linprog(cost, A_ub=np.column_stack([lhs, norms]), b_ub=rhs,
                     bounds=dim * [(-1, 1)] + [(0, 1)], method="highs")
    if not result.success or result.x[-1] <= TOL_ARITH:
        return None
    centre = result.x[:-1]
    if centre @ centre < 1 - TOL_CONSTRUCT:
        return centre
    # the box is larger than the ball: pull the witness inside
    log.debug("Chebyshev centre outside the Klein ball, projecting the witness.")
    constraint = {"type": "ineq",
                  "fun": lambda k: rhs - lhs @ k - TOL_CONSTRUCT * norms,
                  "jac": lambda k: -lhs}
    result = minimize(lambda k: k @ k, centre, jac=lambda k: 2 * k,
                      constraints=[constraint], method="SLSQP")
    k = result.x
    if result.success and k @ k < 1 - TOL_CONSTRUCT and \
            np.all(rhs - lhs @ k >= 0):
        return k
    return None


def project_to_polytope(x, polytope):
    """Nearest-point projection of ``x`` onto a convex polytope.

    Args:
        x (:class:`hyptile.core.hyperbolic.HPoint`): the point.
        polytope (:class:`hyptile.core.polytopes.ConvexPolytope`): non-empty
            polytope. A list of ``(Hyperplane, side)`` pairs is also accepted.

    Returns:
        The nearest point of the polytope.
    """
    if not isinstance(polytope, ConvexPolytope):
        hyperplanes, sides = zip(*polytope)
        polytope = ConvexPolytope(hyperplanes, sides)
    return polytope.project(x)


def halfspace(normal, positive=True):
    """Single half-space polytope ``{<x, v> <= 0}`` (or ``>= 0``)."""
    return ConvexPolytope([Hyperplane(normal)], [positive])
