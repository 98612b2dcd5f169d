import itertools
from abc import ABC, abstractmethod
import numpy as np
from hyptile.config import raise_error, MEMO_QUANTUM


_NODE_IDS = itertools.count()


class EvaluationQuery:
    """State of a single top-level field evaluation.

    Nodes evaluated through the query are memoized on their identifier and
    on the coordinates quantized to ``MEMO_QUANTUM``, so the branches of
    reflection operators that revisit a point reuse its value. The query
    also counts evaluations for the branching checks.
    """

    def __init__(self, memoize=True):
        self.memoize = memoize
        self.cache = {}
        self.evaluations = 0
        self.base_evaluations = 0
        self.memo_hits = 0

    @staticmethod
    def point_key(x):
        return tuple(np.round(np.asarray(x) / MEMO_QUANTUM).astype(np.int64))

    def lookup(self, key):
        if not self.memoize:
            return None
        value = self.cache.get(key)
        if value is not None:
            self.memo_hits += 1
        return value

    def store(self, key, value):
        if self.memoize:
            self.cache[key] = value
        return value

    def evaluate(self, node, x):
        self.evaluations += 1
        if not node.memoized:
            return node._evaluate(x, self)
        key = (node.id, self.point_key(x))
        value = self.lookup(key)
        if value is None:
            value = self.store(key, node._evaluate(x, self))
        return value


class ScalarField(ABC):
    """Abstract real function on the hyperbolic plane.

    Fields are immutable evaluation trees. Leaves are primitive functions of
    the hyperboloid coordinates, inner nodes combine or transform other
    fields. Fields can be added, subtracted and multiplied by scalars or by
    other fields, for example ``2 * f - g``.
    """

    memoized = True

    def __init__(self):
        self.id = next(_NODE_IDS)
        self.name = self.__class__.__name__

    @abstractmethod
    def _evaluate(self, x, query): # pragma: no cover
        """Value at the hyperboloid coordinates ``x`` within a query."""
        raise_error(NotImplementedError)

    def evaluate(self, x, query=None):
        """Evaluate the field at a point.

        Args:
            x (np.ndarray): hyperboloid coordinates or an
                :class:`hyptile.core.hyperbolic.HPoint`.
            query (:class:`hyptile.abstractions.fields.EvaluationQuery`):
                optional query holding the memo table. A fresh one is used
                if not given.

        Returns:
            The value of the field as a float.
        """
        if query is None:
            query = EvaluationQuery()
        return float(query.evaluate(self, np.asarray(x, dtype=float)))

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate_many(self, points):
        """Values at the rows of ``points`` using one query per point."""
        return np.array([self.evaluate(x) for x in points])

    def __repr__(self):
        return "{}(id={})".format(self.name, self.id)

    def __add__(self, o):
        from hyptile.core.fields import ConstantField, LinearCombination
        if isinstance(o, ScalarField):
            return LinearCombination([(1.0, self), (1.0, o)])
        if isinstance(o, (int, float, np.number)):
            return LinearCombination([(1.0, self), (1.0, ConstantField(o))])
        raise_error(NotImplementedError, "Field addition to {} not implemented."
                                         "".format(type(o)))

    def __radd__(self, o):
        return self.__add__(o)

    def __sub__(self, o):
        if isinstance(o, (ScalarField, int, float, np.number)):
            return self.__add__(-1 * o)
        raise_error(NotImplementedError, "Field subtraction of {} not "
                                         "implemented.".format(type(o)))

    def __rsub__(self, o):
        return (-1 * self).__add__(o)

    def __mul__(self, o):
        from hyptile.core.fields import LinearCombination, Product
        if isinstance(o, ScalarField):
            return Product([self, o])
        if isinstance(o, (int, float, np.number)):
            return LinearCombination([(float(o), self)])
        raise_error(NotImplementedError, "Field multiplication with {} not "
                                         "implemented.".format(type(o)))

    def __rmul__(self, o):
        return self.__mul__(o)

    def __truediv__(self, o):
        if isinstance(o, (int, float, np.number)):
            return self.__mul__(1.0 / o)
        raise_error(NotImplementedError, "Field division by {} not implemented."
                                         "".format(type(o)))

    def __neg__(self):
        return self.__mul__(-1)
