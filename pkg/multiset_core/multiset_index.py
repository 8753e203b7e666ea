from dataclasses import dataclass
from math import factorial, prod
from typing import Callable, Iterator, Sequence

Labeling = tuple[int, ...]


class MultisetIndexError(ValueError):
    """
    Base error for malformed multiset indices.
    """


class DimensionMismatchError(MultisetIndexError):
    """
    Raised when two indices live over different variable spaces.
    """


class LabelOutOfRangeError(MultisetIndexError):
    """
    Raised when a label does not name one of the ``dim`` variables.
    """


@dataclass(frozen=True)
class MultisetIndex:
    """
    A bag of variable indices over ``{1, ..., dim}``.

    The multiplicity vector is the only representation: ``mult[i]`` is the
    number of times variable ``i + 1`` occurs. ``[1, 1, 2]`` over two variables
    is ``MultisetIndex((2, 1))``.
    """
    mult: tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.mult, tuple):
            object.__setattr__(self, "mult", tuple(self.mult))

        if len(self.mult) == 0:
            raise MultisetIndexError("multiset index needs at least one variable")

        for entry in self.mult:
            if not isinstance(entry, int) or isinstance(entry, bool) or entry < 0:
                raise MultisetIndexError(f"multiplicities must be nonnegative integers, got {self.mult}")

    @property
    def dim(self) -> int:
        return len(self.mult)

    def cardinality(self) -> int:
        """
        Total number of marbles in the bag.
        """
        return sum(self.mult)

    def is_empty(self) -> bool:
        return self.cardinality() == 0

    @classmethod
    def empty(cls, dim: int) -> "MultisetIndex":
        return cls((0,) * dim)

    @classmethod
    def singleton(cls, dim: int, var: int) -> "MultisetIndex":
        """
        Builds ``[var]``.

        :param dim: number of variables
        :param var: 1-based variable index
        """
        return from_labels(dim, (var,))

    def union(self, other: "MultisetIndex") -> "MultisetIndex":
        return union(self, other)

    def to_labels(self) -> Labeling:
        """
        Canonical (sorted) labeling of this index.
        """
        return tuple(var + 1 for var, count in enumerate(self.mult) for _ in range(count))

    def support(self) -> tuple[int, ...]:
        """
        1-based variables with nonzero multiplicity.
        """
        return tuple(var + 1 for var, count in enumerate(self.mult) if count > 0)

    def to_json(self) -> list[int]:
        return list(self.mult)

    @classmethod
    def from_json(cls, payload) -> "MultisetIndex":
        """
        Parses the array form, e.g. ``[2, 1]`` for ``[1, 1, 2]`` with ``d = 2``.
        """
        if not isinstance(payload, list):
            raise MultisetIndexError(f"multiset index must be a JSON array, got {payload!r}")
        return cls(tuple(payload))

    def __str__(self) -> str:
        return "[" + ",".join(str(label) for label in self.to_labels()) + "]"


def union(a: MultisetIndex, b: MultisetIndex) -> MultisetIndex:
    """
    Bag union: multiplicities add.

    :raises DimensionMismatchError: when the indices use different variable spaces
    """
    if a.dim != b.dim:
        raise DimensionMismatchError(f"cannot unite indices over {a.dim} and {b.dim} variables")
    return MultisetIndex(tuple(x + y for x, y in zip(a.mult, b.mult)))


def difference(a: MultisetIndex, b: MultisetIndex) -> MultisetIndex:
    """
    Removes the marbles of ``b`` from ``a``; ``b`` has to be contained in ``a``.
    """
    if a.dim != b.dim:
        raise DimensionMismatchError(f"cannot subtract indices over {a.dim} and {b.dim} variables")
    if any(y > x for x, y in zip(a.mult, b.mult)):
        raise MultisetIndexError(f"{b} is not contained in {a}")
    return MultisetIndex(tuple(x - y for x, y in zip(a.mult, b.mult)))


def from_labels(dim: int, labels: Sequence[int]) -> MultisetIndex:
    """
    Counts label occurrences, so ``from_labels(2, (2, 1, 1)) == from_labels(2, (1, 1, 2))``.

    :raises LabelOutOfRangeError: when a label is outside ``{1, ..., dim}``
    """
    if dim < 1:
        raise MultisetIndexError(f"dimension must be positive, got {dim}")

    mult = [0] * dim
    for label in labels:
        if isinstance(label, bool) or not isinstance(label, int) or not 1 <= label <= dim:
            raise LabelOutOfRangeError(f"label {label!r} is outside of 1..{dim}")
        mult[label - 1] += 1
    return MultisetIndex(tuple(mult))


def labelings(a: MultisetIndex) -> list[Labeling]:
    """
    All distinct labelings of ``a`` in lexicographic order.

    There are ``|a|! / prod(mult[i]!)`` of them; the empty bag has one, ``()``.
    """
    return list(_iter_labelings(list(a.mult)))


def _iter_labelings(remaining: list[int]) -> Iterator[Labeling]:
    if sum(remaining) == 0:
        yield ()
        return

    for var, count in enumerate(remaining):
        if count == 0:
            continue
        remaining[var] -= 1
        for rest in _iter_labelings(remaining):
            yield (var + 1,) + rest
        remaining[var] += 1


def labeling_count(a: MultisetIndex) -> int:
    return factorial(a.cardinality()) // prod(factorial(count) for count in a.mult)


def weighted_sum(a: MultisetIndex, f: Callable[[int], object]):
    """
    Sum over the bag with multiplicity: ``sum(mult[i] * f(i + 1))``.
    """
    total = 0
    for var, count in enumerate(a.mult):
        if count:
            total += count * f(var + 1)
    return total


def enumerate_bag(dim: int, n: int) -> list[MultisetIndex]:
    """
    Every index of cardinality ``n`` over ``dim`` variables.

    Order: descending multiplicity of variable 1, then of variable 2, and so on,
    which lists ``(2, 0), (1, 1), (0, 2)`` for ``dim = 2, n = 2``.
    """
    if dim < 1:
        raise MultisetIndexError(f"dimension must be positive, got {dim}")
    if n < 0:
        raise MultisetIndexError(f"cardinality must be nonnegative, got {n}")
    return [MultisetIndex(mult) for mult in _compositions(dim, n)]


def _compositions(length: int, total: int) -> Iterator[tuple[int, ...]]:
    if length == 1:
        yield (total,)
        return
    for head in range(total, -1, -1):
        for tail in _compositions(length - 1, total - head):
            yield (head,) + tail


def enumerate_bags_upto(dim: int, order: int) -> list[MultisetIndex]:
    """
    Indices of cardinality ``0..order``, grouped by ascending cardinality.
    """
    return [index for n in range(order + 1) for index in enumerate_bag(dim, n)]
