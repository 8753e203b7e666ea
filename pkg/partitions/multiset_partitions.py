import logging
from collections import Counter
from dataclasses import dataclass
from itertools import product
from math import factorial, prod
from typing import Iterator, Sequence

from multiset_core.multiset_index import (
    Labeling,
    MultisetIndex,
    from_labels,
    union,
)
from partitions.set_partitions import SetPartition, set_partitions

logger = logging.getLogger(__name__)


class PartitionError(ValueError):
    """
    Base error for malformed multiset partitions.
    """


class PartitionMismatchError(PartitionError):
    """
    Raised when a partition (or enumeration) does not belong to the expected parent index.
    """


def block_key(block: MultisetIndex) -> tuple:
    """
    Canonical block order: larger blocks first, then descending multiplicity vector.
    """
    return (-block.cardinality(), tuple(-count for count in block.mult))


@dataclass(frozen=True)
class MultisetPartition:
    """
    A multiset of nonempty blocks, stored as a canonically sorted tuple.

    Equal blocks end up adjacent, so two partitions are equal exactly when
    their block tuples are equal. Use ``from_blocks`` to build one from
    blocks in arbitrary order.
    """
    blocks: tuple[MultisetIndex, ...]

    def __post_init__(self):
        if not isinstance(self.blocks, tuple):
            object.__setattr__(self, "blocks", tuple(self.blocks))

        dims = {block.dim for block in self.blocks}
        if len(dims) > 1:
            raise PartitionError(f"blocks use different dimensions: {sorted(dims)}")

        for block in self.blocks:
            if block.is_empty():
                raise PartitionError("partition blocks must be nonempty")

        keys = [block_key(block) for block in self.blocks]
        if keys != sorted(keys):
            raise PartitionError("blocks are not in canonical order, use `MultisetPartition.from_blocks()`")

    @classmethod
    def from_blocks(cls, blocks: Sequence[MultisetIndex]) -> "MultisetPartition":
        return cls(tuple(sorted(blocks, key=block_key)))

    @property
    def k(self) -> int:
        return len(self.blocks)

    def sort_key(self) -> tuple:
        return tuple(block_key(block) for block in self.blocks)

    def parent(self, dim: int | None = None) -> MultisetIndex:
        """
        Union of all blocks; ``dim`` is only needed for the empty partition.
        """
        if not self.blocks:
            if dim is None:
                raise PartitionError("the empty partition needs an explicit dimension")
            return MultisetIndex.empty(dim)

        parent = self.blocks[0]
        for block in self.blocks[1:]:
            parent = union(parent, block)
        return parent

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(block.cardinality() for block in self.blocks)

    def to_json(self) -> list[list[int]]:
        return [block.to_json() for block in self.blocks]

    def __str__(self) -> str:
        return "[" + ",".join(str(block) for block in self.blocks) + "]"


@dataclass(frozen=True)
class PartitionEnumeration:
    """
    The multiset ``Π(parent, order)``: distinct partitions with their multiplicities.

    Entries are sorted by ``MultisetPartition.sort_key()`` so enumerations built
    by different generators compare equal with ``==``.
    """
    parent: MultisetIndex
    order: int
    entries: tuple[tuple[MultisetPartition, int], ...]

    def __post_init__(self):
        if not isinstance(self.entries, tuple):
            object.__setattr__(self, "entries", tuple(self.entries))

        for partition, multiplicity in self.entries:
            if partition.k != self.order:
                raise PartitionError(f"partition {partition} has {partition.k} blocks, expected {self.order}")
            if partition.parent(self.parent.dim) != self.parent:
                raise PartitionMismatchError(f"partition {partition} does not partition {self.parent}")
            if multiplicity < 1:
                raise PartitionError(f"multiplicity of {partition} must be positive, got {multiplicity}")

    @classmethod
    def from_tally(cls, parent: MultisetIndex, order: int, tally: Counter) -> "PartitionEnumeration":
        """
        Builds an enumeration from ``{MultisetPartition: multiplicity}``.
        """
        entries = sorted(tally.items(), key=lambda item: item[0].sort_key())
        return cls(parent, order, tuple(entries))

    def cardinality(self) -> int:
        """
        Size of the multiset, i.e. the sum of multiplicities.
        """
        return sum(multiplicity for _, multiplicity in self.entries)

    def distinct(self) -> int:
        return len(self.entries)

    def as_dict(self) -> dict[MultisetPartition, int]:
        return dict(self.entries)

    def to_json(self) -> dict:
        return {
            "parent": self.parent.to_json(),
            "k": self.order,
            "entries": [
                {"blocks": partition.to_json(), "multiplicity": str(multiplicity)}
                for partition, multiplicity in self.entries
            ]
        }

    @classmethod
    def from_json(cls, payload: dict) -> "PartitionEnumeration":
        try:
            parent = MultisetIndex.from_json(payload["parent"])
            entries = tuple(
                (
                    MultisetPartition.from_blocks([MultisetIndex.from_json(block) for block in entry["blocks"]]),
                    int(entry["multiplicity"])
                )
                for entry in payload["entries"]
            )
            return cls(parent, int(payload["k"]), entries)
        except (KeyError, TypeError) as e:
            raise PartitionError(f"malformed partition enumeration: {e}") from e


def project_set_partition(labeling: Labeling, dim: int, set_partition: SetPartition) -> MultisetPartition:
    """
    Pushes a set partition of positions ``{1, ..., n}`` through a labeling.
    """
    return MultisetPartition.from_blocks([
        from_labels(dim, [labeling[position - 1] for position in block])
        for block in set_partition
    ])


def multiset_partitions_reference(a: MultisetIndex, k: int) -> PartitionEnumeration:
    """
    ``Π(a, k)`` straight from the definition: project every set partition of a
    labeling of ``a`` and tally. Cost grows like the Bell numbers.
    """
    n = a.cardinality()
    if k < 0 or k > n or (k == 0 and n > 0):
        return PartitionEnumeration(a, k, ())

    labeling = a.to_labels()
    tally = Counter(project_set_partition(labeling, a.dim, sp) for sp in set_partitions(n, k))
    return PartitionEnumeration.from_tally(a, k, tally)


def _sub_bags(remaining: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    for mult in product(*(range(count, -1, -1) for count in remaining)):
        if any(mult):
            yield mult


def _canonical_block_sequences(
        remaining: tuple[int, ...],
        k: int,
        floor: tuple | None
) -> Iterator[list[MultisetIndex]]:
    """
    Block sequences whose keys never decrease, so each multiset of blocks shows up once.
    """
    size = sum(remaining)
    if k == 0:
        if size == 0:
            yield []
        return

    for mult in _sub_bags(remaining):
        block = MultisetIndex(mult)
        key = block_key(block)
        if floor is not None and key < floor:
            continue

        block_size = block.cardinality()
        rest_size = size - block_size
        # the other k - 1 blocks are nonempty and no larger than this one
        if rest_size < k - 1 or rest_size > (k - 1) * block_size:
            continue

        rest = tuple(x - y for x, y in zip(remaining, mult))
        for tail in _canonical_block_sequences(rest, k - 1, key):
            yield [block] + tail


def partition_multiplicity_formula(a: MultisetIndex, blocks: Sequence[MultisetIndex]) -> int:
    """
    ``prod_x m(x)! / prod_i m_i(x)!`` divided by ``prod_j r_j!`` where ``r_j``
    counts repeated identical blocks.
    """
    labeled = prod(
        factorial(a.mult[var]) // prod(factorial(block.mult[var]) for block in blocks)
        for var in range(a.dim)
    )
    repeats = prod(factorial(count) for count in Counter(blocks).values())
    return labeled // repeats


def multiset_partitions(a: MultisetIndex, k: int) -> PartitionEnumeration:
    """
    ``Π(a, k)`` by canonical block descent with combinatorial multiplicities.

    ``k = 0`` with an empty ``a`` gives the empty partition with multiplicity 1;
    any other out-of-range ``k`` gives an empty enumeration.
    """
    n = a.cardinality()
    if k < 0 or k > n or (k == 0 and n > 0):
        return PartitionEnumeration(a, k, ())

    entries = []
    for blocks in _canonical_block_sequences(a.mult, k, None):
        partition = MultisetPartition(tuple(blocks))
        entries.append((partition, partition_multiplicity_formula(a, blocks)))

    entries.sort(key=lambda item: item[0].sort_key())
    return PartitionEnumeration(a, k, tuple(entries))


def partition_multiplicity(a: MultisetIndex, p: MultisetPartition) -> int:
    """
    Number of set partitions of ``{1, ..., |a|}`` that generate ``p``.

    :raises PartitionMismatchError: when ``p`` does not partition ``a``
    """
    if p.parent(a.dim) != a:
        raise PartitionMismatchError(f"{p} does not partition {a}")
    return partition_multiplicity_formula(a, p.blocks)


def partition_multiplicity_by_labeling(a: MultisetIndex, p: MultisetPartition, labeling: Labeling) -> int:
    """
    Brute-force multiplicity of ``p`` under an explicit labeling of ``a``.
    """
    if p.parent(a.dim) != a:
        raise PartitionMismatchError(f"{p} does not partition {a}")
    if from_labels(a.dim, labeling) != a:
        raise PartitionMismatchError(f"{labeling} is not a labeling of {a}")

    return sum(
        1 for sp in set_partitions(a.cardinality(), p.k)
        if project_set_partition(labeling, a.dim, sp) == p
    )


def extend_partitions(
        a0: int,
        prev_n: PartitionEnumeration,
        prev_n1: PartitionEnumeration
) -> PartitionEnumeration:
    """
    Builds ``Π([a0] ∪ α, n + 1)`` from ``Π(α, n)`` and ``Π(α, n + 1)``.

    A partition either keeps ``[a0]`` as its own block, coming from ``Π(α, n)``,
    or has ``a0`` merged into one block of a partition from ``Π(α, n + 1)``.
    Multiplicities carry over unchanged and duplicates are summed; merging
    into each block position separately is what makes the sums come out right
    when a partition repeats a block.

    :param a0: 1-based variable to adjoin
    :param prev_n: ``Π(α, n)``
    :param prev_n1: ``Π(α, n + 1)``
    """
    if prev_n.parent != prev_n1.parent:
        raise PartitionMismatchError(f"enumerations have different parents: {prev_n.parent} and {prev_n1.parent}")
    if prev_n1.order != prev_n.order + 1:
        raise PartitionMismatchError(f"expected orders n and n + 1, got {prev_n.order} and {prev_n1.order}")

    alpha = prev_n.parent
    singleton = MultisetIndex.singleton(alpha.dim, a0)

    tally: Counter = Counter()
    for partition, multiplicity in prev_n.entries:
        tally[MultisetPartition.from_blocks(partition.blocks + (singleton,))] += multiplicity

    for partition, multiplicity in prev_n1.entries:
        for position, block in enumerate(partition.blocks):
            merged = partition.blocks[:position] + (union(block, singleton),) + partition.blocks[position + 1:]
            tally[MultisetPartition.from_blocks(merged)] += multiplicity

    return PartitionEnumeration.from_tally(union(alpha, singleton), prev_n1.order, tally)


def multiset_partitions_by_extension(a: MultisetIndex) -> dict[int, PartitionEnumeration]:
    """
    Every ``Π(a, k)`` for ``k = 0..|a|`` built only through ``extend_partitions``,
    adjoining the labels of ``a`` one at a time starting from the empty index.
    """
    current = MultisetIndex.empty(a.dim)
    table = {0: multiset_partitions(current, 0)}

    for label in reversed(a.to_labels()):
        size = current.cardinality()
        nxt_parent = union(current, MultisetIndex.singleton(a.dim, label))
        nxt = {0: PartitionEnumeration(nxt_parent, 0, ())}
        for n in range(size + 1):
            prev_n1 = table.get(n + 1, PartitionEnumeration(current, n + 1, ()))
            nxt[n + 1] = extend_partitions(label, table[n], prev_n1)
        table = nxt
        current = nxt_parent
        logger.debug(f"Built partitions of {current} by extension")

    return table

