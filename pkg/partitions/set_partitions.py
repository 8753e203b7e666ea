from typing import Iterator

SetPartition = tuple[tuple[int, ...], ...]


def restricted_growth_strings(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """
    Restricted growth strings of length ``n`` using exactly ``k`` distinct values.

    A string ``a`` satisfies ``a[0] == 0`` and ``a[i] <= max(a[:i]) + 1``; block
    ``j`` of the matching set partition holds the positions where ``a`` equals ``j``.
    Strings come out in lexicographic order.

    :param n: length of the string (size of the ground set)
    :param k: number of blocks
    """
    if n < 0 or k < 0 or k > n:
        return
    if n == 0:
        if k == 0:
            yield ()
        return
    if k == 0:
        return

    prefix = [0] * n

    def extend(position: int, used: int) -> Iterator[tuple[int, ...]]:
        remaining = n - position
        if remaining == 0:
            if used == k:
                yield tuple(prefix)
            return

        # the tail must still be able to open the missing blocks
        if k - used > remaining:
            return

        for value in range(min(used + 1, k)):
            prefix[position] = value
            yield from extend(position + 1, max(used, value + 1))

    yield from extend(1, 1)


def set_partitions(n: int, k: int) -> list[SetPartition]:
    """
    Set partitions of ``{1, ..., n}`` into exactly ``k`` nonempty blocks.

    Blocks are sorted tuples ordered by their smallest element. ``k > n`` or
    ``k == 0`` (with ``n > 0``) gives an empty list rather than an error.
    """
    partitions = []
    for rgs in restricted_growth_strings(n, k):
        blocks: list[list[int]] = [[] for _ in range(k)]
        for element, block in enumerate(rgs, start=1):
            blocks[block].append(element)
        partitions.append(tuple(tuple(block) for block in blocks))
    return partitions
