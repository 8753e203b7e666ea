def stirling2_row(n: int) -> list[int]:
    """
    Row ``n`` of the Stirling triangle of the second kind, ``[S(n, 0), ..., S(n, n)]``.

    Built with ``S(n, k) = k * S(n - 1, k) + S(n - 1, k - 1)``; no table is kept
    between calls.
    """
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")

    row = [1]
    for m in range(1, n + 1):
        nxt = [0] * (m + 1)
        for k in range(1, m + 1):
            nxt[k] = (k * row[k] if k < m else 0) + row[k - 1]
        row = nxt
    return row


def stirling2(n: int, k: int) -> int:
    """
    Number of set partitions of an ``n``-element set into ``k`` nonempty blocks.
    """
    if n < 0 or k < 0 or k > n:
        return 0
    return stirling2_row(n)[k]


def bell(n: int) -> int:
    """
    Number of set partitions of an ``n``-element set.
    """
    return sum(stirling2_row(n))
