from collections import Counter
from dataclasses import dataclass
from itertools import groupby, product
from math import factorial, prod

from chain_rule.derivative_tensor import DerivativeTensor, MapJet
from chain_rule.scalar import Scalar, zero
from multiset_core.multiset_index import MultisetIndex, from_labels
from partitions.multiset_partitions import MultisetPartition, multiset_partitions

LETTERS = "ijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class SymbolicTerm:
    """
    One term ``coefficient * orderings * ∂_{b_1...b_n} f * prod_k ∂_{α_k} g^{b_k}``.

    ``coefficient`` is the multiplicity of the blocks' partition. ``orderings``
    counts the component tuples that collapse onto this term, which only
    happens when identical blocks get different components.
    """
    f_labels: tuple[int, ...]
    factors: tuple[tuple[MultisetIndex, int], ...]
    coefficient: int
    orderings: int = 1

    @property
    def n(self) -> int:
        return len(self.f_labels)

    def partition(self) -> MultisetPartition:
        return MultisetPartition(tuple(block for block, _ in self.factors))

    def to_json(self) -> dict:
        return {
            "f_labels": list(self.f_labels),
            "factors": [{"block": block.to_json(), "component": b} for block, b in self.factors],
            "coefficient": str(self.coefficient),
            "orderings": self.orderings
        }


@dataclass(frozen=True)
class SymbolicExpansion:
    alpha: MultisetIndex
    c: int
    terms: tuple[SymbolicTerm, ...]

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha.to_json(),
            "c": self.c,
            "terms": [term.to_json() for term in self.terms]
        }


def _canonical_orderings(blocks: tuple[MultisetIndex, ...], b: tuple[int, ...]) -> int:
    """
    Number of component tuples equivalent to ``b`` under swapping identical blocks,
    or 0 when ``b`` is not the representative (nondecreasing on every run of
    identical blocks).
    """
    orderings = 1
    position = 0
    for _, run in groupby(blocks):
        length = len(list(run))
        labels = b[position:position + length]
        if list(labels) != sorted(labels):
            return 0
        orderings *= factorial(length) // prod(factorial(count) for count in Counter(labels).values())
        position += length
    return orderings


def expand_symbolic(alpha: MultisetIndex, c: int) -> SymbolicExpansion:
    """
    Every term of the multiset chain rule for ``∂_α (f∘g)`` with ``g`` having ``c`` components.

    Terms come ordered by ``n``, then component tuple, then canonical partition order.
    """
    if alpha.is_empty():
        raise ValueError("symbolic expansion needs a nonempty index")
    if c < 1:
        raise ValueError(f"number of components must be positive, got {c}")

    terms = []
    for n in range(1, alpha.cardinality() + 1):
        enumeration = multiset_partitions(alpha, n)
        for b in product(range(1, c + 1), repeat=n):
            for partition, multiplicity in enumeration.entries:
                orderings = _canonical_orderings(partition.blocks, b)
                if orderings == 0:
                    continue
                terms.append(SymbolicTerm(
                    f_labels=b,
                    factors=tuple(zip(partition.blocks, b)),
                    coefficient=multiplicity,
                    orderings=orderings
                ))
    return SymbolicExpansion(alpha, c, tuple(terms))


def evaluate_expansion(expansion: SymbolicExpansion, f_jet: DerivativeTensor, g_jet: MapJet) -> Scalar:
    """
    Numerical value of an expansion; agrees with ``compose_derivative``.
    """
    total = zero(f_jet.mode)
    for term in expansion.terms:
        f_term = f_jet[from_labels(expansion.c, term.f_labels)]
        g_term = prod(g_jet.component(b)[block] for block, b in term.factors)
        total += term.coefficient * term.orderings * f_term * g_term
    return total


def collect_by_block_sizes(expansion: SymbolicExpansion) -> dict[tuple[int, tuple[int, ...]], int]:
    """
    Sums weights by ``(k, (m_1, ..., m_n))`` where ``m_i`` counts blocks of size ``i``;
    for one variable and one component this is the classical coefficient table.
    """
    n = expansion.alpha.cardinality()
    table: Counter = Counter()
    for term in expansion.terms:
        sizes = Counter(block.cardinality() for block, _ in term.factors)
        m = tuple(sizes.get(size, 0) for size in range(1, n + 1))
        table[(term.n, m)] += term.coefficient * term.orderings
    return dict(table)


def _letters(dim: int, size: int) -> tuple[list[str], list[str]] | None:
    if dim + size > len(LETTERS):
        return None
    return list(LETTERS[:dim]), list(LETTERS[dim:dim + size])


def _subscript(symbols: list[str], braced: bool = False) -> str:
    if all(len(symbol) == 1 for symbol in symbols):
        text = "".join(symbols)
    else:
        text = ",".join(symbols)
    if len(text) == 1 and not braced:
        return f"_{text}"
    return f"_{{{text}}}"


def render_text(expansion: SymbolicExpansion) -> str:
    """
    Textbook-style rendering, one summation per distinct partition, highest ``n`` first.
    Within a term the ``g`` factors are listed smallest block first.

    Variables print as ``i, j, k, ...`` and summation indices use the letters
    after them, e.g.::

        ∂_{ij}(f∘g) = Σ_{k,l} ∂_{kl}f · ∂_i g^k ∂_j g^l
                    + Σ_k ∂_{k}f · ∂_{ij} g^k
    """
    alpha = expansion.alpha
    letters = _letters(alpha.dim, alpha.cardinality())
    if letters is None:
        variables = [str(var) for var in range(1, alpha.dim + 1)]
        dummies = [f"b{position}" for position in range(1, alpha.cardinality() + 1)]
    else:
        variables, dummies = letters

    def index_symbols(index: MultisetIndex) -> list[str]:
        return [variables[label - 1] for label in index.to_labels()]

    multiplicities: dict[tuple[int, MultisetPartition], int] = {}
    for term in expansion.terms:
        multiplicities.setdefault((term.n, term.partition()), term.coefficient)

    lines = []
    for n in range(alpha.cardinality(), 0, -1):
        for partition, multiplicity in _partitions_of_order(multiplicities, n):
            names = dummies[:n]
            summation = "Σ" + (f"_{names[0]}" if n == 1 and len(names[0]) == 1 else "_{" + ",".join(names) + "}")
            coefficient = "" if multiplicity == 1 else f"{multiplicity} · "
            f_part = "∂" + _subscript(names, braced=True) + "f"
            g_part = " ".join(
                "∂" + _subscript(index_symbols(block)) + f" g^{name}"
                for block, name in zip(sorted(partition.blocks, key=MultisetIndex.cardinality), names)
            )
            lines.append(f"{summation} {coefficient}{f_part} · {g_part}")

    header = "∂" + _subscript(index_symbols(alpha)) + "(f∘g) = "
    padding = " " * (len(header) - 2)
    return "\n".join(
        (header if position == 0 else padding + "+ ") + line
        for position, line in enumerate(lines)
    )


def _partitions_of_order(
        multiplicities: dict[tuple[int, MultisetPartition], int],
        n: int
) -> list[tuple[MultisetPartition, int]]:
    entries = [(partition, multiplicity) for (size, partition), multiplicity in multiplicities.items() if size == n]
    return sorted(entries, key=lambda item: item[0].sort_key())
