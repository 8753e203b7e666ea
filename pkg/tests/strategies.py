from hypothesis import strategies as st

from chain_rule.derivative_tensor import DerivativeTensor, MapJet
from chain_rule.scalar import ArithmeticMode
from multiset_core.multiset_index import MultisetIndex, enumerate_bags_upto, from_labels


def small_fractions():
    return st.fractions(min_value=-9, max_value=9, max_denominator=9)


@st.composite
def indices(draw, dim: int | None = None, max_dim: int = 3, min_size: int = 0, max_size: int = 5) -> MultisetIndex:
    """
    Random ``MultisetIndex`` over ``dim`` (or 1..max_dim) variables.
    """
    dim = dim if dim is not None else draw(st.integers(1, max_dim))
    labels = draw(st.lists(st.integers(1, dim), min_size=min_size, max_size=max_size))
    return from_labels(dim, labels)


@st.composite
def tensors(draw, dim: int, order: int) -> DerivativeTensor:
    entries = {index: draw(small_fractions()) for index in enumerate_bags_upto(dim, order)}
    return DerivativeTensor(dim, order, ArithmeticMode.RATIONAL, entries)


@st.composite
def map_jets(draw, in_dim: int, out_dim: int, order: int) -> MapJet:
    components = tuple(draw(tensors(in_dim, order)) for _ in range(out_dim))
    point = tuple(draw(small_fractions()) for _ in range(in_dim))
    return MapJet(in_dim, out_dim, order, components, point)


@st.composite
def composition_inputs(draw, max_dim: int = 3, max_size: int = 4):
    """
    ``(alpha, f_jet, g_jet)`` with consistent dimensions and orders.
    """
    d = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    alpha = draw(indices(dim=d, min_size=1, max_size=max_size))
    order = alpha.cardinality()
    return alpha, draw(tensors(c, order)), draw(map_jets(d, c, order))
