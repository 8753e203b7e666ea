import logging
from itertools import product
from math import prod
from typing import Sequence

from chain_rule.derivative_tensor import DerivativeTensor, MapJet
from chain_rule.scalar import ArithmeticModeError, ChainRuleError, Scalar, zero
from multiset_core.multiset_index import (
    MultisetIndex,
    enumerate_bag,
    enumerate_bags_upto,
    from_labels,
    labelings,
)
from partitions.multiset_partitions import multiset_partitions

logger = logging.getLogger(__name__)


class JetDimensionError(ChainRuleError):
    """
    Raised when the index, ``f`` jet and ``g`` jet disagree on dimensions.
    """


class JetOrderError(ChainRuleError):
    """
    Raised when a jet is not deep enough for the requested derivative.
    """


def _check_inputs(alpha: MultisetIndex, f_jet: DerivativeTensor, g_jet: MapJet):
    if alpha.dim != g_jet.in_dim:
        raise JetDimensionError(f"index {alpha} uses {alpha.dim} variables, g jet has {g_jet.in_dim} inputs")
    if f_jet.dim != g_jet.out_dim:
        raise JetDimensionError(f"f jet has {f_jet.dim} variables, g jet has {g_jet.out_dim} components")
    if f_jet.mode is not g_jet.mode:
        raise ArithmeticModeError(f"f jet is {f_jet.mode.value}, g jet is {g_jet.mode.value}")

    size = alpha.cardinality()
    if f_jet.order < size:
        raise JetOrderError(f"f jet has order {f_jet.order}, derivative {alpha} needs {size}")
    if g_jet.order < size:
        raise JetOrderError(f"g jet has order {g_jet.order}, derivative {alpha} needs {size}")


def compose_derivative(alpha: MultisetIndex, f_jet: DerivativeTensor, g_jet: MapJet) -> Scalar:
    """
    ``∂_α (f∘g)`` evaluated by the multiset chain rule, summing over component tuples.

    For every ``n``, every tuple ``(b_1, ..., b_n)`` of components of ``g`` and every
    partition ``[α_1, ..., α_n]`` of ``α`` (with its multiplicity) the term
    ``∂_{b_1...b_n} f * prod_k ∂_{α_k} g^{b_k}`` is added, in that order.
    ``f_jet`` must be the jet of ``f`` at ``g(base_point)``; that is not checked.

    :param alpha: derivative to compute, over ``g_jet.in_dim`` variables
    :param f_jet: derivatives of ``f`` at ``g(x)``
    :param g_jet: jet of ``g`` at ``x``
    :return: the derivative, exact in rational mode
    """
    _check_inputs(alpha, f_jet, g_jet)
    if alpha.is_empty():
        return f_jet.value()

    c = g_jet.out_dim
    total = zero(f_jet.mode)
    for n in range(1, alpha.cardinality() + 1):
        enumeration = multiset_partitions(alpha, n)
        for b in product(range(1, c + 1), repeat=n):
            f_term = f_jet[from_labels(c, b)]
            if not f_term:
                continue
            components = [g_jet.component(b_k) for b_k in b]
            for partition, multiplicity in enumeration.entries:
                g_term = prod(component[block] for component, block in zip(components, partition.blocks))
                total += multiplicity * f_term * g_term
    return total


def g_beta_derivative(blocks: Sequence[MultisetIndex], beta: MultisetIndex, g_jet: MapJet) -> Scalar:
    """
    ``∂_{[α_1, ..., α_n]} g^β``: the sum over labelings ``(b_1, ..., b_n)`` of ``β``
    of ``prod_k ∂_{α_k} g^{b_k}``, pairing blocks with positions in the given order.
    """
    if len(blocks) != beta.cardinality():
        raise ChainRuleError(f"{len(blocks)} blocks cannot be paired with {beta}, which has {beta.cardinality()} labels")
    if beta.dim != g_jet.out_dim:
        raise JetDimensionError(f"index {beta} uses {beta.dim} components, g jet has {g_jet.out_dim}")

    total = zero(g_jet.mode)
    for labeling in labelings(beta):
        total += prod(g_jet.component(b_k)[block] for b_k, block in zip(labeling, blocks))
    return total


def compose_derivative_beta(alpha: MultisetIndex, f_jet: DerivativeTensor, g_jet: MapJet) -> Scalar:
    """
    ``∂_α (f∘g)`` with the component tuples regrouped into multiset indices ``β``.

    Independent of ``compose_derivative`` on purpose: the two must agree exactly
    in rational mode.
    """
    _check_inputs(alpha, f_jet, g_jet)
    if alpha.is_empty():
        return f_jet.value()

    total = zero(f_jet.mode)
    for n in range(1, alpha.cardinality() + 1):
        enumeration = multiset_partitions(alpha, n)
        for beta in enumerate_bag(g_jet.out_dim, n):
            f_term = f_jet[beta]
            for partition, multiplicity in enumeration.entries:
                total += multiplicity * f_term * g_beta_derivative(partition.blocks, beta, g_jet)
    return total


def compose_jet(f_jet: DerivativeTensor, g_jet: MapJet, order: int) -> DerivativeTensor:
    """
    Dense jet of ``f∘g`` at the base point of ``g_jet``, up to ``order``.

    :raises JetOrderError: when either input jet is shallower than ``order``
    """
    if order < 1:
        raise JetOrderError(f"composition order must be positive, got {order}")
    if f_jet.order < order:
        raise JetOrderError(f"f jet has order {f_jet.order}, composition needs {order}")
    if g_jet.order < order:
        raise JetOrderError(f"g jet has order {g_jet.order}, composition needs {order}")

    logger.debug(f"Composing jets: d={g_jet.in_dim}, c={g_jet.out_dim}, order {order}, {f_jet.mode.value} mode")

    entries = {
        alpha: compose_derivative(alpha, f_jet, g_jet)
        for alpha in enumerate_bags_upto(g_jet.in_dim, order)
    }
    return DerivativeTensor(g_jet.in_dim, order, f_jet.mode, entries)
