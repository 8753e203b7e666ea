import logging
from dataclasses import dataclass, field
from typing import Sequence

from chain_rule.chain_rule import compose_jet
from chain_rule.derivative_tensor import DerivativeTensor, MapJet
from chain_rule.scalar import ArithmeticMode, Scalar, relative_error, scalar_to_json
from multiset_core.multiset_index import MultisetIndex, enumerate_bags_upto
from oracle.expr import Expr, OracleError, arity, diff, evaluate, is_polynomial, substitute
from oracle.parser import to_sexpr

logger = logging.getLogger(__name__)

FLOAT_TOLERANCE = 1e-9


def _mode_for(exprs: Sequence[Expr], mode: ArithmeticMode | None) -> ArithmeticMode:
    if mode is not None:
        return mode
    if all(is_polynomial(e) for e in exprs):
        return ArithmeticMode.RATIONAL
    return ArithmeticMode.FLOAT


def derivative_trees(e: Expr, dim: int, order: int) -> dict[MultisetIndex, Expr]:
    """
    ``∂_α e`` for every ``α`` up to ``order``; each tree is one ``diff`` away from
    the tree of ``α`` with its last label removed.
    """
    trees = {MultisetIndex.empty(dim): e}
    for alpha in enumerate_bags_upto(dim, order):
        if alpha.is_empty():
            continue
        last = alpha.to_labels()[-1]
        parent = list(alpha.mult)
        parent[last - 1] -= 1
        trees[alpha] = diff(trees[MultisetIndex(tuple(parent))], last)
    return trees


def jet_of_function(
        e: Expr,
        point: Sequence,
        order: int,
        mode: ArithmeticMode | None = None
) -> DerivativeTensor:
    """
    Derivative tensor of one expression at ``point`` by repeated differentiation.
    """
    dim = len(point)
    if arity(e) > dim:
        raise OracleError(f"expression uses x{arity(e)} but the point has {dim} coordinates")

    mode = _mode_for([e], mode)
    trees = derivative_trees(e, dim, order)
    return DerivativeTensor(dim, order, mode, {alpha: evaluate(tree, point, mode) for alpha, tree in trees.items()})


def jet_of_map(
        exprs: Sequence[Expr],
        point: Sequence,
        order: int,
        mode: ArithmeticMode | None = None
) -> MapJet:
    """
    ``MapJet`` of ``g = (exprs[0], ..., exprs[c - 1])`` at ``point``; rational
    unless some component is transcendental.
    """
    if not exprs:
        raise OracleError("a map needs at least one component")

    mode = _mode_for(exprs, mode)
    components = tuple(jet_of_function(e, point, order, mode) for e in exprs)
    return MapJet(len(point), len(exprs), order, components, tuple(point))


@dataclass(frozen=True)
class IndexComparison:
    alpha: MultisetIndex
    expected: Scalar
    actual: Scalar
    error: float
    agrees: bool

    def to_json(self, mode: ArithmeticMode) -> dict:
        return {
            "index": self.alpha.to_json(),
            "expected": scalar_to_json(self.expected, mode),
            "actual": scalar_to_json(self.actual, mode),
            "agrees": self.agrees
        }


@dataclass(frozen=True)
class CompositionReport:
    """
    Per-index comparison of the differentiated composition (expected) against the
    chain-rule jet (actual).
    """
    mode: ArithmeticMode
    order: int
    comparisons: tuple[IndexComparison, ...] = field(default=())

    @property
    def all_agree(self) -> bool:
        return all(comparison.agrees for comparison in self.comparisons)

    @property
    def worst_error(self) -> float:
        return max((comparison.error for comparison in self.comparisons), default=0.0)

    def mismatches(self) -> list[IndexComparison]:
        return [comparison for comparison in self.comparisons if not comparison.agrees]


def verify_composition(
        f_expr: Expr,
        g_exprs: Sequence[Expr],
        point: Sequence,
        order: int,
        mode: ArithmeticMode | None = None,
        tolerance: float = FLOAT_TOLERANCE
) -> CompositionReport:
    """
    Checks the chain-rule engine on an explicit composition.

    ``f∘g`` is built by substitution and differentiated directly; independently
    ``f`` is differentiated at ``g(point)`` and ``g`` at ``point``, and the two jets
    go through ``compose_jet``. Rational mode demands exact equality, float mode
    a relative error within ``tolerance``.

    :param f_expr: ``f`` over ``len(g_exprs)`` variables
    :param g_exprs: components of ``g``, over ``len(point)`` variables
    """
    mode = _mode_for([f_expr, *g_exprs], mode)
    if arity(f_expr) > len(g_exprs):
        raise OracleError(f"f uses x{arity(f_expr)} but g has {len(g_exprs)} components")

    g_jet = jet_of_map(g_exprs, point, order, mode)
    f_jet = jet_of_function(f_expr, g_jet.value(), order, mode)
    expected = jet_of_function(substitute(f_expr, g_exprs), point, order, mode)
    actual = compose_jet(f_jet, g_jet, order)

    comparisons = []
    for alpha, value in expected.entries.items():
        error = relative_error(value, actual[alpha])
        agrees = value == actual[alpha] if mode is ArithmeticMode.RATIONAL else error <= tolerance
        comparisons.append(IndexComparison(alpha, value, actual[alpha], error, agrees))

    report = CompositionReport(mode, order, tuple(comparisons))
    if not report.all_agree:
        logger.debug(f"Composition mismatch for f = {to_sexpr(f_expr)}, "
                     f"g = ({', '.join(to_sexpr(e) for e in g_exprs)})")
    return report
