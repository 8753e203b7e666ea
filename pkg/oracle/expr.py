import math
from dataclasses import dataclass
from fractions import Fraction
from functools import singledispatch
from typing import Sequence

from chain_rule.scalar import ArithmeticMode, Scalar, coerce_scalar
from multiset_core.multiset_index import MultisetIndex


class OracleError(ValueError):
    """
    Base error for the brute-force differentiation oracle.
    """


class OracleModeError(OracleError):
    """
    Raised when a transcendental expression is evaluated in rational mode.
    """


class Expr:
    """
    Immutable expression tree node.
    """


@dataclass(frozen=True)
class Constant(Expr):
    value: Fraction


@dataclass(frozen=True)
class Var(Expr):
    index: int


@dataclass(frozen=True)
class Sum(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Product(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Negate(Expr):
    operand: Expr


@dataclass(frozen=True)
class IntPower(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True)
class Sin(Expr):
    operand: Expr


@dataclass(frozen=True)
class Cos(Expr):
    operand: Expr


@dataclass(frozen=True)
class Exp(Expr):
    operand: Expr


ZERO = Constant(Fraction(0))
ONE = Constant(Fraction(1))


def const(value) -> Constant:
    return Constant(Fraction(value))


def _is_const(e: Expr, value: int) -> bool:
    return isinstance(e, Constant) and e.value == value


def add(left: Expr, right: Expr) -> Expr:
    if _is_const(left, 0):
        return right
    if _is_const(right, 0):
        return left
    if isinstance(left, Constant) and isinstance(right, Constant):
        return Constant(left.value + right.value)
    return Sum(left, right)


def mul(left: Expr, right: Expr) -> Expr:
    if _is_const(left, 0) or _is_const(right, 0):
        return ZERO
    if _is_const(left, 1):
        return right
    if _is_const(right, 1):
        return left
    if isinstance(left, Constant) and isinstance(right, Constant):
        return Constant(left.value * right.value)
    return Product(left, right)


def neg(operand: Expr) -> Expr:
    if isinstance(operand, Constant):
        return Constant(-operand.value)
    if isinstance(operand, Negate):
        return operand.operand
    return Negate(operand)


def power(base: Expr, exponent: int) -> Expr:
    if exponent < 0:
        raise OracleError(f"exponents must be nonnegative, got {exponent}")
    if exponent == 0:
        return ONE
    if exponent == 1:
        return base
    if isinstance(base, Constant):
        return Constant(base.value ** exponent)
    return IntPower(base, exponent)


def diff(e: Expr, v: int) -> Expr:
    """
    Partial derivative of ``e`` along variable ``v`` (1-based).

    Only literal zeros and ones are folded away. Shared subtrees are
    differentiated once per call.
    """
    return _diff(e, v, {})


@singledispatch
def _diff(e: Expr, v: int, memo: dict) -> Expr:
    raise OracleError(f"cannot differentiate {type(e).__name__}")


def _cached(e: Expr, v: int, memo: dict) -> Expr:
    key = id(e)
    if key not in memo:
        memo[key] = (e, _diff(e, v, memo))
    return memo[key][1]


@_diff.register
def _(e: Constant, v: int, memo: dict) -> Expr:
    return ZERO


@_diff.register
def _(e: Var, v: int, memo: dict) -> Expr:
    return ONE if e.index == v else ZERO


@_diff.register
def _(e: Sum, v: int, memo: dict) -> Expr:
    return add(_cached(e.left, v, memo), _cached(e.right, v, memo))


@_diff.register
def _(e: Product, v: int, memo: dict) -> Expr:
    return add(
        mul(_cached(e.left, v, memo), e.right),
        mul(e.left, _cached(e.right, v, memo))
    )


@_diff.register
def _(e: Negate, v: int, memo: dict) -> Expr:
    return neg(_cached(e.operand, v, memo))


@_diff.register
def _(e: IntPower, v: int, memo: dict) -> Expr:
    outer = mul(const(e.exponent), power(e.base, e.exponent - 1))
    return mul(outer, _cached(e.base, v, memo))


@_diff.register
def _(e: Sin, v: int, memo: dict) -> Expr:
    return mul(Cos(e.operand), _cached(e.operand, v, memo))


@_diff.register
def _(e: Cos, v: int, memo: dict) -> Expr:
    return neg(mul(Sin(e.operand), _cached(e.operand, v, memo)))


@_diff.register
def _(e: Exp, v: int, memo: dict) -> Expr:
    return mul(e, _cached(e.operand, v, memo))


def diff_multi(e: Expr, alpha: MultisetIndex, labeling: Sequence[int] | None = None) -> Expr:
    """
    ``∂_α e`` by repeated ``diff`` along a labeling of ``alpha``.

    :param labeling: order to differentiate in, the canonical labeling when omitted
    """
    order = alpha.to_labels() if labeling is None else tuple(labeling)
    if sorted(order) != list(alpha.to_labels()):
        raise OracleError(f"{order} is not a labeling of {alpha}")

    for v in order:
        e = diff(e, v)
    return e


def evaluate(e: Expr, point: Sequence, mode: ArithmeticMode) -> Scalar:
    """
    Value of ``e`` at ``point`` (``Var(i)`` reads ``point[i - 1]``).

    :raises OracleModeError: for ``Sin``/``Cos``/``Exp`` in rational mode
    """
    values = tuple(coerce_scalar(coordinate, mode) for coordinate in point)
    return _evaluate(e, values, mode, {})


@singledispatch
def _evaluate(e: Expr, point: tuple, mode: ArithmeticMode, memo: dict) -> Scalar:
    raise OracleError(f"cannot evaluate {type(e).__name__}")


def _value(e: Expr, point: tuple, mode: ArithmeticMode, memo: dict) -> Scalar:
    key = id(e)
    if key not in memo:
        memo[key] = (e, _evaluate(e, point, mode, memo))
    return memo[key][1]


@_evaluate.register
def _(e: Constant, point: tuple, mode: ArithmeticMode, memo: dict) -> Scalar:
    return coerce_scalar(e.value, mode)


@_evaluate.register
def _(e: Var, point: tuple, mode: ArithmeticMode, memo: dict) -> Scalar:
    if not 1 <= e.index <= len(point):
        raise OracleError(f"variable x{e.index} is outside of a {len(point)}-dimensional point")
    return point[e.index - 1]


@_evaluate.register
def _(e: Sum, point: tuple, mode: ArithmeticMode, memo: dict) -> Scalar:
    return _value(e.left, point, mode, memo) + _value(e.right, point, mode, memo)


@_evaluate.register
def _(e: Product, point: tuple, mode: ArithmeticMode, memo: dict) -> Scalar:
    return _value(e.left, point, mode, memo) * _value(e.right, point, mode, memo)


@_evaluate.register
def _(e: Negate, point: tuple, mode: ArithmeticMode, memo: dict) -> Scalar:
    return -_value(e.operand, point, mode, memo)


@_evaluate.register
def _(e: IntPower, point: tuple, mode: ArithmeticMode, memo: dict) -> Scalar:
    return _value(e.base, point, mode, memo) ** e.exponent


def _transcendental(fn, e, point: tuple, mode: ArithmeticMode, memo: dict) -> Scalar:
    if mode is ArithmeticMode.RATIONAL:
        raise OracleModeError(f"{type(e).__name__} has no exact rational value")
    return fn(_value(e.operand, point, mode, memo))


@_evaluate.register
def _(e: Sin, point: tuple, mode: ArithmeticMode, memo: dict) -> Scalar:
    return _transcendental(math.sin, e, point, mode, memo)


@_evaluate.register
def _(e: Cos, point: tuple, mode: ArithmeticMode, memo: dict) -> Scalar:
    return _transcendental(math.cos, e, point, mode, memo)


@_evaluate.register
def _(e: Exp, point: tuple, mode: ArithmeticMode, memo: dict) -> Scalar:
    return _transcendental(math.exp, e, point, mode, memo)


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, (Sum, Product)):
        return (e.left, e.right)
    if isinstance(e, (Negate, Sin, Cos, Exp)):
        return (e.operand,)
    if isinstance(e, IntPower):
        return (e.base,)
    return ()


def _walk(e: Expr):
    seen = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        yield node
        stack.extend(children(node))


def is_polynomial(e: Expr) -> bool:
    """
    ``True`` when the tree has no ``Sin``/``Cos``/``Exp`` node, i.e. it evaluates exactly.
    """
    return not any(isinstance(node, (Sin, Cos, Exp)) for node in _walk(e))


def arity(e: Expr) -> int:
    """
    Largest variable index used by ``e`` (0 for constants).
    """
    return max((node.index for node in _walk(e) if isinstance(node, Var)), default=0)


def substitute(e: Expr, replacements: Sequence[Expr]) -> Expr:
    """
    Syntactic composition: every ``Var(i)`` becomes ``replacements[i - 1]``.
    """
    memo: dict = {}

    def visit(node: Expr) -> Expr:
        key = id(node)
        if key in memo:
            return memo[key][1]

        if isinstance(node, Var):
            if not 1 <= node.index <= len(replacements):
                raise OracleError(f"variable x{node.index} has no replacement")
            result = replacements[node.index - 1]
        elif isinstance(node, Sum):
            result = Sum(visit(node.left), visit(node.right))
        elif isinstance(node, Product):
            result = Product(visit(node.left), visit(node.right))
        elif isinstance(node, Negate):
            result = Negate(visit(node.operand))
        elif isinstance(node, IntPower):
            result = IntPower(visit(node.base), node.exponent)
        elif isinstance(node, (Sin, Cos, Exp)):
            result = type(node)(visit(node.operand))
        else:
            result = node

        memo[key] = (node, result)
        return result

    return visit(e)
