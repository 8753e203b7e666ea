import re
from fractions import Fraction

from oracle.expr import (
    Constant,
    Cos,
    Exp,
    Expr,
    IntPower,
    Negate,
    OracleError,
    Product,
    Sin,
    Sum,
    Var,
)

TOKEN_PATTERN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")
VARIABLE_PATTERN = re.compile(r"x([1-9][0-9]*)")
NUMBER_PATTERN = re.compile(r"-?[0-9]+(?:/[1-9][0-9]*)?")

UNARY_HEADS = {"sin": Sin, "cos": Cos, "exp": Exp}


class ExprSyntaxError(OracleError):
    """
    Parse failure, annotated with the character offset it happened at.
    """
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    position = 0
    while position < len(text):
        match = TOKEN_PATTERN.match(text, position)
        if match is None or match.end() == position:
            break
        if match.lastindex is not None:
            tokens.append((match.group(match.lastindex), match.start(match.lastindex)))
        position = match.end()
    return tokens


def parse_expr(text: str) -> Expr:
    """
    Parses the prefix s-expression form, e.g. ``(* (^ x1 2) x2)`` or ``(sin (+ x1 x2))``.

    Heads: ``+`` and ``*`` (two or more operands), ``-`` (negation, or
    subtraction with two operands), ``^`` (positive integer exponent), ``sin``,
    ``cos``, ``exp``. Atoms: ``x1, x2, ...`` and integers or ``p/q`` rationals.

    :raises ExprSyntaxError: with the position of the offending token
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ExprSyntaxError("empty expression", 0)

    expr, cursor = _parse(tokens, 0, text)
    if cursor != len(tokens):
        raise ExprSyntaxError(f"unexpected trailing token `{tokens[cursor][0]}`", tokens[cursor][1])
    return expr


def _parse(tokens: list[tuple[str, int]], cursor: int, text: str) -> tuple[Expr, int]:
    if cursor >= len(tokens):
        raise ExprSyntaxError("unexpected end of input", len(text))

    token, position = tokens[cursor]
    if token == ")":
        raise ExprSyntaxError("unexpected `)`", position)
    if token != "(":
        return _atom(token, position), cursor + 1

    if cursor + 1 >= len(tokens):
        raise ExprSyntaxError("unexpected end of input", len(text))
    head, head_position = tokens[cursor + 1]
    cursor += 2

    operands = []
    operand_positions = []
    while True:
        if cursor >= len(tokens):
            raise ExprSyntaxError(f"missing `)` for `({head}`", position)
        if tokens[cursor][0] == ")":
            cursor += 1
            break
        operand_positions.append(tokens[cursor][1])
        operand, cursor = _parse(tokens, cursor, text)
        operands.append(operand)

    return _apply(head, head_position, operands, operand_positions), cursor


def _apply(head: str, position: int, operands: list[Expr], operand_positions: list[int]) -> Expr:
    if head in ("+", "*"):
        if len(operands) < 2:
            raise ExprSyntaxError(f"`{head}` needs at least two operands", position)
        node = Sum if head == "+" else Product
        result = operands[0]
        for operand in operands[1:]:
            result = node(result, operand)
        return result

    if head == "-":
        if len(operands) == 1:
            return Negate(operands[0])
        if len(operands) == 2:
            return Sum(operands[0], Negate(operands[1]))
        raise ExprSyntaxError("`-` takes one or two operands", position)

    if head == "^":
        if len(operands) != 2:
            raise ExprSyntaxError("`^` takes a base and an exponent", position)
        exponent = operands[1]
        if not isinstance(exponent, Constant) or exponent.value.denominator != 1 or exponent.value < 1:
            raise ExprSyntaxError("exponent must be a positive integer literal", operand_positions[1])
        return IntPower(operands[0], int(exponent.value))

    if head in UNARY_HEADS:
        if len(operands) != 1:
            raise ExprSyntaxError(f"`{head}` takes exactly one operand", position)
        return UNARY_HEADS[head](operands[0])

    raise ExprSyntaxError(f"unknown head `{head}`", position)


def _atom(token: str, position: int) -> Expr:
    variable = VARIABLE_PATTERN.fullmatch(token)
    if variable:
        return Var(int(variable.group(1)))
    if NUMBER_PATTERN.fullmatch(token):
        return Constant(Fraction(token))
    raise ExprSyntaxError(f"unknown atom `{token}`", position)


def to_sexpr(e: Expr) -> str:
    """
    Renders ``e`` back into the form ``parse_expr`` reads.
    """
    if isinstance(e, Constant):
        return str(e.value)
    if isinstance(e, Var):
        return f"x{e.index}"
    if isinstance(e, Sum):
        return f"(+ {to_sexpr(e.left)} {to_sexpr(e.right)})"
    if isinstance(e, Product):
        return f"(* {to_sexpr(e.left)} {to_sexpr(e.right)})"
    if isinstance(e, Negate):
        return f"(- {to_sexpr(e.operand)})"
    if isinstance(e, IntPower):
        return f"(^ {to_sexpr(e.base)} {e.exponent})"
    for head, node in UNARY_HEADS.items():
        if isinstance(e, node):
            return f"({head} {to_sexpr(e.operand)})"
    raise OracleError(f"cannot render {type(e).__name__}")
