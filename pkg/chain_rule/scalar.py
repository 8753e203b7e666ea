from enum import Enum
from fractions import Fraction

Scalar = Fraction | float


class ChainRuleError(ValueError):
    """
    Base error for chain-rule inputs that cannot be combined.
    """


class ArithmeticModeError(ChainRuleError):
    """
    Raised when rational and float data are mixed, or a value does not fit the mode.
    """


class ArithmeticMode(str, Enum):
    """
    Exact rationals (``fractions.Fraction``) or double-precision floats.
    """
    RATIONAL = "rational"
    FLOAT = "float"


def coerce_scalar(value, mode: ArithmeticMode) -> Scalar:
    """
    Converts ``value`` into the scalar type of ``mode``.

    Rational mode accepts ints, ``Fraction`` and ``"p/q"`` strings; floats are
    accepted too and converted exactly. Float mode accepts anything ``float()`` does,
    including ``"p/q"`` strings.
    """
    if isinstance(value, bool):
        raise ArithmeticModeError(f"booleans are not scalars: {value!r}")

    if mode is ArithmeticMode.RATIONAL:
        try:
            return Fraction(value)
        except (TypeError, ValueError, ZeroDivisionError) as e:
            raise ArithmeticModeError(f"cannot read {value!r} as a rational: {e}") from e

    try:
        if isinstance(value, str) and "/" in value:
            return float(Fraction(value))
        return float(value)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise ArithmeticModeError(f"cannot read {value!r} as a float: {e}") from e


def zero(mode: ArithmeticMode) -> Scalar:
    return Fraction(0) if mode is ArithmeticMode.RATIONAL else 0.0


def scalar_to_json(value: Scalar, mode: ArithmeticMode):
    """
    Rationals serialize as ``"p/q"`` (or ``"p"``) strings, floats as JSON numbers.
    """
    if mode is ArithmeticMode.RATIONAL:
        return str(Fraction(value))
    return float(value)


def relative_error(a: Scalar, b: Scalar) -> float:
    """
    ``|a - b| / max(1, |a|, |b|)``.
    """
    return float(abs(a - b)) / max(1.0, abs(float(a)), abs(float(b)))
