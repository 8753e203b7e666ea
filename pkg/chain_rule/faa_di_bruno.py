from dataclasses import dataclass
from math import factorial, prod
from typing import Iterator, Sequence

from chain_rule.scalar import Scalar


@dataclass(frozen=True)
class FaaDiBrunoTerm:
    """
    One row of the one-variable formula: ``coefficient * f^(k) * prod_i (g^(i))^(m_i)``.
    """
    k: int
    m: tuple[int, ...]
    coefficient: int

    def to_json(self) -> dict:
        return {"k": self.k, "m": list(self.m), "coefficient": str(self.coefficient)}


def _weighted_solutions(n: int, weight: int, remaining: int) -> Iterator[tuple[int, ...]]:
    """
    Vectors ``(m_weight, ..., m_n)`` with ``sum_i i * m_i == remaining``, larger
    leading entries first.
    """
    if weight > n:
        if remaining == 0:
            yield ()
        return
    for count in range(remaining // weight, -1, -1):
        for tail in _weighted_solutions(n, weight + 1, remaining - weight * count):
            yield (count,) + tail


def faa_di_bruno_1d(n: int) -> list[FaaDiBrunoTerm]:
    """
    Coefficient table of ``d^n/dx^n f(g(x))``.

    Rows solve ``m_1 + ... + m_n = k`` and ``m_1 + 2 m_2 + ... + n m_n = n``,
    ordered by ``k`` and then by descending ``m``; the coefficient is
    ``n! / (m_1! ... m_n! * 1!^m_1 ... n!^m_n)``.
    """
    if n < 1:
        raise ValueError(f"derivative order must be positive, got {n}")

    terms = []
    for m in _weighted_solutions(n, 1, n):
        denominator = prod(factorial(count) * factorial(i) ** count for i, count in enumerate(m, start=1))
        terms.append(FaaDiBrunoTerm(k=sum(m), m=m, coefficient=factorial(n) // denominator))

    terms.sort(key=lambda term: (term.k, tuple(-count for count in term.m)))
    return terms


def contract_1d(
        terms: Sequence[FaaDiBrunoTerm],
        f_derivatives: Sequence[Scalar],
        g_derivatives: Sequence[Scalar]
) -> Scalar:
    """
    Evaluates a coefficient table.

    :param terms: output of ``faa_di_bruno_1d(n)``
    :param f_derivatives: ``f(g(x)), f'(g(x)), ..., f^(n)(g(x))``
    :param g_derivatives: ``g(x), g'(x), ..., g^(n)(x)``
    """
    total = 0
    for term in terms:
        g_part = prod(g_derivatives[i] ** count for i, count in enumerate(term.m, start=1) if count)
        total += term.coefficient * f_derivatives[term.k] * g_part
    return total
