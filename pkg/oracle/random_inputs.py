import random
from fractions import Fraction

from chain_rule.derivative_tensor import DerivativeTensor, MapJet
from chain_rule.scalar import ArithmeticMode
from multiset_core.multiset_index import enumerate_bags_upto
from oracle.expr import Expr, Var, add, const, mul, power


def random_rational(rng: random.Random) -> Fraction:
    """
    ``p/q`` with ``|p| <= 9`` and ``1 <= q <= 9``.
    """
    return Fraction(rng.randint(-9, 9), rng.randint(1, 9))


def random_polynomial(rng: random.Random, arity: int, max_degree: int = 3, max_terms: int = 4) -> Expr:
    """
    Sparse polynomial over ``x1..x_arity`` with random rational coefficients.

    Monomials are drawn from every index of degree ``0..max_degree``; the result
    is never a bare constant so compositions stay interesting.
    """
    monomials = [index for index in enumerate_bags_upto(arity, max_degree) if not index.is_empty()]
    chosen = rng.sample(monomials, min(rng.randint(1, max_terms), len(monomials)))

    polynomial: Expr = const(random_rational(rng))
    for monomial in sorted(chosen, key=lambda index: index.to_labels()):
        coefficient = random_rational(rng)
        if coefficient == 0:
            coefficient = Fraction(1)

        term: Expr = const(coefficient)
        for var, count in enumerate(monomial.mult, start=1):
            if count:
                term = mul(term, power(Var(var), count))
        polynomial = add(polynomial, term)
    return polynomial


def random_point(rng: random.Random, dim: int) -> tuple[Fraction, ...]:
    return tuple(random_rational(rng) for _ in range(dim))


def random_tensor(rng: random.Random, dim: int, order: int) -> DerivativeTensor:
    """
    Rational tensor with independent random entries (not the jet of any particular function).
    """
    return DerivativeTensor(
        dim,
        order,
        ArithmeticMode.RATIONAL,
        {index: random_rational(rng) for index in enumerate_bags_upto(dim, order)}
    )


def random_map_jet(rng: random.Random, in_dim: int, out_dim: int, order: int) -> MapJet:
    components = tuple(random_tensor(rng, in_dim, order) for _ in range(out_dim))
    return MapJet(in_dim, out_dim, order, components, random_point(rng, in_dim))
