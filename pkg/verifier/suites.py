import logging
import random
from dataclasses import dataclass, field
from threading import Event

from chain_rule.chain_rule import compose_derivative, compose_derivative_beta
from chain_rule.faa_di_bruno import faa_di_bruno_1d
from chain_rule.scalar import ArithmeticMode, relative_error, scalar_to_json
from chain_rule.symbolic import collect_by_block_sizes, evaluate_expansion, expand_symbolic
from multiset_core.multiset_index import MultisetIndex, enumerate_bag
from oracle.oracle import verify_composition
from oracle.parser import parse_expr, to_sexpr
from oracle.random_inputs import random_map_jet, random_point, random_polynomial, random_tensor
from params.verify_params import VerifyParams
from partitions.multiset_partitions import extend_partitions, multiset_partitions, multiset_partitions_reference
from partitions.stirling import bell, stirling2

PARTITION_MAX_DIM = 3
TRANSCENDENTAL_MAX_ORDER = 4

# (f, g components, point): f is over len(g) variables, g over len(point)
TRANSCENDENTAL_CASES = (
    ("(sin (+ x1 x2))", ("(* x1 x2)", "(+ x1 x2)"), ("1/2", "1/3")),
    ("(exp (* x1 x2))", ("(cos x1)", "(+ (^ x1 2) x2)"), ("1/3", "-1/4")),
    ("(* x1 (cos x1))", ("(exp (- x1 x2))",), ("1/5", "2/7")),
    ("(+ (sin x1) (* x2 x3))", ("(* x1 x1)", "(sin x1)", "(exp x1)"), ("3/4",)),
    ("(exp x1)", ("(sin (* 2 x1 x2 x3))",), ("1/2", "1/3", "1/4")),
)


@dataclass
class SuiteReport:
    """
    Outcome of one verification suite: how many checks ran, how many failed,
    the first counterexample and (for float comparisons) the worst relative error.

    A suite stopped before finishing never counts as passed.
    """
    name: str
    checked: int = 0
    failures: int = 0
    worst_error: float | None = None
    counterexample: dict | None = None
    interrupted: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and not self.interrupted

    def interrupt(self):
        self.interrupted = True
        self.notes.append("stopped early")

    def record(self, ok: bool, counterexample: dict | None = None, error: float | None = None):
        self.checked += 1
        if error is not None:
            self.worst_error = error if self.worst_error is None else max(self.worst_error, error)
        if not ok:
            self.failures += 1
            if self.counterexample is None:
                self.counterexample = counterexample

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "failures": self.failures,
            "worst_error": self.worst_error,
            "counterexample": self.counterexample,
            "interrupted": self.interrupted,
            "notes": list(self.notes)
        }


def suite_rng(params: VerifyParams, name: str) -> random.Random:
    """
    Per-suite generator, so results do not depend on which suite runs first.
    """
    return random.Random(f"{params.get_seed()}:{name}")


def _random_index(rng: random.Random, dim: int, max_size: int) -> MultisetIndex:
    size = rng.randint(1, max_size)
    return rng.choice(enumerate_bag(dim, size))


def _all_indices(max_dim: int, max_size: int, min_size: int = 0):
    for dim in range(1, max_dim + 1):
        for size in range(min_size, max_size + 1):
            yield from enumerate_bag(dim, size)


def oracle_suite(params: VerifyParams, mode: ArithmeticMode, stop: Event, logger: logging.Logger) -> SuiteReport:
    """
    Random polynomial compositions, chain-rule jet against direct differentiation.
    """
    report = SuiteReport("oracle")
    rng = suite_rng(params, report.name)
    max_in, max_out = params.get_dims()

    for trial in range(params.get_trials()):
        if stop.is_set():
            report.interrupt()
            break

        d = rng.randint(1, max_in)
        c = rng.randint(1, max_out)
        order = rng.randint(1, params.get_max_order())
        f = random_polynomial(rng, c)
        g = [random_polynomial(rng, d) for _ in range(c)]
        point = random_point(rng, d)

        result = verify_composition(f, g, point, order, mode, params.get_float_tolerance())
        mismatch = None
        if not result.all_agree:
            mismatch = {
                "trial": trial,
                "f": to_sexpr(f),
                "g": [to_sexpr(component) for component in g],
                "point": [scalar_to_json(coordinate, ArithmeticMode.RATIONAL) for coordinate in point],
                "order": order,
                "mismatch": result.mismatches()[0].to_json(mode)
            }
        report.record(
            result.all_agree,
            mismatch,
            result.worst_error if mode is ArithmeticMode.FLOAT else None
        )
        logger.debug(f"Trial {trial}: d={d}, c={c}, order {order}: {'ok' if result.all_agree else 'MISMATCH'}")

    return report


def transcendental_suite(params: VerifyParams, mode: ArithmeticMode, stop: Event, logger: logging.Logger) -> SuiteReport:
    """
    Fixed float-mode compositions involving ``sin``, ``cos`` and ``exp``.
    """
    report = SuiteReport("transcendental")
    order = min(params.get_max_order(), TRANSCENDENTAL_MAX_ORDER)

    for f_text, g_texts, point in TRANSCENDENTAL_CASES:
        if stop.is_set():
            report.interrupt()
            break

        result = verify_composition(
            parse_expr(f_text),
            [parse_expr(text) for text in g_texts],
            point,
            order,
            ArithmeticMode.FLOAT,
            params.get_float_tolerance()
        )
        mismatch = None
        if not result.all_agree:
            mismatch = {
                "f": f_text,
                "g": list(g_texts),
                "point": list(point),
                "order": order,
                "mismatch": result.mismatches()[0].to_json(ArithmeticMode.FLOAT)
            }
        report.record(result.all_agree, mismatch, result.worst_error)
        logger.debug(f"{f_text} ∘ ({', '.join(g_texts)}): worst relative error {result.worst_error:.3e}")

    return report


def chain_rule_forms_suite(params: VerifyParams, mode: ArithmeticMode, stop: Event, logger: logging.Logger) -> SuiteReport:
    """
    Component-tuple form, regrouped multiset form and the symbolic expansion on random jets.
    """
    report = SuiteReport("chain_rule_forms")
    rng = suite_rng(params, report.name)
    max_in, max_out = params.get_dims()

    for trial in range(params.get_forms_trials()):
        if stop.is_set():
            report.interrupt()
            break

        d = rng.randint(1, max_in)
        c = rng.randint(1, max_out)
        alpha = _random_index(rng, d, params.get_max_order())
        order = alpha.cardinality()
        f_jet = random_tensor(rng, c, order).with_mode(mode)
        g_jet = random_map_jet(rng, d, c, order).with_mode(mode)

        by_tuples = compose_derivative(alpha, f_jet, g_jet)
        by_bags = compose_derivative_beta(alpha, f_jet, g_jet)
        by_terms = evaluate_expansion(expand_symbolic(alpha, c), f_jet, g_jet)

        if mode is ArithmeticMode.RATIONAL:
            ok = by_tuples == by_bags == by_terms
            error = None
        else:
            error = max(relative_error(by_tuples, by_bags), relative_error(by_tuples, by_terms))
            ok = error <= params.get_float_tolerance()

        report.record(ok, {
            "trial": trial,
            "alpha": alpha.to_json(),
            "f_jet": f_jet.to_json(),
            "g_jet": g_jet.to_json(),
            "component_tuples": scalar_to_json(by_tuples, mode),
            "multiset_indices": scalar_to_json(by_bags, mode),
            "symbolic": scalar_to_json(by_terms, mode)
        } if not ok else None, error)

    return report


def extension_suite(params: VerifyParams, mode: ArithmeticMode, stop: Event, logger: logging.Logger) -> SuiteReport:
    """
    Extending ``Π(α, n)`` and ``Π(α, n + 1)`` by one label reproduces ``Π([a0] ∪ α, n + 1)``.
    """
    report = SuiteReport("extension")
    max_size = params.get_partition_max_cardinality() - 1

    for alpha in _all_indices(PARTITION_MAX_DIM, max_size):
        if stop.is_set():
            report.interrupt()
            break

        tables = [multiset_partitions(alpha, n) for n in range(alpha.cardinality() + 2)]
        for a0 in range(1, alpha.dim + 1):
            for n in range(alpha.cardinality() + 1):
                extended = extend_partitions(a0, tables[n], tables[n + 1])
                direct = multiset_partitions(alpha.union(MultisetIndex.singleton(alpha.dim, a0)), n + 1)
                report.record(extended == direct, {
                    "alpha": alpha.to_json(),
                    "a0": a0,
                    "n": n,
                    "extended": extended.to_json(),
                    "direct": direct.to_json()
                } if extended != direct else None)

    return report


def cardinality_suite(params: VerifyParams, mode: ArithmeticMode, stop: Event, logger: logging.Logger) -> SuiteReport:
    """
    Multiplicities of ``Π(α, k)`` sum to ``S(|α|, k)``, and over all ``k`` to ``Bell(|α|)``.
    """
    report = SuiteReport("cardinality")

    for alpha in _all_indices(PARTITION_MAX_DIM, params.get_partition_max_cardinality(), min_size=1):
        if stop.is_set():
            report.interrupt()
            break

        size = alpha.cardinality()
        totals = [multiset_partitions(alpha, k).cardinality() for k in range(1, size + 1)]
        for k, total in enumerate(totals, start=1):
            report.record(total == stirling2(size, k), {
                "alpha": alpha.to_json(), "k": k, "cardinality": str(total), "stirling2": str(stirling2(size, k))
            })
        report.record(sum(totals) == bell(size), {
            "alpha": alpha.to_json(), "cardinality": str(sum(totals)), "bell": str(bell(size))
        })

    return report


def enumeration_suite(params: VerifyParams, mode: ArithmeticMode, stop: Event, logger: logging.Logger) -> SuiteReport:
    """
    Set-partition projection and canonical block descent give identical enumerations.
    """
    report = SuiteReport("enumeration")

    for alpha in _all_indices(PARTITION_MAX_DIM, params.get_partition_max_cardinality(), min_size=1):
        if stop.is_set():
            report.interrupt()
            break

        for k in range(1, alpha.cardinality() + 1):
            reference = multiset_partitions_reference(alpha, k)
            direct = multiset_partitions(alpha, k)
            report.record(reference == direct, {
                "alpha": alpha.to_json(),
                "k": k,
                "reference": reference.to_json(),
                "direct": direct.to_json()
            } if reference != direct else None)

    return report


def faa_di_bruno_suite(params: VerifyParams, mode: ArithmeticMode, stop: Event, logger: logging.Logger) -> SuiteReport:
    """
    One variable, one component: collected multiset terms equal the classical coefficient table.
    """
    report = SuiteReport("faa_di_bruno")

    for n in range(1, params.get_partition_max_cardinality() + 1):
        if stop.is_set():
            report.interrupt()
            break

        collected = collect_by_block_sizes(expand_symbolic(MultisetIndex((n,)), 1))
        classical = {(term.k, term.m): term.coefficient for term in faa_di_bruno_1d(n)}
        report.record(collected == classical, {
            "n": n,
            "collected": {str(key): value for key, value in sorted(collected.items())},
            "classical": {str(key): value for key, value in sorted(classical.items())}
        } if collected != classical else None)

    return report


SUITES = (
    ("oracle", oracle_suite),
    ("transcendental", transcendental_suite),
    ("chain_rule_forms", chain_rule_forms_suite),
    ("extension", extension_suite),
    ("cardinality", cardinality_suite),
    ("enumeration", enumeration_suite),
    ("faa_di_bruno", faa_di_bruno_suite),
)
