import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from chain_rule.chain_rule import (
    JetDimensionError,
    JetOrderError,
    compose_derivative,
    compose_derivative_beta,
    compose_jet,
    g_beta_derivative,
)
from chain_rule.derivative_tensor import DerivativeTensor, MapJet, TensorShapeError
from chain_rule.faa_di_bruno import contract_1d, faa_di_bruno_1d
from chain_rule.scalar import ArithmeticMode, ArithmeticModeError, coerce_scalar, relative_error, scalar_to_json
from multiset_core.multiset_index import MultisetIndex, enumerate_bags_upto
from strategies import composition_inputs, indices, small_fractions, tensors

FIXTURES = Path(__file__).parent.parent / "fixtures"
RATIONAL = ArithmeticMode.RATIONAL


def load_tensor(name: str) -> DerivativeTensor:
    return DerivativeTensor.from_json(json.loads((FIXTURES / name).read_text(encoding="utf-8")))


def load_map(name: str) -> MapJet:
    return MapJet.from_json(json.loads((FIXTURES / name).read_text(encoding="utf-8")))


def one_dimensional(values, mode=RATIONAL) -> DerivativeTensor:
    return DerivativeTensor.from_function(1, len(values) - 1, mode, lambda index: values[index.cardinality()])


@pytest.fixture
def plane_jets():
    """
    ``c = 3`` components over ``d = 2`` variables, order 2, with easy-to-track entries.
    """
    f_jet = DerivativeTensor.from_function(3, 2, RATIONAL, lambda index: 1 + sum(
        (position + 2) * count for position, count in enumerate(index.mult)))
    components = tuple(
        DerivativeTensor.from_function(2, 2, RATIONAL, lambda index, b=b: Fraction(b, 1 + index.cardinality()) + index.mult[0])
        for b in range(1, 4)
    )
    return f_jet, MapJet(2, 3, 2, components, (Fraction(1), Fraction(2)))


class TestScalars:
    def test_coercion(self):
        assert coerce_scalar("3/4", RATIONAL) == Fraction(3, 4)
        assert coerce_scalar(0.5, RATIONAL) == Fraction(1, 2)
        assert coerce_scalar("1/4", ArithmeticMode.FLOAT) == 0.25

        with pytest.raises(ArithmeticModeError):
            coerce_scalar(True, RATIONAL)
        with pytest.raises(ArithmeticModeError):
            coerce_scalar("one", ArithmeticMode.FLOAT)

    def test_serialization_and_error(self):
        assert scalar_to_json(Fraction(-2, 3), RATIONAL) == "-2/3"
        assert scalar_to_json(Fraction(4), RATIONAL) == "4"
        assert scalar_to_json(0.5, ArithmeticMode.FLOAT) == 0.5
        assert relative_error(100.0, 101.0) == pytest.approx(1 / 101)
        assert relative_error(0.0, 0.5) == 0.5


class TestTensors:
    def test_dense_tensor_is_required(self):
        with pytest.raises(TensorShapeError):
            DerivativeTensor(1, 1, RATIONAL, {MultisetIndex((0,)): 1})
        with pytest.raises(TensorShapeError):
            DerivativeTensor(1, 0, RATIONAL, {MultisetIndex((0,)): 1, MultisetIndex((1,)): 1})

    def test_entries_are_coerced_and_ordered(self):
        tensor = DerivativeTensor(2, 1, RATIONAL, {
            MultisetIndex((0, 1)): "1/3", MultisetIndex((1, 0)): 2, MultisetIndex((0, 0)): 0.5
        })
        assert list(tensor.entries) == enumerate_bags_upto(2, 1)
        assert tensor.value() == Fraction(1, 2)
        assert tensor[MultisetIndex((0, 1))] == Fraction(1, 3)

    def test_mode_switch_and_truncation(self):
        tensor = one_dimensional([1, 2, 6])
        assert tensor.with_mode(ArithmeticMode.FLOAT)[MultisetIndex((2,))] == 6.0
        assert tensor.truncate(1) == one_dimensional([1, 2])
        with pytest.raises(TensorShapeError):
            tensor.truncate(3)

    def test_map_jet_consistency(self):
        component = one_dimensional([1, 2])
        with pytest.raises(TensorShapeError):
            MapJet(1, 2, 1, (component,), (0,))
        with pytest.raises(TensorShapeError):
            MapJet(1, 1, 2, (component,), (0,))
        with pytest.raises(ArithmeticModeError):
            MapJet(1, 2, 1, (component, component.with_mode(ArithmeticMode.FLOAT)), (0,))

    def test_identity_jet(self):
        identity = MapJet.identity(2, 2, RATIONAL, (Fraction(1, 2), 3))
        assert identity.value() == (Fraction(1, 2), 3)
        assert identity.component(1)[MultisetIndex((1, 0))] == 1
        assert identity.component(1)[MultisetIndex((0, 1))] == 0
        assert identity.component(2)[MultisetIndex((1, 1))] == 0

    def test_json_forms(self):
        g_jet = load_map("g_cube.json")
        assert MapJet.from_json(g_jet.to_json()) == g_jet
        assert g_jet.component(1).to_json()["entries"][2] == {"index": [2], "value": "6"}

        with pytest.raises(TensorShapeError):
            DerivativeTensor.from_json({"dim": 1, "order": 1, "entries": [{"index": [0], "value": "1"}]})
        with pytest.raises(ArithmeticModeError):
            DerivativeTensor.from_json({"dim": 1, "order": 0, "mode": "complex", "entries": []})


class TestComposeDerivative:
    def test_jacobian_rule(self, plane_jets):
        f_jet, g_jet = plane_jets
        for var in (1, 2):
            alpha = MultisetIndex.singleton(2, var)
            expected = sum(
                f_jet[MultisetIndex.singleton(3, b)] * g_jet.component(b)[alpha] for b in (1, 2, 3)
            )
            assert compose_derivative(alpha, f_jet, g_jet) == expected
            assert compose_derivative_beta(alpha, f_jet, g_jet) == expected

    def test_second_order_by_hand(self, plane_jets):
        f_jet, g_jet = plane_jets
        alpha = MultisetIndex((1, 1))
        i, j = MultisetIndex((1, 0)), MultisetIndex((0, 1))

        expected = sum(
            f_jet[MultisetIndex.singleton(3, k).union(MultisetIndex.singleton(3, l))]
            * g_jet.component(k)[i] * g_jet.component(l)[j]
            for k in (1, 2, 3) for l in (1, 2, 3)
        ) + sum(f_jet[MultisetIndex.singleton(3, k)] * g_jet.component(k)[alpha] for k in (1, 2, 3))
        assert compose_derivative(alpha, f_jet, g_jet) == expected

    def test_square_of_cube(self):
        f_jet = load_tensor("f_square.json")
        g_jet = load_map("g_cube.json")
        assert compose_derivative(MultisetIndex((2,)), f_jet, g_jet) == 30
        assert compose_derivative(MultisetIndex((1,)), f_jet, g_jet) == 6

    def test_empty_index_is_value_of_f(self, plane_jets):
        f_jet, g_jet = plane_jets
        assert compose_derivative(MultisetIndex.empty(2), f_jet, g_jet) == f_jet.value()

    @given(st.data())
    @settings(max_examples=50, deadline=None)
    def test_identity_map_echoes_f(self, data):
        dim = data.draw(st.integers(1, 3))
        f_jet = data.draw(tensors(dim, 3))
        identity = MapJet.identity(dim, 3, RATIONAL, (0,) * dim)

        alpha = data.draw(indices(dim=dim, max_size=3))
        assert compose_derivative(alpha, f_jet, identity) == f_jet[alpha]
        assert compose_derivative_beta(alpha, f_jet, identity) == f_jet[alpha]

    @given(composition_inputs())
    @settings(max_examples=150, deadline=None)
    def test_component_tuples_and_bags_agree_exactly(self, inputs):
        alpha, f_jet, g_jet = inputs
        assert compose_derivative(alpha, f_jet, g_jet) == compose_derivative_beta(alpha, f_jet, g_jet)

    @given(st.data())
    @settings(max_examples=80, deadline=None)
    def test_linear_in_f(self, data):
        alpha, f_jet, g_jet = data.draw(composition_inputs())
        other = data.draw(tensors(f_jet.dim, f_jet.order))
        scale = data.draw(small_fractions())
        combined = DerivativeTensor.from_function(
            f_jet.dim, f_jet.order, RATIONAL, lambda index: f_jet[index] + scale * other[index])

        expected = compose_derivative(alpha, f_jet, g_jet) + scale * compose_derivative(alpha, other, g_jet)
        assert compose_derivative(alpha, combined, g_jet) == expected
        assert compose_derivative_beta(alpha, combined, g_jet) == expected

    @given(composition_inputs(max_size=3))
    @settings(max_examples=40, deadline=None)
    def test_float_mode_tracks_rational_mode(self, inputs):
        alpha, f_jet, g_jet = inputs
        exact = compose_derivative(alpha, f_jet, g_jet)
        approximate = compose_derivative(alpha, f_jet.with_mode(ArithmeticMode.FLOAT),
                                         g_jet.with_mode(ArithmeticMode.FLOAT))
        assert isinstance(approximate, float)
        assert relative_error(exact, approximate) <= 1e-9

    def test_dimension_and_order_checks(self, plane_jets):
        f_jet, g_jet = plane_jets
        with pytest.raises(JetDimensionError):
            compose_derivative(MultisetIndex((1, 0, 0)), f_jet, g_jet)
        with pytest.raises(JetDimensionError):
            compose_derivative(MultisetIndex((1, 0)), one_dimensional([1, 1, 1]), g_jet)
        with pytest.raises(JetOrderError):
            compose_derivative(MultisetIndex((2, 1)), f_jet, g_jet)
        with pytest.raises(ArithmeticModeError):
            compose_derivative(MultisetIndex((1, 0)), f_jet.with_mode(ArithmeticMode.FLOAT), g_jet)


class TestGBeta:
    def test_single_block(self, plane_jets):
        _, g_jet = plane_jets
        block = MultisetIndex((1, 1))
        assert g_beta_derivative((block,), MultisetIndex((0, 1, 0)), g_jet) == g_jet.component(2)[block]

    def test_two_labelings(self, plane_jets):
        _, g_jet = plane_jets
        i, j = MultisetIndex((1, 0)), MultisetIndex((0, 1))
        g1, g2 = g_jet.component(1), g_jet.component(2)

        assert g_beta_derivative((i, j), MultisetIndex((1, 1, 0)), g_jet) == g1[i] * g2[j] + g2[i] * g1[j]
        assert g_beta_derivative((i, j), MultisetIndex((2, 0, 0)), g_jet) == g1[i] * g1[j]

    def test_block_count_must_match(self, plane_jets):
        _, g_jet = plane_jets
        with pytest.raises(ValueError):
            g_beta_derivative((MultisetIndex((1, 0)),), MultisetIndex((2, 0, 0)), g_jet)


class TestComposeJet:
    def test_gradient(self, plane_jets):
        f_jet, g_jet = plane_jets
        composed = compose_jet(f_jet, g_jet, 1)

        assert composed.order == 1 and composed.dim == 2
        for var in (1, 2):
            alpha = MultisetIndex.singleton(2, var)
            assert composed[alpha] == sum(
                f_jet[MultisetIndex.singleton(3, b)] * g_jet.component(b)[alpha] for b in (1, 2, 3))

    def test_constant_f(self, plane_jets):
        _, g_jet = plane_jets
        constant = DerivativeTensor.from_function(3, 2, RATIONAL, lambda index: 7 if index.is_empty() else 0)
        composed = compose_jet(constant, g_jet, 2)

        assert composed.value() == 7
        assert all(value == 0 for index, value in composed.entries.items() if not index.is_empty())

    def test_fourth_power_of_quadratic(self):
        f_jet = load_tensor("f_fourth_power.json")
        g_jet = load_map("g_quadratic.json")
        composed = compose_jet(f_jet, g_jet, 4)

        assert [composed[MultisetIndex((n,))] for n in range(5)] == [16, 96, 496, 2160, 7704]

        f_derivatives = [f_jet[MultisetIndex((n,))] for n in range(5)]
        g_derivatives = [g_jet.component(1)[MultisetIndex((n,))] for n in range(5)]
        for n in range(1, 5):
            assert composed[MultisetIndex((n,))] == contract_1d(faa_di_bruno_1d(n), f_derivatives, g_derivatives)

    def test_identity_fixture(self):
        f_jet = load_tensor("f_plane.json")
        composed = compose_jet(f_jet, load_map("g_identity.json"), 2)
        assert composed == f_jet

    def test_order_checks(self, plane_jets):
        f_jet, g_jet = plane_jets
        with pytest.raises(JetOrderError):
            compose_jet(f_jet, g_jet, 0)
        with pytest.raises(JetOrderError):
            compose_jet(f_jet, g_jet, 3)
