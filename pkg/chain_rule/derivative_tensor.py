from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from chain_rule.scalar import (
    ArithmeticMode,
    ArithmeticModeError,
    ChainRuleError,
    Scalar,
    coerce_scalar,
    scalar_to_json,
)
from multiset_core.multiset_index import MultisetIndex, MultisetIndexError, enumerate_bags_upto


class TensorShapeError(ChainRuleError):
    """
    Raised when a tensor or jet is missing entries or has inconsistent dimensions.
    """


@dataclass(frozen=True, eq=True)
class DerivativeTensor:
    """
    All partial derivatives of one scalar function at a point, up to ``order``.

    Keys are ``MultisetIndex`` values, so a mixed partial has exactly one entry
    and symmetry comes for free. The tensor is dense: every index of
    cardinality ``0..order`` must be present. The empty index holds the value.
    """
    dim: int
    order: int
    mode: ArithmeticMode
    entries: Mapping[MultisetIndex, Scalar] = field(hash=False)

    def __post_init__(self):
        if self.dim < 1:
            raise TensorShapeError(f"tensor dimension must be positive, got {self.dim}")
        if self.order < 0:
            raise TensorShapeError(f"tensor order must be nonnegative, got {self.order}")

        expected = enumerate_bags_upto(self.dim, self.order)
        for key in self.entries:
            if key.dim != self.dim:
                raise TensorShapeError(f"index {key} uses {key.dim} variables, tensor has {self.dim}")
            if key.cardinality() > self.order:
                raise TensorShapeError(f"index {key} exceeds tensor order {self.order}")

        missing = [str(index) for index in expected if index not in self.entries]
        if missing:
            raise TensorShapeError(f"tensor is missing entries for {', '.join(missing)}")

        object.__setattr__(
            self,
            "entries",
            {index: coerce_scalar(self.entries[index], self.mode) for index in expected}
        )

    def __getitem__(self, index: MultisetIndex) -> Scalar:
        return self.entries[index]

    def value(self) -> Scalar:
        """
        The order-0 entry, i.e. the function value at the base point.
        """
        return self.entries[MultisetIndex.empty(self.dim)]

    @classmethod
    def from_function(
            cls,
            dim: int,
            order: int,
            mode: ArithmeticMode,
            fn: Callable[[MultisetIndex], object]
    ) -> "DerivativeTensor":
        """
        Fills a dense tensor by calling ``fn`` once per index.
        """
        return cls(dim, order, mode, {index: fn(index) for index in enumerate_bags_upto(dim, order)})

    def with_mode(self, mode: ArithmeticMode) -> "DerivativeTensor":
        if mode is self.mode:
            return self
        return DerivativeTensor(self.dim, self.order, mode, dict(self.entries))

    def truncate(self, order: int) -> "DerivativeTensor":
        """
        Drops every entry above ``order``.
        """
        if order > self.order:
            raise TensorShapeError(f"cannot raise tensor order from {self.order} to {order}")
        return DerivativeTensor.from_function(self.dim, order, self.mode, self.entries.__getitem__)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "order": self.order,
            "mode": self.mode.value,
            "entries": [
                {"index": index.to_json(), "value": scalar_to_json(value, self.mode)}
                for index, value in self.entries.items()
            ]
        }

    @classmethod
    def from_json(cls, payload: dict) -> "DerivativeTensor":
        try:
            mode = ArithmeticMode(payload.get("mode", ArithmeticMode.RATIONAL.value))
            entries = {}
            for entry in payload["entries"]:
                index = MultisetIndex.from_json(entry["index"])
                if index in entries:
                    raise TensorShapeError(f"duplicate entry for index {index}")
                entries[index] = entry["value"]
            return cls(int(payload["dim"]), int(payload["order"]), mode, entries)
        except (KeyError, TypeError, AttributeError, MultisetIndexError) as e:
            raise TensorShapeError(f"malformed derivative tensor: {e}") from e
        except ValueError as e:
            if isinstance(e, ChainRuleError):
                raise
            raise ArithmeticModeError(f"malformed derivative tensor: {e}") from e


@dataclass(frozen=True, eq=True)
class MapJet:
    """
    Value and derivative tensors of every component of ``g: R^d -> R^c`` at ``base_point``.
    """
    in_dim: int
    out_dim: int
    order: int
    components: tuple[DerivativeTensor, ...]
    base_point: tuple[Scalar, ...]

    def __post_init__(self):
        if not isinstance(self.components, tuple):
            object.__setattr__(self, "components", tuple(self.components))

        if self.out_dim < 1 or len(self.components) != self.out_dim:
            raise TensorShapeError(f"jet declares {self.out_dim} components, got {len(self.components)}")
        if len(self.base_point) != self.in_dim:
            raise TensorShapeError(f"base point has {len(self.base_point)} coordinates, expected {self.in_dim}")

        for number, component in enumerate(self.components, start=1):
            if component.dim != self.in_dim:
                raise TensorShapeError(f"component {number} has {component.dim} variables, expected {self.in_dim}")
            if component.order != self.order:
                raise TensorShapeError(f"component {number} has order {component.order}, expected {self.order}")
            if component.mode is not self.mode:
                raise ArithmeticModeError(f"component {number} is {component.mode.value}, "
                                          f"component 1 is {self.mode.value}")

        object.__setattr__(
            self,
            "base_point",
            tuple(coerce_scalar(coordinate, self.mode) for coordinate in self.base_point)
        )

    @property
    def mode(self) -> ArithmeticMode:
        return self.components[0].mode

    def component(self, b: int) -> DerivativeTensor:
        """
        Component ``g^b`` (1-based).
        """
        return self.components[b - 1]

    def value(self) -> tuple[Scalar, ...]:
        """
        ``g(base_point)``, read off the order-0 entries.
        """
        return tuple(component.value() for component in self.components)

    @classmethod
    def identity(cls, dim: int, order: int, mode: ArithmeticMode, base_point: Sequence) -> "MapJet":
        """
        Jet of ``g(x) = x``: Kronecker delta at order 1, zero above.
        """
        def component(b: int) -> DerivativeTensor:
            def entry(index: MultisetIndex):
                size = index.cardinality()
                if size == 0:
                    return base_point[b - 1]
                if size == 1:
                    return 1 if index.mult[b - 1] == 1 else 0
                return 0

            return DerivativeTensor.from_function(dim, order, mode, entry)

        return cls(dim, dim, order, tuple(component(b) for b in range(1, dim + 1)), tuple(base_point))

    def with_mode(self, mode: ArithmeticMode) -> "MapJet":
        if mode is self.mode:
            return self
        return MapJet(
            self.in_dim,
            self.out_dim,
            self.order,
            tuple(component.with_mode(mode) for component in self.components),
            self.base_point
        )

    def to_json(self) -> dict:
        return {
            "in_dim": self.in_dim,
            "out_dim": self.out_dim,
            "order": self.order,
            "base_point": [scalar_to_json(coordinate, self.mode) for coordinate in self.base_point],
            "components": [component.to_json() for component in self.components]
        }

    @classmethod
    def from_json(cls, payload: dict) -> "MapJet":
        try:
            components = tuple(DerivativeTensor.from_json(component) for component in payload["components"])
            if not components:
                raise TensorShapeError("jet needs at least one component")
            return cls(
                int(payload["in_dim"]),
                int(payload["out_dim"]),
                int(payload["order"]),
                components,
                tuple(payload["base_point"])
            )
        except (KeyError, TypeError) as e:
            raise TensorShapeError(f"malformed map jet: {e}") from e
