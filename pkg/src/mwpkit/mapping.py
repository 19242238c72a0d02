"""Number mapping: quantities become placeholders n1..nk, and equation
literals are resolved against the mapping table or the constant vocabulary.
"""

from __future__ import annotations

from dataclasses import dataclass

from .equation import Constant, EquationTree, Literal, Op, Placeholder
from .numeracy import ExactValue, NumberToken, ONE, PI, render


class TooManyQuantities(ValueError):
    def __init__(self, count: int, k: int):
        super().__init__(f"{count} quantities exceed the k={k} placeholder budget")
        self.count = count
        self.k = k


class ExternalConstant(ValueError):
    """Equation literal matching neither a text quantity nor an allowed constant."""

    def __init__(self, value: ExactValue):
        super().__init__(f"external constant {render(value)}")
        self.value = value


DEFAULT_K = 15
DEFAULT_CONSTANTS = (ONE, PI)


@dataclass(frozen=True)
class Vocab:
    """Target vocabulary: five operators, k placeholders, allowed constants."""

    v_op: tuple[str, ...] = ("+", "-", "*", "/", "^")
    v_num: tuple[str, ...] = tuple(f"n{i}" for i in range(1, DEFAULT_K + 1))
    v_cons: tuple[ExactValue, ...] = DEFAULT_CONSTANTS


def make_vocab(k: int = DEFAULT_K,
               constants: tuple[ExactValue, ...] = DEFAULT_CONSTANTS) -> Vocab:
    return Vocab(v_num=tuple(f"n{i}" for i in range(1, k + 1)),
                 v_cons=tuple(constants))


@dataclass(frozen=True)
class MappedProblem:
    """Token sequence with quantities replaced by occurrence-ordered
    placeholders, plus the (placeholder, quantity) table."""

    tokens: tuple[str, ...]
    table: tuple[tuple[str, NumberToken], ...]
    k: int = DEFAULT_K

    def placeholder_for(self, value: ExactValue) -> str | None:
        """Earliest placeholder whose quantity equals the value."""
        for name, token in self.table:
            if token.value == value:
                return name
        return None


def map_numbers(tokens: list[str], quantities: list[NumberToken],
                k: int = DEFAULT_K) -> MappedProblem:
    """Substitute placeholders for quantities, in text-occurrence order.

    Repeated equal values each get their own placeholder; the caller passes
    quantities exactly as produced by ``recognize_numbers`` on ``tokens``.
    """
    if len(quantities) > k:
        raise TooManyQuantities(len(quantities), k)
    out = list(tokens)
    table = []
    for i, qt in enumerate(quantities, start=1):
        name = f"n{i}"
        out[qt.position] = name
        table.append((name, qt))
    return MappedProblem(tuple(out), tuple(table), k)


def resolve_equation_numbers(tree: EquationTree, mapped: MappedProblem,
                             vocab: Vocab) -> EquationTree:
    """Replace literal leaves by placeholders (first value match) or
    constant leaves; any leftover literal raises ExternalConstant."""

    def walk(node: EquationTree) -> EquationTree:
        if isinstance(node, Op):
            return Op(node.op, walk(node.left), walk(node.right))
        if isinstance(node, Literal):
            name = mapped.placeholder_for(node.value)
            if name is not None:
                return Placeholder(name)
            if node.value in vocab.v_cons:
                return Constant(node.value)
            raise ExternalConstant(node.value)
        return node

    return walk(tree)


def find_external_constants(tree: EquationTree,
                            quantity_values: list[ExactValue],
                            constants: tuple[ExactValue, ...]) -> list[ExactValue]:
    """All literal leaves matching neither a quantity nor an allowed
    constant (collected, not raised; duplicates reported once)."""
    seen: list[ExactValue] = []

    def walk(node: EquationTree) -> None:
        if isinstance(node, Op):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, Literal):
            v = node.value
            if v not in quantity_values and v not in constants and v not in seen:
                seen.append(v)

    walk(tree)
    return seen
