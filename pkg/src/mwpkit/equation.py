"""Solution-equation trees: parsing, exact evaluation and structure metrics.

Grammar: operators + - * / ^ over numbers, placeholders n1..nk and
parentheses.  Precedence ^ > {* /} > {+ -}; ^ is right-associative, the
rest left-associative; unary minus is rewritten as (0 - x).  Bare a/b in an
equation is division; fractions are written parenthesized "(3/5)" or as
mixed numbers "1(1/2)", matching the source corpora.

Evaluation is exact (arbitrary-precision rational) while pi is absent; as
soon as a pi-carrying value enters an operation the computation drops to
binary64 and the result is a float, which callers treat as approximate.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .numeracy import (EQUATION_NUMBER_RE, TEXT_NUMBER_RE, ExactValue, ZERO,
                       _value_from_match, render)

OPERATORS = ("+", "-", "*", "/", "^")

_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "u-": 3, "^": 4}
_RIGHT_ASSOC = {"^", "u-"}

# Aliases normalized before tokenization (unicode operators, CJK-width
# punctuation, brackets used as parentheses in some dumps).
_NORMALIZE = str.maketrans({
    "×": "*", "÷": "/", "−": "-", "–": "-",
    "＋": "+", "－": "-", "＊": "*", "／": "/",
    "（": "(", "）": ")", "％": "%", "＝": "=",
    "[": "(", "]": ")", "{": "(", "}": ")",
})

_PLACEHOLDER_RE = re.compile(r"n[1-9]\d*")
_ASSIGNMENT_HEAD_RE = re.compile(r"^\s*[A-Za-z][A-Za-z0-9_]*\s*=\s*")


class EquationError(Exception):
    pass


class UnknownCharacter(EquationError):
    def __init__(self, position: int, char: str):
        super().__init__(f"unknown character {char!r} at {position}")
        self.position = position
        self.char = char


class EquationSyntaxError(EquationError):
    def __init__(self, position: int, expected: str):
        super().__init__(f"at token {position}: expected {expected}")
        self.position = position
        self.expected = expected


class UnbalancedParentheses(EquationError):
    pass


class PrefixUnderflow(EquationError):
    pass


class DivisionByZero(EquationError):
    pass


class ZeroToNegativePower(EquationError):
    pass


class AmbiguousLeaf(EquationError):
    pass


class UnboundPlaceholder(EquationError):
    pass


@dataclass(frozen=True)
class Placeholder:
    name: str


@dataclass(frozen=True)
class Constant:
    value: ExactValue


@dataclass(frozen=True)
class Literal:
    value: ExactValue


@dataclass(frozen=True)
class Op:
    op: str
    left: "EquationTree"
    right: "EquationTree"


Leaf = Placeholder | Constant | Literal
EquationTree = Op | Placeholder | Constant | Literal

Token = str | ExactValue  # operators/parens/placeholders are strings


def strip_assignment_head(equation: str) -> str:
    """Drop a leading "x=" style head if present."""
    return _ASSIGNMENT_HEAD_RE.sub("", equation, count=1)


def tokenize_equation(s: str) -> list[Token]:
    """Tokenize an equation body (assignment head already stripped)."""
    s = s.translate(_NORMALIZE)
    tokens: list[Token] = []
    i, n = 0, len(s)
    while i < n:
        ch = s[i]
        if ch.isspace():
            i += 1
            continue
        m = EQUATION_NUMBER_RE.match(s, i)
        if m is not None:
            tokens.append(_value_from_match(m))
            i = m.end()
            continue
        m = _PLACEHOLDER_RE.match(s, i)
        if m is not None:
            tokens.append(m.group())
            i = m.end()
            continue
        if ch in "+-*/^()":
            tokens.append(ch)
            i += 1
            continue
        raise UnknownCharacter(i, ch)
    return tokens


def _apply(op: str, output: list[EquationTree]) -> None:
    if op == "u-":
        operand = output.pop()
        output.append(Op("-", Literal(ZERO), operand))
        return
    right = output.pop()
    left = output.pop()
    output.append(Op(op, left, right))


def parse(tokens: list[Token]) -> EquationTree:
    """Shunting-yard parse of an infix token sequence."""
    output: list[EquationTree] = []
    stack: list[tuple[str, int]] = []
    expect_operand = True
    for pos, tok in enumerate(tokens):
        if isinstance(tok, ExactValue):
            if not expect_operand:
                raise EquationSyntaxError(pos, "an operator or ')'")
            output.append(Literal(tok))
            expect_operand = False
        elif tok == "(":
            if not expect_operand:
                raise EquationSyntaxError(pos, "an operator or ')'")
            stack.append(("(", pos))
        elif tok == ")":
            if expect_operand:
                raise EquationSyntaxError(pos, "an operand")
            while stack and stack[-1][0] != "(":
                _apply(stack.pop()[0], output)
            if not stack:
                raise UnbalancedParentheses(f"')' at token {pos} has no match")
            stack.pop()
        elif tok in OPERATORS:
            if expect_operand:
                if tok != "-":
                    raise EquationSyntaxError(pos, "an operand")
                stack.append(("u-", pos))  # prefix op: push without popping
                continue
            prec = _PRECEDENCE[tok]
            while stack and stack[-1][0] != "(":
                top = stack[-1][0]
                if _PRECEDENCE[top] > prec or (
                        _PRECEDENCE[top] == prec and tok not in _RIGHT_ASSOC):
                    _apply(stack.pop()[0], output)
                else:
                    break
            stack.append((tok, pos))
            expect_operand = True
        elif isinstance(tok, str) and _PLACEHOLDER_RE.fullmatch(tok):
            if not expect_operand:
                raise EquationSyntaxError(pos, "an operator or ')'")
            output.append(Placeholder(tok))
            expect_operand = False
        else:
            raise EquationSyntaxError(pos, f"a valid token, not {tok!r}")
    if expect_operand:
        raise EquationSyntaxError(len(tokens), "an operand")
    while stack:
        op, pos = stack.pop()
        if op == "(":
            raise UnbalancedParentheses(f"'(' at token {pos} never closed")
        _apply(op, output)
    assert len(output) == 1
    return output[0]


def parse_equation(s: str) -> EquationTree:
    """Convenience: strip the assignment head, tokenize and parse."""
    return parse(tokenize_equation(strip_assignment_head(s)))


def _leaf_token(leaf: Leaf, parenthesize_fractions: bool) -> str:
    if isinstance(leaf, Placeholder):
        return leaf.name
    value = leaf.value
    text = render(value)
    if parenthesize_fractions and value.denominator != 1 and not value.pi_factor:
        return f"({text})"
    return text


def serialize(tree: EquationTree, order: str = "infix") -> list[str]:
    """Token spellings, "infix" (fully parenthesized) or "prefix".

    Joining infix tokens with spaces yields a string that re-tokenizes and
    re-parses to an equal tree (fraction-valued leaves are emitted in their
    parenthesized "(p/q)" surface so they stay single tokens); prefix tokens
    use the bare canonical rendering, one leaf or operator per token.
    """
    if order == "infix":
        out: list[str] = []

        def walk_infix(node: EquationTree) -> None:
            if isinstance(node, Op):
                out.append("(")
                walk_infix(node.left)
                out.append(node.op)
                walk_infix(node.right)
                out.append(")")
            else:
                out.append(_leaf_token(node, parenthesize_fractions=True))

        walk_infix(tree)
        return out
    if order == "prefix":
        out = []

        def walk_prefix(node: EquationTree) -> None:
            if isinstance(node, Op):
                out.append(node.op)
                walk_prefix(node.left)
                walk_prefix(node.right)
            else:
                out.append(_leaf_token(node, parenthesize_fractions=False))

        walk_prefix(tree)
        return out
    raise ValueError(f"order must be 'infix' or 'prefix', not {order!r}")


def to_string(tree: EquationTree, order: str = "infix") -> str:
    return " ".join(serialize(tree, order))


def parse_prefix(tokens: list[str]) -> EquationTree:
    """Rebuild a tree from prefix token spellings."""
    index = 0

    def walk() -> EquationTree:
        nonlocal index
        if index >= len(tokens):
            raise PrefixUnderflow(f"prefix input ends after {index} tokens")
        tok = tokens[index]
        index += 1
        if tok in OPERATORS:
            left = walk()
            right = walk()
            return Op(tok, left, right)
        if _PLACEHOLDER_RE.fullmatch(tok):
            return Placeholder(tok)
        sign, body = 1, tok
        if body.startswith("-"):
            sign, body = -1, body[1:]
        # Prefix tokens are pre-split, so bare "p/q" is unambiguous here.
        m = TEXT_NUMBER_RE.fullmatch(body)
        if m is None:
            raise EquationSyntaxError(index - 1, f"a leaf token, not {tok!r}")
        value = _value_from_match(m)
        if sign < 0:
            value = ExactValue(-value.numerator, value.denominator,
                               value.pi_factor, value.kind)
        return Literal(value)

    tree = walk()
    if index != len(tokens):
        raise EquationSyntaxError(index, "end of input")
    return tree


Number = ExactValue | float  # float results are approximate (pi involved)


def _to_float(x: Number) -> float:
    return x.to_float() if isinstance(x, ExactValue) else x


def _combine(op: str, a: Number, b: Number) -> Number:
    exact = (isinstance(a, ExactValue) and isinstance(b, ExactValue)
             and not a.pi_factor and not b.pi_factor)
    if exact:
        fa, fb = a.as_fraction(), b.as_fraction()
        if op == "+":
            return ExactValue.from_fraction(fa + fb)
        if op == "-":
            return ExactValue.from_fraction(fa - fb)
        if op == "*":
            return ExactValue.from_fraction(fa * fb)
        if op == "/":
            if fb == 0:
                raise DivisionByZero(f"{fa} / 0")
            return ExactValue.from_fraction(fa / fb)
        # exponent: exact when integral, binary64 otherwise
        if fb.denominator == 1:
            if fa == 0 and fb < 0:
                raise ZeroToNegativePower(f"0 ^ {fb}")
            return ExactValue.from_fraction(fa ** fb.numerator)
    va, vb = _to_float(a), _to_float(b)
    if op == "+":
        return va + vb
    if op == "-":
        return va - vb
    if op == "*":
        return va * vb
    if op == "/":
        if vb == 0.0:
            raise DivisionByZero(f"{va} / 0")
        return va / vb
    if va == 0.0 and vb < 0:
        raise ZeroToNegativePower(f"0 ^ {vb}")
    try:
        return math.pow(va, vb)
    except (ValueError, OverflowError) as exc:
        raise EquationError(f"cannot compute {va} ^ {vb}: {exc}") from exc


def evaluate(tree: EquationTree,
             bindings: dict[str, ExactValue] | None = None) -> Number:
    """Evaluate a tree; ExactValue result is exact, float is approximate."""
    bindings = bindings or {}

    def walk(node: EquationTree) -> Number:
        if isinstance(node, Op):
            return _combine(node.op, walk(node.left), walk(node.right))
        if isinstance(node, Placeholder):
            try:
                return bindings[node.name]
            except KeyError:
                raise UnboundPlaceholder(node.name) from None
        return node.value

    return walk(tree)


def check_answer(tree: EquationTree, bindings: dict[str, ExactValue] | None,
                 answer: ExactValue, tol: float = 1e-4) -> bool:
    """Exact equality when both sides are exact and pi-free, else |diff|<=tol."""
    try:
        value = evaluate(tree, bindings)
    except EquationError:
        return False
    if (isinstance(value, ExactValue) and not value.pi_factor
            and not answer.pi_factor):
        return value == answer
    return abs(_to_float(value) - answer.to_float()) <= tol


def leaf_depths(tree: EquationTree) -> list[tuple[Leaf, int]]:
    """Depth of every leaf occurrence, left to right; root is depth 0."""
    out: list[tuple[Leaf, int]] = []

    def walk(node: EquationTree, depth: int) -> None:
        if isinstance(node, Op):
            walk(node.left, depth + 1)
            walk(node.right, depth + 1)
        else:
            out.append((node, depth))

    walk(tree, 0)
    return out


def _leaf_paths(tree: EquationTree, leaf: Leaf) -> list[tuple[int, ...]]:
    paths: list[tuple[int, ...]] = []

    def walk(node: EquationTree, path: tuple[int, ...]) -> None:
        if isinstance(node, Op):
            walk(node.left, path + (0,))
            walk(node.right, path + (1,))
        elif node == leaf:
            paths.append(path)

    walk(tree, ())
    return paths


def _unique_path(tree: EquationTree, leaf: Leaf) -> tuple[int, ...]:
    paths = _leaf_paths(tree, leaf)
    if len(paths) != 1:
        raise AmbiguousLeaf(f"{leaf} occurs {len(paths)} times")
    return paths[0]


def pair_operator(tree: EquationTree, leaf_i: Leaf, leaf_j: Leaf) -> str:
    """Operator at the lowest common ancestor of two distinct leaves."""
    path_i = _unique_path(tree, leaf_i)
    path_j = _unique_path(tree, leaf_j)
    if path_i == path_j:
        raise AmbiguousLeaf("identical leaves share no ancestor operator")
    node = tree
    for a, b in zip(path_i, path_j):
        if a != b:
            break
        node = node.right if a else node.left
    assert isinstance(node, Op)
    return node.op


def tree_distance(tree: EquationTree, leaf_i: Leaf, leaf_j: Leaf) -> int:
    """Signed depth difference depth(leaf_i) - depth(leaf_j)."""
    path_i = _unique_path(tree, leaf_i)
    path_j = path_i if leaf_j == leaf_i else _unique_path(tree, leaf_j)
    return len(path_i) - len(path_j)


def operator_count(tree: EquationTree) -> int:
    if isinstance(tree, Op):
        return 1 + operator_count(tree.left) + operator_count(tree.right)
    return 0
