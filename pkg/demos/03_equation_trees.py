#!/usr/bin/env python3
"""Equation trees: parsing, exact evaluation, and the structural metrics
(leaf depths, pair operators, signed distances) used as training targets."""

from mwpkit.equation import (check_answer, evaluate, leaf_depths,
                             operator_count, pair_operator, parse_equation,
                             parse_prefix, serialize, to_string,
                             tree_distance, Literal)
from mwpkit.numeracy import ExactValue, parse_answer, render

EXPRESSIONS = [
    "20-(20*5-70)/(5+1)",          # exam scoring            -> 15
    "15/(1-((3)/(2+3))-30%)",      # pages of a book         -> 150
    "(50*72%-25*(3/5))/(50-25)",   # swimmers ratio          -> 21/25
    "(4/9)+(1/9)",                 # two road-building teams -> 5/9
    "(80-25)*2/(4-2)",             # mis-annotated upstream  -> 55, not 15
]

for expr in EXPRESSIONS:
    tree = parse_equation(expr)
    value = evaluate(tree)
    print(f"{expr:32s} = {render(value):6s} ({operator_count(tree)} operators)")

print("\nanswer check on the mis-annotated record:")
tree = parse_equation("(80-25)*2/(4-2)")
print("  matches 15?", check_answer(tree, None, parse_answer("15")))
print("  matches 55?", check_answer(tree, None, parse_answer("55")))

# structure metrics on (80 - 25*2) / (4 - 2)
tree = parse_equation("(80-25*2)/(4-2)")
print("\ninfix :", to_string(tree))
print("prefix:", " ".join(serialize(tree, "prefix")))
print("depths:", [(render(leaf.value), d) for leaf, d in leaf_depths(tree)])

for a, b in [(80, 25), (80, 4), (25, 4)]:
    la, lb = Literal(ExactValue(a)), Literal(ExactValue(b))
    print(f"pair ({a},{b}): operator {pair_operator(tree, la, lb)!r}, "
          f"distance {tree_distance(tree, la, lb):+d}")

# serialization round-trips exactly, in both orders
assert parse_prefix(serialize(tree, "prefix")) == tree
print("\nprefix round-trip reproduces the tree exactly")

# pi drops the computation to binary64; the result is approximate
value = evaluate(parse_equation("pi*3*3"))
print(f"pi*3*3 = {value} (float, approximate)")
