#!/usr/bin/env python3
"""Exact number recognition and placeholder mapping.

Every quantity becomes an arbitrary-precision rational (with an optional pi
factor), then gets replaced by n1, n2, ... in text-occurrence order.
"""

from mwpkit.mapping import make_vocab, map_numbers, resolve_equation_numbers
from mwpkit.equation import parse_equation, serialize
from mwpkit.numeracy import (compare_magnitude, number_type, parse_answer,
                             recognize_numbers, render, tokenize_text)

TEXT = ("他第一天读了30%，第二天读15页，已读与未读之比是2:3，"
        "此外用了1(1/2)小时，半径是pi无关的3。")

tokens = tokenize_text(TEXT)
print("tokens:", tokens, "\n")

quantities = recognize_numbers(tokens)
for q in quantities:
    print(f"pos {q.position:2d}  surface {q.surface:8s} "
          f"value {render(q.value):6s} kind {q.kind.value:8s} "
          f"type {number_type(q).value}")

# exact answers: percents and fractions reduce canonically
print("\n84% ->", render(parse_answer("84%")))
print("1(1/2) ->", render(parse_answer("1(1/2)")))
print("compare 3/10 vs 15 ->", compare_magnitude(
    parse_answer("3/10"), parse_answer("15")).name)

# mapping: same value twice still gets two placeholders
text = "甲队完成(4/15)，乙队比甲队多完成(2/15)，两队共完成多少？"
tokens = tokenize_text(text)
mapped = map_numbers(tokens, recognize_numbers(tokens), k=15)
print("\nmapped tokens:", "".join(mapped.tokens))
print("table:", [(name, q.surface) for name, q in mapped.table])

# equation literals resolve against the table by first value match;
# leftovers must be allowed constants (1 or pi) or the equation is rejected
tree = parse_equation("x=(4/15)+(2/15)+(4/15)")
resolved = resolve_equation_numbers(tree, mapped, make_vocab())
print("resolved:", " ".join(serialize(resolved, "prefix")))
