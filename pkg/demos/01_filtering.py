#!/usr/bin/env python3
"""Walk through corpus filtering: ingest a tiny dump, classify each record
against the cleanliness rules, and partition it into three splits."""

import io
import json

from mwpkit.corpus import (FilterLimits, build_dedup_index, classify, ingest,
                           partition)

RAW = [
    # a solvable problem: equation agrees exactly with the answer
    {"id": "demo1",
     "original_text": "甲队修路(4/9)，乙队比甲队多修(1/9)，乙队修多少？",
     "equation": "x=(4/9)+(1/9)", "ans": "5/9"},
    # answer but no equation: weak supervision only
    {"id": "demo2", "original_text": "某数最大是多少？", "ans": "3"},
    # the classic chicken-and-rabbit trap: 2 and 4 appear in the solution
    # but not in the text, and they are not allowed constants
    {"id": "demo3",
     "original_text": "院子里有鸡和兔共25只，它们共有80条腿，兔有几只？",
     "equation": "x=(80-25*2)/(4-2)"},
    # nothing usable at all
    {"id": "demo4", "original_text": "这道题既没有答案也没有算式。"},
    # annotated answer disagrees with the equation value (55, not 15)
    {"id": "demo5",
     "original_text": "甲数是80，乙数是25，相减后乘2，再除以4与2的差。",
     "equation": "x=(80-25)*2/(4-2)", "ans": "15"},
]

stream = io.StringIO("".join(json.dumps(r, ensure_ascii=False) + "\n"
                             for r in RAW))
records, errors = ingest(stream)
print(f"ingested {len(records)} records, {len(errors)} bad lines\n")

limits = FilterLimits()  # m <= 100, n <= 20, constants {1, pi}, k = 15
for record in records:
    verdict = classify(record, limits)
    rules = ", ".join(sorted(r.value for r in verdict.rule_hits)) or "-"
    print(f"{record.id}: {verdict.disposition.value:10s} rules: {rules}")

result = partition(records, limits)
print("\nreport:", json.dumps(result.report.to_json_dict(), indent=2))

# the duplicate rule keys on normalized text: whitespace-free, lowercased,
# numbers rendered canonically, so 0.5 and (1/2) collide
reference, _ = ingest(io.StringIO(json.dumps(
    {"id": "ref", "original_text": "一段路长(1/2)千米"}) + "\n"))
index = build_dedup_index(reference)
twin, _ = ingest(io.StringIO(json.dumps(
    {"id": "twin", "original_text": "一段路长 0.5 千米", "ans": "1"}) + "\n"))
verdict = classify(twin[0], limits, index)
print(f"\nduplicate twin: {verdict.disposition.value}, "
      f"rules: {sorted(r.value for r in verdict.rule_hits)}")
