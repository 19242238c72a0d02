#!/usr/bin/env python3
"""Label bundles: every record gets targets for whatever supervision level
its annotations support (self < weak < full), all in one JSON object."""

import json

from mwpkit.corpus import MwpRecord
from mwpkit.labels import build_bundle, mlm_plan

RECORDS = [
    # text only: counting and number-type targets
    MwpRecord("a", "一次考试共20道题，答对一题得5分，答错一题扣1分，"
                   "杰克得了70分，他答对了几道题？"),
    # text + answer: answer-type, category-match, magnitude targets
    MwpRecord("b", "一次考试共20道题，答对一题得5分，答错一题扣1分，"
                   "杰克得了70分，他答对了几道题？", answer="15"),
    # full supervision: pair-operator / pair-distance / quantity tags
    MwpRecord("c", "甲队修(4/9)，乙队比甲队多修(1/9)，另外用了5天，"
                   "乙队修了多少？", equation="x=(4/9)+(1/9)", answer="5/9"),
    # inconsistent annotation: silently degrades to weak supervision
    MwpRecord("d", "甲数是80，乙数是25，相减后乘2，再除以4与2的差。",
              equation="x=(80-25)*2/(4-2)", answer="15"),
]

for record in RECORDS:
    labels = build_bundle(record, seed=7, replacement_vocab=("一", "二", "三"))
    print(f"--- {record.id}: availability {labels.bundle.availability}")
    if labels.skip_reasons:
        print("    skipped:", labels.skip_reasons)
    print("   ", json.dumps(labels.bundle.to_json_dict(),
                            ensure_ascii=False)[:160], "...")

# the corruption plan is an explicit, replayable object
tokens = ["我", "有", "3", "个", "苹", "果"] * 4
plan = mlm_plan(tokens, seed=13, replacement_vocab=("書", "树", "水"))
print("\nmlm actions:", plan.actions[:8], "...")
print("corrupted  :", "".join(plan.corrupted(tokens)))
print("targets    :", plan.targets)
print("replay is deterministic:",
      plan == mlm_plan(tokens, 13, ("書", "树", "水")))
