"""The 14-record filter fixture: every rule fires at least once, plus clean
cases, with the designed verdict next to each record.

Field names follow the common dump layout (original_text / equation / ans)
so the fixture also exercises the default ingest schema.
"""

import json

# (record, expected disposition, expected rule hits)
FIXTURE = [
    ({"id": "r01", "original_text": "甲队修路(4/9)，乙队比甲队多修(1/9)，乙队修多少？",
      "equation": "x=(4/9)+(1/9)", "ans": "5/9"},
     "clean", set()),
    ({"id": "r02", "original_text": "小明有5个苹果，又买了3个，一共有多少个？",
      "equation": "x=5+3", "ans": "8"},
     "clean", set()),
    ({"id": "r03", "original_text": "这道题没有答案也没有算式。"},
     "rejected", {"no_answer_no_equation"}),
    ({"id": "r04", "original_text": "篮球的价格可能是多少呢？", "ans": "?"},
     "rejected", {"no_answer_no_equation"}),
    ({"id": "r05", "original_text": "某数是一位数，它乘72再除以47的商也是一位数，它最大是多少？",
      "ans": "3"},
     "unsolvable", {"answer_only"}),
    ({"id": "r06", "original_text": "这" * 101, "equation": "x=1+1", "ans": "2"},
     "unsolvable", {"too_long"}),
    ({"id": "r07", "original_text": "甲有2个，乙有3个，按此重复累加，总数是多少？",
      "equation": "x=2+3+2+3+2+3+2+3+2+3+2", "ans": "27"},
     "unsolvable", {"too_long"}),
    ({"id": "r08", "original_text": "院子里有鸡和兔共25只，它们共有80条腿，兔有几只？",
      "equation": "x=(80-25*2)/(4-2)"},
     "rejected", {"forbidden_constant"}),
    ({"id": "r09", "original_text": "圆的半径是3米，它的面积是多少平方米？",
      "equation": "x=pi*3*3", "ans": "9*pi"},
     "clean", set()),
    ({"id": "r10", "original_text": "一段路长0.5千米，已经修了0.25千米，还剩多少千米？",
      "equation": "x=0.5-0.25", "ans": "0.25"},
     "unsolvable", {"duplicate_of_reference"}),
    ({"id": "r11", "original_text": ("盒子里有1个、2个、3个、4个、5个、6个、7个、8个、"
                                     "9个、10个、11个、12个、13个、14个、15个、16个球，"
                                     "一共有多少个球？"),
      "equation": "x=1+2", "ans": "3"},
     "unsolvable", {"too_many_quantities"}),
    ({"id": "r12", "original_text": "甲数是1，乙数是2，求它们的和。",
      "equation": "x=(1+2", "ans": "3"},
     "unsolvable", {"parse_failure"}),
    ({"id": "r13", "original_text": "甲数是80，乙数是25，相减后乘2，再除以4与2的差。",
      "equation": "x=(80-25)*2/(4-2)", "ans": "15"},
     "unsolvable", {"answer_mismatch"}),
    ({"id": "r14", "original_text": "题" * 101, "equation": "x=7*6"},
     "rejected", {"too_long", "forbidden_constant"}),
]

# The reference corpus for the duplicate rule: same text as r10 up to
# whitespace and number-surface normalization (0.5 == (1/2), 0.25 == (1/4)).
DEDUP_REFERENCE = [
    {"id": "m01",
     "original_text": "一段路长 (1/2) 千米，已经修了(1/4)千米， 还剩多少千米？",
     "equation": "x=(1/2)-(1/4)", "ans": "(1/4)"},
]

EXPECTED_SPLITS = {
    "clean": [r["id"] for r, d, _ in FIXTURE if d == "clean"],
    "unsolvable": [r["id"] for r, d, _ in FIXTURE if d == "unsolvable"],
    "rejected": [r["id"] for r, d, _ in FIXTURE if d == "rejected"],
}


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def fixture_rows():
    return [record for record, _, _ in FIXTURE]
