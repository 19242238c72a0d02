import json

import pytest

from mwpkit.cli import main

from fixture_records import (DEDUP_REFERENCE, EXPECTED_SPLITS, fixture_rows,
                             write_jsonl)


def read_jsonl(path):
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


@pytest.fixture
def fixture_file(tmp_path):
    path = tmp_path / "fixture.jsonl"
    write_jsonl(path, fixture_rows())
    return path


@pytest.fixture
def dedup_file(tmp_path):
    path = tmp_path / "reference.jsonl"
    write_jsonl(path, DEDUP_REFERENCE)
    return path


class TestFilter:
    def test_partitions_fixture(self, tmp_path, fixture_file, dedup_file):
        out = tmp_path / "out"
        code = main(["filter", "--input", str(fixture_file),
                     "--output-dir", str(out), "--dedup-ref", str(dedup_file)])
        assert code == 0
        for split in ("clean", "unsolvable", "rejected"):
            ids = [r["id"] for r in read_jsonl(out / f"{split}.jsonl")]
            assert ids == EXPECTED_SPLITS[split]
        report = json.loads((out / "report.json").read_text())
        assert report["report"]["total"] == 14
        assert report["seed"] == 0 and report["k"] == 15

    def test_rejected_records_carry_rules(self, tmp_path, fixture_file,
                                          dedup_file):
        out = tmp_path / "out"
        main(["filter", "--input", str(fixture_file),
              "--output-dir", str(out), "--dedup-ref", str(dedup_file)])
        rejected = {r["id"]: r for r in read_jsonl(out / "rejected.jsonl")}
        assert rejected["r08"]["rules"] == ["forbidden_constant"]
        assert rejected["r14"]["rules"] == ["forbidden_constant", "too_long"]

    def test_unreadable_input_exit_2(self, tmp_path):
        code = main(["filter", "--input", str(tmp_path / "missing.jsonl"),
                     "--output-dir", str(tmp_path / "out")])
        assert code == 2

    def test_strict_flags_bad_lines(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"id": "1", "original_text": "有3个", "ans": "3"}\n'
                        "not json\n", encoding="utf-8")
        assert main(["filter", "--input", str(path),
                     "--output-dir", str(tmp_path / "o1")]) == 0
        assert main(["filter", "--input", str(path), "--strict",
                     "--output-dir", str(tmp_path / "o2")]) == 1


class TestLabels:
    def test_byte_identical_reruns(self, tmp_path, fixture_file):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            code = main(["labels", "--input", str(fixture_file),
                         "--output-dir", str(out), "--seed", "7"])
            assert code == 0
        assert (out1 / "labels.jsonl").read_bytes() == \
            (out2 / "labels.jsonl").read_bytes()
        assert (out1 / "report.json").read_bytes() == \
            (out2 / "report.json").read_bytes()

    def test_seed_changes_plans(self, tmp_path, fixture_file):
        outs = []
        for seed in ("7", "8"):
            out = tmp_path / f"s{seed}"
            main(["labels", "--input", str(fixture_file),
                  "--output-dir", str(out), "--seed", seed])
            outs.append((out / "labels.jsonl").read_bytes())
        assert outs[0] != outs[1]

    def test_composes_with_map_output(self, tmp_path, fixture_file):
        mapped_dir = tmp_path / "mapped"
        main(["map", "--input", str(fixture_file),
              "--output-dir", str(mapped_dir)])
        direct = tmp_path / "direct"
        main(["labels", "--input", str(fixture_file),
              "--output-dir", str(direct), "--seed", "3"])
        via_map = tmp_path / "via_map"
        main(["labels", "--input", str(mapped_dir / "mapped.jsonl"),
              "--output-dir", str(via_map), "--seed", "3"])
        assert (direct / "labels.jsonl").read_bytes() == \
            (via_map / "labels.jsonl").read_bytes()

    def test_availability_levels_in_output(self, tmp_path, fixture_file):
        out = tmp_path / "labels"
        main(["labels", "--input", str(fixture_file),
              "--output-dir", str(out), "--seed", "1"])
        rows = {r["id"]: r for r in read_jsonl(out / "labels.jsonl")}
        assert rows["r01"]["availability"] == ["self", "weak", "full"]
        assert rows["r05"]["availability"] == ["self", "weak"]
        assert rows["r03"]["availability"] == ["self"]
        assert rows["r13"]["availability"] == ["self", "weak"]  # mismatch


class TestMap:
    def test_mapped_output_schema(self, tmp_path, fixture_file):
        out = tmp_path / "out"
        assert main(["map", "--input", str(fixture_file),
                     "--output-dir", str(out)]) == 0
        rows = {r["id"]: r for r in read_jsonl(out / "mapped.jsonl")}
        r01 = rows["r01"]
        assert r01["k"] == 15
        assert r01["map"][0] == {"ph": "n1", "surface": "(4/9)",
                                 "value": "4/9", "pos": r01["map"][0]["pos"]}
        assert "n1" in r01["tokens"] and "n2" in r01["tokens"]
        # 16 quantities with k=15: passed through unmapped, flagged
        assert rows["r11"]["map"] == [] and "skipped" in rows["r11"]

    def test_k_flag(self, tmp_path, fixture_file):
        out = tmp_path / "out"
        main(["map", "--input", str(fixture_file), "--output-dir", str(out),
              "--k", "16"])
        rows = {r["id"]: r for r in read_jsonl(out / "mapped.jsonl")}
        assert "r11" in rows and len(rows["r11"]["map"]) == 16


class TestEval:
    def test_values_and_answer_checks(self, tmp_path, fixture_file):
        out = tmp_path / "out"
        assert main(["eval", "--input", str(fixture_file),
                     "--output-dir", str(out)]) == 0
        rows = {r["id"]: r for r in read_jsonl(out / "eval.jsonl")}
        assert rows["r01"] == {"id": "r01", "value": "5/9", "exact": True,
                               "matches_answer": True}
        assert rows["r13"]["value"] == "55"
        assert rows["r13"]["matches_answer"] is False
        assert rows["r09"]["exact"] is False  # pi participates
        assert rows["r12"]["error"]


class TestStats:
    def test_operator_histogram(self, tmp_path):
        rows = [
            {"id": "a", "original_text": "数是15", "equation": "x=15"},
            {"id": "b", "original_text": "甲修(4/9)，乙修(1/9)",
             "equation": "x=(4/9)+(1/9)"},
            {"id": "c", "original_text": "考试20题，对得5分，错扣1分，得70分",
             "equation": "x=20-(20*5-70)/(5+1)"},
            {"id": "d", "original_text": "还没有算式"},
        ]
        path = tmp_path / "in.jsonl"
        write_jsonl(path, rows)
        out = tmp_path / "out"
        assert main(["stats", "--input", str(path),
                     "--output-dir", str(out)]) == 0
        stats = json.loads((out / "stats.json").read_text())
        assert stats["operator_count"]["0"] == 1
        assert stats["operator_count"]["1"] == 1
        assert stats["operator_count"]["5"] == 1
        assert stats["skipped_equations"] == 1
        assert stats["quantity_count"] == {"0": 1, "1": 1, "2": 1, "4": 1}


class TestQt:
    def test_tags_or_null(self, tmp_path, fixture_file):
        out = tmp_path / "out"
        assert main(["qt", "--input", str(fixture_file),
                     "--output-dir", str(out)]) == 0
        rows = {r["id"]: r for r in read_jsonl(out / "qt.jsonl")}
        assert rows["r01"]["qt"] == ["+", "+"]
        assert rows["r09"]["qt"] is None  # multiplicative tree
        assert rows["r03"]["qt"] is None  # no equation


class TestGradcheck:
    def test_report_written(self, tmp_path):
        out = tmp_path / "out"
        assert main(["gradcheck", "--output-dir", str(out), "--seed", "5",
                     "--configs", "2"]) == 0
        rows = json.loads((out / "gradcheck.json").read_text())
        assert len(rows) == 7
        assert all(r["max_rel_err"] < 1e-5 for r in rows)
        report = json.loads((out / "report.json").read_text())
        assert report["max_rel_err"] < 1e-5
