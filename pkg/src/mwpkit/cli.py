"""Command-line front end: filter -> map -> labels -> eval/stats/qt, plus
the head gradient-check report.

All randomness flows from --seed; per-record sub-seeds are derived by
hashing (seed, record id), so outputs are byte-identical across runs and
independent of record order.  Every command writes a report.json echoing
the seed, k and limits next to its data outputs.

Exit codes: 0 success; 1 record-level failures under --strict; 2 unreadable
input or bad configuration.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from . import equation as eq
from . import heads
from .corpus import (DEFAULT_SCHEMA, FilterLimits, MwpRecord,
                     build_dedup_index, ingest, partition)
from .labels import build_bundle
from .mapping import DEFAULT_CONSTANTS, DEFAULT_K, make_vocab
from .numeracy import (UnparseableAnswer, parse_answer,
                       recognize_numbers, render, tokenize_text)


class ConfigError(Exception):
    pass


def _load_schema(path: str | None) -> dict[str, str]:
    if path is None:
        return dict(DEFAULT_SCHEMA)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            schema = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read schema {path}: {exc}") from exc
    if not isinstance(schema, dict):
        raise ConfigError(f"schema {path} must be a JSON object")
    return {str(k): str(v) for k, v in schema.items()}


def _parse_constants(raw: str):
    values = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            values.append(parse_answer(part))
        except UnparseableAnswer as exc:
            raise ConfigError(f"bad constant {part!r}") from exc
    return tuple(values)


def _read_records(args) -> tuple[list[MwpRecord], list]:
    schema = _load_schema(args.schema)
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            records, errors = ingest(fh, schema)
    except OSError as exc:
        raise ConfigError(f"cannot read {args.input}: {exc}") from exc
    for err in errors:
        print(f"line {err.line_number}: {err.message}", file=sys.stderr)
    return records, errors


def _outdir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _limits(args) -> FilterLimits:
    constants = (_parse_constants(args.constants) if args.constants
                 else DEFAULT_CONSTANTS)
    return FilterLimits(max_text_tokens=args.max_text_tokens,
                        max_equation_tokens=args.max_eq_tokens,
                        allowed_constants=constants,
                        max_quantities=args.k,
                        tolerance=args.tolerance)


def _write_jsonl(path: Path, objects) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for obj in objects:
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def _write_report(outdir: Path, command: str, args, extra: dict) -> None:
    report = {"command": command, "seed": args.seed, "k": args.k,
              "limits": {"max_text_tokens": args.max_text_tokens,
                         "max_equation_tokens": args.max_eq_tokens,
                         "constants": (args.constants or "1,pi"),
                         "tolerance": args.tolerance}}
    report.update(extra)
    with open(outdir / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def _record_json(record: MwpRecord, rules=None) -> dict:
    out = {"id": record.id, "text": record.text}
    if record.equation is not None:
        out["equation"] = record.equation
    if record.answer is not None:
        out["answer"] = record.answer
    if rules:
        out["rules"] = sorted(r.value for r in rules)
    return out


def cmd_filter(args) -> int:
    records, errors = _read_records(args)
    limits = _limits(args)
    dedup_index = frozenset()
    if args.dedup_ref:
        try:
            with open(args.dedup_ref, "r", encoding="utf-8") as fh:
                ref_records, _ = ingest(fh, _load_schema(args.schema))
        except OSError as exc:
            raise ConfigError(f"cannot read {args.dedup_ref}: {exc}") from exc
        dedup_index = build_dedup_index(ref_records)
    result = partition(records, limits, dedup_index)
    outdir = _outdir(args)
    by_record = dict(zip((id(r) for r in records), result.verdicts))
    _write_jsonl(outdir / "clean.jsonl",
                 (_record_json(r) for r in result.clean))
    _write_jsonl(outdir / "unsolvable.jsonl",
                 (_record_json(r, by_record[id(r)].rule_hits)
                  for r in result.unsolvable))
    _write_jsonl(outdir / "rejected.jsonl",
                 (_record_json(r, by_record[id(r)].rule_hits)
                  for r in result.rejected))
    _write_report(outdir, "filter", args,
                  {"report": result.report.to_json_dict(),
                   "ingest_errors": len(errors)})
    table = result.report.to_json_dict()
    print(f"clean={table['clean']} unsolvable={table['unsolvable']} "
          f"rejected={table['rejected']} total={table['total']}",
          file=sys.stderr)
    return 1 if (args.strict and errors) else 0


def _mapped_json(record: MwpRecord, mapped) -> dict:
    obj = _record_json(record)
    obj["tokens"] = list(mapped.tokens)
    obj["map"] = [{"ph": name, "surface": qt.surface,
                   "value": render(qt.value), "pos": qt.position}
                  for name, qt in mapped.table]
    obj["k"] = mapped.k
    return obj


def cmd_map(args) -> int:
    records, errors = _read_records(args)
    outdir = _outdir(args)
    rows, failures = [], 0
    for record in records:
        labels = build_bundle(record, k=args.k)
        if labels.mapped is None:
            # pass the record through unmapped rather than dropping it
            failures += 1
            reason = labels.skip_reasons.get("full", "unmapped")
            print(f"{record.id}: {reason}", file=sys.stderr)
            row = _record_json(record)
            row["tokens"] = tokenize_text(record.text)
            row["map"] = []
            row["k"] = args.k
            row["skipped"] = reason
            rows.append(row)
            continue
        rows.append(_mapped_json(record, labels.mapped))
    _write_jsonl(outdir / "mapped.jsonl", rows)
    _write_report(outdir, "map", args,
                  {"records": len(rows), "skipped": failures,
                   "ingest_errors": len(errors)})
    return 1 if (args.strict and (failures or errors)) else 0


def cmd_labels(args) -> int:
    records, errors = _read_records(args)
    vocab = make_vocab(args.k, (_parse_constants(args.constants)
                                if args.constants else DEFAULT_CONSTANTS))
    replacement_vocab = _replacement_vocab(records)
    outdir = _outdir(args)
    rows, skipped = [], Counter()
    for record in records:
        labels = build_bundle(record, k=args.k, vocab=vocab, seed=args.seed,
                              replacement_vocab=replacement_vocab,
                              tolerance=args.tolerance)
        for level, reason in sorted(labels.skip_reasons.items()):
            skipped[level] += 1
            print(f"{record.id}: no {level} labels: {reason}", file=sys.stderr)
        rows.append(labels.bundle.to_json_dict())
    _write_jsonl(outdir / "labels.jsonl", rows)
    _write_report(outdir, "labels", args,
                  {"records": len(rows), "skipped_levels": dict(skipped),
                   "ingest_errors": len(errors)})
    return 1 if (args.strict and errors) else 0


def _replacement_vocab(records) -> tuple[str, ...]:
    """Corpus token vocabulary minus placeholders and special tokens,
    sorted for determinism."""
    vocab = set()
    for record in records:
        vocab.update(tokenize_text(record.text))
    vocab = {t for t in vocab if not t.startswith("n") or not t[1:].isdigit()}
    vocab.discard("[MASK]")
    return tuple(sorted(vocab))


def cmd_eval(args) -> int:
    records, errors = _read_records(args)
    outdir = _outdir(args)
    rows, failures = [], 0
    for record in records:
        row: dict = {"id": record.id}
        if record.equation is None:
            row["error"] = "no equation"
            failures += 1
            rows.append(row)
            continue
        try:
            tree = eq.parse_equation(record.equation)
            value = eq.evaluate(tree)
        except eq.EquationError as exc:
            row["error"] = str(exc)
            failures += 1
            rows.append(row)
            continue
        if isinstance(value, float):
            row["value"] = value
            row["exact"] = False
        else:
            row["value"] = render(value)
            row["exact"] = True
        row["matches_answer"] = None
        if record.answer is not None:
            try:
                answer = parse_answer(record.answer)
            except UnparseableAnswer:
                pass
            else:
                row["matches_answer"] = eq.check_answer(
                    tree, None, answer, args.tolerance)
        rows.append(row)
    _write_jsonl(outdir / "eval.jsonl", rows)
    _write_report(outdir, "eval", args,
                  {"records": len(rows), "failures": failures,
                   "ingest_errors": len(errors)})
    return 1 if (args.strict and (failures or errors)) else 0


def operator_histogram(records) -> tuple[dict[str, int], int]:
    """Bucketed operator counts 0..5 and ">5"; returns (histogram, skipped)."""
    buckets = {str(i): 0 for i in range(6)}
    buckets[">5"] = 0
    skipped = 0
    for record in records:
        if record.equation is None:
            skipped += 1
            continue
        try:
            tree = eq.parse_equation(record.equation)
        except eq.EquationError:
            skipped += 1
            continue
        count = eq.operator_count(tree)
        buckets[str(count) if count <= 5 else ">5"] += 1
    return buckets, skipped


def cmd_stats(args) -> int:
    records, errors = _read_records(args)
    outdir = _outdir(args)
    op_hist, skipped = operator_histogram(records)
    quantity_hist: Counter = Counter()
    for record in records:
        quantity_hist[len(recognize_numbers(tokenize_text(record.text)))] += 1
    stats = {"operator_count": op_hist,
             "quantity_count": {str(k): v for k, v in
                                sorted(quantity_hist.items())},
             "records": len(records), "skipped_equations": skipped}
    with open(outdir / "stats.json", "w", encoding="utf-8") as fh:
        json.dump(stats, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
    _write_report(outdir, "stats", args,
                  {"records": len(records), "skipped_equations": skipped,
                   "ingest_errors": len(errors)})
    print(" ".join(f"{k}:{v}" for k, v in op_hist.items()), file=sys.stderr)
    return 1 if (args.strict and errors) else 0


def cmd_qt(args) -> int:
    records, errors = _read_records(args)
    outdir = _outdir(args)
    rows = []
    for record in records:
        labels = build_bundle(record, k=args.k, tolerance=args.tolerance)
        rows.append({"id": record.id, "qt": labels.bundle.quantity_tags})
    _write_jsonl(outdir / "qt.jsonl", rows)
    _write_report(outdir, "qt", args, {"records": len(rows),
                                       "ingest_errors": len(errors)})
    return 1 if (args.strict and errors) else 0


def cmd_gradcheck(args) -> int:
    rng = np.random.default_rng(args.seed)
    outdir = _outdir(args)
    reports = []
    for task in heads.TASKS:
        h_in = heads.head_input_width(task, args.h)
        worst = None
        for _ in range(args.configs):
            params = heads.init_head_params(rng, h_in, args.hidden,
                                            heads.TASK_SPECS[task][1])
            n = 1 if heads.TASK_SPECS[task][0] == "mean" else 3
            inputs = _smooth_inputs(rng, params, n)
            if heads.TASK_SPECS[task][2] == "ce":
                targets = rng.integers(0, heads.TASK_SPECS[task][1], n)
            else:
                targets = rng.normal(0.0, 2.0, n)
            report = heads.grad_check(task, params, inputs, targets)
            if worst is None or report.max_rel_err > worst.max_rel_err:
                worst = report
        reports.append(worst)
        print(f"{task}: max_rel_err={worst.max_rel_err:.3e} "
              f"at {worst.argmax_coord}", file=sys.stderr)
    with open(outdir / "gradcheck.json", "w", encoding="utf-8") as fh:
        json.dump([r.to_json_dict() for r in reports], fh, indent=2)
        fh.write("\n")
    _write_report(outdir, "gradcheck", args,
                  {"tasks": len(reports),
                   "max_rel_err": max(r.max_rel_err for r in reports)})
    return 0


def _smooth_inputs(rng: np.random.Generator, params, n: int,
                   margin: float = 1e-3) -> np.ndarray:
    """Inputs whose hidden pre-activations stay away from the ReLU kink."""
    for _ in range(200):
        inputs = rng.normal(0.0, 1.0, (n, params.h_in))
        pre = inputs @ params.w1 + params.b1
        if np.abs(pre).min() > margin:
            return inputs
    return inputs  # extremely unlikely; accept the last draw


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mwpkit",
        description="Corpus engineering for math word problems")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="JSON-lines input")
            p.add_argument("--schema", default=None,
                           help="JSON file mapping record fields to source "
                                "field names")
        p.add_argument("--output-dir", required=True)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--k", type=int, default=DEFAULT_K,
                       help="placeholder budget (default 15)")
        p.add_argument("--max-text-tokens", type=int, default=100)
        p.add_argument("--max-eq-tokens", type=int, default=20)
        p.add_argument("--constants", default=None,
                       help="comma-separated allowed constants (default 1,pi)")
        p.add_argument("--tolerance", type=float, default=1e-4,
                       help="answer check tolerance (default 1e-4)")
        p.add_argument("--strict", action="store_true",
                       help="exit 1 on any record-level failure")

    p = sub.add_parser("filter", help="partition records into clean/"
                                      "unsolvable/rejected")
    common(p)
    p.add_argument("--dedup-ref", default=None,
                   help="JSON-lines reference corpus for the duplicate rule")
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("map", help="replace quantities with placeholders")
    common(p)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("labels", help="emit per-record label bundles")
    common(p)
    p.set_defaults(func=cmd_labels)

    p = sub.add_parser("eval", help="evaluate equations against answers")
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stats", help="operator and quantity count histograms")
    common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("qt", help="per-quantity +/-/None tagging labels")
    common(p)
    p.set_defaults(func=cmd_qt)

    p = sub.add_parser("gradcheck", help="verify head gradients numerically")
    common(p, needs_input=False)
    p.add_argument("--h", type=int, default=8, help="embedding width")
    p.add_argument("--hidden", type=int, default=8, help="hidden width")
    p.add_argument("--configs", type=int, default=5,
                   help="random configurations per task")
    p.set_defaults(func=cmd_gradcheck)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
