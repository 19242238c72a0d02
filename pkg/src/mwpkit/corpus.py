"""Corpus filtering: ingest JSON-lines records, classify each against the
cleanliness rules and partition into clean / unsolvable / rejected splits.

Rule summary (a record lists every rule it violates, not just the first):

    NO_ANSWER_NO_EQUATION   neither a usable answer value nor an equation
    ANSWER_ONLY             numeric answer but no equation
    TOO_LONG                text length > max_text_tokens or equation
                            length > max_equation_tokens (token counts)
    FORBIDDEN_CONSTANT      equation literal that is neither a text
                            quantity nor an allowed constant ({1, pi})
    DUPLICATE_OF_REFERENCE  normalized dedup key collides with the
                            reference corpus
    TOO_MANY_QUANTITIES     more quantities than the k placeholder budget
    PARSE_FAILURE           equation cannot be tokenized/parsed/evaluated
    ANSWER_MISMATCH         equation value disagrees with the annotated answer

A hit-free record is Clean (fully-supervised usable).  Violating records
keep text+answer usability for weak supervision and go to Unsolvable when
a parseable answer is present; otherwise they are Rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Iterable

from . import equation as eq
from .mapping import DEFAULT_CONSTANTS, DEFAULT_K, find_external_constants
from .numeracy import (ExactValue, UnparseableAnswer, parse_answer,
                       recognize_numbers, render, tokenize_text)


class Origin(Enum):
    APE210K = "ape210k"
    MATH23K = "math23k"
    SYNTHETIC = "synthetic"
    OTHER = "other"


@dataclass(frozen=True)
class MwpRecord:
    id: str
    text: str
    equation: str | None = None
    answer: str | None = None
    origin: Origin = Origin.OTHER

    def __post_init__(self):
        if not self.id:
            raise ValueError("record id must be non-empty")
        if not self.text:
            raise ValueError(f"record {self.id}: text must be non-empty")


class Rule(Enum):
    NO_ANSWER_NO_EQUATION = "no_answer_no_equation"
    ANSWER_ONLY = "answer_only"
    TOO_LONG = "too_long"
    FORBIDDEN_CONSTANT = "forbidden_constant"
    DUPLICATE_OF_REFERENCE = "duplicate_of_reference"
    TOO_MANY_QUANTITIES = "too_many_quantities"
    PARSE_FAILURE = "parse_failure"
    ANSWER_MISMATCH = "answer_mismatch"


class Disposition(Enum):
    CLEAN = "clean"
    UNSOLVABLE = "unsolvable"
    REJECTED = "rejected"


@dataclass(frozen=True)
class FilterVerdict:
    rule_hits: frozenset[Rule]
    disposition: Disposition


@dataclass(frozen=True)
class FilterLimits:
    max_text_tokens: int = 100
    max_equation_tokens: int = 20
    allowed_constants: tuple[ExactValue, ...] = DEFAULT_CONSTANTS
    max_quantities: int = DEFAULT_K
    tolerance: float = 1e-4


@dataclass
class FilterReport:
    rule_counts: dict[Rule, int] = field(default_factory=dict)
    clean_count: int = 0
    unsolvable_count: int = 0
    rejected_count: int = 0

    @property
    def total(self) -> int:
        return self.clean_count + self.unsolvable_count + self.rejected_count

    def to_json_dict(self) -> dict:
        return {
            "rules": {rule.value: self.rule_counts.get(rule, 0) for rule in Rule},
            "clean": self.clean_count,
            "unsolvable": self.unsolvable_count,
            "rejected": self.rejected_count,
            "total": self.total,
        }


@dataclass(frozen=True)
class IngestError:
    line_number: int  # 1-based
    message: str


DEFAULT_SCHEMA = {"id": "id", "text": "original_text",
                  "equation": "equation", "answer": "ans"}


def ingest(stream: Iterable[str] | IO, schema: dict[str, str] | None = None,
           origin: Origin = Origin.OTHER) -> tuple[list[MwpRecord], list[IngestError]]:
    """Read JSON-lines into records; malformed lines are collected with
    their line numbers and the run continues.

    Field lookup tries the schema-mapped source name first and falls back
    to the canonical name, so files this toolkit wrote are re-ingestable
    with any schema.
    """
    schema = schema or DEFAULT_SCHEMA

    def lookup(obj: dict, name: str):
        value = obj.get(schema.get(name, name))
        return obj.get(name) if value is None else value

    records: list[MwpRecord] = []
    errors: list[IngestError] = []
    seen_ids: set[str] = set()
    for line_number, line in enumerate(stream, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8", errors="replace")
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            errors.append(IngestError(line_number, f"bad JSON: {exc.msg}"))
            continue
        if not isinstance(obj, dict):
            errors.append(IngestError(line_number, "line is not a JSON object"))
            continue
        text = lookup(obj, "text")
        if not text or not isinstance(text, str):
            errors.append(IngestError(line_number, "missing text field"))
            continue
        rid = lookup(obj, "id")
        rid = str(rid) if rid is not None else str(line_number)
        if rid in seen_ids:
            errors.append(IngestError(line_number, f"duplicate id {rid!r}"))
            continue
        seen_ids.add(rid)
        equation_str = lookup(obj, "equation")
        if isinstance(equation_str, str):
            equation_str = eq.strip_assignment_head(equation_str).strip() or None
        else:
            equation_str = None
        answer = lookup(obj, "answer")
        answer = str(answer).strip() if answer is not None else None
        answer = answer or None
        records.append(MwpRecord(rid, text, equation_str, answer, origin))
    return records, errors


def dedup_key(record: MwpRecord) -> str:
    """Normalized text: lowercase, whitespace-free, numbers canonicalized."""
    parts = []
    for token in tokenize_text(record.text):
        hits = recognize_numbers([token])
        parts.append(render(hits[0].value) if hits else token.lower())
    return "".join(parts)


def _parsed_answer(record: MwpRecord) -> ExactValue | None:
    if record.answer is None:
        return None
    try:
        return parse_answer(record.answer)
    except UnparseableAnswer:
        return None


def classify(record: MwpRecord, limits: FilterLimits = FilterLimits(),
             dedup_index: frozenset[str] | set[str] = frozenset()) -> FilterVerdict:
    """Pure rule check for one record; never raises."""
    hits: set[Rule] = set()
    tokens = tokenize_text(record.text)
    quantities = recognize_numbers(tokens)
    answer_value = _parsed_answer(record)

    if record.equation is None:
        hits.add(Rule.ANSWER_ONLY if answer_value is not None
                 else Rule.NO_ANSWER_NO_EQUATION)

    if len(tokens) > limits.max_text_tokens:
        hits.add(Rule.TOO_LONG)
    if len(quantities) > limits.max_quantities:
        hits.add(Rule.TOO_MANY_QUANTITIES)
    if dedup_index and dedup_key(record) in dedup_index:
        hits.add(Rule.DUPLICATE_OF_REFERENCE)

    if record.equation is not None:
        tree = None
        try:
            eq_tokens = eq.tokenize_equation(
                eq.strip_assignment_head(record.equation))
            if len(eq_tokens) > limits.max_equation_tokens:
                hits.add(Rule.TOO_LONG)
            tree = eq.parse(eq_tokens)
        except eq.EquationError:
            hits.add(Rule.PARSE_FAILURE)
        if tree is not None:
            values = [qt.value for qt in quantities]
            if find_external_constants(tree, values, limits.allowed_constants):
                hits.add(Rule.FORBIDDEN_CONSTANT)
            if answer_value is not None:
                if not eq.check_answer(tree, None, answer_value,
                                       limits.tolerance):
                    hits.add(Rule.ANSWER_MISMATCH)
            else:
                try:
                    eq.evaluate(tree)
                except eq.EquationError:
                    hits.add(Rule.PARSE_FAILURE)

    if not hits:
        disposition = Disposition.CLEAN
    elif Rule.NO_ANSWER_NO_EQUATION in hits:
        disposition = Disposition.REJECTED
    elif answer_value is not None:
        disposition = Disposition.UNSOLVABLE
    else:
        disposition = Disposition.REJECTED
    return FilterVerdict(frozenset(hits), disposition)


@dataclass
class PartitionResult:
    clean: list[MwpRecord]
    unsolvable: list[MwpRecord]
    rejected: list[MwpRecord]
    verdicts: list[FilterVerdict]  # parallel to the input order
    report: FilterReport


def partition(records: list[MwpRecord], limits: FilterLimits = FilterLimits(),
              dedup_index: frozenset[str] | set[str] = frozenset()) -> PartitionResult:
    """Stable three-way split with an auditable report."""
    result = PartitionResult([], [], [], [], FilterReport())
    splits = {Disposition.CLEAN: result.clean,
              Disposition.UNSOLVABLE: result.unsolvable,
              Disposition.REJECTED: result.rejected}
    for record in records:
        verdict = classify(record, limits, dedup_index)
        result.verdicts.append(verdict)
        splits[verdict.disposition].append(record)
        for rule in verdict.rule_hits:
            result.report.rule_counts[rule] = (
                result.report.rule_counts.get(rule, 0) + 1)
    result.report.clean_count = len(result.clean)
    result.report.unsolvable_count = len(result.unsolvable)
    result.report.rejected_count = len(result.rejected)
    return result


def build_dedup_index(records: Iterable[MwpRecord]) -> frozenset[str]:
    return frozenset(dedup_key(r) for r in records)
