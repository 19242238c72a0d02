"""Supervision targets for the pre-training objectives, per record.

Self-supervised:   mlm (corruption plan), s1 num_count, s2 nt_ground
Weakly-supervised: w1 at_pred, w2 cat_comp, w3 num_m_comp
Fully-supervised:  f1 o_pred (pair operator), f2 t_pred (pair depth distance)
plus per-quantity +/-/None tagging for additive-only solutions.

Weak targets exist when the answer string parses; full targets when the
equation parses, resolves onto the quantity table and agrees with the
answer.  Inconsistent annotations degrade gracefully to weak supervision.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field

from . import equation as eq
from .corpus import MwpRecord, _parsed_answer
from .mapping import (DEFAULT_K, ExternalConstant, MappedProblem,
                      TooManyQuantities, Vocab, make_vocab, map_numbers,
                      resolve_equation_numbers)
from .numeracy import (ExactValue, NumberKind, NumberToken, NumberType,
                       Ordering, compare_magnitude, number_type,
                       recognize_numbers, tokenize_text)

MASK_TOKEN = "[MASK]"
MASK_P = 0.10
REPLACE_P = 0.10

MlmAction = str | tuple[str, str]  # "keep" | "mask" | ("replace", token)


@dataclass(frozen=True)
class MlmPlan:
    seed: int
    actions: tuple[MlmAction, ...]
    targets: tuple[tuple[int, str], ...]  # corrupted positions with originals
    fallback_positions: tuple[int, ...] = ()  # replace drawn with empty vocab

    def corrupted(self, tokens: list[str] | tuple[str, ...]) -> list[str]:
        """Apply the plan to the token sequence it was built for."""
        out = list(tokens)
        for i, action in enumerate(self.actions):
            if action == "mask":
                out[i] = MASK_TOKEN
            elif isinstance(action, tuple):
                out[i] = action[1]
        return out


def mlm_plan(tokens: list[str] | tuple[str, ...], seed: int,
             replacement_vocab: tuple[str, ...]) -> MlmPlan:
    """Independent per-token corruption: mask 10%, replace 10%, keep 80%.

    Deterministic for a given (tokens, seed, vocab).  A replacement is drawn
    uniformly from the vocabulary minus the original token; if that set is
    empty the action falls back to mask and the position is recorded.
    """
    if not tokens:
        raise ValueError("mlm_plan needs a non-empty token sequence")
    rng = random.Random(seed)
    actions: list[MlmAction] = []
    targets: list[tuple[int, str]] = []
    fallbacks: list[int] = []
    for i, token in enumerate(tokens):
        u = rng.random()
        if u < MASK_P:
            actions.append("mask")
            targets.append((i, token))
        elif u < MASK_P + REPLACE_P:
            candidates = [t for t in replacement_vocab if t != token]
            if candidates:
                actions.append(("replace", rng.choice(candidates)))
            else:
                actions.append("mask")
                fallbacks.append(i)
            targets.append((i, token))
        else:
            actions.append("keep")
    return MlmPlan(seed, tuple(actions), tuple(targets), tuple(fallbacks))


def num_count_target(quantities: list[NumberToken]) -> int:
    return len(quantities)


def nt_ground_targets(quantities: list[NumberToken]) -> list[int]:
    """1 where the quantity is non-integer by surface form."""
    return [int(number_type(q) is NumberType.NON_INTEGER) for q in quantities]


def at_pred_target(answer: ExactValue) -> int:
    """1 when the answer is non-integer.

    Uses the surface kind when the answer came from a recognized surface;
    values without a surface (synthetic/derived) are typed by value.
    """
    if answer.kind is not None:
        return int(answer.kind is not NumberKind.INTEGER)
    return int(not answer.is_integral())


def cat_comp_targets(nt_bits: list[int], answer_bit: int) -> list[int]:
    return [b ^ answer_bit for b in nt_bits]


def num_m_comp_targets(quantities: list[NumberToken],
                       answer: ExactValue) -> list[int]:
    """1 where the quantity is strictly greater than the answer."""
    return [int(compare_magnitude(q.value, answer) is Ordering.GREATER)
            for q in quantities]


def _placeholder_leaf_counts(tree: eq.EquationTree) -> dict[str, int]:
    counts: dict[str, int] = {}

    def walk(node: eq.EquationTree) -> None:
        if isinstance(node, eq.Op):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, eq.Placeholder):
            counts[node.name] = counts.get(node.name, 0) + 1

    walk(tree)
    return counts


def _pair_sets(tree: eq.EquationTree,
               mapped: MappedProblem) -> tuple[list[tuple[int, int]], int]:
    """Eligible (i, j) quantity index pairs plus the omitted-pair count.

    A pair is a candidate when both quantities appear as leaves; it is
    eligible when both appear exactly once (i < j by text position).
    """
    counts = _placeholder_leaf_counts(tree)
    present = [idx for idx, (name, _) in enumerate(mapped.table)
               if counts.get(name, 0) >= 1]
    once = {idx for idx, (name, _) in enumerate(mapped.table)
            if counts.get(name, 0) == 1}
    eligible: list[tuple[int, int]] = []
    omitted = 0
    for a in range(len(present)):
        for b in range(a + 1, len(present)):
            i, j = present[a], present[b]
            if i in once and j in once:
                eligible.append((i, j))
            else:
                omitted += 1
    return eligible, omitted


def o_pred_targets(tree: eq.EquationTree,
                   mapped: MappedProblem) -> list[tuple[int, int, str]]:
    """Operator at the lowest common ancestor, per eligible quantity pair."""
    pairs, _ = _pair_sets(tree, mapped)
    return [(i, j, eq.pair_operator(tree, eq.Placeholder(mapped.table[i][0]),
                                    eq.Placeholder(mapped.table[j][0])))
            for i, j in pairs]


def t_pred_targets(tree: eq.EquationTree,
                   mapped: MappedProblem) -> list[tuple[int, int, int]]:
    """Signed leaf-depth difference, per eligible quantity pair."""
    pairs, _ = _pair_sets(tree, mapped)
    return [(i, j, eq.tree_distance(tree, eq.Placeholder(mapped.table[i][0]),
                                    eq.Placeholder(mapped.table[j][0])))
            for i, j in pairs]


def omitted_pair_count(tree: eq.EquationTree, mapped: MappedProblem) -> int:
    return _pair_sets(tree, mapped)[1]


def quantity_tagging_targets(tree: eq.EquationTree,
                             mapped: MappedProblem) -> list[str | None] | None:
    """Per-quantity "+", "-" or None for additive-only solution trees.

    The sign flips each time the root path descends into the right child of
    a subtraction; quantities absent from the tree get None.  Returns None
    (labels absent) when the tree uses non-additive operators or a quantity
    occurs more than once.
    """
    ops: set[str] = set()

    def collect_ops(node: eq.EquationTree) -> None:
        if isinstance(node, eq.Op):
            ops.add(node.op)
            collect_ops(node.left)
            collect_ops(node.right)

    collect_ops(tree)
    if not ops <= {"+", "-"}:
        return None
    counts = _placeholder_leaf_counts(tree)
    if any(c > 1 for c in counts.values()):
        return None

    signs: dict[str, int] = {}

    def walk(node: eq.EquationTree, sign: int) -> None:
        if isinstance(node, eq.Op):
            walk(node.left, sign)
            walk(node.right, -sign if node.op == "-" else sign)
        elif isinstance(node, eq.Placeholder):
            signs[node.name] = sign

    walk(tree, 1)
    return [None if name not in signs else ("+" if signs[name] > 0 else "-")
            for name, _ in mapped.table]


@dataclass
class LabelBundle:
    record_id: str
    availability: tuple[str, ...]
    num_count: int
    nt_ground: list[int]
    at_pred: int | None = None
    cat_comp: list[int] | None = None
    num_m_comp: list[int] | None = None
    o_pred: list[tuple[int, int, str]] | None = None
    t_pred: list[tuple[int, int, int]] | None = None
    quantity_tags: list[str | None] | None = None
    omitted_pairs: int = 0
    mlm: MlmPlan | None = None

    def to_json_dict(self) -> dict:
        out: dict = {"id": self.record_id,
                     "availability": list(self.availability),
                     "s1": self.num_count, "s2": self.nt_ground}
        if self.mlm is not None:
            out["mlm"] = {
                "seed": self.mlm.seed,
                "actions": [a if isinstance(a, str) else {"replace": a[1]}
                            for a in self.mlm.actions],
                "targets": [[i, tok] for i, tok in self.mlm.targets],
            }
            if self.mlm.fallback_positions:
                out["mlm"]["fallbacks"] = list(self.mlm.fallback_positions)
        if "weak" in self.availability:
            out["w1"] = self.at_pred
            out["w2"] = self.cat_comp
            out["w3"] = self.num_m_comp
        if "full" in self.availability:
            out["f1"] = [{"i": i, "j": j, "op": op}
                         for i, j, op in self.o_pred]
            out["f2"] = [{"i": i, "j": j, "d": d} for i, j, d in self.t_pred]
            out["omitted_pairs"] = self.omitted_pairs
            if self.quantity_tags is not None:
                out["qt"] = self.quantity_tags
        return out


def _assemble(record_id: str, mlm_tokens: tuple[str, ...],
              quantities: list[NumberToken],
              mapped: MappedProblem | None,
              tree: eq.EquationTree | None,
              answer: ExactValue | None,
              mlm_seed: int | None,
              replacement_vocab: tuple[str, ...]) -> LabelBundle:
    nt = nt_ground_targets(quantities)
    availability = ["self"]
    bundle = LabelBundle(record_id, (), num_count_target(quantities), nt)
    if mlm_seed is not None:
        bundle.mlm = mlm_plan(mlm_tokens, mlm_seed, replacement_vocab)
    if answer is not None:
        availability.append("weak")
        bundle.at_pred = at_pred_target(answer)
        bundle.cat_comp = cat_comp_targets(nt, bundle.at_pred)
        bundle.num_m_comp = num_m_comp_targets(quantities, answer)
    if tree is not None and mapped is not None:
        availability.append("full")
        bundle.o_pred = o_pred_targets(tree, mapped)
        bundle.t_pred = t_pred_targets(tree, mapped)
        bundle.omitted_pairs = omitted_pair_count(tree, mapped)
        bundle.quantity_tags = quantity_tagging_targets(tree, mapped)
    bundle.availability = tuple(availability)
    return bundle


def emit_label_bundle(record: MwpRecord, mapped: MappedProblem,
                      tree: eq.EquationTree | None = None,
                      answer: ExactValue | None = None,
                      mlm_seed: int | None = None,
                      replacement_vocab: tuple[str, ...] = ()) -> LabelBundle:
    """Assemble targets at the maximal supervision level the inputs allow.

    ``tree`` must already be resolved onto the mapping table and be
    answer-consistent; pass None otherwise.
    """
    quantities = [qt for _, qt in mapped.table]
    return _assemble(record.id, mapped.tokens, quantities, mapped, tree,
                     answer, mlm_seed, replacement_vocab)


def record_seed(seed: int, record_id: str) -> int:
    """Stable per-record 64-bit sub-seed, independent of record order."""
    digest = hashlib.blake2b(f"{seed}\x1f{record_id}".encode("utf-8"),
                             digest_size=8).digest()
    return int.from_bytes(digest, "big")


@dataclass
class RecordLabels:
    """Per-record labeling outcome, including why levels were skipped."""

    bundle: LabelBundle
    mapped: MappedProblem | None
    tree: eq.EquationTree | None
    skip_reasons: dict[str, str] = field(default_factory=dict)


def build_bundle(record: MwpRecord, k: int = DEFAULT_K,
                 vocab: Vocab | None = None, seed: int | None = None,
                 replacement_vocab: tuple[str, ...] = (),
                 tolerance: float = 1e-4) -> RecordLabels:
    """End-to-end labeling for one record with graceful degradation."""
    vocab = vocab or make_vocab(k)
    tokens = tokenize_text(record.text)
    quantities = recognize_numbers(tokens)
    answer = _parsed_answer(record)
    mlm_seed = record_seed(seed, record.id) if seed is not None else None
    skip: dict[str, str] = {}
    if record.answer is not None and answer is None:
        skip["weak"] = f"unparseable answer: {record.answer!r}"

    try:
        mapped = map_numbers(tokens, quantities, k)
    except TooManyQuantities as exc:
        skip["full"] = str(exc)
        bundle = _assemble(record.id, tuple(tokens), quantities, None, None,
                           answer, mlm_seed, replacement_vocab)
        return RecordLabels(bundle, None, None, skip)

    tree = None
    if record.equation is not None:
        try:
            resolved = resolve_equation_numbers(
                eq.parse_equation(record.equation), mapped, vocab)
            bindings = {name: qt.value for name, qt in mapped.table}
            if answer is not None and not eq.check_answer(
                    resolved, bindings, answer, tolerance):
                skip["full"] = "equation disagrees with the answer"
            else:
                tree = resolved
        except (eq.EquationError, ExternalConstant) as exc:
            skip["full"] = str(exc)
    bundle = _assemble(record.id, mapped.tokens, quantities, mapped, tree,
                       answer, mlm_seed, replacement_vocab)
    return RecordLabels(bundle, mapped, tree, skip)
