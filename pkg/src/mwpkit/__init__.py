"""mwpkit: corpus engineering for math word problems.

Filtering raw records into clean / unsolvable splits, exact number
recognition and mapping, equation-tree parsing and evaluation, supervision
targets for numeracy pre-training objectives, and gradient-checked
reference loss heads.
"""

from .numeracy import (ExactValue, NumberKind, NumberToken, NumberType,
                       Ordering, compare_magnitude, number_type, parse_answer,
                       recognize_numbers, render, tokenize_text)
from .equation import (EquationTree, Op, Placeholder, Constant, Literal,
                       check_answer, evaluate, leaf_depths, operator_count,
                       pair_operator, parse, parse_equation, parse_prefix,
                       serialize, to_string, tokenize_equation, tree_distance)
from .mapping import (MappedProblem, Vocab, make_vocab, map_numbers,
                      resolve_equation_numbers)
from .corpus import (Disposition, FilterLimits, FilterReport, FilterVerdict,
                     MwpRecord, Origin, Rule, classify, dedup_key, ingest,
                     partition)
from .labels import (LabelBundle, MlmPlan, build_bundle, emit_label_bundle,
                     mlm_plan, quantity_tagging_targets)
from .heads import (EmbeddingMatrix, GradCheckReport, HeadParams,
                    LossGradients, ffn_forward, grad_check, loss_backward,
                    loss_forward)

__version__ = "0.1.0"
