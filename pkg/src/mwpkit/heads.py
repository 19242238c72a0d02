"""Reference prediction heads and losses with gradient verification.

Each head is a two-layer feed-forward block with one ReLU:
out = W2 @ relu(W1 @ x + b1) + b2.  Seven per-record losses are supported:

    num_count    MSE on the mean embedding, target = quantity count
    nt_ground    2-way CE per quantity embedding
    at_pred      2-way CE on the mean embedding
    cat_comp     2-way CE per quantity embedding
    num_m_comp   2-way CE per quantity embedding
    o_pred       5-way CE per concatenated quantity-pair embedding
    t_pred       MSE per concatenated quantity-pair embedding

Classification heads use softmax cross-entropy over raw logits (binary
tasks use 2 logits); per-instance losses are summed in ascending instance
order so results are bit-reproducible.  Everything is float64.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPERATOR_CLASSES = ("+", "-", "*", "/", "^")

# task -> (input source, output width, loss kind)
TASK_SPECS: dict[str, tuple[str, int, str]] = {
    "num_count": ("mean", 1, "mse"),
    "nt_ground": ("quantity", 2, "ce"),
    "at_pred": ("mean", 2, "ce"),
    "cat_comp": ("quantity", 2, "ce"),
    "num_m_comp": ("quantity", 2, "ce"),
    "o_pred": ("pair", 5, "ce"),
    "t_pred": ("pair", 1, "mse"),
}

TASKS = tuple(TASK_SPECS)


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddingMatrix:
    """Per-token embedding rows (m, h) with their mean vector."""

    rows: np.ndarray
    mean: np.ndarray

    def __post_init__(self):
        if self.rows.ndim != 2 or self.rows.shape[0] == 0:
            raise DimensionMismatch(
                "embedding rows must be a non-empty (m, h) matrix")
        recomputed = self.rows.mean(axis=0)
        scale = max(1.0, float(np.abs(self.rows).max()))
        if not np.allclose(self.mean, recomputed, rtol=0.0,
                           atol=1e-12 * scale):
            raise DimensionMismatch("stored mean disagrees with the rows")

    @classmethod
    def from_rows(cls, rows: np.ndarray) -> "EmbeddingMatrix":
        rows = np.asarray(rows, dtype=np.float64)
        return cls(rows, rows.mean(axis=0))


@dataclass(frozen=True)
class HeadParams:
    w1: np.ndarray  # (h_in, h_hidden)
    b1: np.ndarray  # (h_hidden,)
    w2: np.ndarray  # (h_hidden, h_out)
    b2: np.ndarray  # (h_out,)

    def __post_init__(self):
        if (self.w1.ndim != 2 or self.w2.ndim != 2
                or self.w1.shape[1] != self.b1.shape[0]
                or self.w2.shape[0] != self.w1.shape[1]
                or self.w2.shape[1] != self.b2.shape[0]):
            raise DimensionMismatch("inconsistent head parameter shapes")

    @property
    def h_in(self) -> int:
        return self.w1.shape[0]

    @property
    def h_out(self) -> int:
        return self.w2.shape[1]

    def to_json_dict(self) -> dict:
        """Nested row-major lists, loadable by ``from_json_dict``."""
        return {"w1": self.w1.tolist(), "b1": self.b1.tolist(),
                "w2": self.w2.tolist(), "b2": self.b2.tolist()}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "HeadParams":
        return cls(np.asarray(obj["w1"], dtype=np.float64),
                   np.asarray(obj["b1"], dtype=np.float64),
                   np.asarray(obj["w2"], dtype=np.float64),
                   np.asarray(obj["b2"], dtype=np.float64))


def init_head_params(rng: np.random.Generator, h_in: int, h_hidden: int,
                     h_out: int, scale: float = 0.5) -> HeadParams:
    return HeadParams(
        w1=rng.normal(0.0, scale, (h_in, h_hidden)),
        b1=rng.normal(0.0, scale, h_hidden),
        w2=rng.normal(0.0, scale, (h_hidden, h_out)),
        b2=rng.normal(0.0, scale, h_out),
    )


def head_input_width(task: str, h: int) -> int:
    """h for single-embedding tasks, 2h for pair tasks."""
    return 2 * h if TASK_SPECS[task][0] == "pair" else h


def ffn_forward(params: HeadParams, x: np.ndarray) -> np.ndarray:
    """W2 @ relu(W1 @ x + b1) + b2 for one vector or a batch of rows."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.h_in:
        raise DimensionMismatch(
            f"input width {x.shape[-1]} != parameter width {params.h_in}")
    hidden = np.maximum(x @ params.w1 + params.b1, 0.0)
    return hidden @ params.w2 + params.b2


def task_instances(task: str, embeddings: EmbeddingMatrix,
                   quantity_positions: list[int] | None = None,
                   pairs: list[tuple[int, int]] | None = None) -> np.ndarray:
    """Stack the task's input rows in canonical (ascending index) order."""
    source = TASK_SPECS[task][0]
    if source == "mean":
        return embeddings.mean[None, :]
    if source == "quantity":
        if quantity_positions is None:
            raise ValueError(f"{task} needs quantity positions")
        rows = embeddings.rows[sorted(quantity_positions)]
        return rows
    if pairs is None:
        raise ValueError(f"{task} needs quantity-position pairs")
    ordered = sorted(pairs)
    if not ordered:
        return np.zeros((0, 2 * embeddings.rows.shape[1]))
    return np.concatenate(
        [embeddings.rows[[i for i, _ in ordered]],
         embeddings.rows[[j for _, j in ordered]]], axis=1)


def _check_targets(task: str, n: int, targets: np.ndarray) -> np.ndarray:
    kind = TASK_SPECS[task][2]
    targets = np.asarray(targets)
    if targets.shape != (n,):
        raise DimensionMismatch(
            f"{task}: expected {n} targets, got shape {targets.shape}")
    if kind == "ce":
        targets = targets.astype(np.int64)
        n_classes = TASK_SPECS[task][1]
        if n and (targets.min() < 0 or targets.max() >= n_classes):
            raise DimensionMismatch(f"{task}: class targets out of range")
        return targets
    return targets.astype(np.float64)


def _forward_parts(task: str, params: HeadParams, inputs: np.ndarray,
                   targets: np.ndarray):
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 2:
        raise DimensionMismatch("inputs must be a (n, h_in) matrix")
    if params.h_out != TASK_SPECS[task][1]:
        raise DimensionMismatch(
            f"{task}: head output width {params.h_out}, "
            f"expected {TASK_SPECS[task][1]}")
    targets = _check_targets(task, inputs.shape[0], targets)
    pre = inputs @ params.w1 + params.b1
    hidden = np.maximum(pre, 0.0)
    out = hidden @ params.w2 + params.b2
    return inputs, targets, pre, hidden, out


def loss_forward(task: str, params: HeadParams, inputs: np.ndarray,
                 targets: np.ndarray) -> float:
    """Summed per-instance loss; 0.0 for an empty instance set."""
    inputs, targets, _, _, out = _forward_parts(task, params, inputs, targets)
    if inputs.shape[0] == 0:
        return 0.0
    if TASK_SPECS[task][2] == "mse":
        return float(np.sum((out[:, 0] - targets) ** 2))
    # stable log-softmax cross-entropy
    shifted = out - out.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    picked = shifted[np.arange(out.shape[0]), targets]
    return float(np.sum(log_z - picked))


@dataclass(frozen=True)
class LossGradients:
    loss: float
    d_params: HeadParams
    d_inputs: np.ndarray


def loss_backward(task: str, params: HeadParams, inputs: np.ndarray,
                  targets: np.ndarray) -> LossGradients:
    """Analytic gradients of ``loss_forward`` for parameters and inputs."""
    inputs, targets, pre, hidden, out = _forward_parts(
        task, params, inputs, targets)
    n = inputs.shape[0]
    if n == 0:
        zero = HeadParams(np.zeros_like(params.w1), np.zeros_like(params.b1),
                          np.zeros_like(params.w2), np.zeros_like(params.b2))
        return LossGradients(0.0, zero, np.zeros_like(inputs))
    if TASK_SPECS[task][2] == "mse":
        diff = out[:, 0] - targets
        loss = float(np.sum(diff ** 2))
        d_out = np.zeros_like(out)
        d_out[:, 0] = 2.0 * diff
    else:
        shifted = out - out.max(axis=1, keepdims=True)
        exp = np.exp(shifted)
        softmax = exp / exp.sum(axis=1, keepdims=True)
        log_z = np.log(exp.sum(axis=1))
        picked = shifted[np.arange(n), targets]
        loss = float(np.sum(log_z - picked))
        d_out = softmax.copy()
        d_out[np.arange(n), targets] -= 1.0
    d_w2 = hidden.T @ d_out
    d_b2 = d_out.sum(axis=0)
    d_hidden = d_out @ params.w2.T
    d_pre = d_hidden * (pre > 0.0)  # ReLU subgradient at 0 is 0
    d_w1 = inputs.T @ d_pre
    d_b1 = d_pre.sum(axis=0)
    d_inputs = d_pre @ params.w1.T
    return LossGradients(loss, HeadParams(d_w1, d_b1, d_w2, d_b2), d_inputs)


@dataclass(frozen=True)
class GradCheckReport:
    task: str
    max_rel_err: float
    argmax_coord: str

    def to_json_dict(self) -> dict:
        return {"task": self.task, "max_rel_err": self.max_rel_err,
                "argmax_coord": self.argmax_coord}


def grad_check(task: str, params: HeadParams, inputs: np.ndarray,
               targets: np.ndarray, step: float = 1e-6) -> GradCheckReport:
    """Central-difference check of every parameter and input coordinate.

    Relative error per coordinate is |analytic - numeric| divided by
    max(1, |analytic|, |numeric|); the report carries the worst coordinate.
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    analytic = loss_backward(task, params, inputs, targets)
    arrays = {
        "w1": (params.w1.copy(), analytic.d_params.w1),
        "b1": (params.b1.copy(), analytic.d_params.b1),
        "w2": (params.w2.copy(), analytic.d_params.w2),
        "b2": (params.b2.copy(), analytic.d_params.b2),
        "inputs": (inputs.copy(), analytic.d_inputs),
    }

    def loss_with(name: str, values: np.ndarray) -> float:
        fields = {k: (values if k == name else v[0])
                  for k, v in arrays.items()}
        p = HeadParams(fields["w1"], fields["b1"], fields["w2"], fields["b2"])
        return loss_forward(task, p, fields["inputs"], targets)

    worst = 0.0
    worst_coord = "none"
    for name, (values, grad) in arrays.items():
        flat = values.reshape(-1)
        for idx in range(flat.size):
            original = flat[idx]
            flat[idx] = original + step
            up = loss_with(name, values)
            flat[idx] = original - step
            down = loss_with(name, values)
            flat[idx] = original
            numeric = (up - down) / (2.0 * step)
            a = float(grad.reshape(-1)[idx])
            err = abs(a - numeric) / max(1.0, abs(a), abs(numeric))
            if err > worst:
                worst = err
                coord = np.unravel_index(idx, values.shape)
                worst_coord = f"{name}{list(coord)}"
    return GradCheckReport(task, worst, worst_coord)
