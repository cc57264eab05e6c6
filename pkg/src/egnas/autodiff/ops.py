"""Differentiable operations over 2-D tensors.

Every op returns a new Tensor and, when an input requires gradients, records a
backward rule mapping the output gradient to one gradient per input.
"""

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from ..exceptions import IndexOutOfRangeError, ShapeError
from .tensor import Tensor

BINARY_MODES = ("add", "sub", "mul")
UNARY_MODES = ("relu", "sigmoid", "tanh")
AGGREGATE_MODES = ("sum", "mean", "max")


def constant(value: float, rows: int, cols: int) -> Tensor:
    """Tensor filled with ``value`` that never records gradients."""
    return Tensor(np.full((rows, cols), value, dtype=np.float64))


def zeros(rows: int, cols: int) -> Tensor:
    return constant(0.0, rows, cols)


def _reduce_broadcast(grad: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Sum a gradient back down to the shape of a broadcast operand."""
    if grad.shape == shape:
        return grad
    if shape[0] == 1:
        grad = grad.sum(axis=0, keepdims=True)
    if shape[1] == 1 and grad.shape[1] != 1:
        grad = grad.sum(axis=1, keepdims=True)
    return grad


def _check_broadcast(a: Tensor, b: Tensor, mode: str) -> None:
    if a.shape == b.shape:
        return
    if b.rows == 1 and b.cols == a.cols:
        return
    if b.shape == (1, 1):
        return
    raise ShapeError(f"Cannot apply '{mode}' to shapes {a.shape} and {b.shape}")


def elementwise(a: Tensor, b: Tensor | None = None, mode: str = "add") -> Tensor:
    """Apply an elementwise mode.

    Binary modes (add, sub, mul) need ``b`` with the same shape as ``a``, a
    single row of matching width, or a 1x1 scalar; unary modes (relu, sigmoid,
    tanh) ignore ``b``.

    Raises:
        ShapeError: If the operand shapes are incompatible
        ValueError: If ``mode`` is unknown
    """
    if mode in BINARY_MODES:
        if b is None:
            raise ShapeError(f"Mode '{mode}' needs a second operand")
        _check_broadcast(a, b, mode)
        x, y = a.data, b.data
        if mode == "add":
            out = x + y

            def backward(g):
                return g, _reduce_broadcast(g, b.shape)

        elif mode == "sub":
            out = x - y

            def backward(g):
                return g, _reduce_broadcast(-g, b.shape)

        else:
            out = x * y

            def backward(g):
                return g * y, _reduce_broadcast(g * x, b.shape)

        return Tensor.from_op(out, (a, b), backward, mode)

    if mode not in UNARY_MODES:
        raise ValueError(f"Unknown elementwise mode: {mode}")

    x = a.data
    if mode == "relu":
        out = np.maximum(x, 0.0)

        def backward(g):
            return (g * (x > 0),)

    elif mode == "sigmoid":
        out = 0.5 * (1.0 + np.tanh(0.5 * x))

        def backward(g):
            return (g * out * (1.0 - out),)

    else:
        out = np.tanh(x)

        def backward(g):
            return (g * (1.0 - out * out),)

    return Tensor.from_op(out, (a,), backward, mode)


def relu(a: Tensor) -> Tensor:
    return elementwise(a, mode="relu")


def sigmoid(a: Tensor) -> Tensor:
    return elementwise(a, mode="sigmoid")


def tanh(a: Tensor) -> Tensor:
    return elementwise(a, mode="tanh")


def scale(a: Tensor, factor: float) -> Tensor:
    """Multiply by a plain constant."""
    return Tensor.from_op(a.data * factor, (a,), lambda g: (g * factor,), "scale")


def one_minus(a: Tensor) -> Tensor:
    return Tensor.from_op(1.0 - a.data, (a,), lambda g: (-g,), "one_minus")


def absolute(a: Tensor) -> Tensor:
    x = a.data
    return Tensor.from_op(np.abs(x), (a,), lambda g: (g * np.sign(x),), "abs")


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product ``a @ b``.

    Raises:
        ShapeError: If ``a.cols != b.rows``
    """
    if a.cols != b.rows:
        raise ShapeError(f"matmul inner dimensions differ: {a.shape} @ {b.shape}")
    x, y = a.data, b.data

    def backward(g):
        return g @ y.T, x.T @ g

    return Tensor.from_op(x @ y, (a, b), backward, "matmul")


def concat_cols(a: Tensor, b: Tensor) -> Tensor:
    """Column-wise concatenation ``[a || b]``.

    Raises:
        ShapeError: If the row counts differ
    """
    if a.rows != b.rows:
        raise ShapeError(f"concat_cols row counts differ: {a.rows} vs {b.rows}")
    split = a.cols

    def backward(g):
        return g[:, :split], g[:, split:]

    return Tensor.from_op(np.concatenate([a.data, b.data], axis=1), (a, b), backward, "concat")


def concat_many(tensors: Sequence[Tensor]) -> Tensor:
    out = tensors[0]
    for tensor in tensors[1:]:
        out = concat_cols(out, tensor)
    return out


def slice_cols(a: Tensor, start: int, stop: int) -> Tensor:
    """Columns ``start:stop`` of ``a``."""
    if not 0 <= start <= stop <= a.cols:
        raise ShapeError(f"Column slice {start}:{stop} out of range for width {a.cols}")

    def backward(g):
        full = np.zeros_like(a.data)
        full[:, start:stop] = g
        return (full,)

    return Tensor.from_op(a.data[:, start:stop].copy(), (a,), backward, "slice_cols")


def _as_index(index: Sequence[int] | np.ndarray, bound: int, what: str) -> np.ndarray:
    idx = np.asarray(index, dtype=np.int64).reshape(-1)
    if idx.size and (idx.min() < 0 or idx.max() >= bound):
        raise IndexOutOfRangeError(f"{what} index out of range [0, {bound})")
    return idx


def gather_rows(src: Tensor, index: Sequence[int] | np.ndarray) -> Tensor:
    """Rows of ``src`` selected by ``index``; duplicates are allowed.

    Raises:
        IndexOutOfRangeError: If any index is not a valid row of ``src``
    """
    idx = _as_index(index, src.rows, "gather_rows")

    def backward(g):
        grad = np.zeros_like(src.data)
        np.add.at(grad, idx, g)
        return (grad,)

    return Tensor.from_op(src.data[idx], (src,), backward, "gather_rows")


def segment_aggregate(
    values: Tensor,
    segment_of_row: Sequence[int] | np.ndarray,
    num_segments: int,
    mode: str = "sum",
) -> Tensor:
    """Reduce the rows of ``values`` that share a segment id.

    Empty segments produce an all-zero row in every mode. In ``max`` mode the
    gradient of each output entry flows to the first row (in row order) that
    attains the maximum.

    Raises:
        ShapeError: If ``segment_of_row`` length differs from ``values.rows``
        IndexOutOfRangeError: If a segment id is not below ``num_segments``
    """
    if mode not in AGGREGATE_MODES:
        raise ValueError(f"Unknown aggregation mode: {mode}")
    seg = _as_index(segment_of_row, num_segments, "segment")
    if seg.size != values.rows:
        raise ShapeError(f"{seg.size} segment ids given for {values.rows} rows")
    x = values.data
    cols = values.cols
    counts = np.bincount(seg, minlength=num_segments).astype(np.float64)

    if mode in ("sum", "mean"):
        out = np.zeros((num_segments, cols))
        np.add.at(out, seg, x)
        if mode == "mean":
            denom = np.maximum(counts, 1.0)[:, None]
            out /= denom

            def backward(g):
                return ((g / denom)[seg],)

        else:

            def backward(g):
                return (g[seg],)

        return Tensor.from_op(out, (values,), backward, f"segment_{mode}")

    out = np.full((num_segments, cols), -np.inf)
    np.maximum.at(out, seg, x)
    out[counts == 0] = 0.0
    rows = x.shape[0]
    attains = x == out[seg]
    candidates = np.where(attains, np.arange(rows)[:, None], rows)
    winner = np.full((num_segments, cols), rows, dtype=np.int64)
    np.minimum.at(winner, seg, candidates)

    def backward(g):
        grad = np.zeros_like(x)
        valid = winner < rows
        seg_ids, col_ids = np.nonzero(valid)
        np.add.at(grad, (winner[seg_ids, col_ids], col_ids), g[seg_ids, col_ids])
        return (grad,)

    return Tensor.from_op(out, (values,), backward, "segment_max")


def softmax_rows(a: Tensor) -> Tensor:
    """Row-wise softmax, stabilized by subtracting each row's maximum."""
    shifted = a.data - a.data.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    out = exp / exp.sum(axis=1, keepdims=True)

    def backward(g):
        return (out * (g - (g * out).sum(axis=1, keepdims=True)),)

    return Tensor.from_op(out, (a,), backward, "softmax")


def sum_all(a: Tensor) -> Tensor:
    return Tensor.from_op(
        np.array([[a.data.sum()]]), (a,), lambda g: (np.full_like(a.data, g[0, 0]),), "sum"
    )


def mean_all(a: Tensor) -> Tensor:
    n = max(a.data.size, 1)
    return Tensor.from_op(
        np.array([[a.data.sum() / n]]),
        (a,),
        lambda g: (np.full_like(a.data, g[0, 0] / n),),
        "mean",
    )


def cross_entropy(logits: Tensor, targets: Sequence[int] | np.ndarray) -> Tensor:
    """Mean softmax cross-entropy of integer class ``targets`` against ``logits`` rows."""
    y = _as_index(targets, logits.cols, "class")
    if y.size != logits.rows:
        raise ShapeError(f"{y.size} targets given for {logits.rows} rows")
    n = max(logits.rows, 1)
    shifted = logits.data - logits.data.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    log_probs = shifted - log_norm
    loss = -log_probs[np.arange(logits.rows), y].sum() / n

    def backward(g):
        grad = np.exp(log_probs)
        grad[np.arange(logits.rows), y] -= 1.0
        return (grad * (g[0, 0] / n),)

    return Tensor.from_op(np.array([[loss]]), (logits,), backward, "cross_entropy")


def dropout(a: Tensor, rate: float, rng: np.random.Generator, training: bool) -> Tensor:
    """Inverted dropout; identity when not training or when ``rate`` is 0."""
    if not training or rate <= 0.0:
        return a
    keep = (rng.random(a.shape) >= rate) / (1.0 - rate)
    return Tensor.from_op(a.data * keep, (a,), lambda g: (g * keep,), "dropout")


@dataclass
class BatchNormState:
    """Learnable scale/shift plus running statistics of one batch-norm layer."""

    width: int
    momentum: float = 0.1
    eps: float = 1e-5
    scale: Tensor = field(init=False)
    shift: Tensor = field(init=False)
    running_mean: np.ndarray = field(init=False)
    running_var: np.ndarray = field(init=False)

    def __post_init__(self):
        self.scale = Tensor(np.ones((1, self.width)), requires_grad=True)
        self.shift = Tensor(np.zeros((1, self.width)), requires_grad=True)
        self.running_mean = np.zeros(self.width)
        self.running_var = np.ones(self.width)


def batch_norm(x: Tensor, state: BatchNormState, training: bool) -> Tensor:
    """Normalize each column, then apply the learnable scale and shift.

    Training mode uses the batch statistics and updates the running ones;
    eval mode uses the running statistics. A zero-row batch passes through
    without touching the statistics.

    Raises:
        ShapeError: If ``x.cols`` differs from the state's width
    """
    if x.cols != state.width:
        raise ShapeError(f"batch_norm expects width {state.width}, got {x.cols}")
    gamma, beta = state.scale, state.shift
    n = x.rows

    if training and n > 0:
        mean = x.data.mean(axis=0)
        var = x.data.var(axis=0)
        unbiased = var * n / (n - 1) if n > 1 else var
        state.running_mean = (1 - state.momentum) * state.running_mean + state.momentum * mean
        state.running_var = (1 - state.momentum) * state.running_var + state.momentum * unbiased
        inv_std = 1.0 / np.sqrt(var + state.eps)
        x_hat = (x.data - mean) * inv_std
        out = x_hat * gamma.data + beta.data

        def backward(g):
            d_hat = g * gamma.data
            dx = (inv_std / n) * (
                n * d_hat - d_hat.sum(axis=0) - x_hat * (d_hat * x_hat).sum(axis=0)
            )
            return dx, (g * x_hat).sum(axis=0, keepdims=True), g.sum(axis=0, keepdims=True)

        return Tensor.from_op(out, (x, gamma, beta), backward, "batch_norm")

    inv_std = 1.0 / np.sqrt(state.running_var + state.eps)
    x_hat = (x.data - state.running_mean) * inv_std
    out = x_hat * gamma.data + beta.data

    def backward(g):
        return (
            g * gamma.data * inv_std,
            (g * x_hat).sum(axis=0, keepdims=True),
            g.sum(axis=0, keepdims=True),
        )

    return Tensor.from_op(out, (x, gamma, beta), backward, "batch_norm_eval")
