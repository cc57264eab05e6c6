"""Reverse-mode automatic differentiation over dense 2-D tensors."""

from .module import BatchNorm, Dropout, Linear, Module
from .ops import (
    BatchNormState,
    batch_norm,
    concat_cols,
    elementwise,
    gather_rows,
    matmul,
    segment_aggregate,
    softmax_rows,
)
from .tensor import Tape, Tensor, backward, debug_checks, set_debug
