from .gradcheck import finite_difference_check
from .tensor import (
    ACTIVATIONS,
    LOG_FLOOR,
    OpKind,
    Tensor,
    add,
    apply,
    as_tensor,
    backward,
    dropout,
    guarded_log,
    log,
    matmul,
    mul,
    reduce_mean,
    reduce_sum,
    relu,
    scale,
    softmax_rows,
    sub,
    tanh,
    zero_grads,
)

__all__ = [
    "ACTIVATIONS",
    "LOG_FLOOR",
    "OpKind",
    "Tensor",
    "add",
    "apply",
    "as_tensor",
    "backward",
    "dropout",
    "finite_difference_check",
    "guarded_log",
    "log",
    "matmul",
    "mul",
    "reduce_mean",
    "reduce_sum",
    "relu",
    "scale",
    "softmax_rows",
    "sub",
    "tanh",
    "zero_grads",
]
