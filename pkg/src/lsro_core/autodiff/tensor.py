"""
Reverse-mode automatic differentiation over numpy float64 arrays.

A ``Tensor`` is a node of a dynamically built computation graph. Every
differentiable operation is a ``Function`` subclass registered under an
``OpKind``; ``apply`` runs the forward pass and records the node, ``backward``
walks the graph once in reverse topological order.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from enum import Enum
from typing import Any, ClassVar

import numpy as np

from lsro_core.errors import LabError, LabErrorCode, invalid, shape_error

LOG_FLOOR = 1e-12

_node_ids = itertools.count()


class OpKind(str, Enum):
    MATMUL = "matmul"
    ADD = "add"
    SUB = "sub"
    SCALE = "scale"
    RELU = "relu"
    TANH = "tanh"
    LOG = "log"
    SOFTMAX_ROWS = "softmax_rows"
    SUM = "sum"
    MEAN = "mean"
    ELEMENTWISE_MUL = "elementwise_mul"
    DROPOUT = "dropout"


class Tensor:
    """n-dimensional float64 value with an optional gradient."""

    def __init__(self, data: Any, requires_grad: bool = False, name: str | None = None):
        arr = np.array(data, dtype=np.float64)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        if any(d <= 0 for d in arr.shape):
            raise invalid(f"tensor dimensions must be positive, got {arr.shape}")
        self.data: np.ndarray = arr
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self.name = name
        self.node_id = next(_node_ids)
        self._fn: Function | None = None
        self._parents: tuple[Tensor, ...] = ()

    @classmethod
    def _from_op(cls, data: np.ndarray, fn: Function, parents: tuple[Tensor, ...]) -> Tensor:
        out = cls.__new__(cls)
        out.data = data
        out.grad = None
        out.requires_grad = any(p.requires_grad for p in parents)
        out.name = None
        out.node_id = next(_node_ids)
        out._fn = fn if out.requires_grad else None
        out._parents = parents if out.requires_grad else ()
        return out

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def op(self) -> OpKind | None:
        return self._fn.kind if self._fn is not None else None

    @property
    def is_leaf(self) -> bool:
        return self._fn is None

    def item(self) -> float:
        if self.data.size != 1:
            raise invalid(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        backward(self)

    def __matmul__(self, other: Tensor) -> Tensor:
        return apply(OpKind.MATMUL, self, other)

    def __add__(self, other: Tensor) -> Tensor:
        return apply(OpKind.ADD, self, other)

    def __sub__(self, other: Tensor) -> Tensor:
        return apply(OpKind.SUB, self, other)

    def __mul__(self, other: Tensor | float) -> Tensor:
        if isinstance(other, Tensor):
            return apply(OpKind.ELEMENTWISE_MUL, self, other)
        return apply(OpKind.SCALE, self, factor=float(other))

    __rmul__ = __mul__

    def __neg__(self) -> Tensor:
        return apply(OpKind.SCALE, self, factor=-1.0)

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, node={self.node_id}{label}, requires_grad={self.requires_grad})"


class Function(ABC):
    """Base class for differentiable operations."""

    kind: ClassVar[OpKind]
    arity: ClassVar[int] = 1

    def __init__(self, **params: Any):
        self.params = params

    def check(self, *arrays: np.ndarray) -> None:  # noqa: B027
        """Validate input shapes; raise LabError on mismatch."""

    @abstractmethod
    def forward(self, *arrays: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def backward(self, grad: np.ndarray, *arrays: np.ndarray) -> tuple[np.ndarray | None, ...]:
        """Gradients with respect to each input given dL/d(output)."""


_OPS: dict[OpKind, type[Function]] = {}


def register(cls: type[Function]) -> type[Function]:
    _OPS[cls.kind] = cls
    return cls


def _require_same_shape(op: OpKind, a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise shape_error(op.value, a.shape, b.shape)


def _require_2d(op: OpKind, *arrays: np.ndarray) -> None:
    for arr in arrays:
        if arr.ndim != 2:
            raise shape_error(op.value, *(a.shape for a in arrays))


@register
class MatMul(Function):
    kind = OpKind.MATMUL
    arity = 2

    def check(self, a: np.ndarray, b: np.ndarray) -> None:
        _require_2d(self.kind, a, b)
        if a.shape[1] != b.shape[0]:
            raise shape_error(self.kind.value, a.shape, b.shape)

    def forward(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return a @ b

    def backward(self, grad, a, b):
        return grad @ b.T, a.T @ grad


@register
class Add(Function):
    kind = OpKind.ADD
    arity = 2

    def check(self, a, b):
        _require_same_shape(self.kind, a, b)

    def forward(self, a, b):
        return a + b

    def backward(self, grad, a, b):
        return grad, grad


@register
class Sub(Function):
    kind = OpKind.SUB
    arity = 2

    def check(self, a, b):
        _require_same_shape(self.kind, a, b)

    def forward(self, a, b):
        return a - b

    def backward(self, grad, a, b):
        return grad, -grad


@register
class ElementwiseMul(Function):
    kind = OpKind.ELEMENTWISE_MUL
    arity = 2

    def check(self, a, b):
        _require_same_shape(self.kind, a, b)

    def forward(self, a, b):
        return a * b

    def backward(self, grad, a, b):
        return grad * b, grad * a


@register
class Scale(Function):
    kind = OpKind.SCALE

    def forward(self, x):
        return x * float(self.params["factor"])

    def backward(self, grad, x):
        return (grad * float(self.params["factor"]),)


@register
class Relu(Function):
    kind = OpKind.RELU

    def forward(self, x):
        return np.maximum(x, 0.0)

    def backward(self, grad, x):
        return (grad * (x > 0.0),)


@register
class Tanh(Function):
    kind = OpKind.TANH

    def forward(self, x):
        self._out = np.tanh(x)
        return self._out

    def backward(self, grad, x):
        return (grad * (1.0 - self._out**2),)


@register
class Log(Function):
    """Natural log; with ``floor`` set it computes log(max(x, floor))."""

    kind = OpKind.LOG

    def check(self, x):
        floor = self.params.get("floor")
        if floor is None and np.any(x <= 0.0):
            bad = int(np.argmax(x.reshape(-1) <= 0.0))
            raise LabError(
                LabErrorCode.DOMAIN_ERROR,
                f"log: non-positive entry {x.reshape(-1)[bad]!r} at flat index {bad}; use a guarded log",
                details_safe={"op": self.kind.value, "index": bad},
            )

    def forward(self, x):
        floor = self.params.get("floor")
        if floor is None:
            return np.log(x)
        return np.log(np.maximum(x, float(floor)))

    def backward(self, grad, x):
        floor = self.params.get("floor")
        if floor is None:
            return (grad / x,)
        active = x > float(floor)
        safe = np.where(active, x, 1.0)
        return (np.where(active, grad / safe, 0.0),)


@register
class SoftmaxRows(Function):
    kind = OpKind.SOFTMAX_ROWS

    def check(self, x):
        _require_2d(self.kind, x)

    def forward(self, x):
        shifted = x - x.max(axis=1, keepdims=True)
        e = np.exp(shifted)
        self._out = e / e.sum(axis=1, keepdims=True)
        return self._out

    def backward(self, grad, x):
        p = self._out
        return (p * (grad - (grad * p).sum(axis=1, keepdims=True)),)


@register
class Sum(Function):
    kind = OpKind.SUM

    def forward(self, x):
        return np.array([x.sum()])

    def backward(self, grad, x):
        return (np.full_like(x, grad.reshape(-1)[0]),)


@register
class Mean(Function):
    kind = OpKind.MEAN

    def forward(self, x):
        return np.array([x.mean()])

    def backward(self, grad, x):
        return (np.full_like(x, grad.reshape(-1)[0] / x.size),)


@register
class Dropout(Function):
    """Inverted dropout; identity unless ``train`` is set and ``rate`` > 0."""

    kind = OpKind.DROPOUT

    def check(self, x):
        rate = float(self.params.get("rate", 0.0))
        if not 0.0 <= rate < 1.0:
            raise invalid(f"dropout: rate must lie in [0, 1), got {rate}")
        if self.params.get("train") and rate > 0.0 and self.params.get("rng") is None:
            raise invalid("dropout: train mode needs the experiment generator (rng=...)")

    def forward(self, x):
        rate = float(self.params.get("rate", 0.0))
        if not self.params.get("train") or rate == 0.0:
            self._mask = None
            return x.copy()
        rng: np.random.Generator = self.params["rng"]
        self._mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
        return x * self._mask

    def backward(self, grad, x):
        if self._mask is None:
            return (grad,)
        return (grad * self._mask,)


def as_tensor(value: Tensor | Any) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def apply(op: OpKind | str, *inputs: Tensor | Any, **params: Any) -> Tensor:
    """Run ``op`` forward on ``inputs`` and record the result in the graph."""
    kind = OpKind(op)
    fn_cls = _OPS[kind]
    if len(inputs) != fn_cls.arity:
        raise invalid(f"{kind.value}: expected {fn_cls.arity} input(s), got {len(inputs)}")
    tensors = tuple(as_tensor(t) for t in inputs)
    fn = fn_cls(**params)
    arrays = tuple(t.data for t in tensors)
    fn.check(*arrays)
    return Tensor._from_op(fn.forward(*arrays), fn, tensors)


def _topological_order(root: Tensor) -> list[Tensor]:
    order: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if node.node_id in seen:
            continue
        seen.add(node.node_id)
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and parent.node_id not in seen:
                stack.append((parent, False))
    return order


def backward(loss: Tensor) -> None:
    """
    Accumulate d(loss)/d(leaf) into ``.grad`` of every leaf that requires grad.

    Upstream gradients live in a local table, so running backward twice on the
    same graph adds exactly the same amount twice.
    """
    if loss.data.size != 1:
        raise LabError(
            LabErrorCode.SHAPE_MISMATCH,
            f"backward: loss must be a scalar, got shape {loss.shape}",
        )
    if not loss.requires_grad:
        return

    upstream: dict[int, np.ndarray] = {loss.node_id: np.ones_like(loss.data)}
    for node in reversed(_topological_order(loss)):
        grad = upstream.pop(node.node_id, None)
        if grad is None:
            continue
        if node._fn is None:
            node.grad = grad.copy() if node.grad is None else node.grad + grad
            continue
        parent_grads = node._fn.backward(grad, *(p.data for p in node._parents))
        for parent, pg in zip(node._parents, parent_grads, strict=True):
            if pg is None or not parent.requires_grad:
                continue
            prev = upstream.get(parent.node_id)
            upstream[parent.node_id] = pg if prev is None else prev + pg


# Functional spellings used by the networks and losses.


def matmul(a: Tensor, b: Tensor) -> Tensor:
    return apply(OpKind.MATMUL, a, b)


def add(a: Tensor, b: Tensor) -> Tensor:
    return apply(OpKind.ADD, a, b)


def sub(a: Tensor, b: Tensor) -> Tensor:
    return apply(OpKind.SUB, a, b)


def scale(x: Tensor, factor: float) -> Tensor:
    return apply(OpKind.SCALE, x, factor=factor)


def relu(x: Tensor) -> Tensor:
    return apply(OpKind.RELU, x)


def tanh(x: Tensor) -> Tensor:
    return apply(OpKind.TANH, x)


def log(x: Tensor, floor: float | None = None) -> Tensor:
    return apply(OpKind.LOG, x, floor=floor)


def guarded_log(x: Tensor) -> Tensor:
    return apply(OpKind.LOG, x, floor=LOG_FLOOR)


def softmax_rows(x: Tensor) -> Tensor:
    return apply(OpKind.SOFTMAX_ROWS, x)


def reduce_sum(x: Tensor) -> Tensor:
    return apply(OpKind.SUM, x)


def reduce_mean(x: Tensor) -> Tensor:
    return apply(OpKind.MEAN, x)


def mul(a: Tensor, b: Tensor) -> Tensor:
    return apply(OpKind.ELEMENTWISE_MUL, a, b)


def dropout(x: Tensor, rate: float, *, train: bool, rng: np.random.Generator | None = None) -> Tensor:
    return apply(OpKind.DROPOUT, x, rate=rate, train=train, rng=rng)


def zero_grads(params: Sequence[Tensor]) -> None:
    for p in params:
        p.zero_grad()


ACTIVATIONS: dict[str, Callable[[Tensor], Tensor]] = {"relu": relu, "tanh": tanh}
