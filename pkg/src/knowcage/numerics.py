"""Dense/sparse float64 arithmetic with reverse-mode differentiation and Adam.

The engine records a tape of ``Var`` nodes during the forward pass;
``backward`` walks it in reverse topological order with deterministic
accumulation. Dense products delegate to BLAS via numpy; sparse products
go through the kernels backend (compiled or pure).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import kernels
from .errors import DimensionError, NumericError


def _as_array(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)


@dataclass
class CsrMatrix:
    """Minimal CSR matrix; constant in the op graph (no gradient through it)."""

    data: np.ndarray
    indices: np.ndarray
    indptr: np.ndarray
    shape: tuple[int, int]

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.float64)
        self.indices = np.ascontiguousarray(self.indices, dtype=np.int64)
        self.indptr = np.ascontiguousarray(self.indptr, dtype=np.int64)
        self._transpose: CsrMatrix | None = None

    @classmethod
    def from_coo(cls, rows, cols, values, shape) -> "CsrMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = _as_array(values)
        order = np.lexsort((cols, rows))
        rows, cols, values = rows[order], cols[order], values[order]
        indptr = np.zeros(shape[0] + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(data=values, indices=cols, indptr=indptr, shape=tuple(shape))

    @property
    def nnz(self) -> int:
        return int(self.data.shape[0])

    def matmul(self, dense: np.ndarray) -> np.ndarray:
        if dense.ndim != 2 or dense.shape[0] != self.shape[1]:
            raise DimensionError(
                f"sparse {self.shape} @ dense {dense.shape}: inner dimensions disagree"
            )
        out = np.zeros((self.shape[0], dense.shape[1]), dtype=np.float64)
        kernels.csr_dense_matmul(
            self.data, self.indices, self.indptr, np.ascontiguousarray(dense, dtype=np.float64), out
        )
        return out

    def transpose(self) -> "CsrMatrix":
        if self._transpose is None:
            rows = np.repeat(np.arange(self.shape[0], dtype=np.int64), np.diff(self.indptr))
            self._transpose = CsrMatrix.from_coo(
                self.indices, rows, self.data, (self.shape[1], self.shape[0])
            )
        return self._transpose

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.float64)
        rows = np.repeat(np.arange(self.shape[0]), np.diff(self.indptr))
        out[rows, self.indices] = self.data
        return out


class Var:
    """Node of the recorded op graph wrapping a float64 ndarray."""

    __slots__ = ("value", "grad", "parents", "backward_fn", "name")

    # make numpy defer mixed ndarray/Var arithmetic to the reflected operators
    __array_ufunc__ = None

    def __init__(self, value, parents=(), backward_fn=None, name: str | None = None):
        self.value = _as_array(value)
        self.grad: np.ndarray | None = None
        self.parents: tuple[Var, ...] = parents
        self.backward_fn: Callable[[np.ndarray], None] | None = backward_fn
        self.name = name

    @property
    def shape(self):
        return self.value.shape

    def _accumulate(self, g: np.ndarray):
        if self.grad is None:
            self.grad = np.zeros_like(self.value)
        self.grad += g

    # operator sugar; every overload routes through the module-level ops
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __sub__(self, other):
        return add(self, mul(other, -1.0))

    def __rsub__(self, other):
        return add(mul(self, -1.0), other)

    def __neg__(self):
        return mul(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    @property
    def T(self):
        return transpose(self)


def as_var(x) -> Var:
    return x if isinstance(x, Var) else Var(x)


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to the operand's shape."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, s in enumerate(shape):
        if s == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g.reshape(shape)


def add(a, b) -> Var:
    a, b = as_var(a), as_var(b)
    out = Var(a.value + b.value, parents=(a, b))

    def bw(g):
        a._accumulate(_unbroadcast(g, a.value.shape))
        b._accumulate(_unbroadcast(g, b.value.shape))

    out.backward_fn = bw
    return out


def mul(a, b) -> Var:
    a, b = as_var(a), as_var(b)
    out = Var(a.value * b.value, parents=(a, b))

    def bw(g):
        a._accumulate(_unbroadcast(g * b.value, a.value.shape))
        b._accumulate(_unbroadcast(g * a.value, b.value.shape))

    out.backward_fn = bw
    return out


def matmul(a, b) -> Var:
    """Matrix product; the left operand may be a constant CsrMatrix."""
    if isinstance(a, CsrMatrix):
        b = as_var(b)
        out = Var(a.matmul(b.value), parents=(b,))

        def bw_sparse(g):
            b._accumulate(a.transpose().matmul(g))

        out.backward_fn = bw_sparse
        return out
    a, b = as_var(a), as_var(b)
    if a.value.ndim != 2 or b.value.ndim != 2 or a.value.shape[1] != b.value.shape[0]:
        raise DimensionError(f"matmul {a.value.shape} @ {b.value.shape}: shapes incompatible")
    out = Var(a.value @ b.value, parents=(a, b))

    def bw(g):
        a._accumulate(g @ b.value.T)
        b._accumulate(a.value.T @ g)

    out.backward_fn = bw
    return out


def transpose(a) -> Var:
    a = as_var(a)
    out = Var(a.value.T, parents=(a,))
    out.backward_fn = lambda g: a._accumulate(g.T)
    return out


def relu(a) -> Var:
    a = as_var(a)
    out = Var(np.maximum(a.value, 0.0), parents=(a,))
    out.backward_fn = lambda g: a._accumulate(g * (a.value > 0.0))
    return out


def leaky_relu(a, slope: float = 0.2) -> Var:
    a = as_var(a)
    out = Var(np.where(a.value > 0.0, a.value, slope * a.value), parents=(a,))
    out.backward_fn = lambda g: a._accumulate(g * np.where(a.value > 0.0, 1.0, slope))
    return out


def tanh(a) -> Var:
    a = as_var(a)
    t = np.tanh(a.value)
    out = Var(t, parents=(a,))
    out.backward_fn = lambda g: a._accumulate(g * (1.0 - t * t))
    return out


def log(a) -> Var:
    a = as_var(a)
    out = Var(np.log(a.value), parents=(a,))
    out.backward_fn = lambda g: a._accumulate(g / a.value)
    return out


def exp(a) -> Var:
    a = as_var(a)
    e = np.exp(a.value)
    out = Var(e, parents=(a,))
    out.backward_fn = lambda g: a._accumulate(g * e)
    return out


def clip(a, lo: float, hi: float) -> Var:
    """Clamp values; gradient passes only through the interior (subgradient 0 at the rails)."""
    a = as_var(a)
    out = Var(np.clip(a.value, lo, hi), parents=(a,))
    out.backward_fn = lambda g: a._accumulate(g * ((a.value > lo) & (a.value < hi)))
    return out


def vsum(a, axis=None, keepdims: bool = False) -> Var:
    a = as_var(a)
    out = Var(a.value.sum(axis=axis, keepdims=keepdims), parents=(a,))

    def bw(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        a._accumulate(np.broadcast_to(g, a.value.shape).copy())

    out.backward_fn = bw
    return out


def softmax_rows(a) -> Var:
    """Row-wise softmax of a 2-D tensor with per-row max subtraction.

    -inf entries act as hard masks (weight exactly 0); a row must contain
    at least one finite entry.
    """
    a = as_var(a)
    if a.value.ndim != 2:
        raise DimensionError(f"softmax_rows needs a 2-D tensor, got shape {a.value.shape}")
    m = a.value.max(axis=1, keepdims=True)
    if not np.all(np.isfinite(m)):
        raise NumericError("softmax_rows: a row has no finite entry")
    z = np.exp(a.value - m)
    s = z / z.sum(axis=1, keepdims=True)
    out = Var(s, parents=(a,))

    def bw(g):
        inner = (g * s).sum(axis=1, keepdims=True)
        a._accumulate((g - inner) * s)

    out.backward_fn = bw
    return out


def take_rows(a, idx) -> Var:
    """Gather rows by integer index; scatter-add on the way back."""
    a = as_var(a)
    idx = np.asarray(idx, dtype=np.int64)
    out = Var(a.value[idx], parents=(a,))

    def bw(g):
        full = np.zeros_like(a.value)
        np.add.at(full, idx, g)
        a._accumulate(full)

    out.backward_fn = bw
    return out


def concat_cols(parts: list[Var]) -> Var:
    parts = [as_var(p) for p in parts]
    out = Var(np.concatenate([p.value for p in parts], axis=1), parents=tuple(parts))
    widths = [p.value.shape[1] for p in parts]

    def bw(g):
        off = 0
        for p, w in zip(parts, widths):
            p._accumulate(g[:, off : off + w])
            off += w

    out.backward_fn = bw
    return out


def backward(loss: Var) -> dict[str, np.ndarray]:
    """Reverse-mode pass from a scalar; returns gradients of named leaves."""
    if loss.value.size != 1:
        raise NumericError(f"backward needs a scalar loss, got shape {loss.value.shape}")
    topo: list[Var] = []
    seen: set[int] = set()
    stack: list[tuple[Var, bool]] = [(loss, False)]
    while stack:
        node, processed = stack.pop()
        if processed:
            topo.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            if id(p) not in seen:
                stack.append((p, False))
    loss.grad = np.ones_like(loss.value)
    grads: dict[str, np.ndarray] = {}
    for node in reversed(topo):
        if node.grad is None:
            continue
        if node.backward_fn is not None:
            node.backward_fn(node.grad)
        if node.name is not None:
            grads[node.name] = node.grad
    return grads


class ParamStore:
    """Named trainable tensors plus Adam moment accumulators and step counter."""

    def __init__(self):
        self.params: dict[str, np.ndarray] = {}
        self.m: dict[str, np.ndarray] = {}
        self.v: dict[str, np.ndarray] = {}
        self.t: int = 0

    def add(self, name: str, value: np.ndarray) -> None:
        if name in self.params:
            raise NumericError(f"parameter {name!r} already registered")
        arr = _as_array(value).copy()
        self.params[name] = arr
        self.m[name] = np.zeros_like(arr)
        self.v[name] = np.zeros_like(arr)

    def glorot(self, name: str, shape: tuple[int, int], rng: np.random.Generator) -> None:
        fan_in, fan_out = shape[0], shape[1]
        a = np.sqrt(6.0 / (fan_in + fan_out))
        self.add(name, rng.uniform(-a, a, size=shape))

    def zeros(self, name: str, shape) -> None:
        self.add(name, np.zeros(shape))

    def leaf(self, name: str) -> Var:
        """Fresh graph leaf wrapping the current parameter value."""
        return Var(self.params[name], name=name)

    def names(self) -> list[str]:
        return sorted(self.params)

    def copy_values(self) -> dict[str, np.ndarray]:
        return {k: v.copy() for k, v in self.params.items()}


def adam_step(
    store: ParamStore,
    grads: dict[str, np.ndarray],
    lr,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> None:
    """Standard Adam update with bias correction; one step counter bump per call.

    ``lr`` is a float or a per-parameter-name mapping (used for the two
    learning-rate groups). Parameters are visited in sorted-name order so
    accumulation is deterministic.
    """
    missing = set(store.params) - set(grads)
    if missing:
        raise NumericError(f"adam_step: missing gradients for {sorted(missing)}")
    extra = set(grads) - set(store.params)
    if extra:
        raise NumericError(f"adam_step: gradients for unknown parameters {sorted(extra)}")
    store.t += 1
    bc1 = 1.0 - beta1**store.t
    bc2 = 1.0 - beta2**store.t
    for name in store.names():
        g = grads[name]
        step_lr = lr[name] if isinstance(lr, dict) else lr
        m = store.m[name]
        v = store.v[name]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * (g * g)
        store.params[name] -= step_lr * (m / bc1) / (np.sqrt(v / bc2) + eps)


def finite_diff_grad(f: Callable[[], float], store: ParamStore, h: float = 1e-5) -> dict[str, np.ndarray]:
    """Central-difference gradient estimate of ``f`` over every store parameter.

    ``f`` must be deterministic and read the parameters from ``store``.
    """
    grads: dict[str, np.ndarray] = {}
    for name in store.names():
        theta = store.params[name]
        g = np.zeros_like(theta)
        flat = theta.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.shape[0]):
            orig = flat[i]
            flat[i] = orig + h
            f_plus = f()
            flat[i] = orig - h
            f_minus = f()
            flat[i] = orig
            gflat[i] = (f_plus - f_minus) / (2.0 * h)
        grads[name] = g
    return grads


def max_relative_error(
    analytic: dict[str, np.ndarray],
    numeric: dict[str, np.ndarray],
    floor: float = 1e-6,
) -> float:
    """Worst per-coordinate relative gradient error across parameters.

    Coordinates where both gradients are below ``floor`` in magnitude are
    compared absolutely against the floor instead (finite differences are
    pure noise there).
    """
    worst = 0.0
    for name, a in analytic.items():
        b = numeric[name]
        scale = np.maximum(np.abs(a), np.abs(b))
        diff = np.abs(a - b)
        tiny = scale < floor
        rel = np.where(tiny, np.where(diff < 2 * floor, 0.0, np.inf), diff / np.maximum(scale, floor))
        worst = max(worst, float(rel.max())) if rel.size else worst
    return worst
