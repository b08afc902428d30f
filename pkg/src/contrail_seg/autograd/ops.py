"""Differentiable primitives.

Every op takes Tensors (or constants), computes its forward result with numpy
in float32 and records a backward rule returning one gradient per parent.
Reductions use fixed numpy loop orders so repeated runs are bit-identical.
"""

from typing import Optional, Sequence, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import DimensionError, UsageError
from .tensor import ArrayLike, Tensor, as_tensor

Operand = Union[Tensor, ArrayLike]
Axis = Optional[Union[int, Tuple[int, ...]]]


def unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum out broadcast dimensions so ``grad`` matches ``shape``."""
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for dim, size in enumerate(shape):
        if size == 1 and grad.shape[dim] != 1:
            grad = grad.sum(axis=dim, keepdims=True)
    return grad


def _broadcast_shape(a: Tensor, b: Tensor, op: str) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        axis = _first_mismatched_axis(a.shape, b.shape)
        raise DimensionError(
            f"{op}: shapes {a.shape} and {b.shape} are not broadcast-compatible on axis {axis}"
        ) from None


def _first_mismatched_axis(a: Tuple[int, ...], b: Tuple[int, ...]) -> int:
    ndim = max(len(a), len(b))
    pa = (1,) * (ndim - len(a)) + tuple(a)
    pb = (1,) * (ndim - len(b)) + tuple(b)
    for axis, (x, y) in enumerate(zip(pa, pb)):
        if x != y and x != 1 and y != 1:
            return axis
    return -1


# ----------------------------------------------------------------------
# Elementwise arithmetic
# ----------------------------------------------------------------------
def add(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b, "add")

    def backward(g):
        return unbroadcast(g, a.shape), unbroadcast(g, b.shape)

    return Tensor.from_op(a.data + b.data, (a, b), backward, "add")


def sub(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b, "sub")

    def backward(g):
        return unbroadcast(g, a.shape), unbroadcast(-g, b.shape)

    return Tensor.from_op(a.data - b.data, (a, b), backward, "sub")


def mul(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b, "mul")

    def backward(g):
        return unbroadcast(g * b.data, a.shape), unbroadcast(g * a.data, b.shape)

    return Tensor.from_op(a.data * b.data, (a, b), backward, "mul")


def div(a: Operand, b: Operand) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a, b, "div")

    def backward(g):
        ga = g / b.data
        gb = -g * a.data / (b.data * b.data)
        return unbroadcast(ga, a.shape), unbroadcast(gb, b.shape)

    return Tensor.from_op(a.data / b.data, (a, b), backward, "div")


def neg(a: Operand) -> Tensor:
    a = as_tensor(a)
    return Tensor.from_op(-a.data, (a,), lambda g: (-g,), "neg")


def log(a: Operand) -> Tensor:
    a = as_tensor(a)
    return Tensor.from_op(np.log(a.data), (a,), lambda g: (g / a.data,), "log")


def clamp(a: Operand, low: float, high: float) -> Tensor:
    """Clip values into [low, high]; gradient is zero where clipping happened."""
    a = as_tensor(a)
    inside = ((a.data >= low) & (a.data <= high)).astype(np.float32)
    out = np.clip(a.data, np.float32(low), np.float32(high))
    return Tensor.from_op(out, (a,), lambda g: (g * inside,), "clamp")


# ----------------------------------------------------------------------
# Shape and reductions
# ----------------------------------------------------------------------
def reshape(a: Operand, shape: Sequence[int]) -> Tensor:
    a = as_tensor(a)
    try:
        out = a.data.reshape(tuple(shape))
    except ValueError:
        raise DimensionError(f"reshape: cannot view {a.shape} as {tuple(shape)}") from None
    return Tensor.from_op(out, (a,), lambda g: (g.reshape(a.shape),), "reshape")


def _expand_reduced(g: np.ndarray, shape: Tuple[int, ...], axis: Axis, keepdims: bool):
    if axis is not None and not keepdims:
        axes = (axis,) if isinstance(axis, int) else axis
        for ax in sorted(ax % len(shape) for ax in axes):
            g = np.expand_dims(g, ax)
    return np.broadcast_to(g, shape).astype(np.float32)


def reduce_sum(a: Operand, axis: Axis = None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    out = a.data.sum(axis=axis, keepdims=keepdims)

    def backward(g):
        return (_expand_reduced(g, a.shape, axis, keepdims),)

    return Tensor.from_op(out, (a,), backward, "sum")


def reduce_mean(a: Operand, axis: Axis = None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    out = a.data.mean(axis=axis, keepdims=keepdims)
    count = a.data.size // max(1, np.asarray(out).size)

    def backward(g):
        return (_expand_reduced(g / np.float32(count), a.shape, axis, keepdims),)

    return Tensor.from_op(out, (a,), backward, "mean")


def concat(tensors: Sequence[Operand], axis: int = 1) -> Tensor:
    """Concatenate along ``axis`` (channel axis by default)."""
    parts = tuple(as_tensor(t) for t in tensors)
    if not parts:
        raise UsageError("concat needs at least one tensor")
    ref = parts[0].shape
    for part in parts[1:]:
        if len(part.shape) != len(ref):
            raise DimensionError(f"concat: rank mismatch {ref} vs {part.shape}")
        for ax, (x, y) in enumerate(zip(ref, part.shape)):
            if ax != axis % len(ref) and x != y:
                raise DimensionError(f"concat: size mismatch on axis {ax}: {x} vs {y}")
    sizes = [p.shape[axis] for p in parts]
    bounds = np.cumsum(sizes)[:-1]

    def backward(g):
        return tuple(np.split(g, bounds, axis=axis))

    joined = np.concatenate([p.data for p in parts], axis=axis)
    return Tensor.from_op(joined, parts, backward, "concat")


# ----------------------------------------------------------------------
# Activations
# ----------------------------------------------------------------------
def _sigmoid(x: np.ndarray) -> np.ndarray:
    # tanh form stays finite for large |x| and gives exactly 0.5 at 0
    return (np.float32(0.5) * (np.float32(1.0) + np.tanh(np.float32(0.5) * x))).astype(np.float32)


def sigmoid(a: Operand) -> Tensor:
    a = as_tensor(a)
    s = _sigmoid(a.data)
    return Tensor.from_op(s, (a,), lambda g: (g * s * (1.0 - s),), "sigmoid")


def relu(a: Operand) -> Tensor:
    a = as_tensor(a)
    active = (a.data > 0).astype(np.float32)
    return Tensor.from_op(a.data * active, (a,), lambda g: (g * active,), "relu")


def swish(x: Operand, beta: Operand) -> Tensor:
    """x * sigmoid(beta * x) with a learnable scalar ``beta``."""
    x, beta = as_tensor(x), as_tensor(beta)
    if beta.size != 1:
        raise DimensionError(f"swish: beta must hold a single value, got shape {beta.shape}")
    b = beta.data.reshape(-1)[0]
    z = b * x.data
    s = _sigmoid(z)
    ds = s * (1.0 - s)

    def backward(g):
        gx = g * (s + z * ds)
        gb = np.asarray((g * x.data * x.data * ds).sum(), dtype=np.float32).reshape(beta.shape)
        return gx, gb

    return Tensor.from_op(x.data * s, (x, beta), backward, "swish")


# ----------------------------------------------------------------------
# Convolution and resampling
# ----------------------------------------------------------------------
def conv2d(
    x: Operand,
    weight: Operand,
    bias: Optional[Operand] = None,
    stride: int = 1,
    padding: int = 0,
    groups: int = 1,
) -> Tensor:
    """Grouped 2-D convolution over NCHW input; ``groups == channels`` is depthwise."""
    x, weight = as_tensor(x), as_tensor(weight)
    bias = as_tensor(bias) if bias is not None else None
    if stride < 1:
        raise UsageError(f"conv2d: stride must be >= 1, got {stride}")
    if padding < 0:
        raise UsageError(f"conv2d: padding must be >= 0, got {padding}")
    if groups < 1:
        raise UsageError(f"conv2d: groups must be >= 1, got {groups}")
    if x.data.ndim != 4:
        raise DimensionError(f"conv2d: input must be NCHW (4 axes), got shape {x.shape}")
    if weight.data.ndim != 4:
        raise DimensionError(f"conv2d: weight must be OIkk (4 axes), got shape {weight.shape}")

    n, c, h, w = x.shape
    o, cg, kh, kw = weight.shape
    if c % groups:
        raise DimensionError(
            f"conv2d: input channels (axis 1) = {c} not divisible by groups {groups}"
        )
    if o % groups:
        raise DimensionError(
            f"conv2d: output channels (weight axis 0) = {o} not divisible by groups {groups}"
        )
    if cg * groups != c:
        raise DimensionError(
            f"conv2d: input channels (axis 1) = {c} but weight expects {cg} x {groups} groups"
        )
    if bias is not None and bias.shape != (o,):
        raise DimensionError(f"conv2d: bias (axis 0) must have {o} entries, got shape {bias.shape}")

    ho = (h + 2 * padding - kh) // stride + 1
    wo = (w + 2 * padding - kw) // stride + 1
    if ho < 1 or wo < 1:
        raise DimensionError(
            f"conv2d: kernel {kh}x{kw} larger than padded input "
            f"{h + 2 * padding}x{w + 2 * padding} (axes 2, 3)"
        )

    if padding:
        xp = np.pad(x.data, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    else:
        xp = x.data
    windows = sliding_window_view(xp, (kh, kw), axis=(2, 3))[:, :, ::stride, ::stride]
    windows = windows[:, :, :ho, :wo]
    og = o // groups
    cols = np.ascontiguousarray(windows).reshape(n, groups, cg, ho, wo, kh, kw)
    kernel = weight.data.reshape(groups, og, cg, kh, kw)
    out = np.einsum("ngchwij,gocij->ngohw", cols, kernel, optimize=True).reshape(n, o, ho, wo)
    if bias is not None:
        out = out + bias.data[None, :, None, None]

    def backward(g):
        gg = g.reshape(n, groups, og, ho, wo)
        grad_w = np.einsum("ngohw,ngchwij->gocij", gg, cols, optimize=True).reshape(weight.shape)
        grad_cols = np.einsum("ngohw,gocij->ngchwij", gg, kernel, optimize=True)
        grad_cols = grad_cols.reshape(n, c, ho, wo, kh, kw)
        grad_xp = np.zeros(xp.shape, dtype=np.float32)
        h_span = stride * (ho - 1) + 1
        w_span = stride * (wo - 1) + 1
        for i in range(kh):
            for j in range(kw):
                grad_xp[:, :, i : i + h_span : stride, j : j + w_span : stride] += grad_cols[
                    ..., i, j
                ]
        grad_x = grad_xp[:, :, padding : padding + h, padding : padding + w]
        grads = (np.ascontiguousarray(grad_x), grad_w.astype(np.float32))
        if bias is not None:
            grads += (g.sum(axis=(0, 2, 3)).astype(np.float32),)
        return grads

    parents = (x, weight) if bias is None else (x, weight, bias)
    return Tensor.from_op(out.astype(np.float32), parents, backward, "conv2d")


def global_avg_pool(x: Operand) -> Tensor:
    """Mean over the spatial axes: NCHW -> NC11."""
    x = as_tensor(x)
    if x.data.ndim != 4:
        raise DimensionError(f"global_avg_pool: input must be NCHW, got shape {x.shape}")
    n, c, h, w = x.shape
    out = x.data.mean(axis=(2, 3), keepdims=True)

    def backward(g):
        return (np.broadcast_to(g / np.float32(h * w), x.shape).astype(np.float32),)

    return Tensor.from_op(out, (x,), backward, "global_avg_pool")


def _interp_matrix(size: int, factor: int) -> np.ndarray:
    """Row-stochastic bilinear interpolation matrix with half-pixel centres."""
    out_size = size * factor
    matrix = np.zeros((out_size, size), dtype=np.float64)
    for o in range(out_size):
        src = min(max((o + 0.5) / factor - 0.5, 0.0), size - 1.0)
        i0 = int(np.floor(src))
        i1 = min(i0 + 1, size - 1)
        t = src - i0
        matrix[o, i0] += 1.0 - t
        matrix[o, i1] += t
    return matrix.astype(np.float32)


def upsample_bilinear(x: Operand, factor: int) -> Tensor:
    x = as_tensor(x)
    if not isinstance(factor, (int, np.integer)) or factor < 1:
        raise UsageError(f"upsample_bilinear: factor must be a positive integer, got {factor!r}")
    if x.data.ndim != 4:
        raise DimensionError(f"upsample_bilinear: input must be NCHW, got shape {x.shape}")
    _, _, h, w = x.shape
    mh = _interp_matrix(h, int(factor))
    mw = _interp_matrix(w, int(factor))
    out = np.einsum("oh,nchw,pw->ncop", mh, x.data, mw, optimize=True)

    def backward(g):
        return (np.einsum("oh,ncop,pw->nchw", mh, g, mw, optimize=True).astype(np.float32),)

    return Tensor.from_op(out.astype(np.float32), (x,), backward, "upsample_bilinear")
