"""Minimal reverse-mode differentiation over 2-D float64 arrays.

A Tape records the primitive operations the models need, nothing more.
Every operation checks its output for NaN/Inf and raises immediately,
so a diverging run fails at the op that produced the bad value rather
than epochs later.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from .errors import NonFiniteError, ShapeError
from .graph import SparseMatrix

# logistic outputs are clamped to the open interval (0, 1); expit
# saturates to exactly 0.0/1.0 in float64 for |x| > ~37
_OPEN_LO = np.nextafter(0.0, 1.0)
_OPEN_HI = np.nextafter(1.0, 0.0)


def _as_matrix(x, what: str) -> np.ndarray:
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeError(f"{what} must be 2-D, got {a.ndim}-D")
    return a


def _check_finite(value: np.ndarray, op: str) -> np.ndarray:
    if not np.all(np.isfinite(value)):
        raise NonFiniteError(f"operation '{op}' produced a non-finite value")
    return value


class Node:
    """A value in the computation, with its accumulated adjoint."""

    __slots__ = ("value", "grad", "name")

    def __init__(self, value: np.ndarray, name: str | None = None):
        self.value = value
        self.grad: np.ndarray | None = None
        self.name = name

    @property
    def shape(self):
        return self.value.shape


class Tape:
    """Ordered record of primitive ops plus the parameter registry.

    Building a forward pass appends (output, inputs, backward) records;
    backward() replays them once in reverse. Tapes are single-use and
    single-threaded; build a fresh one per forward pass.
    """

    def __init__(self):
        self._records: list[tuple[str, Node, tuple[Node, ...], callable]] = []
        self._params: dict[str, Node] = {}

    # ---- leaves ----------------------------------------------------

    def param(self, name: str, value: np.ndarray) -> Node:
        if name in self._params:
            raise ValueError(f"parameter '{name}' registered twice")
        node = Node(_check_finite(_as_matrix(value, f"param {name}"), f"param {name}"), name=name)
        self._params[name] = node
        return node

    def constant(self, value: np.ndarray) -> Node:
        return Node(_check_finite(_as_matrix(value, "constant"), "constant"))

    def _record(self, op: str, out: Node, inputs: tuple[Node, ...], backward) -> Node:
        self._records.append((op, out, inputs, backward))
        return out

    # ---- primitives ------------------------------------------------

    def matmul(self, a: Node, b: Node) -> Node:
        if a.value.shape[1] != b.value.shape[0]:
            raise ShapeError(f"matmul: {a.value.shape} @ {b.value.shape}")
        out = Node(_check_finite(a.value @ b.value, "matmul"))

        def backward(g):
            _accum(a, g @ b.value.T)
            _accum(b, a.value.T @ g)

        return self._record("matmul", out, (a, b), backward)

    def spmm_const(self, s: SparseMatrix, x: Node) -> Node:
        """s @ x with s held constant; no gradient flows into s."""
        if s.cols != x.value.shape[0]:
            raise ShapeError(f"spmm_const: {s.rows}x{s.cols} @ {x.value.shape}")
        mat = s.to_scipy()
        mat_t = mat.T.tocsr()
        out = Node(_check_finite(np.asarray(mat @ x.value), "spmm_const"))

        def backward(g):
            _accum(x, np.asarray(mat_t @ g))

        return self._record("spmm_const", out, (x,), backward)

    def add(self, a: Node, b: Node) -> Node:
        """Elementwise a + b; b may be a (1, cols) bias row."""
        if a.value.shape != b.value.shape:
            if not (b.value.shape == (1, a.value.shape[1])):
                raise ShapeError(f"add: {a.value.shape} + {b.value.shape}")
        out = Node(_check_finite(a.value + b.value, "add"))

        def backward(g):
            _accum(a, g)
            _accum(b, g if b.value.shape == g.shape else g.sum(axis=0, keepdims=True))

        return self._record("add", out, (a, b), backward)

    def concat_cols(self, *nodes: Node) -> Node:
        if len(nodes) < 2:
            raise ShapeError("concat_cols needs at least two operands")
        rows = nodes[0].value.shape[0]
        if any(nd.value.shape[0] != rows for nd in nodes):
            raise ShapeError("concat_cols: row counts differ")
        out = Node(_check_finite(np.concatenate([nd.value for nd in nodes], axis=1), "concat_cols"))
        offsets = np.cumsum([0] + [nd.value.shape[1] for nd in nodes])

        def backward(g):
            for nd, lo, hi in zip(nodes, offsets[:-1], offsets[1:]):
                _accum(nd, g[:, lo:hi])

        return self._record("concat_cols", out, nodes, backward)

    def relu(self, a: Node) -> Node:
        out = Node(np.maximum(a.value, 0.0))

        def backward(g):
            _accum(a, g * (a.value > 0.0))

        return self._record("relu", out, (a,), backward)

    def logistic(self, a: Node) -> Node:
        y = np.clip(expit(a.value), _OPEN_LO, _OPEN_HI)
        out = Node(y)

        def backward(g):
            _accum(a, g * y * (1.0 - y))

        return self._record("logistic", out, (a,), backward)

    def hadamard(self, a: Node, b: Node) -> Node:
        if a.value.shape != b.value.shape:
            raise ShapeError(f"hadamard: {a.value.shape} * {b.value.shape}")
        out = Node(_check_finite(a.value * b.value, "hadamard"))

        def backward(g):
            _accum(a, g * b.value)
            _accum(b, g * a.value)

        return self._record("hadamard", out, (a, b), backward)

    def dropout(self, a: Node, rate: float, rng: np.random.Generator | None, training: bool) -> Node:
        """Inverted dropout; identity when not training or rate == 0."""
        if not 0.0 <= rate < 1.0:
            raise ShapeError(f"dropout rate must be in [0, 1), got {rate}")
        if not training or rate == 0.0:
            return a
        if rng is None:
            raise ValueError("training-mode dropout needs an rng")
        scale = (rng.random(a.value.shape) >= rate) / (1.0 - rate)
        out = Node(a.value * scale)

        def backward(g):
            _accum(a, g * scale)

        return self._record("dropout", out, (a,), backward)

    def embedding_lookup(self, table: Node, ids: np.ndarray) -> Node:
        ids = np.asarray(ids, dtype=np.int64)
        if ids.ndim != 1:
            raise ShapeError("embedding ids must be 1-D")
        if ids.size and (ids.min() < 0 or ids.max() >= table.value.shape[0]):
            raise ShapeError("embedding id out of table range")
        out = Node(table.value[ids])

        def backward(g):
            gt = np.zeros_like(table.value)
            np.add.at(gt, ids, g)
            _accum(table, gt)

        return self._record("embedding_lookup", out, (table,), backward)

    def softmax_cross_entropy(self, logits: Node, labels: np.ndarray, mask: np.ndarray) -> Node:
        """Mean over masked rows of -log softmax(logits)[label]; scalar (1,1) node."""
        labels = np.asarray(labels, dtype=np.int64)
        mask = np.asarray(mask)
        rows = np.flatnonzero(mask) if mask.dtype == np.bool_ else mask.astype(np.int64)
        if rows.size == 0:
            raise ShapeError("softmax_cross_entropy: empty mask")
        z = logits.value[rows]
        y = labels[rows]
        if y.min() < 0 or y.max() >= z.shape[1]:
            raise ShapeError("label outside [0, n_classes)")
        zmax = z.max(axis=1, keepdims=True)
        logsumexp = zmax[:, 0] + np.log(np.exp(z - zmax).sum(axis=1))
        losses = logsumexp - z[np.arange(rows.size), y]
        out = Node(_check_finite(np.array([[losses.mean()]]), "softmax_cross_entropy"))

        def backward(g):
            soft = np.exp(z - zmax)
            soft /= soft.sum(axis=1, keepdims=True)
            soft[np.arange(rows.size), y] -= 1.0
            gl = np.zeros_like(logits.value)
            gl[rows] = soft * (g[0, 0] / rows.size)
            _accum(logits, gl)

        return self._record("softmax_cross_entropy", out, (logits,), backward)

    def iter_records(self):
        """(op, output, inputs) triples in recording order."""
        for op, out, inputs, _backward in self._records:
            yield op, out, inputs

    # ---- reverse pass ----------------------------------------------

    def backward(self, loss: Node) -> dict[str, np.ndarray]:
        """Gradient of a scalar loss w.r.t. every registered parameter."""
        if loss.value.size != 1:
            raise ShapeError(f"loss must be scalar, got shape {loss.value.shape}")
        loss.grad = np.ones_like(loss.value)
        for _op, out, _inputs, backward in reversed(self._records):
            if out.grad is not None:
                backward(out.grad)
        return {
            name: (p.grad if p.grad is not None else np.zeros_like(p.value))
            for name, p in self._params.items()
        }


def _accum(node: Node, g: np.ndarray) -> None:
    if node.grad is None:
        node.grad = g.copy()
    else:
        node.grad += g


def finite_diff_check(build_loss, params: dict[str, np.ndarray], step: float = 1e-5) -> float:
    """Compare reverse-mode gradients against central differences.

    build_loss(params) must deterministically return (tape, loss_node)
    for the given parameter values (so dropout must be off). Returns
    the max over all parameter entries of
    |g_ad - g_fd| / max(1e-8, |g_ad| + |g_fd|).
    """
    tape, loss = build_loss(params)
    grads = tape.backward(loss)

    def loss_at(p):
        _, node = build_loss(p)
        return float(node.value[0, 0])

    worst = 0.0
    for name, value in params.items():
        g = grads[name]
        for idx in np.ndindex(value.shape):
            perturbed = {k: (v.copy() if k == name else v) for k, v in params.items()}
            perturbed[name][idx] = value[idx] + step
            up = loss_at(perturbed)
            perturbed[name][idx] = value[idx] - step
            down = loss_at(perturbed)
            fd = (up - down) / (2.0 * step)
            ad = g[idx]
            rel = abs(ad - fd) / max(1e-8, abs(ad) + abs(fd))
            worst = max(worst, rel)
    return worst
