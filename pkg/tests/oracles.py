"""Independent reference implementations the tests grade against.

Everything here recomputes results through a different route than the
library (dense linear algebra, scalar loops, queue-based BFS) so a bug
cannot hide on both sides of a comparison.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from ndgg import rng
from ndgg.autodiff import Tape
from ndgg.graph import build_graph, normalize_adjacency
from ndgg.models import ModelConfig, gate_input_dim, model_forward, param_names


def dense_normalized_adjacency(edges, n: int) -> np.ndarray:
    """Dense route: build A, add the identity, scale by degree roots."""
    a = np.zeros((n, n))
    for u, v in edges:
        if u != v:
            a[u, v] = 1.0
            a[v, u] = 1.0
    a_tilde = a + np.eye(n)
    d = a_tilde.sum(axis=1)
    inv_root = np.diag(1.0 / np.sqrt(d))
    return inv_root @ a_tilde @ inv_root


def bfs_components(edges, n: int) -> np.ndarray:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        if u != v:
            adj[u].append(v)
            adj[v].append(u)
    labels = np.full(n, -1, dtype=np.int64)
    current = 0
    for start in range(n):
        if labels[start] != -1:
            continue
        queue = deque([start])
        labels[start] = current
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if labels[w] == -1:
                    labels[w] = current
                    queue.append(w)
        current += 1
    return labels


def scalar_adam(grads_per_step, x0: float, lr: float, wd: float = 0.0) -> float:
    """Plain-float Adam on a single scalar, one gradient per step."""
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    m = v = 0.0
    x = x0
    for t, g in enumerate(grads_per_step, start=1):
        g = g + wd * x
        m = beta1 * m + (1 - beta1) * g
        v = beta2 * v + (1 - beta2) * g * g
        m_hat = m / (1 - beta1**t)
        v_hat = v / (1 - beta2**t)
        x = x - lr * m_hat / (v_hat**0.5 + eps)
    return x


def scalar_softmax_xent(logits: np.ndarray, labels, mask_rows) -> float:
    """Loss recomputed row by row with plain python floats."""
    total = 0.0
    for r in mask_rows:
        row = logits[r]
        exps = [float(np.exp(v - max(row))) for v in row]
        p = exps[labels[r]] / sum(exps)
        total += -float(np.log(p))
    return total / len(mask_rows)


def random_edges(gen: np.random.Generator, n: int, p: float):
    return [(i, j) for i in range(n) for j in range(i + 1, n) if gen.random() < p]


def relabel_canonical(labels: np.ndarray) -> np.ndarray:
    """Map component labels to first-seen order so two labelings compare."""
    seen: dict[int, int] = {}
    out = np.empty_like(labels)
    for i, lab in enumerate(labels):
        if lab not in seen:
            seen[lab] = len(seen)
        out[i] = seen[lab]
    return out


# ---- conditioned instances for finite-difference checks --------------
#
# Central differences in float64 resolve a gradient entry only down to
# roughly |loss| * eps / step in absolute terms, and they differentiate
# nothing at a relu kink. An instance is only a valid oracle when every
# relu preactivation sits farther from zero than the probe step and
# every nonzero gradient entry sits above the resolution floor, so the
# builders below redraw seeds until both hold. Exactly-zero gradients
# (dead relu channels) are fine: both sides produce exact zeros.

FD_STEP = 1e-5
RELU_MARGIN = 5e-4
GRAD_FLOOR = 1e-5


def lively_params(cfg: ModelConfig, n_features: int, n_classes: int, gen) -> dict:
    """Uniform +-0.8 weights, zero biases: wider than a training init so
    channels rarely die and gate responses stay steep."""
    h = cfg.hidden
    shapes = {
        "w0": (n_features, h),
        "w_out": (h if cfg.kind != "sgc" else n_features, n_classes),
        "b_out": (1, n_classes),
        "embed": (cfg.degree_cap + 1, cfg.degree_embed_dim),
    }
    for k in range(1, cfg.layers):
        shapes[f"w{k}"] = (h, h)
        shapes[f"gate_w{k}"] = (gate_input_dim(cfg, n_features), h)
        shapes[f"gate_b{k}"] = (1, h)
    return {name: gen.uniform(-0.8, 0.8, size=shapes[name]) for name in sorted(param_names(cfg))}


def make_fd_instance(kind: str, graph_seed: int, init_seed: int, n: int = 8):
    gen = rng.stream(graph_seed, "fd-graph")
    edges = random_edges(gen, n, 0.35)
    if not edges:
        return None
    g = build_graph(np.array(edges), n)
    a_hat = normalize_adjacency(g)
    x = 0.5 + gen.random((n, 5))
    labels = gen.integers(0, 3, n)
    cfg = ModelConfig(
        kind=kind,
        layers=4 if kind != "sgc" else 2,
        hidden=4,
        degree_embed_dim=3,
        degree_cap=4,
        dropout=0.0,
    )
    params = lively_params(cfg, 5, 3, rng.stream(init_seed, "fd-init"))

    def build(p):
        fwd = model_forward(cfg, p, a_hat, x, g.degrees, training=False)
        loss = fwd.tape.softmax_cross_entropy(fwd.logits, labels, np.ones(n, bool))
        return fwd.tape, loss

    return build, params


def fd_conditioned(build, params) -> bool:
    tape, loss = build(params)
    for op, _out, inputs in tape.iter_records():
        if op == "relu":
            mags = np.abs(inputs[0].value)
            nonzero = mags[mags > 0]
            if nonzero.size and nonzero.min() < RELU_MARGIN:
                return False
    grads = tape.backward(loss)
    for gmat in grads.values():
        nonzero = np.abs(gmat[gmat != 0])
        if nonzero.size and nonzero.min() < GRAD_FLOOR:
            return False
    return True


def fd_instance_set(kind: str, n_graphs: int = 8, seeds_per_graph: int = 3):
    """Deterministic scan for n_graphs graphs with seeds_per_graph
    well-conditioned parameter draws each."""
    pairs = []
    graph_seed = 0
    while len(pairs) < n_graphs * seeds_per_graph:
        if graph_seed > 200:
            raise RuntimeError(f"could not condition fd instances for {kind}")
        found = []
        for init_seed in range(12):
            inst = make_fd_instance(kind, graph_seed, init_seed)
            if inst is not None and fd_conditioned(*inst):
                found.append((graph_seed, init_seed))
                if len(found) == seeds_per_graph:
                    break
        if len(found) == seeds_per_graph:
            pairs.extend(found)
        graph_seed += 1
    return pairs


def quadratic_loss_builder(center: np.ndarray):
    """Scalar sum((p - c)^2) assembled from tape primitives; its third
    derivative vanishes, so central differences are exact to roundoff."""

    def build(params):
        tape = Tape()
        p = tape.param("p", params["p"])
        shifted = tape.add(p, tape.constant(-center))
        squared = tape.hadamard(shifted, shifted)
        ones = tape.constant(np.ones((center.shape[1], 1)))
        return tape, tape.matmul(squared, ones)

    return build
