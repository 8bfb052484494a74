"""Layer algebra and model assembly.

Four model kinds share one parameter/forward convention:

  gcn          stacked propagate-transform-relu layers, linear head
  sgc          k propagation steps, then a single linear map
  ndggnet      gated residual layers: each layer blends its candidate
               output with its input through a per-node, per-channel
               gate driven by degree embeddings and features
  ndggnet-star ungated ablation, candidate + input summed with both
               coefficients fixed to 1

Depth counts the propagation steps: layer 1 is the input projection
(f -> hidden), the remaining layers are hidden-to-hidden. The
classifier head is not counted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .autodiff import Node, Tape
from .container import Dataset, row_normalize
from .errors import ConfigError
from .graph import SparseMatrix, normalize_adjacency, spmm
from .rng import stream

MODEL_KINDS = ("gcn", "sgc", "ndggnet", "ndggnet-star")


@dataclass(frozen=True)
class ModelConfig:
    kind: str
    layers: int
    hidden: int = 64
    degree_embed_dim: int = 16
    degree_cap: int = 32
    dropout: float = 0.5
    row_normalize: bool = True
    gate_hidden_layers: int = 0
    gate_uses_raw_x: bool = False

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ConfigError(f"unknown model kind '{self.kind}'; pick one of {MODEL_KINDS}")
        if self.layers < 1:
            raise ConfigError("layers must be >= 1")
        if self.hidden < 1 or self.degree_embed_dim < 1 or self.degree_cap < 0:
            raise ConfigError("hidden, degree_embed_dim must be >= 1 and degree_cap >= 0")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must be in [0, 1), got {self.dropout}")
        if self.gate_hidden_layers < 0:
            raise ConfigError("gate_hidden_layers must be >= 0")


def glorot(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (rows + cols))
    return rng.uniform(-limit, limit, size=(rows, cols))


def gate_input_dim(cfg: ModelConfig, n_features: int) -> int:
    x_dim = n_features if cfg.gate_uses_raw_x else cfg.hidden
    return cfg.degree_embed_dim + x_dim + 2 * cfg.hidden


def param_names(cfg: ModelConfig) -> set[str]:
    """Names init_params will produce for this config."""
    if cfg.kind == "sgc":
        return {"w_out", "b_out"}
    names = {"w0", "w_out", "b_out"}
    for k in range(1, cfg.layers):
        names.add(f"w{k}")
        if cfg.kind == "ndggnet":
            names.update({f"gate_w{k}", f"gate_b{k}"})
            for j in range(cfg.gate_hidden_layers):
                names.update({f"gate_hw{k}_{j}", f"gate_hb{k}_{j}"})
    if cfg.kind == "ndggnet":
        names.add("embed")
    return names


def init_params(
    cfg: ModelConfig, n_features: int, n_classes: int, rng: np.random.Generator
) -> dict[str, np.ndarray]:
    """Fresh parameter dict; arrays are drawn in a fixed order so one
    generator state fully determines every value."""
    p: dict[str, np.ndarray] = {}
    h = cfg.hidden
    if cfg.kind == "sgc":
        p["w_out"] = glorot(rng, n_features, n_classes)
        p["b_out"] = np.zeros((1, n_classes))
        return p

    p["w0"] = glorot(rng, n_features, h)
    for k in range(1, cfg.layers):
        p[f"w{k}"] = glorot(rng, h, h)
        if cfg.kind == "ndggnet":
            width = gate_input_dim(cfg, n_features)
            for j in range(cfg.gate_hidden_layers):
                p[f"gate_hw{k}_{j}"] = glorot(rng, width, h)
                p[f"gate_hb{k}_{j}"] = np.zeros((1, h))
                width = h
            p[f"gate_w{k}"] = glorot(rng, width, h)
            # start near identity propagation: logistic(1) ~ 0.73
            p[f"gate_b{k}"] = np.full((1, h), 1.0)
    if cfg.kind == "ndggnet":
        p["embed"] = glorot(rng, cfg.degree_cap + 1, cfg.degree_embed_dim)
    p["w_out"] = glorot(rng, h, n_classes)
    p["b_out"] = np.zeros((1, n_classes))
    return p


# ---- layer-level pieces (tape-valued) -------------------------------


def input_projection(tape: Tape, a_hat: SparseMatrix, x: Node, w0: Node) -> Node:
    """First hidden state: relu(A_hat @ x @ w0)."""
    return tape.relu(tape.spmm_const(a_hat, tape.matmul(x, w0)))


def gcn_layer(tape: Tape, a_hat: SparseMatrix, h: Node, w: Node) -> Node:
    """Plain propagate-transform layer: relu(A_hat @ h @ w)."""
    return tape.relu(tape.spmm_const(a_hat, tape.matmul(h, w)))


def degree_embedding(tape: Tape, table: Node, degrees: np.ndarray, cap: int) -> Node:
    """Row i is table[min(degree_i, cap)]; shared rows accumulate gradients."""
    ids = np.minimum(np.asarray(degrees, dtype=np.int64), cap)
    return tape.embedding_lookup(table, ids)


def gate_forward(
    tape: Tape,
    params: dict[str, Node],
    k: int,
    embed: Node,
    h0: Node,
    h_cand: Node,
    h_prev: Node,
    hidden_layers: int = 0,
) -> Node:
    """Per-node, per-channel blend coefficients, strictly inside (0, 1)."""
    z = tape.concat_cols(embed, h0, h_cand, h_prev)
    for j in range(hidden_layers):
        z = tape.relu(tape.add(tape.matmul(z, params[f"gate_hw{k}_{j}"]), params[f"gate_hb{k}_{j}"]))
    return tape.logistic(tape.add(tape.matmul(z, params[f"gate_w{k}"]), params[f"gate_b{k}"]))


def gated_blend(tape: Tape, alpha: Node, cand: Node, h_prev: Node) -> Node:
    """(1 - alpha) * cand + alpha * h_prev, elementwise."""
    minus_alpha = tape.hadamard(tape.constant(np.full_like(alpha.value, -1.0)), alpha)
    one_minus = tape.add(tape.constant(np.ones_like(alpha.value)), minus_alpha)
    return tape.add(tape.hadamard(one_minus, cand), tape.hadamard(alpha, h_prev))


def ndgg_layer(
    tape: Tape,
    a_hat: SparseMatrix,
    h_prev: Node,
    w: Node,
    params: dict[str, Node],
    k: int,
    embed: Node,
    h0: Node,
    gate_hidden_layers: int = 0,
    alpha_override: float | None = None,
) -> Node:
    """Gated residual layer: gate the candidate relu(A_hat @ h @ w)
    against the layer input. The gate reads the pre-blend candidate,
    which keeps the layer acyclic."""
    cand = gcn_layer(tape, a_hat, h_prev, w)
    if alpha_override is None:
        alpha = gate_forward(tape, params, k, embed, h0, cand, h_prev, gate_hidden_layers)
    else:
        alpha = tape.constant(np.full_like(cand.value, float(alpha_override)))
    return gated_blend(tape, alpha, cand, h_prev)


# ---- whole-model forward --------------------------------------------


@dataclass
class Forward:
    tape: Tape
    logits: Node
    hiddens: list = field(default_factory=list)  # per-depth hidden values (ndarrays)


def model_forward(
    cfg: ModelConfig,
    params: dict[str, np.ndarray],
    a_hat: SparseMatrix,
    x: np.ndarray,
    degrees: np.ndarray,
    training: bool = False,
    rng: np.random.Generator | None = None,
    cache: dict | None = None,
    alpha_override: float | None = None,
) -> Forward:
    """Build the forward tape for one model kind and return its logits.

    `cache` persists across calls that share (cfg, a_hat, x); it holds
    the propagated features for sgc. `alpha_override` pins every gate
    output to a constant, which turns ndggnet into the plain stack
    (0.0) or pure identity propagation (1.0).
    """
    tape = Tape()
    p = {name: tape.param(name, value) for name, value in params.items()}
    expected = param_names(cfg)
    if set(params) != expected:
        raise ConfigError(
            f"parameter set does not match config: missing {sorted(expected - set(params))}, "
            f"unexpected {sorted(set(params) - expected)}"
        )

    def drop(node: Node) -> Node:
        return tape.dropout(node, cfg.dropout, rng, training)

    hiddens: list[np.ndarray] = []

    if cfg.kind == "sgc":
        if cache is not None and "sgc_propagated" in cache:
            prop = cache["sgc_propagated"]
        else:
            prop = x
            for _ in range(cfg.layers):
                prop = spmm(a_hat, prop)
            if cache is not None:
                cache["sgc_propagated"] = prop
        hid = tape.constant(prop)
        hiddens.append(hid.value)
        logits = tape.add(tape.matmul(drop(hid), p["w_out"]), p["b_out"])
        return Forward(tape=tape, logits=logits, hiddens=hiddens)

    x_node = tape.constant(x)
    h = input_projection(tape, a_hat, drop(x_node), p["w0"])
    h0 = h
    hiddens.append(h.value)

    if cfg.kind == "ndggnet":
        embed = degree_embedding(tape, p["embed"], degrees, cfg.degree_cap)
        gate_x = x_node if cfg.gate_uses_raw_x else h0

    for k in range(1, cfg.layers):
        h_in = drop(h)
        if cfg.kind == "gcn":
            h = gcn_layer(tape, a_hat, h_in, p[f"w{k}"])
        elif cfg.kind == "ndggnet-star":
            h = tape.add(gcn_layer(tape, a_hat, h_in, p[f"w{k}"]), h_in)
        else:
            h = ndgg_layer(
                tape, a_hat, h_in, p[f"w{k}"], p, k, embed, gate_x,
                cfg.gate_hidden_layers, alpha_override,
            )
        hiddens.append(h.value)

    logits = tape.add(tape.matmul(drop(h), p["w_out"]), p["b_out"])
    return Forward(tape=tape, logits=logits, hiddens=hiddens)


def prepare_inputs(cfg: ModelConfig, dataset: Dataset):
    """Normalized adjacency, (optionally row-normalized) features, degrees."""
    a_hat = normalize_adjacency(dataset.graph)
    x = row_normalize(dataset.features) if cfg.row_normalize else dataset.features
    return a_hat, x, dataset.graph.degrees


def forward_dataset(
    cfg: ModelConfig,
    params: dict[str, np.ndarray],
    dataset: Dataset,
    training: bool = False,
    rng: np.random.Generator | None = None,
    cache: dict | None = None,
) -> Forward:
    a_hat, x, degrees = prepare_inputs(cfg, dataset)
    return model_forward(cfg, params, a_hat, x, degrees, training=training, rng=rng, cache=cache)


def seeded_params(cfg: ModelConfig, dataset: Dataset, seed: int) -> dict[str, np.ndarray]:
    return init_params(cfg, dataset.n_features, dataset.n_classes, stream(seed, "init"))
