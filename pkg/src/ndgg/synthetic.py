"""Small synthetic datasets for tests and demos.

Planted-partition graphs with class-indicative nonnegative features:
dense within-class wiring, sparse across classes, so any competent
node classifier separates them. Real citation benchmarks are loaded
from containers instead; these generators exist so the whole pipeline
can run self-contained.
"""

from __future__ import annotations

import numpy as np

from .container import Dataset, SplitMasks
from .graph import build_graph
from .rng import stream


def _masks(n: int, labels: np.ndarray, train_per_class: int, n_val: int, n_test: int, rng):
    order = rng.permutation(n)
    train, val, test = np.zeros(n, bool), np.zeros(n, bool), np.zeros(n, bool)
    per_class = {c: 0 for c in np.unique(labels)}
    rest = []
    for i in order:
        c = int(labels[i])
        if per_class[c] < train_per_class:
            train[i] = True
            per_class[c] += 1
        else:
            rest.append(i)
    val[rest[:n_val]] = True
    test[rest[n_val : n_val + n_test]] = True
    return SplitMasks(train=train, val=val, test=test)


def make_planted_dataset(
    classes: int = 3,
    nodes_per_class: int = 40,
    n_features: int = 12,
    p_in: float = 0.10,
    p_out: float = 0.01,
    signal: float = 1.0,
    noise: float = 0.3,
    train_per_class: int = 5,
    n_val: int = 30,
    n_test: int = 60,
    seed: int = 7,
    name: str = "planted",
) -> Dataset:
    rng = stream(seed, "synthetic", name)
    n = classes * nodes_per_class
    labels = np.repeat(np.arange(classes), nodes_per_class)

    iu, ju = np.triu_indices(n, k=1)
    same = labels[iu] == labels[ju]
    prob = np.where(same, p_in, p_out)
    keep = rng.random(iu.size) < prob
    graph = build_graph(np.column_stack([iu[keep], ju[keep]]), n)

    # block-structured bag-of-words: each class owns a slice of the
    # feature dims, plus uniform nonnegative noise everywhere
    x = noise * rng.random((n, n_features))
    dims_per_class = max(1, n_features // classes)
    for c in range(classes):
        cols = slice(c * dims_per_class, min(n_features, (c + 1) * dims_per_class))
        x[labels == c, cols] += signal * rng.random((nodes_per_class, cols.stop - cols.start))
    # keep features exactly representable in the container's f32 storage
    x = x.astype(np.float32).astype(np.float64)

    masks = _masks(n, labels, train_per_class, n_val, n_test, rng)
    return Dataset(
        graph=graph,
        features=x,
        labels=labels.astype(np.int64),
        masks=masks,
        name=name,
        n_classes=classes,
        flags={"synthetic": True, "seed": seed},
    )


def make_two_clique_dataset(clique: int = 8, seed: int = 3) -> Dataset:
    """Two cliques joined by a single edge; trivially separable."""
    rng = stream(seed, "synthetic", "two-clique")
    n = 2 * clique
    edges = []
    for block in (0, clique):
        for i in range(block, block + clique):
            for j in range(i + 1, block + clique):
                edges.append((i, j))
    edges.append((clique - 1, clique))
    graph = build_graph(np.array(edges), n)

    labels = np.repeat([0, 1], clique).astype(np.int64)
    x = 0.1 * rng.random((n, 2))
    x[labels == 0, 0] += 1.0
    x[labels == 1, 1] += 1.0
    x = x.astype(np.float32).astype(np.float64)

    train, val, test = np.zeros(n, bool), np.zeros(n, bool), np.zeros(n, bool)
    train[[0, 1, clique, clique + 1]] = True
    val[[2, clique + 2]] = True
    test[4:clique] = True
    test[clique + 4 :] = True
    masks = SplitMasks(train=train, val=val, test=test)
    return Dataset(
        graph=graph,
        features=x,
        labels=labels,
        masks=masks,
        name="two-clique",
        n_classes=2,
        flags={"synthetic": True, "seed": seed},
    )
