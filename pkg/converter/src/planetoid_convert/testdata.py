"""Synthetic bundles in the upstream on-disk format.

Shapes mirror the real distributions, so converter output can be
checked against the published dataset statistics without shipping the
datasets themselves. Citeseer-shaped bundles include the 15 dropped
test indices that the real files have.
"""

from __future__ import annotations

import pickle
from pathlib import Path

import numpy as np
import scipy.sparse

# (n_features, n_classes, n_train, n_all_minus_test, n_test, index_gaps)
SHAPES = {
    "cora": (1433, 7, 140, 1708, 1000, 0),
    "citeseer": (3707, 6, 120, 2312, 1000, 15),
    "pubmed": (500, 3, 60, 18717, 1000, 0),
}


def _random_features(gen, rows, cols, density=0.01):
    return scipy.sparse.random(
        rows, cols, density=density, format="csr", dtype=np.float32,
        random_state=np.random.RandomState(gen.integers(1 << 31)),
    )


def _onehot(gen, rows, classes, per_class=None):
    labels = (
        np.repeat(np.arange(classes), per_class)
        if per_class is not None
        else gen.integers(0, classes, rows)
    )
    out = np.zeros((rows, classes), dtype=np.int64)
    out[np.arange(rows), labels] = 1
    return out


def write_synthetic_bundle(directory, name: str, seed: int = 0) -> dict:
    """Write the eight ind.<name>.* files; returns the shape summary."""
    if name not in SHAPES:
        raise ValueError(f"unknown shape '{name}', pick one of {sorted(SHAPES)}")
    f, c, n_train, n_all, n_test, gaps = SHAPES[name]
    directory = Path(directory)
    gen = np.random.default_rng(seed)

    span = n_test + gaps
    n = n_all + span
    x_all = _random_features(gen, n_all, f)
    x_test = _random_features(gen, n_test, f)
    y_all = _onehot(gen, n_all, c)
    y_all[:n_train] = _onehot(gen, n_train, c, per_class=n_train // c)
    y_test = _onehot(gen, n_test, c)

    # scattered final positions for the test rows, with `gaps` positions
    # missing from the file just like the real citeseer distribution
    positions = np.arange(n_all, n)
    kept = np.sort(gen.choice(span, size=n_test, replace=False)) + n_all if gaps else positions
    test_index = gen.permutation(kept)

    # ring plus random chords keeps every node in the dict and the
    # graph connected enough to look like a citation network
    graph: dict[int, list[int]] = {i: [] for i in range(n)}
    for i in range(n):
        j = (i + 1) % n
        graph[i].append(j)
    extra = gen.integers(0, n, size=(2 * n, 2))
    for u, v in extra:
        if u != v:
            graph[int(u)].append(int(v))

    def dump(key, obj):
        with open(directory / f"ind.{name}.{key}", "wb") as fh:
            pickle.dump(obj, fh)

    dump("x", x_all[:n_train])
    dump("y", y_all[:n_train])
    dump("tx", x_test)
    dump("ty", y_test)
    dump("allx", x_all)
    dump("ally", y_all)
    dump("graph", graph)
    (directory / f"ind.{name}.test.index").write_text(
        "\n".join(str(int(i)) for i in test_index) + "\n"
    )
    return {"n": n, "f": f, "c": c, "train": n_train, "test": n_test, "gaps": gaps}
