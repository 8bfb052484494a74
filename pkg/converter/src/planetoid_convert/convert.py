"""Assemble a container from an upstream bundle.

The distribution stores test-node features in a separate block whose
rows belong at the scattered positions listed in the test-index file;
conversion re-seats them, zero-fills index gaps (isolated test nodes
the distribution dropped, a known citeseer quirk), symmetrizes the
adjacency dict, and writes the standard split: the labeled training
block, the next 500 nodes for validation, and the listed test nodes.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse

from .bundle import Bundle, load_bundle
from .writer import write_ndgg1


class ConvertError(Exception):
    pass


VALIDATION_SIZE = 500


def _labels_from_onehot(rows: np.ndarray) -> tuple[np.ndarray, int]:
    """(-1 for all-zero rows, lowest set index otherwise), multi-hot count."""
    rows = np.asarray(rows)
    hot = rows > 0
    counts = hot.sum(axis=1)
    labels = np.where(counts > 0, np.argmax(hot, axis=1), -1).astype(np.int64)
    return labels, int((counts > 1).sum())


def _symmetrized_edges(graph: dict, n: int) -> np.ndarray:
    src, dst = [], []
    for u, neighbors in graph.items():
        u = int(u)
        if not 0 <= u < n:
            raise ConvertError(f"graph node id {u} outside [0, {n})")
        for v in neighbors:
            v = int(v)
            if not 0 <= v < n:
                raise ConvertError(f"graph neighbor id {v} outside [0, {n})")
            if u != v:
                src.append(u)
                dst.append(v)
    if not src:
        return np.zeros((0, 2), dtype=np.int64)
    src = np.array(src, dtype=np.int64)
    dst = np.array(dst, dtype=np.int64)
    both = np.concatenate([src * n + dst, dst * n + src])
    code = np.unique(both)
    return np.column_stack([code // n, code % n])


def _csr_adjacency(edges: np.ndarray, n: int):
    """Directed pair list (already symmetric, unique) to CSR arrays."""
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    e = edges[order]
    counts = np.bincount(e[:, 0], minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, e[:, 1]


def assemble(bundle: Bundle):
    """Return (header, arrays) ready for the container writer."""
    n_all = bundle.allx.shape[0]
    test_index = bundle.test_index
    lo, hi = int(test_index.min()), int(test_index.max())
    if lo < n_all:
        raise ConvertError(
            f"test index {lo} collides with the non-test block (size {n_all})"
        )
    # the test block occupies every position from n_all through the
    # largest listed index; unlisted positions are dropped isolated
    # nodes and get zero rows
    span = hi - n_all + 1
    if bundle.tx.shape[0] != test_index.size or np.unique(test_index).size != test_index.size:
        raise ConvertError("test index file does not match the test feature block")

    tx_full = scipy.sparse.lil_matrix((span, bundle.allx.shape[1]), dtype=np.float32)
    ty_full = np.zeros((span, bundle.ally.shape[1]), dtype=bundle.ally.dtype)
    offsets = np.sort(test_index) - n_all
    tx_full[offsets] = bundle.tx.todense()
    ty_full[offsets] = bundle.ty
    zero_filled = span - test_index.size

    n = n_all + span

    features = scipy.sparse.vstack([bundle.allx.tolil(), tx_full]).tolil()
    labels_block = np.vstack([bundle.ally, ty_full])
    # re-seat the scattered test rows: row for final position p currently
    # sits at sorted-rank order, so swap via the sorted range
    sorted_range = np.sort(test_index)
    features[test_index, :] = features[sorted_range, :]
    labels_block[test_index, :] = labels_block[sorted_range, :]

    dense = np.asarray(features.todense(), dtype=np.float64)
    if not np.all(np.isfinite(dense)) or np.any(dense < 0):
        raise ConvertError("features must be finite and nonnegative")
    labels, multihot = _labels_from_onehot(labels_block)

    n_train = bundle.y.shape[0]
    train = np.zeros(n, dtype=bool)
    train[:n_train] = True
    val = np.zeros(n, dtype=bool)
    # validation nodes come from the non-test block only
    val[n_train : min(n_train + VALIDATION_SIZE, n_all)] = True
    test = np.zeros(n, dtype=bool)
    test[test_index] = True
    for mask_name, mask in (("train", train), ("val", val), ("test", test)):
        if np.any(labels[mask] < 0):
            raise ConvertError(f"{mask_name} mask contains a node without a label")
    if np.any(train & val) or np.any(train & test) or np.any(val & test):
        raise ConvertError("split masks overlap")

    edges = _symmetrized_edges(bundle.graph, n)
    indptr, indices = _csr_adjacency(edges, n)
    m = edges.shape[0] // 2

    header = {
        "name": bundle.name,
        "n": n,
        "m": m,
        "f": dense.shape[1],
        "c": int(labels_block.shape[1]),
        "flags": {
            "source": "planetoid",
            "split": "standard",
            "zero_filled_test_rows": int(zero_filled),
            "multihot_labels": multihot,
            "unlabeled": int((labels < 0).sum()),
        },
    }
    arrays = {
        "indptr": indptr,
        "indices": indices,
        "features": dense,
        "labels": labels,
        "train": train,
        "val": val,
        "test": test,
    }
    return header, arrays


def convert(input_dir, name: str, output_path) -> dict:
    """Load a bundle, assemble it, write the container; returns the header."""
    bundle = load_bundle(input_dir, name)
    header, arrays = assemble(bundle)
    write_ndgg1(output_path, header, arrays)
    return header
