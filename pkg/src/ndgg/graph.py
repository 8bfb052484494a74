"""Undirected graphs in CSR form and their normalized adjacency.

The graph stores plain adjacency only (no self-loops, no weights);
symmetric normalization adds the self-loop analytically, producing the
operator whose entries are 1/sqrt((d_i+1)(d_j+1)) on edges and
1/(d_i+1) on the diagonal. Its top eigenspace per connected component
is spanned by sqrt(d+1), which the analysis module leans on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse

from .errors import GraphError, ShapeError


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Graph:
    """Undirected graph; each edge appears in both neighbor lists.

    n: node count
    m: number of unique undirected edges (self-loops excluded)
    indptr: length n+1 offsets into indices
    indices: concatenated ascending neighbor lists, length 2m
    """

    n: int
    m: int
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def degrees(self) -> np.ndarray:
        """Per-node degree without self-loop; sums to 2m."""
        return np.diff(self.indptr)

    @property
    def degrees_tilde(self) -> np.ndarray:
        """Degree plus one (the self-loop convention of normalization)."""
        return self.degrees + 1

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]


@dataclass(frozen=True)
class SparseMatrix:
    """Real CSR matrix with finite values and sorted, unique column indices."""

    rows: int
    cols: int
    indptr: np.ndarray
    indices: np.ndarray
    values: np.ndarray

    def to_scipy(self) -> scipy.sparse.csr_matrix:
        return scipy.sparse.csr_matrix(
            (self.values, self.indices, self.indptr), shape=(self.rows, self.cols)
        )

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def transpose(self) -> "SparseMatrix":
        t = self.to_scipy().T.tocsr()
        t.sort_indices()
        return SparseMatrix(
            rows=self.cols,
            cols=self.rows,
            indptr=_freeze(t.indptr.astype(np.int64)),
            indices=_freeze(t.indices.astype(np.int64)),
            values=_freeze(t.data.astype(np.float64)),
        )

    def diagonal(self) -> np.ndarray:
        return self.to_scipy().diagonal()


def _csr_from_directed_pairs(src: np.ndarray, dst: np.ndarray, n: int):
    """Sort (src, dst) pairs into CSR arrays. Pairs must be unique."""
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, dst.astype(np.int64), src.astype(np.int64)


def build_graph(edges, n: int) -> Graph:
    """Build a Graph from an iterable of (u, v) pairs.

    Symmetrizes, removes duplicates and self-loops. Ids must lie in
    [0, n). Raises GraphError for n <= 0 or out-of-range ids.
    """
    if n <= 0:
        raise GraphError(f"node count must be positive, got {n}")
    e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    if e.size == 0:
        e = e.reshape(0, 2)
    if e.ndim != 2 or e.shape[1] != 2:
        raise GraphError(f"edge list must be pairs, got shape {e.shape}")
    if e.size and (e.min() < 0 or e.max() >= n):
        bad = e[(e < 0) | (e >= n)][0]
        raise GraphError(f"node id {bad} out of range [0, {n})")

    keep = e[:, 0] != e[:, 1]
    e = e[keep]
    # store both directions, then dedupe on the encoded pair
    src = np.concatenate([e[:, 0], e[:, 1]])
    dst = np.concatenate([e[:, 1], e[:, 0]])
    code = np.unique(src * np.int64(n) + dst)
    src, dst = code // n, code % n

    indptr, indices, _ = _csr_from_directed_pairs(src, dst, n)
    return Graph(n=n, m=len(code) // 2, indptr=_freeze(indptr), indices=_freeze(indices))


def normalize_adjacency(g: Graph) -> SparseMatrix:
    """Symmetric self-loop normalization of the adjacency.

    Entry (i, j) is 1/sqrt((d_i+1)(d_j+1)) for j a neighbor of i or
    j == i. Symmetric, spectrum inside [-1, 1], top eigenvalue exactly
    1 on each connected component.
    """
    dt = g.degrees_tilde.astype(np.float64)
    loops = np.arange(g.n, dtype=np.int64)
    src = np.concatenate([np.repeat(loops, g.degrees), loops])
    dst = np.concatenate([g.indices, loops])
    indptr, indices, rows = _csr_from_directed_pairs(src, dst, g.n)
    values = 1.0 / np.sqrt(dt[rows] * dt[indices])
    return SparseMatrix(
        rows=g.n,
        cols=g.n,
        indptr=_freeze(indptr),
        indices=_freeze(indices),
        values=_freeze(values),
    )


def spmm(a: SparseMatrix, x: np.ndarray) -> np.ndarray:
    """Sparse-dense product a @ x, shape (a.rows, x.shape[1])."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ShapeError(f"dense operand must be 2-D, got {x.ndim}-D")
    if a.cols != x.shape[0]:
        raise ShapeError(f"dimension mismatch: sparse is {a.rows}x{a.cols}, dense has {x.shape[0]} rows")
    return np.asarray(a.to_scipy() @ x, dtype=np.float64)


def connected_components(g: Graph) -> np.ndarray:
    """Per-node component labels in [0, #components), by first-seen order."""
    labels = np.full(g.n, -1, dtype=np.int64)
    current = 0
    stack: list[int] = []
    for start in range(g.n):
        if labels[start] != -1:
            continue
        labels[start] = current
        stack.append(start)
        while stack:
            u = stack.pop()
            for v in g.neighbors(u):
                if labels[v] == -1:
                    labels[v] = current
                    stack.append(int(v))
        current += 1
    return labels
