"""Over-smoothing diagnostics.

Propagating features through the normalized adjacency drives every
connected component toward the direction sqrt(d+1): node
representations collapse onto a degree-determined ray and classes stop
being separable. This module quantifies the collapse three ways:

  mdcn / mdcn_vs_depth    mean squared distance between connected
                          nodes, and its decay under propagation
  lambda2 / k_bound       the second-largest adjacency eigenvalue and
                          the per-node depth at which a node sits
                          within eps of its stationary state
  smoothing_limit_oracle  direct distance of propagated features to
                          the stationary direction

plus degree-bucketed test accuracy for trained models.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import AnalysisError, ConvergenceError, ShapeError
from .graph import Graph, SparseMatrix, connected_components, normalize_adjacency, spmm


def mdcn(features: np.ndarray, g: Graph) -> float:
    """Mean distance of connected nodes: (1/n) sum over ordered
    neighbor pairs of the squared euclidean feature distance.

    Zero iff every connected pair has identical features; isolated
    nodes contribute nothing.
    """
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != g.n:
        raise ShapeError(f"features must be (n, f) with n={g.n}, got {x.shape}")
    src = np.repeat(np.arange(g.n, dtype=np.int64), g.degrees)
    diff = x[src] - x[g.indices]
    return float((diff * diff).sum() / g.n)


def mdcn_vs_depth(g: Graph, x: np.ndarray, k_max: int) -> np.ndarray:
    """MDCN of the k-step propagated features, k = 0..k_max.

    Propagation only (no weights, no nonlinearity): on nonnegative
    inputs relu is the identity, so this isolates what depth alone
    does to neighbor distances.
    """
    a_hat = normalize_adjacency(g)
    cur = np.asarray(x, dtype=np.float64)
    curve = np.empty(k_max + 1)
    for k in range(k_max + 1):
        curve[k] = mdcn(cur, g)
        if k < k_max:
            cur = spmm(a_hat, cur)
    return curve


def _stationary_basis(a_hat: SparseMatrix, components: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the top eigenspace: sqrt(d+1) per component.

    d+1 is recovered from the diagonal of the normalized adjacency
    (entry (i, i) is 1/(d_i+1)).
    """
    dt = 1.0 / a_hat.diagonal()
    ncomp = int(components.max()) + 1
    basis = np.zeros((a_hat.rows, ncomp))
    root = np.sqrt(dt)
    for c in range(ncomp):
        mask = components == c
        v = np.where(mask, root, 0.0)
        basis[:, c] = v / np.linalg.norm(v)
    return basis


def _components_of_pattern(a_hat: SparseMatrix) -> np.ndarray:
    labels = np.full(a_hat.rows, -1, dtype=np.int64)
    current = 0
    for start in range(a_hat.rows):
        if labels[start] != -1:
            continue
        labels[start] = current
        stack = [start]
        while stack:
            u = stack.pop()
            for v in a_hat.indices[a_hat.indptr[u] : a_hat.indptr[u + 1]]:
                if labels[v] == -1:
                    labels[v] = current
                    stack.append(int(v))
        current += 1
    return labels


def lambda2(
    a_hat: SparseMatrix,
    components: np.ndarray | None = None,
    by_magnitude: bool = False,
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> float:
    """Second-largest eigenvalue of the normalized adjacency.

    Power iteration on the subspace orthogonal to the known top
    eigenspace (one sqrt(d+1) vector per connected component),
    re-projected every step. "Largest" means by signed value; the
    iteration therefore runs on the half-shifted operator (A+I)/2,
    whose spectrum is nonnegative, so the dominant mode of the
    deflated operator is the signed runner-up rather than whichever
    eigenvalue has the largest magnitude. by_magnitude=True skips the
    shift. Converged when successive Rayleigh quotients move less than
    tol; raises ConvergenceError at max_iter.

    Degenerate inputs (a single node, or every component a single
    node) have no second eigenvalue; returns 0.0 by convention.
    """
    if a_hat.rows != a_hat.cols:
        raise ShapeError("lambda2 needs a square matrix")
    if components is None:
        components = _components_of_pattern(a_hat)
    n = a_hat.rows
    basis = _stationary_basis(a_hat, components)
    if basis.shape[1] >= n:
        return 0.0
    mat = a_hat.to_scipy()

    def apply(v):
        av = mat @ v
        return av if by_magnitude else 0.5 * (av + v)

    def project(v):
        return v - basis @ (basis.T @ v)

    rng = np.random.Generator(np.random.PCG64(0))
    v = project(rng.standard_normal(n))
    norm = np.linalg.norm(v)
    if norm == 0.0:
        return 0.0
    v /= norm

    prev_rq = np.inf
    for _ in range(max_iter):
        w = project(apply(v))
        rq = float(v @ w)
        wnorm = np.linalg.norm(w)
        if wnorm < 1e-300:
            rq = 0.0
            prev_rq = rq
            break
        v = w / wnorm
        if abs(rq - prev_rq) < tol:
            prev_rq = rq
            break
        prev_rq = rq
    else:
        raise ConvergenceError(f"lambda2 power iteration did not settle in {max_iter} iterations")
    return prev_rq if by_magnitude else 2.0 * prev_rq - 1.0


@dataclass(frozen=True)
class KBoundConfig:
    eps: float = 1e-3

    def __post_init__(self):
        if not 0.0 < self.eps < 1.0:
            raise AnalysisError(f"eps must be in (0, 1), got {self.eps}")


@dataclass(frozen=True)
class KBoundResult:
    k: np.ndarray  # per-node depth bound
    lambda2: float
    eps: float
    degenerate: bool  # lambda2 <= 0: no decay mode, bounds all zero

    def to_json(self) -> str:
        return json.dumps(
            {
                "lambda2": self.lambda2,
                "eps": self.eps,
                "degenerate": self.degenerate,
                "k": [float(v) for v in self.k],
            },
            sort_keys=True,
            indent=2,
        )


def k_bound(g: Graph, cfg: KBoundConfig, lam2: float) -> KBoundResult:
    """Per-node depth bound log_lambda2(eps * sqrt((d_i+1)/(2m+n))).

    With lambda2 in (0, 1) both logs are negative, so the bound is a
    positive depth; it shrinks as degree grows. lambda2 <= 0 means the
    graph has no slow mode at all (for example a clique); the bound
    degenerates to 0 everywhere and is flagged.
    """
    if lam2 >= 1.0:
        raise AnalysisError(f"lambda2 must be < 1, got {lam2}")
    n = g.n
    if lam2 <= 0.0:
        return KBoundResult(k=np.zeros(n), lambda2=lam2, eps=cfg.eps, degenerate=True)
    dt = g.degrees_tilde.astype(np.float64)
    arg = cfg.eps * np.sqrt(dt / (2.0 * g.m + n))
    k = np.log(arg) / np.log(lam2)
    return KBoundResult(k=k, lambda2=lam2, eps=cfg.eps, degenerate=False)


def smoothing_limit_oracle(
    g: Graph, x: np.ndarray, k_max: int, component: int | None = None
) -> np.ndarray:
    """Distance of propagated features to the stationary direction.

    For k = 0..k_max, propagate x through the normalized adjacency and
    report the worst column's distance between its normalized
    restriction to the chosen component (default: the largest) and the
    unit vector along sqrt(d+1) there. On nonnegative input the curve
    decays to 0 at the rate of the component's spectral gap. An
    all-zero column counts as distance 1.
    """
    x = np.asarray(x, dtype=np.float64)
    comps = connected_components(g)
    if component is None:
        component = int(np.bincount(comps).argmax())
    idx = np.flatnonzero(comps == component)
    if idx.size == 0:
        raise AnalysisError(f"component {component} does not exist")
    w = np.sqrt(g.degrees_tilde[idx].astype(np.float64))
    w /= np.linalg.norm(w)

    a_hat = normalize_adjacency(g)
    cur = x
    curve = np.empty(k_max + 1)
    for k in range(k_max + 1):
        sub = cur[idx]
        norms = np.linalg.norm(sub, axis=0)
        dist = np.ones(sub.shape[1])
        nz = norms > 0
        if np.any(nz):
            unit = sub[:, nz] / norms[nz]
            dist[nz] = np.linalg.norm(unit - w[:, None], axis=0)
        curve[k] = dist.max()
        if k < k_max:
            cur = spmm(a_hat, cur)
    return curve


# ---- degree buckets --------------------------------------------------

DEFAULT_BUCKET_BOUNDS = (0, 2, 4, 8)


def buckets_from_boundaries(bounds) -> tuple:
    """[b0,b1), [b1,b2), ..., [bk,inf) from ascending boundaries."""
    bounds = [int(b) for b in bounds]
    if not bounds or bounds[0] != 0 or any(a >= b for a, b in zip(bounds, bounds[1:])):
        raise AnalysisError(f"bucket boundaries must start at 0 and ascend, got {bounds}")
    edges = bounds + [None]
    return tuple((lo, hi) for lo, hi in zip(edges[:-1], edges[1:]))


def bucket_label(lo: int, hi: int | None) -> str:
    # dash, not comma: these labels land in CSV cells
    return f"[{lo}-{hi})" if hi is not None else f"[{lo}-inf)"


@dataclass(frozen=True)
class BucketAccuracy:
    lo: int
    hi: int | None
    count: int
    accuracy: float | None  # None for an empty bucket

    @property
    def label(self) -> str:
        return bucket_label(self.lo, self.hi)


def bucket_accuracy_from_predictions(
    pred: np.ndarray, dataset, buckets=None
) -> list[BucketAccuracy]:
    """Split test-mask nodes by raw degree and score each bucket.

    Bucket counts always sum to the test-mask size.
    """
    if buckets is None:
        buckets = buckets_from_boundaries(DEFAULT_BUCKET_BOUNDS)
    degrees = dataset.graph.degrees
    labels = dataset.labels
    test = np.flatnonzero(dataset.masks.test)
    out = []
    for lo, hi in buckets:
        in_bucket = degrees[test] >= lo
        if hi is not None:
            in_bucket &= degrees[test] < hi
        nodes = test[in_bucket]
        if nodes.size:
            acc = float(np.mean(pred[nodes] == labels[nodes]))
        else:
            acc = None
        out.append(BucketAccuracy(lo=lo, hi=hi, count=int(nodes.size), accuracy=acc))
    return out


def degree_bucket_accuracy(model_cfg, params, dataset, buckets=None) -> list[BucketAccuracy]:
    from .training import predict  # local import; training pulls in models

    return bucket_accuracy_from_predictions(predict(model_cfg, params, dataset), dataset, buckets)


# ---- serialization ---------------------------------------------------


def write_curve_csv(path, curve, value_name: str = "value") -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", value_name])
        for k, v in enumerate(curve):
            writer.writerow([k, repr(float(v))])


def write_buckets_csv(path, rows: list[dict]) -> None:
    """Rows of {model, depth, bucket, seed, count, accuracy}-like dicts."""
    if not rows:
        raise AnalysisError("no bucket rows to write")
    fields = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
