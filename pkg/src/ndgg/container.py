"""Binary dataset container: graph + features + labels + split masks.

Byte layout (little-endian, no padding):

    magic "NDGG1"
    u32 header length
    UTF-8 JSON header {name, n, m, f, c, flags}
    indptr    (n+1) x u64
    indices   2m    x u32
    features  n*f   x f32, row-major
    labels    n     x i32   (-1 = unlabeled)
    train/val/test masks, each n x u8 (0/1)

Features are kept nonnegative: the over-smoothing analysis treats ReLU
as the identity on its inputs, which only holds on nonnegative data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadMagicError,
    ContainerInvariantError,
    TruncatedContainerError,
)
from .graph import Graph, _freeze

MAGIC = b"NDGG1"

# Reference stats for the standard citation benchmarks: (nodes, edges,
# features, classes). Edge counts are the historical published figures;
# measured counts from current distributions differ slightly, so edge
# mismatches are reported as variants, not failures.
KNOWN_DATASET_STATS = {
    "cora": (2708, 5429, 1433, 7),
    "citeseer": (3327, 4732, 3707, 6),
    "pubmed": (19717, 44338, 500, 3),
}


@dataclass(frozen=True)
class SplitMasks:
    """Pairwise-disjoint boolean node masks."""

    train: np.ndarray
    val: np.ndarray
    test: np.ndarray

    def __post_init__(self):
        for name, m in (("train", self.train), ("val", self.val), ("test", self.test)):
            if m.dtype != np.bool_ or m.ndim != 1:
                raise ContainerInvariantError(f"{name} mask must be a 1-D bool array")
        if len({self.train.size, self.val.size, self.test.size}) != 1:
            raise ContainerInvariantError("masks must have equal length")
        if (
            np.any(self.train & self.val)
            or np.any(self.train & self.test)
            or np.any(self.val & self.test)
        ):
            raise ContainerInvariantError("train/val/test masks overlap")


@dataclass(frozen=True)
class Dataset:
    """Immutable graph dataset with features, labels and split masks."""

    graph: Graph
    features: np.ndarray  # (n, f) float64, nonnegative
    labels: np.ndarray  # (n,) int64, -1 = unlabeled
    masks: SplitMasks
    name: str
    n_classes: int
    flags: dict = field(default_factory=dict)

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


def _validate_dataset(d: Dataset) -> Dataset:
    g = d.graph
    if d.features.shape[0] != g.n:
        raise ContainerInvariantError(
            f"feature rows ({d.features.shape[0]}) != node count ({g.n})"
        )
    if d.labels.shape != (g.n,):
        raise ContainerInvariantError("labels must have one entry per node")
    if d.masks.train.size != g.n:
        raise ContainerInvariantError("mask length != node count")
    if not np.all(np.isfinite(d.features)):
        raise ContainerInvariantError("features contain NaN or Inf")
    if np.any(d.features < 0):
        raise ContainerInvariantError("features must be nonnegative")
    if np.any(d.labels < -1) or np.any(d.labels >= d.n_classes):
        raise ContainerInvariantError(f"labels outside [-1, {d.n_classes})")
    for name, m in (("train", d.masks.train), ("val", d.masks.val), ("test", d.masks.test)):
        if np.any(d.labels[m] < 0):
            raise ContainerInvariantError(f"{name} mask contains unlabeled nodes")
    # graph structure: monotone offsets, sorted unique neighbors, no
    # self-loops, symmetric adjacency
    if g.indptr[0] != 0 or g.indptr[-1] != 2 * g.m or np.any(np.diff(g.indptr) < 0):
        raise ContainerInvariantError("corrupt indptr")
    if g.indices.size and (g.indices.min() < 0 or g.indices.max() >= g.n):
        raise ContainerInvariantError("neighbor id out of range")
    rows = np.repeat(np.arange(g.n, dtype=np.int64), g.degrees)
    if np.any(rows == g.indices):
        raise ContainerInvariantError("self-loop stored in adjacency")
    if g.indices.size > 1:
        diffs = np.diff(g.indices)
        at_row_start = np.zeros(g.indices.size - 1, dtype=bool)
        starts = g.indptr[1:-1]
        starts = starts[(starts > 0) & (starts < g.indices.size)]
        at_row_start[starts - 1] = True
        if np.any((diffs <= 0) & ~at_row_start):
            raise ContainerInvariantError("neighbor lists unsorted or duplicated")
    fwd = np.sort(rows * np.int64(g.n) + g.indices)
    rev = np.sort(g.indices * np.int64(g.n) + rows)
    if not np.array_equal(fwd, rev):
        raise ContainerInvariantError("adjacency is not symmetric")
    return d


def save_container(d: Dataset, path) -> None:
    """Write the container; loading it back reproduces the dataset.

    Features are stored as f32, so exact round-trips hold for datasets
    whose features are f32-representable (every loaded dataset is).
    """
    _validate_dataset(d)
    header = {
        "name": d.name,
        "n": int(d.graph.n),
        "m": int(d.graph.m),
        "f": int(d.n_features),
        "c": int(d.n_classes),
        "flags": d.flags,
    }
    hbytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(np.array(len(hbytes), dtype="<u4").tobytes())
        fh.write(hbytes)
        fh.write(d.graph.indptr.astype("<u8").tobytes())
        fh.write(d.graph.indices.astype("<u4").tobytes())
        fh.write(d.features.astype("<f4").tobytes())
        fh.write(d.labels.astype("<i4").tobytes())
        for m in (d.masks.train, d.masks.val, d.masks.test):
            fh.write(m.astype("u1").tobytes())


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.pos = 0

    def take(self, count: int, what: str) -> bytes:
        end = self.pos + count
        if end > len(self.blob):
            raise TruncatedContainerError(
                f"truncated {what}: need {count} bytes at offset {self.pos}, "
                f"file has {len(self.blob) - self.pos} left"
            )
        out = self.blob[self.pos : end]
        self.pos = end
        return out

    def array(self, dtype: str, count: int, what: str) -> np.ndarray:
        itemsize = np.dtype(dtype).itemsize
        return np.frombuffer(self.take(itemsize * count, what), dtype=dtype).copy()


def load_container(path) -> Dataset:
    """Read and fully validate a container file."""
    with open(path, "rb") as fh:
        blob = fh.read()
    r = _Reader(blob)
    if r.take(len(MAGIC), "magic") != MAGIC:
        raise BadMagicError(f"{path}: not a NDGG1 container")
    (hlen,) = np.frombuffer(r.take(4, "header length"), dtype="<u4")
    try:
        header = json.loads(r.take(int(hlen), "header").decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ContainerInvariantError(f"bad header JSON: {e}") from e
    missing = {"name", "n", "m", "f", "c", "flags"} - set(header)
    if missing:
        raise ContainerInvariantError(f"header missing keys: {sorted(missing)}")
    n, m, f, c = (int(header[k]) for k in ("n", "m", "f", "c"))
    if n <= 0 or m < 0 or f <= 0 or c <= 0:
        raise ContainerInvariantError(f"nonsensical header counts n={n} m={m} f={f} c={c}")

    indptr = r.array("<u8", n + 1, "indptr").astype(np.int64)
    indices = r.array("<u4", 2 * m, "indices").astype(np.int64)
    features = r.array("<f4", n * f, "features").astype(np.float64).reshape(n, f)
    labels = r.array("<i4", n, "labels").astype(np.int64)
    masks = [r.array("u1", n, f"{name} mask") for name in ("train", "val", "test")]
    if r.pos != len(blob):
        raise ContainerInvariantError(f"{len(blob) - r.pos} trailing bytes after last section")

    graph = Graph(n=n, m=m, indptr=_freeze(indptr), indices=_freeze(indices))
    d = Dataset(
        graph=graph,
        features=_freeze(features),
        labels=_freeze(labels),
        masks=SplitMasks(*(_freeze(mk.astype(bool)) for mk in masks)),
        name=str(header["name"]),
        n_classes=c,
        flags=dict(header["flags"]),
    )
    return _validate_dataset(d)


@dataclass(frozen=True)
class ValidationEntry:
    field: str
    expected: int
    measured: int
    status: str  # PASS | FAIL | VARIANT


@dataclass(frozen=True)
class ValidationReport:
    name: str
    entries: tuple

    @property
    def ok(self) -> bool:
        return all(e.status != "FAIL" for e in self.entries)

    def __str__(self) -> str:
        lines = [f"validation of '{self.name}':"]
        for e in self.entries:
            lines.append(f"  {e.field}: expected {e.expected}, measured {e.measured} [{e.status}]")
        return "\n".join(lines)


def validate_dataset(d: Dataset, expected=None) -> ValidationReport:
    """Compare a dataset against expected (nodes, edges, features, classes).

    `expected` defaults to the reference stats for d.name. Node,
    feature and class mismatches FAIL; an edge-count mismatch is only
    flagged VARIANT because published edge counts predate the current
    distributions' dedup conventions.
    """
    if expected is None:
        if d.name not in KNOWN_DATASET_STATS:
            raise ContainerInvariantError(f"no reference stats for dataset '{d.name}'")
        expected = KNOWN_DATASET_STATS[d.name]
    exp_n, exp_m, exp_f, exp_c = expected

    def entry(fieldname, exp, got, soft=False):
        status = "PASS" if exp == got else ("VARIANT" if soft else "FAIL")
        return ValidationEntry(fieldname, int(exp), int(got), status)

    entries = (
        entry("nodes", exp_n, d.graph.n),
        entry("edges", exp_m, d.graph.m, soft=True),
        entry("features", exp_f, d.n_features),
        entry("classes", exp_c, d.n_classes),
    )
    return ValidationReport(name=d.name, entries=entries)


def row_normalize(features: np.ndarray) -> np.ndarray:
    """Scale each row by 1/max(1, row sum); keeps rows nonnegative."""
    sums = features.sum(axis=1, keepdims=True)
    return features / np.maximum(1.0, sums)
