"""Converter tests.

The output is parsed here with a standalone byte reader written
against the container format document, so the writer is not graded by
its own code (and not by the consumer package either).
"""

import json
import pickle
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
import scipy.sparse

from planetoid_convert.bundle import BundleError, load_bundle
from planetoid_convert.convert import ConvertError, assemble, convert
from planetoid_convert.testdata import write_synthetic_bundle


def parse_container(path):
    blob = Path(path).read_bytes()
    assert blob[:5] == b"NDGG1"
    (hlen,) = np.frombuffer(blob[5:9], "<u4")
    pos = 9 + int(hlen)
    header = json.loads(blob[9:pos].decode("utf-8"))
    n, m, f = header["n"], header["m"], header["f"]

    def take(dtype, count):
        nonlocal pos
        size = np.dtype(dtype).itemsize * count
        out = np.frombuffer(blob[pos : pos + size], dtype=dtype)
        assert out.size == count, "truncated container"
        pos += size
        return out

    arrays = {
        "indptr": take("<u8", n + 1).astype(np.int64),
        "indices": take("<u4", 2 * m).astype(np.int64),
        "features": take("<f4", n * f).reshape(n, f),
        "labels": take("<i4", n),
        "train": take("u1", n).astype(bool),
        "val": take("u1", n).astype(bool),
        "test": take("u1", n).astype(bool),
    }
    assert pos == len(blob), "trailing bytes"
    return header, arrays


def tiny_bundle(directory, gaps=0, multihot=False):
    """Hand-built 10-node bundle: 6 non-test nodes + 4 test rows whose
    final positions are scattered over [6, 10)."""
    directory = Path(directory)
    f, c = 3, 2
    allx = scipy.sparse.csr_matrix(np.diag([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])[:, :f].astype(np.float32))
    ally = np.array([[1, 0], [0, 1], [1, 0], [0, 1], [1, 0], [0, 1]])
    if multihot:
        ally[4] = [1, 1]
    x = allx[:2]
    y = ally[:2]
    span = 4
    n_test = span - gaps
    tx = scipy.sparse.csr_matrix(
        (10.0 + np.arange(n_test * f).reshape(n_test, f)).astype(np.float32)
    )
    ty = np.zeros((n_test, c), dtype=int)
    ty[np.arange(n_test), np.arange(n_test) % c] = 1
    kept = np.array(sorted(np.random.RandomState(0).choice(span, n_test, replace=False))) + 6
    test_index = kept[::-1].copy()  # scattered order exercises re-seating
    graph = {i: [] for i in range(10)}
    edges = [(0, 1), (1, 2), (2, 0), (3, 6), (6, 7), (7, 8), (8, 9), (9, 3), (4, 5)]
    for u, v in edges:
        graph[u].append(v)  # directed on purpose; converter symmetrizes
    graph[0].append(0)  # self-loop must be stripped
    graph[1].append(2)  # duplicate of (1, 2)

    def dump(key, obj):
        with open(directory / f"ind.tiny.{key}", "wb") as fh:
            pickle.dump(obj, fh)

    dump("x", x)
    dump("y", y)
    dump("tx", tx)
    dump("ty", ty)
    dump("allx", allx)
    dump("ally", ally)
    dump("graph", graph)
    (directory / "ind.tiny.test.index").write_text("\n".join(map(str, test_index)) + "\n")
    return test_index, tx.toarray(), edges


def test_tiny_bundle_round_trip(tmp_path):
    test_index, tx_dense, edges = tiny_bundle(tmp_path)
    out = tmp_path / "tiny.ndgg"
    header = convert(tmp_path, "tiny", out)
    parsed_header, arrays = parse_container(out)
    assert parsed_header == header
    assert header["n"] == 10 and header["f"] == 3 and header["c"] == 2
    # undirected unique edges: the duplicate and the self-loop are gone
    assert header["m"] == 9
    # test rows re-seated: line i of the index file is the final position
    # of tx row i
    for i, pos in enumerate(test_index):
        assert np.allclose(arrays["features"][pos], tx_dense[i], atol=1e-6)
    # masks: 2 train, remaining non-test nodes (4) become validation
    assert arrays["train"].sum() == 2
    assert arrays["val"].sum() == 4
    assert arrays["test"].sum() == test_index.size
    # adjacency is symmetric and sorted
    n = header["n"]
    rows = np.repeat(np.arange(n), np.diff(arrays["indptr"]))
    fwd = set(zip(rows.tolist(), arrays["indices"].tolist()))
    assert all((v, u) in fwd for u, v in fwd)
    assert all(u != v for u, v in fwd)


def test_gap_rows_zero_filled_and_flagged(tmp_path):
    tiny_bundle(tmp_path, gaps=1)
    out = tmp_path / "tiny.ndgg"
    header = convert(tmp_path, "tiny", out)
    assert header["flags"]["zero_filled_test_rows"] == 1
    _header, arrays = parse_container(out)
    test_positions = np.flatnonzero(arrays["test"])
    all_tail = np.arange(6, 10)
    gap_pos = sorted(set(all_tail) - set(test_positions))
    assert len(gap_pos) == 1
    assert np.all(arrays["features"][gap_pos[0]] == 0.0)
    assert arrays["labels"][gap_pos[0]] == -1
    assert not arrays["test"][gap_pos[0]]


def test_multihot_resolved_to_lowest_index(tmp_path):
    tiny_bundle(tmp_path, multihot=True)
    out = tmp_path / "tiny.ndgg"
    header = convert(tmp_path, "tiny", out)
    assert header["flags"]["multihot_labels"] == 1
    _header, arrays = parse_container(out)
    assert arrays["labels"][4] == 0  # [1, 1] resolves to class 0


def test_missing_file_reported(tmp_path):
    tiny_bundle(tmp_path)
    (tmp_path / "ind.tiny.ally").unlink()
    with pytest.raises(BundleError, match="ally"):
        load_bundle(tmp_path, "tiny")


def test_test_index_collision_rejected(tmp_path):
    tiny_bundle(tmp_path)
    (tmp_path / "ind.tiny.test.index").write_text("1\n6\n7\n8\n")
    with pytest.raises(ConvertError):
        assemble(load_bundle(tmp_path, "tiny"))


@pytest.mark.parametrize("name", ["cora", "citeseer"])
def test_real_shapes(tmp_path, name):
    summary = write_synthetic_bundle(tmp_path, name, seed=1)
    out = tmp_path / f"{name}.ndgg"
    header = convert(tmp_path, name, out)
    assert header["n"] == summary["n"]
    assert header["f"] == summary["f"]
    assert header["c"] == summary["c"]
    assert header["flags"]["zero_filled_test_rows"] == summary["gaps"]
    _h, arrays = parse_container(out)
    assert int(arrays["train"].sum()) == summary["train"]
    assert int(arrays["val"].sum()) == 500
    assert int(arrays["test"].sum()) == summary["test"]
    masks = arrays["train"].astype(int) + arrays["val"].astype(int) + arrays["test"].astype(int)
    assert masks.max() == 1  # pairwise disjoint
    labeled = arrays["labels"] >= 0
    assert np.all(labeled[arrays["train"]]) and np.all(labeled[arrays["val"]]) and np.all(labeled[arrays["test"]])


def test_cli_end_to_end(tmp_path):
    write_synthetic_bundle(tmp_path, "cora", seed=2)
    out = tmp_path / "cora.ndgg"
    proc = subprocess.run(
        [sys.executable, "-m", "planetoid_convert",
         "--in", str(tmp_path), "--name", "cora", "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "n=2708" in proc.stdout
    assert out.stat().st_size > 0


def test_cli_missing_bundle(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "planetoid_convert",
         "--in", str(tmp_path), "--name", "cora", "--out", str(tmp_path / "x.ndgg")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1
    assert "missing" in proc.stderr
