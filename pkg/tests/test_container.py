import numpy as np
import pytest

from ndgg.container import (
    KNOWN_DATASET_STATS,
    Dataset,
    SplitMasks,
    load_container,
    row_normalize,
    save_container,
    validate_dataset,
)
from ndgg.errors import (
    BadMagicError,
    ContainerInvariantError,
    TruncatedContainerError,
)
from ndgg.graph import build_graph
from ndgg.synthetic import make_planted_dataset


def toy_dataset():
    g = build_graph([(0, 1), (1, 2)], 3)
    return Dataset(
        graph=g,
        features=np.array([[1.0, 0.5], [0.0, 2.0], [0.25, 0.0]]),
        labels=np.array([0, 1, -1], dtype=np.int64),
        masks=SplitMasks(
            train=np.array([True, False, False]),
            val=np.array([False, True, False]),
            test=np.array([False, False, False]),
        ),
        name="toy",
        n_classes=2,
        flags={"synthetic": True},
    )


def test_round_trip_bytes_identical(tmp_path):
    first = tmp_path / "a.ndgg"
    second = tmp_path / "b.ndgg"
    save_container(toy_dataset(), first)
    save_container(load_container(first), second)
    assert first.read_bytes() == second.read_bytes()


def test_round_trip_reproduces_dataset(tmp_path):
    d = make_planted_dataset()
    path = tmp_path / "planted.ndgg"
    save_container(d, path)
    back = load_container(path)
    assert back.name == d.name
    assert back.n_classes == d.n_classes
    assert back.flags == d.flags
    assert back.graph.n == d.graph.n and back.graph.m == d.graph.m
    assert np.array_equal(back.graph.indptr, d.graph.indptr)
    assert np.array_equal(back.graph.indices, d.graph.indices)
    assert np.array_equal(back.features, d.features)
    assert np.array_equal(back.labels, d.labels)
    for name in ("train", "val", "test"):
        assert np.array_equal(getattr(back.masks, name), getattr(d.masks, name))


def test_save_to_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        save_container(toy_dataset(), tmp_path / "no" / "such" / "dir" / "x.ndgg")


def test_bad_magic(tmp_path):
    path = tmp_path / "bad.ndgg"
    path.write_bytes(b"WRONG" + b"\x00" * 64)
    with pytest.raises(BadMagicError):
        load_container(path)


def test_truncation_detected_at_every_section(tmp_path):
    path = tmp_path / "full.ndgg"
    save_container(toy_dataset(), path)
    blob = path.read_bytes()
    # cut inside the header, each array section, and the final mask
    for cut in (3, 7, len(blob) // 3, len(blob) // 2, len(blob) - 1):
        clipped = tmp_path / f"cut{cut}.ndgg"
        clipped.write_bytes(blob[:cut])
        with pytest.raises((TruncatedContainerError, BadMagicError)):
            load_container(clipped)


def test_trailing_garbage_rejected(tmp_path):
    path = tmp_path / "full.ndgg"
    save_container(toy_dataset(), path)
    padded = tmp_path / "padded.ndgg"
    padded.write_bytes(path.read_bytes() + b"\x00")
    with pytest.raises(ContainerInvariantError):
        load_container(padded)


def test_overlapping_masks_rejected():
    with pytest.raises(ContainerInvariantError):
        SplitMasks(
            train=np.array([True, False]),
            val=np.array([True, False]),
            test=np.array([False, False]),
        )


def test_unlabeled_mask_node_rejected(tmp_path):
    d = toy_dataset()
    bad = Dataset(
        graph=d.graph,
        features=d.features,
        labels=d.labels,
        masks=SplitMasks(
            train=np.array([False, False, True]),  # node 2 is unlabeled
            val=np.array([False, False, False]),
            test=np.array([False, False, False]),
        ),
        name="toy",
        n_classes=2,
    )
    with pytest.raises(ContainerInvariantError):
        save_container(bad, tmp_path / "bad.ndgg")


def test_negative_features_rejected(tmp_path):
    d = toy_dataset()
    bad = Dataset(
        graph=d.graph,
        features=d.features - 1.0,
        labels=d.labels,
        masks=d.masks,
        name="toy",
        n_classes=2,
    )
    with pytest.raises(ContainerInvariantError):
        save_container(bad, tmp_path / "bad.ndgg")


def test_validate_against_reference_stats():
    d = make_planted_dataset()
    report = validate_dataset(d, expected=(d.graph.n, d.graph.m, d.n_features, d.n_classes))
    assert report.ok
    assert all(e.status == "PASS" for e in report.entries)


def test_validate_edge_count_is_variant_not_fail():
    d = make_planted_dataset()
    report = validate_dataset(d, expected=(d.graph.n, d.graph.m + 151, d.n_features, d.n_classes))
    assert report.ok
    by_field = {e.field: e.status for e in report.entries}
    assert by_field["edges"] == "VARIANT"
    assert by_field["nodes"] == "PASS"


def test_validate_class_mismatch_fails():
    d = make_planted_dataset()
    report = validate_dataset(d, expected=(d.graph.n, d.graph.m, d.n_features, d.n_classes + 1))
    assert not report.ok
    assert {e.field: e.status for e in report.entries}["classes"] == "FAIL"


def test_reference_stats_table():
    assert KNOWN_DATASET_STATS["cora"] == (2708, 5429, 1433, 7)
    assert KNOWN_DATASET_STATS["citeseer"] == (3327, 4732, 3707, 6)
    assert KNOWN_DATASET_STATS["pubmed"] == (19717, 44338, 500, 3)


def test_row_normalize():
    x = np.array([[2.0, 2.0], [0.0, 0.0], [0.25, 0.25]])
    out = row_normalize(x)
    assert np.allclose(out, [[0.5, 0.5], [0.0, 0.0], [0.25, 0.25]])
    assert np.all(out >= 0)
