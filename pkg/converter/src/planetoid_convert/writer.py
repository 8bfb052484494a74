"""NDGG1 container writer.

Byte layout (little-endian, no padding):

    magic "NDGG1"
    u32 header length
    UTF-8 JSON header {name, n, m, f, c, flags}
    indptr    (n+1) x u64
    indices   2m    x u32
    features  n*f   x f32, row-major
    labels    n     x i32   (-1 = unlabeled)
    train/val/test masks, each n x u8
"""

from __future__ import annotations

import json

import numpy as np

MAGIC = b"NDGG1"


def write_ndgg1(path, header: dict, arrays: dict) -> None:
    n, m, f = header["n"], header["m"], header["f"]
    indptr = np.asarray(arrays["indptr"], dtype="<u8")
    indices = np.asarray(arrays["indices"], dtype="<u4")
    features = np.asarray(arrays["features"], dtype="<f4")
    labels = np.asarray(arrays["labels"], dtype="<i4")
    assert indptr.shape == (n + 1,)
    assert indices.shape == (2 * m,)
    assert features.shape == (n, f)
    assert labels.shape == (n,)

    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(np.array(len(head), dtype="<u4").tobytes())
        fh.write(head)
        fh.write(indptr.tobytes())
        fh.write(indices.tobytes())
        fh.write(features.tobytes())
        fh.write(labels.tobytes())
        for key in ("train", "val", "test"):
            mask = np.asarray(arrays[key], dtype=bool)
            assert mask.shape == (n,)
            fh.write(mask.astype("u1").tobytes())
