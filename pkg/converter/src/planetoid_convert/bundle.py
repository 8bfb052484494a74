"""Reading the eight upstream files of one dataset.

Per dataset <name> the distribution ships:

    ind.<name>.x        pickled scipy sparse: features of the labeled
                        training nodes (20 per class)
    ind.<name>.y        pickled one-hot labels for those nodes
    ind.<name>.allx     features of all non-test nodes (x is its prefix)
    ind.<name>.ally     one-hot labels for allx
    ind.<name>.tx       features of the test nodes
    ind.<name>.ty       one-hot labels for tx
    ind.<name>.graph    pickled dict: node id -> neighbor id list
    ind.<name>.test.index  text, one final-ordering position per tx row

The pickles are Python-2 era; latin1 decoding loads them under
Python 3. Pickle loading executes arbitrary code by design, so only
convert distribution files you trust.
"""

from __future__ import annotations

import pickle
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse


class BundleError(Exception):
    pass


FILE_KEYS = ("x", "y", "tx", "ty", "allx", "ally", "graph", "test.index")


@dataclass
class Bundle:
    name: str
    x: scipy.sparse.csr_matrix
    y: np.ndarray
    tx: scipy.sparse.csr_matrix
    ty: np.ndarray
    allx: scipy.sparse.csr_matrix
    ally: np.ndarray
    graph: dict
    test_index: np.ndarray


def _load_pickle(path: Path):
    with open(path, "rb") as fh:
        return pickle.load(fh, encoding="latin1")


def load_bundle(directory, name: str) -> Bundle:
    directory = Path(directory)
    paths = {key: directory / f"ind.{name}.{key}" for key in FILE_KEYS}
    missing = [p.name for p in paths.values() if not p.is_file()]
    if missing:
        raise BundleError(f"bundle incomplete in {directory}: missing {missing}")

    def sparse(key):
        mat = _load_pickle(paths[key])
        if not scipy.sparse.issparse(mat):
            raise BundleError(f"{paths[key].name}: expected a scipy sparse matrix")
        return mat.tocsr()

    def onehot(key):
        arr = np.asarray(_load_pickle(paths[key]))
        if arr.ndim != 2:
            raise BundleError(f"{paths[key].name}: expected a 2-D label array")
        return arr

    graph = _load_pickle(paths["graph"])
    if not isinstance(graph, dict):
        raise BundleError(f"{paths['graph'].name}: expected a neighbor dict")
    test_index = np.array(
        [int(line) for line in paths["test.index"].read_text().split()], dtype=np.int64
    )
    if test_index.size == 0:
        raise BundleError(f"{paths['test.index'].name}: no test indices")
    return Bundle(
        name=name,
        x=sparse("x"),
        y=onehot("y"),
        tx=sparse("tx"),
        ty=onehot("ty"),
        allx=sparse("allx"),
        ally=onehot("ally"),
        graph=graph,
        test_index=test_index,
    )
