import os
from pathlib import Path

import pytest

from ndgg.container import load_container, save_container
from ndgg.synthetic import make_planted_dataset, make_two_clique_dataset


def real_data_dir() -> Path:
    return Path(os.environ.get("NDGG_DATA_DIR", Path(__file__).resolve().parents[1] / "data"))


def require_real_container(name: str):
    """Real citation containers are built by the converter from the
    upstream distribution files, which this environment cannot fetch;
    tests that need them skip with build instructions when absent."""
    path = real_data_dir() / f"{name}.ndgg"
    if not path.is_file():
        pytest.skip(
            f"requires the real '{name}' container at {path}; build it with "
            f"'planetoid-convert --in <dir-with-ind.{name}.*-files> --name {name} "
            f"--out {path}' (or set NDGG_DATA_DIR)"
        )
    return load_container(path)


@pytest.fixture(scope="session")
def planted():
    return make_planted_dataset()


@pytest.fixture(scope="session")
def two_clique():
    return make_two_clique_dataset()


@pytest.fixture()
def planted_container(planted, tmp_path):
    path = tmp_path / "planted.ndgg"
    save_container(planted, path)
    return path
