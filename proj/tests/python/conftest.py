import os
import pathlib
import shutil

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def data_dir():
    return pathlib.Path(os.environ.get("SNL_DATA_DIR", ROOT / "data"))


@pytest.fixture(scope="session")
def cli():
    exe = os.environ.get("SNL_CLI") or shutil.which("snl") or str(ROOT / "build" / "tools" / "snl")
    if not pathlib.Path(exe).exists():
        pytest.skip("snl executable not built")
    return exe
