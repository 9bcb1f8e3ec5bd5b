import os
import pathlib
import shutil

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("CSIRECIP_CLI") or shutil.which("csirecip")
    if not path:
        guess = ROOT / "build" / "tools" / "csirecip"
        path = str(guess) if guess.exists() else None
    if not path:
        pytest.skip("csirecip binary not found")
    return path


@pytest.fixture(scope="session")
def schemas():
    d = pathlib.Path(os.environ.get("CSIRECIP_SCHEMAS", ROOT / "docs" / "schemas"))
    return {p.name.split(".")[0]: p for p in d.glob("*.schema.json")}
