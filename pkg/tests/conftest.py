import json
import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
DATA_DIR = TESTS_DIR / "data"

sys.path.insert(0, str(TESTS_DIR))

GOLDEN_TOPIC = (
    "Authorities caught two pigs that were wandering around loose in San Antonio, Texas."
)
GOLDEN_JOKE = "They were taken to the Alamo Sausage Company."


@pytest.fixture(scope="session")
def golden_script() -> dict:
    path = Path(__file__).parents[1] / "src" / "witforge" / "data" / "golden_script.json"
    return json.loads(path.read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def table1() -> dict:
    return json.loads((DATA_DIR / "table1.json").read_text(encoding="utf-8"))


@pytest.fixture()
def golden_backend(golden_script):
    from witforge.backend import ScriptedMockBackend

    return ScriptedMockBackend(golden_script)
