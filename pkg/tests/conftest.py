import json
from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def fixture_paths():
    return sorted(p for p in FIXTURES.glob("*.json") if p.name != "manifest.json")


def expected_verify_codes():
    return json.loads((FIXTURES / "manifest.json").read_text())["verify_exit_codes"]
