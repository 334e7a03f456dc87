import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qsvrad.data import ToyConfig, generate_toy, prepare  # noqa: E402


@pytest.fixture(scope="session")
def toy_processed():
    raw, _ = generate_toy(ToyConfig(seed=0))
    return prepare(raw, seed=0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    verdicts = getattr(module, "VERDICTS", None)
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for line in sorted(verdicts, key=lambda v: int(v.split()[1])):
            terminalreporter.write_line(line)
