import os
import sys
from pathlib import Path

import numpy as np
import pytest

from qksvm import _backend, featuremap, statevector, svm

DATA_DIR = Path(__file__).parent / "data"
PROXY_CSV = DATA_DIR / "proxy_prostate.csv"
REPO_ROOT = Path(__file__).resolve().parents[1]


def reference_csv():
    """Path of the Kaggle prostate-cancer CSV, if one has been provided."""
    env = os.environ.get("QKSVM_REFERENCE_CSV")
    candidates = [Path(env)] if env else []
    candidates += [REPO_ROOT / "data" / "Prostate_Cancer.csv"]
    for c in candidates:
        if c.is_file():
            return c
    return None


@pytest.fixture(params=sorted(_backend.available_backends()))
def backend(request, monkeypatch):
    """Run the test once per importable kernel backend."""
    mod = _backend.available_backends()[request.param]
    for target in (statevector, featuremap, svm):
        monkeypatch.setattr(target, "core", mod)
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def proxy_csv():
    return PROXY_CSV


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
