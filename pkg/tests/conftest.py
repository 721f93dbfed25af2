from __future__ import annotations

import json
import shutil
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
BENCH = ROOT / "bench"
SCRIPT = ROOT / "fixtures" / "happy.script"
BENCH_CONFIG = ROOT / "fixtures" / "bench_config.json"
SEED = ROOT / "data" / "seed_examples.jsonl"

ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def seed_copy(tmp_path: Path) -> Path:
    dst = tmp_path / "store.jsonl"
    shutil.copy(SEED, dst)
    return dst


@pytest.fixture(scope="session")
def bench_specs():
    from guifuzz.simulator import load_spec_dir

    return load_spec_dir(BENCH)


@pytest.fixture(scope="session")
def mock_script() -> dict:
    return json.loads(SCRIPT.read_text(encoding="utf-8"))


@pytest.fixture
def acceptance_log(request):
    return request.config.stash.setdefault(ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines):
        terminalreporter.write_line(line)
