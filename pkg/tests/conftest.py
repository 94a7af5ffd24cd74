from __future__ import annotations

import json
from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"


def load_context_corpus() -> list[dict]:
    with open(DATA_DIR / "context_corpus.json", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def context_corpus() -> list[dict]:
    return load_context_corpus()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one pass/fail line per acceptance criterion at the end."""
    lines = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            name = getattr(rep, "nodeid", "")
            if "test_acceptance.py" in name:
                short = name.split("::")[-1]
                ok = status == "passed"
                lines[short] = "PASS" if ok else "FAIL"
    if lines:
        terminalreporter.section("acceptance criteria")
        for name in sorted(lines):
            terminalreporter.write_line(f"{lines[name]:4s}  {name}")
