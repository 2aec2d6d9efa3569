import io
import json
import os
import time
from contextlib import redirect_stdout

import pytest

from optdesign.cli import main

_ACCEPTANCE: dict[int, str] = {}


def run_cli(*argv):
    """Run the CLI in-process; returns (exit code, JSON records after the manifest)."""
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main([str(a) for a in argv])
    lines = [json.loads(line) for line in buf.getvalue().splitlines() if line.strip()]
    assert lines and "manifest" in lines[0]
    return code, lines[1:]


@pytest.fixture(scope="session")
def class_1015(tmp_path_factory):
    """All connected (10, 15) graphs, enumerated once through the CLI and written to disk."""
    out = tmp_path_factory.mktemp("enum") / "g10_15.g6"
    start = time.perf_counter()
    code, records = run_cli("enum-graphs", 10, 15, "--out", out)
    elapsed = time.perf_counter() - start
    return {"path": out, "code": code, "record": records[0], "seconds": elapsed}


@pytest.fixture(scope="session")
def external_g6():
    """Optional external class file (e.g. from a graph database) for the second ingestion path."""
    path = os.environ.get("OPTDESIGN_CLASS_G6")
    return path if path and os.path.exists(path) else None


@pytest.fixture
def acceptance():
    def log(number: int, ok: bool, detail: str):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE[number] = line
        print(line)
        return ok

    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
