"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import json
import subprocess
import sys
import time

import pytest

from zdm import suites

from conftest import ACCEPTANCE_LINES


def _report(result):
    line = result.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    return result


@pytest.mark.parametrize("key", list(suites.SUITES))
def test_criterion(key):
    result = _report(suites.SUITES[key](suites.DEFAULT_SEED))
    assert result.passed, json.dumps(result.details, default=str, indent=1)
    assert result.seconds < result.limit


def test_criterion_8_end_to_end(tmp_path):
    out = tmp_path / "desk.json"
    t0 = time.perf_counter()
    proc = subprocess.run([sys.executable, "-m", "zdm.cli", "verify-all", "--suite", "desk", "--out", str(out)],
                          capture_output=True, text=True)
    seconds = time.perf_counter() - t0
    ok = proc.returncode == 0 and seconds < 300
    line = f"[{'PASS' if ok else 'FAIL'}] 8 end-to-end verify-all ({seconds:.2f}s / limit 300s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert proc.returncode == 0, proc.stderr
    assert seconds < 300
    rep = json.loads(out.read_text())
    assert [s["key"] for s in rep["result"]["suites"]] == [str(k) for k in range(1, 8)]
    assert all(s["ok"] for s in rep["result"]["suites"])
