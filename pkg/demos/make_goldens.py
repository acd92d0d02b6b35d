#!/usr/bin/env python3
"""Regenerate the golden audit outputs for the bundled 20-row fixture.

Run after any intentional change to report schemas or default thresholds,
then re-run the test suite; test_cli asserts byte equality against these.
"""
from pathlib import Path
import shutil
import sys

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from splitaudit.cli import main

HERE = Path(__file__).resolve().parents[1]
FIXTURE = HERE / "tests" / "data" / "fixture_20.csv"
GOLDEN = HERE / "tests" / "data" / "golden"
SCRATCH = GOLDEN.parent / "_golden_scratch"

if __name__ == "__main__":
    if SCRATCH.exists():
        shutil.rmtree(SCRATCH)
    rc = main([
        "audit", "--input", str(FIXTURE), "--time-format", "epoch_seconds",
        "--split", "loo", "--out-dir", str(SCRATCH),
    ])
    if rc != 0:
        raise SystemExit(f"audit failed with exit code {rc}")
    GOLDEN.mkdir(parents=True, exist_ok=True)
    for name in ("summary.json", "audit.md", "leakage_test.json", "description.json"):
        shutil.copy(SCRATCH / name, GOLDEN / name)
        print(f"wrote {GOLDEN / name}")
    shutil.rmtree(SCRATCH)
