"""Run the seeded benchmark pack against the scripted mock and print the
summary table.

    python3 scripts/run_benchmark.py [--report out.json] [--seed-order N]
"""

from __future__ import annotations

import argparse
import shutil
import sys
import tempfile
from pathlib import Path

from guifuzz.cli import main as cli_main

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--report", default="-")
    parser.add_argument("--seed-order", type=int, default=0)
    args = parser.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        # work on a copy so the shipped seed dataset is never appended to
        store = Path(tmp) / "store.jsonl"
        shutil.copy(ROOT / "data" / "seed_examples.jsonl", store)
        return cli_main([
            "run",
            "--specs", str(ROOT / "bench"),
            "--config", str(ROOT / "fixtures" / "bench_config.json"),
            "--provider", f"mock:{ROOT / 'fixtures' / 'happy.script'}",
            "--store", str(store),
            "--report", args.report,
            "--seed-order", str(args.seed_order),
        ])


if __name__ == "__main__":
    sys.exit(main())
