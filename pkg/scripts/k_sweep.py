"""Sweep k_examples over the benchmark pack with the degrading mock.

    python3 scripts/k_sweep.py [--kmax 10]
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from guifuzz.campaign import CampaignConfig
from guifuzz.ksweep import run_k_sweep
from guifuzz.simulator import load_spec_dir

ROOT = Path(__file__).resolve().parents[1]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--kmax", type=int, default=10)
    args = parser.parse_args()
    specs = load_spec_dir(ROOT / "bench")
    script = json.loads((ROOT / "fixtures" / "happy.script").read_text(encoding="utf-8"))
    counts = run_k_sweep(
        specs, script, ROOT / "data" / "seed_examples.jsonl", range(1, args.kmax + 1), CampaignConfig(clock="simulated")
    )
    n = sum(len(s.input_pages()) for s in specs)
    print(f"{'k':>3} {'detected':>9} {'Bug(%)':>7}")
    for k, c in counts.items():
        print(f"{k:>3} {c:>9} {100 * c / n:>7.1f}")


if __name__ == "__main__":
    main()
