"""Command-line entry point.

Exit codes: 0 success, 1 replay mismatch, 2 usage/config/spec/store error,
3 LLM provider failure, 4 mutation program error.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import Sequence

from .campaign import CampaignConfig, run_suite
from .dsl import DslError, execute_program, parse_program
from .llm import LiveProvider, MockProvider, Provider, ProviderUnavailable
from .simulator import SimulatorError, SpecError, Simulator, load_spec_dir
from .store import ExampleStore, MalformedRecord, StorageFailure, load_seed_dataset

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_CONFIG = 2
EXIT_PROVIDER = 3
EXIT_DSL = 4

EPILOG = "exit codes: 0 success, 1 replay mismatch, 2 usage/config error, 3 provider failure, 4 mutation program error"


class ConfigError(Exception):
    pass


def _fail(code: int, message: str) -> int:
    print(f"guifuzz: {message}", file=sys.stderr)
    return code


def make_provider(spec: str) -> Provider:
    if spec == "live":
        return LiveProvider()
    if spec.startswith("mock:") and len(spec) > 5:
        return MockProvider.from_file(spec[5:])
    raise ConfigError(f"--provider must be 'live' or 'mock:<script>', got {spec!r}")


def load_config(path: str | None) -> CampaignConfig:
    if path is None:
        return CampaignConfig()
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(obj, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    try:
        return CampaignConfig.from_dict(obj)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config {path}: {exc}") from None


def open_store(path: str | None, persist: bool) -> ExampleStore:
    if path is None:
        return ExampleStore()
    try:
        return load_seed_dataset(path, persist=persist)
    except OSError as exc:
        raise ConfigError(f"cannot read store {path}: {exc}") from None
    except MalformedRecord as exc:
        raise ConfigError(f"malformed store {path}: {exc}") from None


def cmd_run(args: argparse.Namespace) -> int:
    try:
        config = load_config(args.config)
        specs = load_spec_dir(args.specs)
        store = open_store(args.store, persist=not args.no_persist)
        llm = make_provider(args.provider)
    except (ConfigError, SpecError, OSError) as exc:
        return _fail(EXIT_CONFIG, str(exc))
    except ProviderUnavailable as exc:
        return _fail(EXIT_PROVIDER, str(exc))
    if args.seed_order:
        random.Random(args.seed_order).shuffle(specs)

    sims: list[Simulator] = []
    try:
        report = run_suite(specs, config, llm, store, simulators=sims)
    except ProviderUnavailable as exc:
        return _fail(EXIT_PROVIDER, str(exc))
    except StorageFailure as exc:
        return _fail(EXIT_CONFIG, f"store write failed: {exc}")

    text = report.to_json()
    if args.report in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.report).write_text(text, encoding="utf-8")
    if args.transcript:
        with open(args.transcript, "w", encoding="utf-8") as fh:
            for target, sim in zip(report.targets, sims):
                for entry in sim.log:
                    row = {
                        "target": target.target,
                        "activity": entry.activity,
                        "assignment": entry.assignment,
                        "outcome": entry.outcome,
                        "detail": entry.detail,
                    }
                    fh.write(json.dumps(row, ensure_ascii=True) + "\n")
    if not args.quiet:
        sys.stderr.write(report.format_table())
    return EXIT_OK


def cmd_dsl(args: argparse.Namespace) -> int:
    try:
        source = Path(args.program).read_text(encoding="utf-8")
    except OSError as exc:
        return _fail(EXIT_CONFIG, f"cannot read program: {exc}")
    try:
        program = parse_program(source)
    except DslError as exc:
        return _fail(EXIT_DSL, f"{args.program}: {exc}")
    for item in execute_program(program):
        print(json.dumps(item.assignment, ensure_ascii=True))
    return EXIT_OK


def cmd_store(args: argparse.Namespace) -> int:
    try:
        store = open_store(args.store, persist=False)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, str(exc))
    if args.action == "list":
        for rec in store.records:
            print(
                f"{rec.record_id}\t{rec.source}\t{rec.context.app_name}/{rec.context.page_name}\t"
                f"{rec.mutation_rule or '-'}\t{json.dumps(rec.buggy_input, ensure_ascii=True)}"
            )
        return EXIT_OK
    if args.k < 1:
        return _fail(EXIT_CONFIG, "--k must be >= 1")
    for rec, score in store.query_text(args.context, args.k):
        print(f"{score:.4f}\t{rec.record_id}\t{rec.mutation_rule or '-'}\t{json.dumps(rec.buggy_input, ensure_ascii=True)}")
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    """Re-submit every transcript row to a fresh simulator and compare."""
    try:
        specs = {s.app_name: s for s in load_spec_dir(args.specs)}
        lines = Path(args.transcript).read_text(encoding="utf-8").splitlines()
    except (SpecError, OSError) as exc:
        return _fail(EXIT_CONFIG, str(exc))
    mismatches = 0
    for n, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
            spec = specs[row["target"].split("/", 1)[0]]
            sim = Simulator(spec, start=row["activity"])
            outcome = sim.submit(row["assignment"])
            got = (sim.log[-1].outcome, sim.log[-1].detail)
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            return _fail(EXIT_CONFIG, f"{args.transcript}:{n}: bad row: {exc!r}")
        except SimulatorError as exc:
            return _fail(EXIT_CONFIG, f"{args.transcript}:{n}: {exc}")
        want = (row.get("outcome"), row.get("detail"))
        if got != want:
            mismatches += 1
            print(f"{n}\t{row['target']}\texpected {want[0]} ({want[1]}), got {outcome.kind} ({got[1]})")
    if mismatches:
        return _fail(EXIT_MISMATCH, f"{mismatches} of {len(lines)} submissions replayed differently")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="guifuzz", description=__doc__.split("\n")[0], epilog=EPILOG)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a campaign over a directory of app specs", epilog=EPILOG)
    run.add_argument("--specs", required=True, help="directory of app spec JSON files")
    run.add_argument("--config", help="campaign config JSON (defaults apply when omitted)")
    run.add_argument("--provider", default="live", help="'live' or 'mock:<script.json>' (default: live)")
    run.add_argument("--store", help="example dataset (JSON lines); new crash records are appended")
    run.add_argument("--no-persist", action="store_true", help="keep new store records in memory only")
    run.add_argument("--report", help="report path (default: stdout)")
    run.add_argument("--transcript", help="write every submission as JSON lines to this path")
    run.add_argument("--seed-order", type=int, default=0, help="shuffle app order with this seed (0 keeps file order)")
    run.add_argument("-q", "--quiet", action="store_true", help="do not print the summary table")
    run.set_defaults(func=cmd_run)

    dsl = sub.add_parser("dsl", help="execute a mutation program and print its batch", epilog=EPILOG)
    dsl.add_argument("--program", required=True, help="program file")
    dsl.set_defaults(func=cmd_dsl)

    store = sub.add_parser("store", help="inspect an example dataset", epilog=EPILOG)
    store.add_argument("--store", required=True, help="example dataset (JSON lines)")
    actions = store.add_subparsers(dest="action", required=True)
    actions.add_parser("list", help="print every record")
    query = actions.add_parser("query", help="print the k most similar records")
    query.add_argument("--context", required=True, help="query context text")
    query.add_argument("--k", type=int, default=5)
    store.set_defaults(func=cmd_store)

    replay = sub.add_parser("replay", help="re-submit a run transcript and check every outcome", epilog=EPILOG)
    replay.add_argument("--specs", required=True, help="directory of app spec JSON files")
    replay.add_argument("--transcript", required=True, help="transcript written by run --transcript")
    replay.set_defaults(func=cmd_replay)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
