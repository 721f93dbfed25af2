"""Harness for sweeping the number of retrieved examples.

The scripted provider below stands in for a model whose generators get worse
when it is shown more or fewer examples than it works best with. It only
checks that the campaign wires k through retrieval into the prompt; it says
nothing about real models.
"""

from __future__ import annotations

import dataclasses
import re
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .campaign import CampaignConfig, run_suite, suite_targets
from .llm import CompletionRequest, MockProvider
from .simulator import AppSpec
from .store import load_seed_dataset

WEAK_SUFFIX = "@weak"
_EXAMPLE_RE = re.compile(r"^Example \d+:", re.MULTILINE)


def examples_shown(prompt: str) -> int:
    return len(_EXAMPLE_RE.findall(prompt))


class DegradingMock(MockProvider):
    """Routes a generator query to its ``@weak`` replies when the prompt
    shows a number of examples other than ``best_k``. The further off, the
    more targets degrade: target ``rank`` degrades when
    ``rank % period < |shown - best_k|``."""

    def __init__(
        self,
        script: Mapping[str, Sequence[str]],
        ranks: Mapping[str, int],
        best_k: int = 5,
        period: int = 6,
        call_cap: int | None = None,
    ) -> None:
        super().__init__(script, call_cap)
        self.ranks = dict(ranks)
        self.best_k = best_k
        self.period = period

    def route(self, request: CompletionRequest) -> str:
        tag = request.seed_tag
        if not tag.startswith("generator/") or tag not in self.ranks:
            return tag
        distance = abs(examples_shown(request.prompt) - self.best_k)
        if self.ranks[tag] % self.period < distance:
            return tag + WEAK_SUFFIX
        return tag


def generator_ranks(specs: Sequence[AppSpec]) -> dict[str, int]:
    return {f"generator/{spec.app_name}/{activity}": i for i, (spec, activity) in enumerate(suite_targets(specs))}


def run_k_sweep(
    specs: Sequence[AppSpec],
    script: Mapping[str, Sequence[str]],
    seed_path: str | Path,
    ks: Iterable[int] = range(1, 11),
    config: CampaignConfig | None = None,
    best_k: int = 5,
) -> dict[int, int]:
    """Detected-target count per k. Each k starts from a fresh copy of the
    seed dataset so runs do not leak records into each other."""
    base = config or CampaignConfig(clock="simulated")
    ranks = generator_ranks(specs)
    counts = {}
    for k in ks:
        store = load_seed_dataset(seed_path, persist=False)
        llm = DegradingMock(script, ranks, best_k=best_k)
        report = run_suite(specs, dataclasses.replace(base, k_examples=k), llm, store)
        counts[k] = report.aggregates["detected"]
    return counts
