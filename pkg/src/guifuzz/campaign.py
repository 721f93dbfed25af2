"""The testing loop: obtain a valid input, ask for generators, execute them
against the app, feed the results back, stop on the first crash or when a
budget runs out."""

from __future__ import annotations

import dataclasses
import json
import logging
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .dsl import DslError, GeneratorProgram, UnusualInput, execute_program, parse_program
from .hierarchy import diff_pages, extract_widget_context, identify_input_widgets
from .llm import (
    REPRODUCTION_TEMPERATURE,
    BudgetExhausted,
    CallCap,
    CompletionRequest,
    GeneratorResponse,
    ParseMiss,
    Provider,
    parse_generator_response,
    parse_valid_input_response,
)
from .model import CATALOG, ConstraintCatalogEntry, GuiPage, InputWidget, WidgetContext
from .prompts import (
    FIRST_ROUND,
    NEXT_ROUND,
    FeedbackBundle,
    build_generator_prompt,
    build_valid_input_prompt,
    format_assignment,
)
from .simulator import AppSpec, Crash, PageTransition, Rejected, Simulator
from .store import ExampleStore

log = logging.getLogger(__name__)

CLOCKS = ("wall", "simulated")


class ValidInputUnobtainable(RuntimeError):
    pass


@dataclass(frozen=True)
class CampaignConfig:
    attempt_budget: int = 30
    time_budget_seconds: int = 1800
    k_examples: int = 5
    batch_size: int = 10
    valid_input_retry_cap: int = 5
    feedback_window: int = 10
    llm_call_cap: int = 60
    clock: str = "wall"
    # synthetic costs charged by the simulated clock
    sim_submit_seconds: float = 5.0
    sim_llm_seconds: float = 20.0
    parse_retry_cap: int = 3
    char_budget: int = 12_000
    temperature: float = REPRODUCTION_TEMPERATURE

    def __post_init__(self) -> None:
        # attempt_budget=0 is accepted as a degenerate "no attempts" run
        if self.attempt_budget < 0 or self.k_examples < 0:
            raise ValueError("attempt_budget and k_examples must be >= 0")
        for name in ("time_budget_seconds", "batch_size", "valid_input_retry_cap", "feedback_window",
                     "llm_call_cap", "parse_retry_cap", "char_budget"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.clock not in CLOCKS:
            raise ValueError(f"clock must be one of {CLOCKS}")
        if self.sim_submit_seconds < 0 or self.sim_llm_seconds < 0:
            raise ValueError("simulated costs must be >= 0")

    @classmethod
    def from_dict(cls, obj: dict) -> "CampaignConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        return cls(**obj)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


class Clock:
    def __init__(self, config: CampaignConfig) -> None:
        self.simulated = config.clock == "simulated"
        self.submit_cost = config.sim_submit_seconds
        self.llm_cost = config.sim_llm_seconds
        self._start = time.monotonic()
        self._sim = 0.0

    def elapsed(self) -> float:
        return self._sim if self.simulated else time.monotonic() - self._start

    def charge_llm(self) -> None:
        if self.simulated:
            self._sim += self.llm_cost

    def charge_submit(self) -> None:
        if self.simulated:
            self._sim += self.submit_cost


@dataclass
class ValidInputResult:
    valid_input: dict[str, str]
    inferred_constraints: str
    contexts: list[WidgetContext]
    submissions: int = 0
    log: list[dict] = field(default_factory=list)


@dataclass
class RoundLog:
    mutation_rule: str
    program: str
    items: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"mutation_rule": self.mutation_rule, "program": self.program, "items": self.items}


@dataclass
class TargetReport:
    target: str
    detected: bool = False
    crash_id: str | None = None
    crash_input: dict[str, str] | None = None
    attempts_used: int = 0
    elapsed_seconds: float = 0.0
    valid_input: dict[str, str] | None = None
    inferred_constraints: str = ""
    valid_input_submissions: int = 0
    llm_calls: int = 0
    reason: str | None = None
    valid_input_log: list[dict] = field(default_factory=list)
    rounds: list[RoundLog] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["rounds"] = [r.to_dict() for r in self.rounds]
        return d


@dataclass
class CampaignReport:
    targets: list[TargetReport]
    config: CampaignConfig

    @property
    def aggregates(self) -> dict[str, float]:
        n = len(self.targets)
        if n == 0:
            return {"targets": 0, "detected": 0, "bug_rate": 0.0, "mean_attempts": 0.0, "mean_minutes": 0.0}
        detected = [t for t in self.targets if t.detected]
        # undetected targets count with their full budget
        attempts = [t.attempts_used if t.detected else self.config.attempt_budget for t in self.targets]
        minutes = [
            t.elapsed_seconds / 60 if t.detected else self.config.time_budget_seconds / 60 for t in self.targets
        ]
        return {
            "targets": n,
            "detected": len(detected),
            "bug_rate": len(detected) / n,
            "mean_attempts": sum(attempts) / n,
            "mean_minutes": sum(minutes) / n,
        }

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "aggregates": self.aggregates,
            "targets": [t.to_dict() for t in self.targets],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=True) + "\n"

    def format_table(self) -> str:
        rows = [f"{'Target':<32} {'Bug':>5} {'Attempt(#)':>10} {'Min(#)':>8}  Crash"]
        for t in self.targets:
            rows.append(
                f"{t.target:<32} {'yes' if t.detected else 'no':>5} {t.attempts_used:>10d} "
                f"{t.elapsed_seconds / 60:>8.2f}  {t.crash_id or '-'}"
            )
        agg = self.aggregates
        rows.append("")
        rows.append(f"{'Bug(%)':<12} {'Attempt(#)':>10} {'Min(#)':>8}")
        rows.append(f"{agg['bug_rate'] * 100:<12.1f} {agg['mean_attempts']:>10.2f} {agg['mean_minutes']:>8.2f}")
        return "\n".join(rows) + "\n"


# ---------------------------------------------------------------- helpers


def _ask(
    llm: Provider,
    prompt: str,
    tag: str,
    parse: Callable[[str], Any],
    config: CampaignConfig,
    clock: Clock,
) -> Any:
    """Query until the reply parses, at most ``parse_retry_cap`` times."""
    last: Exception | None = None
    for _ in range(config.parse_retry_cap):
        if clock.elapsed() >= config.time_budget_seconds:
            raise BudgetExhausted("time budget exhausted")
        clock.charge_llm()
        raw = llm.complete(CompletionRequest(prompt=prompt, temperature=config.temperature, seed_tag=tag))
        try:
            return parse(raw)
        except (ParseMiss, DslError) as exc:
            log.info("unparseable reply for %s: %s", tag, exc)
            last = exc
    raise ParseMiss(f"no parseable reply after {config.parse_retry_cap} tries: {last}")


def _nearest_widget(page: GuiPage, widgets: Sequence[InputWidget], node_bounds: tuple[int, int, int, int]) -> int:
    cy = (node_bounds[1] + node_bounds[3]) / 2
    best, best_d = 0, float("inf")
    for i, w in enumerate(widgets):
        b = page.node_at(w.node_path).bounds
        d = abs((b[1] + b[3]) / 2 - cy)
        if d < best_d:
            best, best_d = i, d
    return best


def page_context(contexts: Sequence[WidgetContext]) -> WidgetContext:
    """One context for the whole page, used for retrieval and the store."""
    if len(contexts) == 1:
        return contexts[0]
    nearby: list[str] = []
    for c in contexts:
        for label in c.nearby_widgets.split(";"):
            if label and label not in nearby:
                nearby.append(label)
    hints = [c.dynamic_hint for c in contexts if c.dynamic_hint]
    first = contexts[0]
    return WidgetContext(
        app_name=first.app_name,
        page_name=first.page_name,
        input_widget=";".join(c.input_widget for c in contexts),
        nearby_widgets=";".join(nearby),
        dynamic_hint="; ".join(hints),
    )


def buggy_input_text(assignment: dict[str, str], targets: Sequence[str]) -> str:
    values = {k: assignment[k] for k in targets}
    if len(values) == 1:
        (value,) = values.values()
        if value:
            return value
    return format_assignment(values)


def acquire_valid_input(
    sim: Simulator,
    page: GuiPage,
    widgets: Sequence[InputWidget],
    llm: Provider,
    catalog: Sequence[ConstraintCatalogEntry] = CATALOG,
    retry_cap: int = 5,
    *,
    config: CampaignConfig | None = None,
    clock: Clock | None = None,
) -> ValidInputResult:
    """Ask for a valid input until one moves the app to the next page.
    Rejections feed their dynamic hint into the next prompt."""
    config = config or CampaignConfig()
    clock = clock or Clock(config)
    contexts = [extract_widget_context(page, w) for w in widgets]
    keys = [w.key for w in widgets]
    tag = f"valid/{page.app_name}/{page.activity_name}"
    result = ValidInputResult({}, "", contexts)
    for _ in range(retry_cap):
        prompt = build_valid_input_prompt(result.contexts, catalog)
        response = _ask(llm, prompt.rendered, tag, lambda raw: parse_valid_input_response(raw, keys), config, clock)
        before = sim.observe()
        outcome = sim.submit(response.valid_input)
        clock.charge_submit()
        result.submissions += 1
        entry = {"input": response.valid_input, "outcome": outcome.kind}
        result.log.append(entry)
        if isinstance(outcome, PageTransition):
            sim.reset()
            result.valid_input = response.valid_input
            result.inferred_constraints = response.inferred_constraints
            return result
        if isinstance(outcome, Rejected):
            hint = diff_pages(before, sim.observe(), "")
            if hint is not None:
                i = _nearest_widget(before, widgets, hint.nodes[0].bounds)
                provoking = response.valid_input[keys[i]]
                result.contexts[i] = result.contexts[i].with_hint(hint.text, provoking)
                entry["hint"] = hint.text
        else:
            entry["crash_id"] = outcome.crash_id
        sim.reset()
    raise ValidInputUnobtainable(f"no valid input after {retry_cap} tries")


def _parse_generator(raw: str, keys: Sequence[str]) -> tuple[GeneratorResponse, GeneratorProgram]:
    response = parse_generator_response(raw)
    program = parse_program(response.program_source)
    stray = [t for t in program.targets if t not in keys]
    if stray:
        raise ParseMiss(f"generator targets unknown widgets {stray}")
    return response, program


# ---------------------------------------------------------------- loop


def run_target(
    sim: Simulator,
    target_page: str,
    config: CampaignConfig,
    llm: Provider,
    store: ExampleStore,
    catalog: Sequence[ConstraintCatalogEntry] = CATALOG,
) -> TargetReport:
    clock = Clock(config)
    capped = CallCap(llm, config.llm_call_cap)
    sim.start = target_page
    sim.reset()
    page = sim.observe()
    report = TargetReport(target=f"{page.app_name}/{page.activity_name}")
    widgets = identify_input_widgets(page)

    def finish(reason: str | None) -> TargetReport:
        report.reason = reason
        report.elapsed_seconds = clock.elapsed()
        report.llm_calls = capped.calls
        return report

    if not widgets:
        return finish("no input widgets")
    keys = [w.key for w in widgets]
    descriptors = {w.key: w.descriptor for w in widgets}

    try:
        vi = acquire_valid_input(
            sim, page, widgets, capped, catalog, config.valid_input_retry_cap, config=config, clock=clock
        )
    except (ValidInputUnobtainable, BudgetExhausted, ParseMiss) as exc:
        report.valid_input_submissions = sum(1 for e in sim.log if e.activity == target_page)
        return finish(f"valid input: {exc}")
    report.valid_input = vi.valid_input
    report.inferred_constraints = vi.inferred_constraints
    report.valid_input_submissions = vi.submissions
    report.valid_input_log = vi.log

    query = page_context(vi.contexts)
    submitted = {tuple(sorted(e["input"].items())) for e in vi.log}
    crash_feedback: list[tuple[UnusualInput, str]] = []
    recent: deque[tuple[UnusualInput, str]] = deque(maxlen=config.feedback_window)
    tag = f"generator/{page.app_name}/{page.activity_name}"

    while True:
        if report.attempts_used >= config.attempt_budget:
            return finish("attempt budget exhausted")
        if clock.elapsed() >= config.time_budget_seconds:
            return finish("time budget exhausted")
        examples = store.retrieve_top_k(query, config.k_examples) if config.k_examples > 0 else []
        prompt = build_generator_prompt(
            vi.inferred_constraints,
            vi.valid_input,
            FeedbackBundle(tuple(crash_feedback), tuple(recent)),
            examples,
            NEXT_ROUND if report.rounds else FIRST_ROUND,
            contexts=vi.contexts,
            descriptors=descriptors,
            batch_size=config.batch_size,
            char_budget=config.char_budget,
        )
        try:
            response, program = _ask(
                capped, prompt.rendered, tag, lambda raw: _parse_generator(raw, keys), config, clock
            )
        except BudgetExhausted as exc:
            return finish(str(exc))
        except ParseMiss as exc:
            return finish(f"generator: {exc}")

        rule = response.mutation_rule
        round_log = RoundLog(rule, response.program_source)
        report.rounds.append(round_log)
        fresh: list[tuple[UnusualInput, str]] = []
        for item in execute_program(program):
            full = {**vi.valid_input, **item.assignment}
            entry: dict[str, Any] = {"input": full, "trace": list(item.trace)}
            round_log.items.append(entry)
            key = tuple(sorted(full.items()))
            if report.detected:
                entry["status"] = "not_submitted"
                continue
            if key in submitted:
                entry["status"] = "duplicate"
                continue
            if report.attempts_used >= config.attempt_budget or clock.elapsed() >= config.time_budget_seconds:
                entry["status"] = "not_submitted"
                continue
            outcome = sim.submit(full)
            clock.charge_submit()
            submitted.add(key)
            report.attempts_used += 1
            entry["status"] = outcome.kind
            unusual = dataclasses.replace(item, assignment=full)
            if isinstance(outcome, Crash):
                entry["crash_id"] = outcome.crash_id
                report.detected = True
                report.crash_id = outcome.crash_id
                report.crash_input = full
                store.add_record(query, rule, buggy_input_text(full, program.targets))
                crash_feedback.append((unusual, rule))
            else:
                if isinstance(outcome, Rejected):
                    entry["hint"] = outcome.hint_text
                sim.reset()
                fresh.append((unusual, rule))
        if report.detected:
            return finish(None)
        recent.extend(fresh)


def suite_targets(specs: Sequence[AppSpec]) -> list[tuple[AppSpec, str]]:
    return [(spec, page.activity_name) for spec in specs for page in spec.input_pages()]


def run_suite(
    specs: Sequence[AppSpec],
    config: CampaignConfig,
    llm: Provider,
    store: ExampleStore,
    catalog: Sequence[ConstraintCatalogEntry] = CATALOG,
    simulators: list[Simulator] | None = None,
) -> CampaignReport:
    """Run every input page of every spec, in order. ``simulators``, when
    given, collects the simulator used for each target (for audits)."""
    targets = suite_targets(specs)
    if not targets:
        raise ValueError("no targets: specs declare no input pages")
    reports = []
    for spec, activity in targets:
        sim = Simulator(spec, start=activity)
        if simulators is not None:
            simulators.append(sim)
        reports.append(run_target(sim, activity, config, llm, store, catalog))
        log.info("%s: detected=%s attempts=%d", reports[-1].target, reports[-1].detected, reports[-1].attempts_used)
    return CampaignReport(reports, config)
