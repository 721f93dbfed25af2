"""Deterministic prompt rendering for valid-input and generator queries.

All wording comes from ``templates/prompts.txt`` so that prompts can be
audited without reading code.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from string import Template
from typing import Mapping, Sequence

from .dsl import UnusualInput
from .model import CATALOG, INTER, INTRA_EXPLICIT, INTRA_IMPLICIT, ConstraintCatalogEntry, WidgetContext
from .store import ExampleRecord

DEFAULT_CHAR_BUDGET = 12_000
DEFAULT_BATCH_SIZE = 10
FEEDBACK_VALUE_CLIP = 120

FIRST_ROUND = "first_round"
NEXT_ROUND = "next_round"

_ORDINALS = ("first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth")


class EmptyContexts(ValueError):
    pass


class MissingValidInput(ValueError):
    pass


class PromptBudgetExceeded(ValueError):
    pass


def ordinal(i: int) -> str:
    """1-based ordinal word."""
    if 1 <= i <= len(_ORDINALS):
        return _ORDINALS[i - 1]
    suffix = "th" if 10 <= i % 100 <= 20 else {1: "st", 2: "nd", 3: "rd"}.get(i % 10, "th")
    return f"{i}{suffix}"


def parse_templates(text: str) -> dict[str, Template]:
    sections: dict[str, list[str]] = {}
    current = None
    for line in text.split("\n"):
        m = re.fullmatch(r"\[\[(\w+)\]\]", line)
        if m:
            current = m.group(1)
            sections[current] = []
        elif current is not None:
            sections[current].append(line)
    return {k: Template("\n".join(v).rstrip("\n")) for k, v in sections.items()}


@lru_cache(maxsize=1)
def templates() -> dict[str, Template]:
    text = resources.files("guifuzz").joinpath("templates/prompts.txt").read_text(encoding="utf-8")
    return parse_templates(text)


def _t(name: str, **values) -> str:
    return templates()[name].substitute(**values)


@dataclass(frozen=True)
class ValidInputPrompt:
    context: str
    candidate_constraints: str
    question: str

    @property
    def rendered(self) -> str:
        return f"{self.context}\n{self.candidate_constraints}\n{self.question}"


@dataclass(frozen=True)
class FeedbackBundle:
    """Execution feedback: crash inputs and recent non-triggering inputs,
    each paired with the mutation rule that produced it, oldest first."""

    crash_inputs: tuple[tuple[UnusualInput, str], ...] = ()
    non_trigger_inputs: tuple[tuple[UnusualInput, str], ...] = ()

    def __bool__(self) -> bool:
        return bool(self.crash_inputs or self.non_trigger_inputs)


@dataclass(frozen=True)
class GeneratorPrompt:
    examples: str
    inferred_constraints: str
    valid_input: str
    feedback: str
    question: str
    examples_shown: int = field(default=0, compare=False)

    @property
    def rendered(self) -> str:
        parts = [self.examples, self.inferred_constraints, self.valid_input, self.feedback, self.question]
        return "\n\n".join(p for p in parts if p)


def _context_sentence(i: int, ctx: WidgetContext) -> str:
    nearby = ctx.nearby_widgets or "none"
    if ctx.dynamic_hint:
        return _t(
            "p1_widget_hint",
            ordinal=ordinal(i),
            descriptor=ctx.input_widget,
            nearby=nearby,
            hint=ctx.dynamic_hint,
            provoking=ctx.hint_provoking_input,
        )
    return _t("p1_widget", ordinal=ordinal(i), descriptor=ctx.input_widget, nearby=nearby)


def _numbered(entries: Sequence[ConstraintCatalogEntry]) -> str:
    return ", ".join(f"({i}) {e.description}" for i, e in enumerate(entries, start=1))


def build_valid_input_prompt(
    contexts: Sequence[WidgetContext],
    catalog: Sequence[ConstraintCatalogEntry] = CATALOG,
) -> ValidInputPrompt:
    if not contexts:
        raise EmptyContexts("at least one widget context is required")
    first = contexts[0]
    if any((c.app_name, c.page_name) != (first.app_name, first.page_name) for c in contexts):
        raise ValueError("all contexts must come from the same page")
    header = _t("p1_header", page_name=first.page_name, app_name=first.app_name, count=len(contexts))
    context = " ".join([header] + [_context_sentence(i, c) for i, c in enumerate(contexts, start=1)])
    by_cat = {cat: [e for e in catalog if e.category == cat] for cat in (INTRA_EXPLICIT, INTRA_IMPLICIT, INTER)}
    constraints = _t(
        "p2",
        n_explicit=len(by_cat[INTRA_EXPLICIT]),
        explicit=_numbered(by_cat[INTRA_EXPLICIT]),
        n_implicit=len(by_cat[INTRA_IMPLICIT]),
        implicit=_numbered(by_cat[INTRA_IMPLICIT]),
        n_inter=len(by_cat[INTER]),
        inter=_numbered(by_cat[INTER]),
    )
    return ValidInputPrompt(context=context, candidate_constraints=constraints, question=_t("p3"))


def format_assignment(assignment: Mapping[str, str], clip: int | None = None) -> str:
    """Render an assignment on one line with control characters escaped."""
    parts = []
    for wid, value in assignment.items():
        shown = value
        if clip is not None and len(value) > clip:
            shown = value[:clip]
            parts.append(f"{wid}={json.dumps(shown)}...(+{len(value) - clip} chars)")
        else:
            parts.append(f"{wid}={json.dumps(shown)}")
    return "; ".join(parts)


def _render_examples(examples: Sequence[ExampleRecord]) -> str:
    if not examples:
        return ""
    blocks = [_t("gen_examples_header")]
    for i, rec in enumerate(examples, start=1):
        ctx = rec.context
        blocks.append(
            _t(
                "gen_example",
                index=i,
                app_name=ctx.app_name,
                page_name=ctx.page_name,
                input_widget=ctx.input_widget,
                nearby=ctx.nearby_widgets,
                rule=rec.mutation_rule if rec.mutation_rule is not None else "unknown",
                buggy_input=json.dumps(rec.buggy_input),
            )
        )
    return "\n".join(blocks)


def _render_feedback(feedback: FeedbackBundle) -> str:
    sections = []
    for header, items in (("gen_feedback_crash", feedback.crash_inputs), ("gen_feedback_other", feedback.non_trigger_inputs)):
        if not items:
            continue
        lines = [_t(header)]
        for item, rule in items:
            lines.append(
                _t("gen_feedback_item", assignment=format_assignment(item.assignment, FEEDBACK_VALUE_CLIP), rule=rule)
            )
        sections.append("\n".join(lines))
    return "\n".join(sections)


def _render_generator(
    constraints: str,
    valid_input: Mapping[str, str],
    feedback: FeedbackBundle,
    examples: Sequence[ExampleRecord],
    question_variant: str,
    contexts: Sequence[WidgetContext],
    descriptors: Mapping[str, str],
    batch_size: int,
) -> GeneratorPrompt:
    ctx = contexts[0] if contexts else None
    page_name = ctx.page_name if ctx else "the current"
    app_name = ctx.app_name if ctx else "the"
    items = "\n".join(
        _t("gen_valid_item", widget=wid, descriptor=descriptors.get(wid, wid), value=json.dumps(value))
        for wid, value in valid_input.items()
    )
    question = _t("gen_question", batch_size=batch_size)
    if question_variant == NEXT_ROUND:
        question += "\n" + _t("gen_question_next")
    return GeneratorPrompt(
        examples=_render_examples(examples),
        inferred_constraints=_t("gen_constraints", page_name=page_name, app_name=app_name, constraints=constraints),
        valid_input=_t("gen_valid_input", assignments=items),
        feedback=_render_feedback(feedback),
        question=question,
        examples_shown=len(examples),
    )


def build_generator_prompt(
    inferred_constraints: str,
    valid_input: Mapping[str, str],
    feedback: FeedbackBundle = FeedbackBundle(),
    examples: Sequence[ExampleRecord] = (),
    question_variant: str = FIRST_ROUND,
    *,
    contexts: Sequence[WidgetContext] = (),
    descriptors: Mapping[str, str] | None = None,
    batch_size: int = DEFAULT_BATCH_SIZE,
    char_budget: int = DEFAULT_CHAR_BUDGET,
) -> GeneratorPrompt:
    """Render the generator query; over-budget prompts shed examples (last
    first) and then feedback entries (oldest first)."""
    if not valid_input:
        raise MissingValidInput("valid input is required")
    if not inferred_constraints:
        raise MissingValidInput("inferred constraints are required")
    if question_variant not in (FIRST_ROUND, NEXT_ROUND):
        raise ValueError(f"unknown question variant {question_variant!r}")
    examples = list(examples)
    others = list(feedback.non_trigger_inputs)
    crashes = list(feedback.crash_inputs)
    descriptors = descriptors or {}
    while True:
        prompt = _render_generator(
            inferred_constraints,
            valid_input,
            FeedbackBundle(tuple(crashes), tuple(others)),
            examples,
            question_variant,
            contexts,
            descriptors,
            batch_size,
        )
        if len(prompt.rendered) <= char_budget:
            return prompt
        if examples:
            examples.pop()
        elif others:
            others.pop(0)
        elif crashes:
            crashes.pop(0)
        else:
            raise PromptBudgetExceeded(f"prompt needs {len(prompt.rendered)} chars, budget is {char_budget}")
