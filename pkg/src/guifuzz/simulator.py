"""Declarative app-under-test.

An app spec lists pages; each page declares its input widgets, the validation
rules the app enforces (with the hint text it shows on violation) and crash
predicates standing in for real defects. Crash predicates are checked before
validation, which models bugs in code that touches the raw string before any
validator runs.
"""

from __future__ import annotations

import datetime as dt
import json
import os
import re
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Any, Union

from .dsl import CHARSET_TABLES, NUMBER_RE
from .model import GuiPage, ViewNode

SCREEN_W, SCREEN_H = 1080, 1920
CRASH_ACTIVITY = "CrashState"
FINISHED_ACTIVITY = "Finished"
CRASH_TEXT = "app has stopped"

INT32_MIN, INT32_MAX = -(2**31), 2**31 - 1

_INT_RE = re.compile(r"[+-]?[0-9]+")
_DECIMAL_RE = re.compile(r"[+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)")
_DATE_RE = re.compile(r"[0-9]{4}-[0-9]{2}-[0-9]{2}")
_PURE_TEXT_RE = re.compile(r"[A-Za-z0-9 ]+")
_PURE_DIGITS_RE = re.compile(r"[0-9]+")


class SpecError(ValueError):
    pass


class UnknownWidget(KeyError):
    pass


class SimulatorError(RuntimeError):
    pass


# ---------------------------------------------------------------- rules

RULE_KINDS = {
    # kind: required fields beyond "widget"
    "must_parse_int": (),
    "must_parse_decimal": (),
    "pure_text": (),
    "pure_digits": (),
    "min_value": ("value",),
    "max_value": ("value",),
    "min_len": ("value",),
    "max_len": ("value",),
    "requires_class": ("value",),
    "forbids_chars": ("value",),
    "unique_in": ("value",),
    "less_than": ("other",),
    "sum_equals": ("widgets", "total"),
    "date_before": ("other",),
    "equals": ("other",),
    "non_equal": ("other",),
}
REQUIRED_CLASSES = ("upper", "digit", "special")


@dataclass(frozen=True)
class ConstraintRule:
    kind: str
    widget: str
    hint_text: str = ""
    visibility: str = "implicit"
    value: Any = None
    other: str | None = None
    widgets: tuple[str, ...] = ()

    def referenced(self) -> list[str]:
        refs = [self.widget]
        if self.other is not None:
            refs.append(self.other)
        refs.extend(self.widgets)
        return refs


def rule_from_dict(obj: dict, where: str = "rule") -> ConstraintRule:
    if not isinstance(obj, dict):
        raise SpecError(f"{where}: rule must be an object")
    kind = obj.get("kind")
    if kind not in RULE_KINDS:
        raise SpecError(f"{where}: unknown rule kind {kind!r}")
    for req in RULE_KINDS[kind]:
        if req not in obj:
            raise SpecError(f"{where}: {kind} requires {req!r}")
    widget = obj.get("total") if kind == "sum_equals" else obj.get("widget")
    if not isinstance(widget, str):
        raise SpecError(f"{where}: rule needs a widget")
    visibility = obj.get("visibility", "implicit")
    if visibility not in ("explicit", "implicit"):
        raise SpecError(f"{where}: visibility must be explicit or implicit")
    value = obj.get("value")
    if kind == "requires_class" and value not in REQUIRED_CLASSES:
        raise SpecError(f"{where}: requires_class value must be one of {REQUIRED_CLASSES}")
    if kind in ("min_len", "max_len") and not (isinstance(value, int) and value >= 0):
        raise SpecError(f"{where}: {kind} needs a non-negative integer")
    if kind in ("min_value", "max_value"):
        if isinstance(value, bool) or not isinstance(value, (int, float, str)):
            raise SpecError(f"{where}: {kind} needs a number")
        value = Decimal(str(value))
    if kind == "unique_in":
        if not isinstance(value, list):
            raise SpecError(f"{where}: unique_in needs a list")
        value = tuple(value)
    if kind == "forbids_chars" and not isinstance(value, str):
        raise SpecError(f"{where}: forbids_chars needs a string")
    hint = obj.get("hint_text", "")
    if not isinstance(hint, str) or not hint:
        raise SpecError(f"{where}: hint_text is required")
    return ConstraintRule(
        kind=kind,
        widget=widget,
        hint_text=hint,
        visibility=visibility,
        value=value,
        other=obj.get("other"),
        widgets=tuple(obj.get("widgets", ())),
    )


def as_number(text: str) -> Decimal | None:
    return Decimal(text) if NUMBER_RE.fullmatch(text) else None


def as_date(text: str) -> dt.date | None:
    if not _DATE_RE.fullmatch(text):
        return None
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        return None


def _lt(a: Any, b: Any) -> bool:
    return a is not None and b is not None and a < b


def violates(rule: ConstraintRule, values: dict[str, str]) -> bool:
    v = values[rule.widget]
    kind = rule.kind
    if kind == "must_parse_int":
        return not _INT_RE.fullmatch(v)
    if kind == "must_parse_decimal":
        return not _DECIMAL_RE.fullmatch(v)
    if kind == "pure_text":
        return not _PURE_TEXT_RE.fullmatch(v)
    if kind == "pure_digits":
        return not _PURE_DIGITS_RE.fullmatch(v)
    if kind == "min_value":
        n = as_number(v)
        return n is None or n < rule.value
    if kind == "max_value":
        n = as_number(v)
        return n is None or n > rule.value
    if kind == "min_len":
        return len(v) < rule.value
    if kind == "max_len":
        return len(v) > rule.value
    if kind == "requires_class":
        if rule.value == "upper":
            return not any("A" <= c <= "Z" for c in v)
        if rule.value == "digit":
            return not any("0" <= c <= "9" for c in v)
        return not any(not c.isalnum() and not c.isspace() for c in v)
    if kind == "forbids_chars":
        return any(c in rule.value for c in v)
    if kind == "unique_in":
        return v in rule.value
    if kind == "less_than":
        return not _lt(as_number(v), as_number(values[rule.other]))
    if kind == "date_before":
        return not _lt(as_date(v), as_date(values[rule.other]))
    if kind == "equals":
        return v != values[rule.other]
    if kind == "non_equal":
        return v == values[rule.other]
    if kind == "sum_equals":
        parts = [as_number(values[w]) for w in rule.widgets]
        total = as_number(v)
        if total is None or any(p is None for p in parts):
            return True
        return sum(parts, Decimal(0)) != total
    raise AssertionError(kind)


# ---------------------------------------------------------------- crash predicates

Expr = Union[list, int, float, str]

_COMPARATORS = {
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
}
_WIDGET_UNARY = {"num", "len", "str", "is_empty"}


def _unguarded_parse(text: str, kind: str) -> bool:
    """True when a parser called on the raw string would throw."""
    if kind == "int":
        if not _INT_RE.fullmatch(text):
            return True
        return not INT32_MIN <= int(text) <= INT32_MAX
    return not NUMBER_RE.fullmatch(text.strip())


def validate_expr(expr: Expr, widgets: set[str], where: str) -> None:
    if isinstance(expr, bool):
        raise SpecError(f"{where}: booleans are not expressions")
    if isinstance(expr, (int, float)):
        return
    if not isinstance(expr, list) or not expr or not isinstance(expr[0], str):
        raise SpecError(f"{where}: malformed expression {expr!r}")
    op, args = expr[0], expr[1:]

    def need_widget(name: Any) -> None:
        if name not in widgets:
            raise SpecError(f"{where}: unknown widget {name!r}")

    if op in _WIDGET_UNARY:
        if len(args) != 1:
            raise SpecError(f"{where}: {op} takes one widget")
        need_widget(args[0])
    elif op in _COMPARATORS or op in ("+", "-"):
        if len(args) != 2:
            raise SpecError(f"{where}: {op} takes two operands")
        for a in args:
            validate_expr(a, widgets, where)
    elif op in ("and", "or"):
        if not args:
            raise SpecError(f"{where}: {op} needs operands")
        for a in args:
            validate_expr(a, widgets, where)
    elif op == "not":
        if len(args) != 1:
            raise SpecError(f"{where}: not takes one operand")
        validate_expr(args[0], widgets, where)
    elif op == "contains":
        if len(args) != 2 or not isinstance(args[1], str):
            raise SpecError(f"{where}: contains takes a widget and a substring")
        need_widget(args[0])
    elif op == "contains_class":
        if len(args) != 2 or args[1] not in CHARSET_TABLES:
            raise SpecError(f"{where}: contains_class takes a widget and a charset class")
        need_widget(args[0])
    elif op == "len_exceeds":
        if len(args) != 2 or not isinstance(args[1], int):
            raise SpecError(f"{where}: len_exceeds takes a widget and an integer")
        need_widget(args[0])
    elif op == "unguarded_parse":
        if len(args) != 2 or args[1] not in ("int", "decimal"):
            raise SpecError(f"{where}: unguarded_parse takes a widget and int|decimal")
        need_widget(args[0])
    elif op in ("date_before", "equals"):
        if len(args) != 2:
            raise SpecError(f"{where}: {op} takes two widgets")
        need_widget(args[0])
        need_widget(args[1])
    elif op == "violates":
        if len(args) != 1:
            raise SpecError(f"{where}: violates takes one rule")
        rule = rule_from_dict({"hint_text": "-", **args[0]} if isinstance(args[0], dict) else args[0], where)
        for w in rule.referenced():
            need_widget(w)
    else:
        raise SpecError(f"{where}: unknown operator {op!r}")


def evaluate(expr: Expr, values: dict[str, str]) -> Any:
    if isinstance(expr, (int, float)):
        return Decimal(str(expr))
    op, args = expr[0], expr[1:]
    if op == "num":
        return as_number(values[args[0]])
    if op == "len":
        return Decimal(len(values[args[0]]))
    if op == "str":
        return values[args[0]]
    if op == "is_empty":
        return values[args[0]] == ""
    if op in _COMPARATORS:
        a, b = evaluate(args[0], values), evaluate(args[1], values)
        if a is None or b is None or type(a) is not type(b):
            return False
        return _COMPARATORS[op](a, b)
    if op in ("+", "-"):
        a, b = evaluate(args[0], values), evaluate(args[1], values)
        if not isinstance(a, Decimal) or not isinstance(b, Decimal):
            return None
        return a + b if op == "+" else a - b
    if op == "and":
        return all(evaluate(a, values) is True for a in args)
    if op == "or":
        return any(evaluate(a, values) is True for a in args)
    if op == "not":
        return evaluate(args[0], values) is not True
    if op == "contains":
        return args[1] in values[args[0]]
    if op == "contains_class":
        text = values[args[0]]
        return any(ch in text for ch in CHARSET_TABLES[args[1]])
    if op == "len_exceeds":
        return len(values[args[0]]) > args[1]
    if op == "unguarded_parse":
        return _unguarded_parse(values[args[0]], args[1])
    if op == "date_before":
        return _lt(as_date(values[args[0]]), as_date(values[args[1]]))
    if op == "equals":
        return values[args[0]] == values[args[1]]
    if op == "violates":
        return violates(rule_from_dict({"hint_text": "-", **args[0]}), values)
    raise AssertionError(op)


@dataclass(frozen=True)
class CrashPredicate:
    crash_id: str
    condition: Expr
    message: str = ""


# ---------------------------------------------------------------- specs


@dataclass(frozen=True)
class WidgetSpec:
    id: str
    descriptor: str
    neighbors: tuple[str, ...] = ()
    node_class: str = "android.widget.EditText"


@dataclass(frozen=True)
class PageSpec:
    activity_name: str
    widgets: tuple[WidgetSpec, ...]
    rules: tuple[ConstraintRule, ...] = ()
    crashes: tuple[CrashPredicate, ...] = ()
    success_transition: str | None = None
    title: str = ""

    def widget_ids(self) -> list[str]:
        return [w.id for w in self.widgets]


@dataclass(frozen=True)
class AppSpec:
    app_name: str
    pages: tuple[PageSpec, ...]
    categories: tuple[str, ...] = field(default=(), compare=False)

    def page(self, activity_name: str) -> PageSpec:
        for p in self.pages:
            if p.activity_name == activity_name:
                return p
        raise KeyError(activity_name)

    def input_pages(self) -> list[PageSpec]:
        return [p for p in self.pages if p.widgets]


def _page_from_dict(obj: dict, where: str) -> PageSpec:
    if not isinstance(obj, dict):
        raise SpecError(f"{where}: page must be an object")
    activity = obj.get("activity_name")
    if not isinstance(activity, str) or not activity:
        raise SpecError(f"{where}: activity_name is required")
    widgets = []
    for i, w in enumerate(obj.get("widgets", [])):
        if not isinstance(w, dict) or not isinstance(w.get("id"), str) or not w["id"]:
            raise SpecError(f"{where}.widgets[{i}]: widget needs an id")
        widgets.append(
            WidgetSpec(
                id=w["id"],
                descriptor=w.get("descriptor", ""),
                neighbors=tuple(w.get("neighbors", ())),
                node_class=w.get("class", "android.widget.EditText"),
            )
        )
    ids = [w.id for w in widgets]
    if len(set(ids)) != len(ids):
        raise SpecError(f"{where}: duplicate widget ids")
    declared = set(ids)
    rules = []
    for i, r in enumerate(obj.get("rules", [])):
        rule = rule_from_dict(r, f"{where}.rules[{i}]")
        for ref in rule.referenced():
            if ref not in declared:
                raise SpecError(f"{where}.rules[{i}]: unknown widget {ref!r}")
        rules.append(rule)
    crashes = []
    for i, c in enumerate(obj.get("crashes", [])):
        if not isinstance(c, dict) or not isinstance(c.get("crash_id"), str):
            raise SpecError(f"{where}.crashes[{i}]: crash needs a crash_id")
        validate_expr(c.get("condition"), declared, f"{where}.crashes[{i}]")
        crashes.append(CrashPredicate(c["crash_id"], c["condition"], c.get("message", "")))
    return PageSpec(
        activity_name=activity,
        widgets=tuple(widgets),
        rules=tuple(rules),
        crashes=tuple(crashes),
        success_transition=obj.get("success_transition"),
        title=obj.get("title", ""),
    )


def app_spec_from_dict(obj: dict) -> AppSpec:
    if not isinstance(obj, dict):
        raise SpecError("app spec must be an object")
    app_name = obj.get("app_name")
    if not isinstance(app_name, str) or not app_name:
        raise SpecError("app_name is required")
    pages = tuple(_page_from_dict(p, f"pages[{i}]") for i, p in enumerate(obj.get("pages", [])))
    if not pages:
        raise SpecError("app spec has no pages")
    names = [p.activity_name for p in pages]
    if len(set(names)) != len(names) or {CRASH_ACTIVITY, FINISHED_ACTIVITY} & set(names):
        raise SpecError("activity names must be unique and not reserved")
    for p in pages:
        if p.success_transition is not None and p.success_transition not in names:
            raise SpecError(f"{p.activity_name}: unknown transition target {p.success_transition!r}")
    return AppSpec(app_name=app_name, pages=pages, categories=tuple(obj.get("categories", ())))


def load_app_spec(path: str | os.PathLike) -> AppSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except ValueError as exc:
        raise SpecError(f"{path}: not JSON ({exc})") from None
    try:
        return app_spec_from_dict(obj)
    except SpecError as exc:
        raise SpecError(f"{path}: {exc}") from None


def load_spec_dir(path: str | os.PathLike) -> list[AppSpec]:
    files = sorted(Path(path).glob("*.json"))
    if not files:
        raise SpecError(f"no app specs in {path}")
    return [load_app_spec(f) for f in files]


# ---------------------------------------------------------------- rendering

ROW_TOP = 200
EDIT_H = 120
HELP_H = 50
PAD = 10


def _row_height(page: PageSpec, widget: WidgetSpec) -> int:
    n_help = sum(1 for r in page.rules if r.visibility == "explicit" and r.widget == widget.id)
    # the error slot is always reserved so a hint never shifts other nodes
    return PAD + EDIT_H + HELP_H * (n_help + 1) + PAD


def render_page(
    app_name: str,
    page: PageSpec,
    values: dict[str, str] | None = None,
    error: tuple[str, int, str] | None = None,
) -> GuiPage:
    """Render a page spec as a view tree. ``error`` is (widget, rule index, text)."""
    values = values or {}
    rows = []
    y = ROW_TOP
    for w in page.widgets:
        h = _row_height(page, w)
        kids = []
        n = max(1, len(w.neighbors))
        span = (400 - 40) // n
        for j, text in enumerate(w.neighbors):
            x0 = 40 + j * span
            kids.append(ViewNode("android.widget.TextView", "", text, "", (x0, y + PAD, x0 + span - 5, y + PAD + EDIT_H)))
        kids.append(
            ViewNode(
                w.node_class,
                w.id,
                values.get(w.id, ""),
                w.descriptor,
                (420, y + PAD, 1040, y + PAD + EDIT_H),
            )
        )
        hy = y + PAD + EDIT_H
        helps = [r for r in page.rules if r.visibility == "explicit" and r.widget == w.id]
        for j, rule in enumerate(helps):
            kids.append(ViewNode("android.widget.TextView", f"{w.id}_help{j}", rule.hint_text, "", (420, hy, 1040, hy + HELP_H)))
            hy += HELP_H
        if error is not None and error[0] == w.id:
            kids.append(ViewNode("android.widget.TextView", f"{w.id}_error{error[1]}", error[2], "", (420, hy, 1040, hy + HELP_H)))
        rows.append(ViewNode("android.widget.LinearLayout", "", "", "", (0, y, SCREEN_W, y + h), tuple(kids)))
        y += h
    title = ViewNode("android.widget.TextView", "title", page.title or page.activity_name, "", (40, 60, 1040, 160))
    submit = ViewNode("android.widget.Button", "submit", "Submit", "", (40, y + 40, 1040, y + 160))
    root = ViewNode("android.widget.FrameLayout", "", "", "", (0, 0, SCREEN_W, SCREEN_H), (title, *rows, submit))
    return GuiPage(app_name, page.activity_name, root)


def _sentinel(app_name: str, activity: str, text: str) -> GuiPage:
    return GuiPage(app_name, activity, ViewNode("android.widget.TextView", "", text, "", (0, 0, SCREEN_W, SCREEN_H)))


# ---------------------------------------------------------------- state machine


@dataclass(frozen=True)
class PageTransition:
    next_activity: str | None

    kind = "transition"


@dataclass(frozen=True)
class Rejected:
    after_page: GuiPage
    hint_text: str
    widget: str
    rule_index: int

    kind = "rejected"


@dataclass(frozen=True)
class Crash:
    crash_id: str
    message: str

    kind = "crash"


SubmissionOutcome = Union[PageTransition, Rejected, Crash]


@dataclass(frozen=True)
class LogEntry:
    activity: str
    assignment: dict[str, str]
    outcome: str
    detail: str


class Simulator:
    """Single-threaded simulated app positioned on one of its pages."""

    def __init__(self, spec: AppSpec, start: str | None = None) -> None:
        self.spec = spec
        self.start = start or spec.pages[0].activity_name
        spec.page(self.start)
        self.log: list[LogEntry] = []
        self.reset()

    def reset(self) -> None:
        self._activity = self.start
        self._values: dict[str, str] = {}
        self._error: tuple[str, int, str] | None = None

    @property
    def activity(self) -> str:
        return self._activity

    def observe(self) -> GuiPage:
        if self._activity == CRASH_ACTIVITY:
            return _sentinel(self.spec.app_name, CRASH_ACTIVITY, CRASH_TEXT)
        if self._activity == FINISHED_ACTIVITY:
            return _sentinel(self.spec.app_name, FINISHED_ACTIVITY, "done")
        return render_page(self.spec.app_name, self.spec.page(self._activity), self._values, self._error)

    def submit(self, assignment: dict[str, str]) -> SubmissionOutcome:
        if self._activity in (CRASH_ACTIVITY, FINISHED_ACTIVITY):
            raise SimulatorError(f"no input page to submit on ({self._activity})")
        page = self.spec.page(self._activity)
        ids = page.widget_ids()
        unknown = [k for k in assignment if k not in ids]
        if unknown:
            raise UnknownWidget(unknown[0])
        values = {wid: assignment.get(wid, "") for wid in ids}
        outcome = self._decide(page, values)
        if isinstance(outcome, Crash):
            self._activity = CRASH_ACTIVITY
            detail = outcome.crash_id
        elif isinstance(outcome, Rejected):
            self._values = values
            self._error = (outcome.widget, outcome.rule_index, outcome.hint_text)
            detail = outcome.hint_text
        else:
            self._activity = outcome.next_activity or FINISHED_ACTIVITY
            self._values, self._error = {}, None
            detail = outcome.next_activity or ""
        self.log.append(LogEntry(page.activity_name, dict(values), outcome.kind, detail))
        return outcome

    def _decide(self, page: PageSpec, values: dict[str, str]) -> SubmissionOutcome:
        for pred in page.crashes:
            if evaluate(pred.condition, values) is True:
                return Crash(pred.crash_id, pred.message or f"{self.spec.app_name} crashed ({pred.crash_id})")
        for i, rule in enumerate(page.rules):
            if violates(rule, values):
                after = render_page(self.spec.app_name, page, values, (rule.widget, i, rule.hint_text))
                return Rejected(after, rule.hint_text, rule.widget, i)
        return PageTransition(page.success_transition)
