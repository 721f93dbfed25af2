"""Hypothesis strategies shared across test modules."""

from __future__ import annotations

import re

from hypothesis import strategies as st

from guifuzz.dsl import CHARSET_TABLES, MULTI_WIDGET_OPS, POSITIONS, SIGNATURES, Axis, AxisRef, GeneratorProgram, MutationOp
from guifuzz.model import ViewNode

ident = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,8}", fullmatch=True)
# free text for rules: printable ASCII, no newline, trimmed
rule_text = st.text(
    alphabet=st.characters(min_codepoint=32, max_codepoint=126), min_size=1, max_size=40
).map(str.strip).filter(bool)
short_text = st.text(max_size=6)
numbers = st.one_of(
    st.integers(-10_000, 10_000),
    st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False),
)


def _value(kind: str, targets: list[str]):
    if kind == "str":
        return short_text
    if kind == "int":
        return st.integers(0, 40)
    if kind == "num":
        return numbers
    if kind == "pos":
        return st.one_of(st.sampled_from(POSITIONS), st.integers(-5, 20))
    if kind == "class":
        return st.sampled_from(sorted(CHARSET_TABLES))
    if kind == "widget":
        return st.sampled_from(targets)
    raise AssertionError(kind)


@st.composite
def mutation_ops(draw, targets: list[str]) -> MutationOp:
    names = sorted(SIGNATURES)
    if len(targets) < 2:
        names = [n for n in names if n not in MULTI_WIDGET_OPS]
    name = draw(st.sampled_from(names))
    args = tuple((p, draw(_value(kind, targets))) for p, kind in SIGNATURES[name])
    on = None
    if name not in MULTI_WIDGET_OPS and draw(st.booleans()):
        on = draw(st.sampled_from(targets))
    return MutationOp(name, args, on)


@st.composite
def programs(draw, max_ops: int = 6) -> GeneratorProgram:
    targets = draw(st.lists(ident, min_size=1, max_size=3, unique=True))
    base = tuple((t, draw(st.text(max_size=12))) for t in targets)
    ops = draw(st.lists(mutation_ops(targets), max_size=max_ops))
    axis = None
    slots = [
        (i, j)
        for i, op in enumerate(ops)
        for j, (_, kind) in enumerate(SIGNATURES[op.name])
        if kind != "widget"
    ]
    if slots and draw(st.booleans()):
        i, j = draw(st.sampled_from(slots))
        name = draw(ident)
        kind = SIGNATURES[ops[i].name][j][1]
        values = tuple(draw(st.lists(_value(kind, targets), min_size=1, max_size=6)))
        args = list(ops[i].args)
        args[j] = (args[j][0], AxisRef(name))
        ops[i] = MutationOp(ops[i].name, tuple(args), ops[i].on)
        axis = Axis(name, values)
    return GeneratorProgram(
        rule=draw(rule_text),
        targets=tuple(targets),
        base=base,
        ops=tuple(ops),
        axis=axis,
        batch_size=draw(st.integers(1, 20)),
    )


MARKER_RE = re.compile(r"mutation\s+rule|test\s+generator|end\s+generator", re.IGNORECASE)


@st.composite
def view_trees(draw, depth: int = 0, max_depth: int = 6) -> ViewNode:
    cls = draw(st.sampled_from(["android.widget.TextView", "android.widget.EditText", "android.widget.LinearLayout",
                                "android.widget.Button", "android.widget.SearchView"]))
    left = draw(st.integers(0, 1000))
    top = draw(st.integers(0, 1800))
    bounds = (left, top, left + draw(st.integers(0, 500)), top + draw(st.integers(0, 300)))
    children = ()
    if depth < max_depth - 1:
        children = tuple(draw(st.lists(view_trees(depth + 1, max_depth), max_size=3 if depth < 3 else 1)))
    return ViewNode(
        node_class=cls,
        resource_id=draw(st.one_of(st.just(""), ident)),
        text=draw(st.text(max_size=8)),
        hint_text=draw(st.one_of(st.just(""), st.text(max_size=8))),
        bounds=bounds,
        children=children,
    )
