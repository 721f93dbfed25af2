"""The mutation DSL used for test generators.

A generator is a small line-oriented program::

    rule: inject control characters
    target: w_price
    base: w_price = "12.5"
    op: charset_inject(class=$X, count=3, pos=end)
    axis: $X in [control, null_byte, rtl_override]
    batch: 3

Executing it starts from the base strings, applies the ops left to right once
per axis value, and yields a deduplicated batch of assignments. The language
has no loops, no I/O and no randomness, so execution is a total, pure function.
"""

from __future__ import annotations

import decimal
import json
import math
import re
from dataclasses import dataclass, field
from typing import Any, Union

MAX_OUTPUT_CHARS = 65_536
MAX_OPS = 32
MAX_BATCH = 1_000
MAX_AXIS_VALUES = 1_000
DEFAULT_BATCH = 10

CHARSET_TABLES: dict[str, tuple[str, ...]] = {
    "control": ("\u0000", "\u0001", "\u0008", "\u001b", "\u007f"),
    "null_byte": ("\u0000",),
    "emoji": ("\U0001F600", "\U0001F525", "\U0001F468\u200d\U0001F469\u200d\U0001F467"),
    "rtl_override": ("\u202e",),
    "combining": ("\u0301", "\u0308", "\u0336"),
    "sql_meta": ("'", ";", "--", '"', "%"),
    "format_specifier": ("%s", "%n", "{0}"),
    "whitespace": (" ", "\t", "\n", "\u00a0", "\u200b"),
    "punctuation": (".", ",", "!", "?", "@", "#", "$", "&", "*", "/"),
}
POSITIONS = ("start", "end", "middle")

# parameter kinds: str (quoted literal), int (non-negative integer),
# num (finite number), pos, class, widget
SIGNATURES: dict[str, tuple[tuple[str, str], ...]] = {
    "set": (("v", "str"),),
    "append": (("s", "str"),),
    "prepend": (("s", "str"),),
    "insert": (("pos", "pos"), ("s", "str")),
    "repeat": (("n", "int"),),
    "truncate": (("n", "int"),),
    "pad": (("n", "int"), ("ch", "str")),
    "case_flip": (),
    "empty": (),
    "number_negate": (),
    "number_scale": (("f", "num"),),
    "number_set": (("v", "num"),),
    "digits": (("n", "int"),),
    "charset_inject": (("class", "class"), ("count", "int"), ("pos", "pos")),
    "swap": (("wa", "widget"), ("wb", "widget")),
    "violate_order": (("w_lo", "widget"), ("w_hi", "widget"), ("delta", "num")),
}
MULTI_WIDGET_OPS = {"swap", "violate_order"}

NUMBER_RE = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_DECIMAL_CTX = decimal.Context(
    prec=60,
    Emax=9_999,
    Emin=-9_999,
    traps=[decimal.InvalidOperation, decimal.Overflow, decimal.DivisionByZero],
)


class DslError(Exception):
    def __init__(self, line: int | None, reason: str) -> None:
        self.line = line
        self.reason = reason
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + reason)


class DslSyntaxError(DslError):
    pass


class UnknownOp(DslError):
    pass


class UnboundWidget(DslError):
    pass


@dataclass(frozen=True)
class AxisRef:
    name: str


ArgValue = Union[str, int, float, AxisRef]


@dataclass(frozen=True)
class MutationOp:
    name: str
    args: tuple[tuple[str, ArgValue], ...] = ()
    on: str | None = None

    def arg(self, key: str) -> ArgValue:
        for k, v in self.args:
            if k == key:
                return v
        raise KeyError(key)

    def widgets(self) -> list[str]:
        refs = [v for (k, v), (_, kind) in zip(self.args, SIGNATURES[self.name]) if kind == "widget"]
        if self.on is not None:
            refs.append(self.on)
        return refs

    def axis_refs(self) -> list[tuple[str, str]]:
        return [(k, v.name) for k, v in self.args if isinstance(v, AxisRef)]


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple[Union[str, int, float], ...]


@dataclass(frozen=True)
class GeneratorProgram:
    rule: str
    targets: tuple[str, ...]
    base: tuple[tuple[str, str], ...]
    ops: tuple[MutationOp, ...] = ()
    axis: Axis | None = None
    batch_size: int = DEFAULT_BATCH

    @property
    def base_map(self) -> dict[str, str]:
        return dict(self.base)


@dataclass(frozen=True)
class UnusualInput:
    assignment: dict[str, str]
    rule: str = field(default="", compare=False)
    trace: tuple[str, ...] = field(default=(), compare=False)
    axis_value: Any = field(default=None, compare=False)

    def key(self) -> tuple[tuple[str, str], ...]:
        return tuple(sorted(self.assignment.items()))


# ---------------------------------------------------------------- lexing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<number>[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<var>\$[A-Za-z_]\w*)
  | (?P<ident>[A-Za-z_][\w.:/-]*)
  | (?P<punct>[(),=\[\]])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    value: Any = None


def _tokenize(text: str, line: int) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise DslSyntaxError(line, f"unexpected character {text[pos]!r}")
        pos = m.end()
        kind = m.lastgroup
        raw = m.group()
        if kind == "ws":
            continue
        if kind == "string":
            try:
                value = json.loads(raw)
            except ValueError:
                raise DslSyntaxError(line, f"bad string literal {raw}") from None
        elif kind == "number":
            value = float(raw) if any(c in raw for c in ".eE") else int(raw)
        elif kind == "var":
            value = AxisRef(raw[1:])
        else:
            value = raw
        toks.append(_Tok(kind, raw, value))
    return toks


class _Cursor:
    def __init__(self, toks: list[_Tok], line: int) -> None:
        self.toks = toks
        self.i = 0
        self.line = line

    def peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> _Tok:
        tok = self.peek()
        if tok is None:
            raise DslSyntaxError(self.line, "unexpected end of line")
        self.i += 1
        return tok

    def expect(self, text: str) -> None:
        tok = self.next()
        if tok.text != text:
            raise DslSyntaxError(self.line, f"expected {text!r}, got {tok.text!r}")

    def done(self) -> bool:
        return self.i >= len(self.toks)


# ---------------------------------------------------------------- parsing


def _check_value(kind: str, tok: _Tok, line: int, name: str) -> ArgValue:
    if tok.kind == "var":
        if kind == "widget":
            raise DslSyntaxError(line, f"axis variable not allowed for widget argument {name!r}")
        return tok.value
    ok = False
    value = tok.value
    if kind == "str":
        ok = tok.kind == "string"
    elif kind == "int":
        ok = tok.kind == "number" and isinstance(value, int) and value >= 0
    elif kind == "num":
        ok = tok.kind == "number" and math.isfinite(value)
    elif kind == "pos":
        ok = (tok.kind == "ident" and value in POSITIONS) or (tok.kind == "number" and isinstance(value, int))
    elif kind == "class":
        ok = tok.kind == "ident" and value in CHARSET_TABLES
    elif kind == "widget":
        ok = tok.kind == "ident"
    if not ok:
        raise DslSyntaxError(line, f"invalid {kind} value {tok.text} for argument {name!r}")
    return value


def _parse_op(text: str, line: int) -> MutationOp:
    cur = _Cursor(_tokenize(text, line), line)
    head = cur.next()
    if head.kind != "ident":
        raise DslSyntaxError(line, "op must start with an operation name")
    name = head.text
    if name not in SIGNATURES:
        raise UnknownOp(line, f"unknown op {name!r}")
    sig = SIGNATURES[name]
    positional: list[_Tok] = []
    keyword: dict[str, _Tok] = {}
    if not cur.done():
        cur.expect("(")
        if cur.peek() is not None and cur.peek().text == ")":
            cur.next()
        else:
            while True:
                tok = cur.next()
                nxt = cur.peek()
                if tok.kind == "ident" and nxt is not None and nxt.text == "=":
                    cur.next()
                    if tok.text in keyword:
                        raise DslSyntaxError(line, f"duplicate argument {tok.text!r}")
                    keyword[tok.text] = cur.next()
                else:
                    if keyword:
                        raise DslSyntaxError(line, "positional argument after keyword argument")
                    positional.append(tok)
                sep = cur.next()
                if sep.text == ")":
                    break
                if sep.text != ",":
                    raise DslSyntaxError(line, f"expected ',' or ')', got {sep.text!r}")
        if not cur.done():
            raise DslSyntaxError(line, "trailing tokens after op")

    on = None
    if "on" in keyword:
        if name in MULTI_WIDGET_OPS:
            raise DslSyntaxError(line, f"{name} does not take 'on'")
        on_tok = keyword.pop("on")
        on = _check_value("widget", on_tok, line, "on")
    if len(positional) > len(sig):
        raise DslSyntaxError(line, f"{name} takes {len(sig)} arguments, got {len(positional)}")
    args = []
    for i, (pname, kind) in enumerate(sig):
        if i < len(positional):
            if pname in keyword:
                raise DslSyntaxError(line, f"argument {pname!r} given twice")
            tok = positional[i]
        elif pname in keyword:
            tok = keyword.pop(pname)
        else:
            raise DslSyntaxError(line, f"{name} missing argument {pname!r}")
        args.append((pname, _check_value(kind, tok, line, pname)))
    if keyword:
        raise DslSyntaxError(line, f"{name} got unexpected arguments {sorted(keyword)}")
    return MutationOp(name=name, args=tuple(args), on=on)


def _parse_axis(text: str, line: int) -> tuple[Axis, list[_Tok]]:
    cur = _Cursor(_tokenize(text, line), line)
    var = cur.next()
    if var.kind != "var":
        raise DslSyntaxError(line, "axis must start with a $NAME variable")
    kw = cur.next()
    if kw.text != "in":
        raise DslSyntaxError(line, "expected 'in' after axis variable")
    cur.expect("[")
    toks: list[_Tok] = []
    if cur.peek() is not None and cur.peek().text == "]":
        raise DslSyntaxError(line, "axis value list is empty")
    while True:
        tok = cur.next()
        if tok.kind not in ("string", "number", "ident"):
            raise DslSyntaxError(line, f"invalid axis value {tok.text!r}")
        toks.append(tok)
        sep = cur.next()
        if sep.text == "]":
            break
        if sep.text != ",":
            raise DslSyntaxError(line, f"expected ',' or ']', got {sep.text!r}")
    if not cur.done():
        raise DslSyntaxError(line, "trailing tokens after axis list")
    if len(toks) > MAX_AXIS_VALUES:
        raise DslSyntaxError(line, f"more than {MAX_AXIS_VALUES} axis values")
    return Axis(var.value.name, tuple(t.value for t in toks)), toks


_LINE_RE = re.compile(r"^\s*(rule|target|base|op|axis|batch)\s*:(.*)$")
_BASE_RE = re.compile(r"^\s*([A-Za-z_][\w.:/-]*)\s*=\s*(\".*\")\s*$")
_IDENT_RE = re.compile(r"^[A-Za-z_][\w.:/-]*$")


def parse_program(source: str) -> GeneratorProgram:
    """Parse generator source. Any defect rejects the whole program."""
    if not source or not source.strip():
        raise DslSyntaxError(None, "empty program")
    rule = None
    targets: list[str] | None = None
    target_line = 0
    base: dict[str, str] = {}
    base_lines: dict[str, int] = {}
    ops: list[tuple[int, MutationOp]] = []
    axis = None
    axis_line = 0
    axis_toks: list[_Tok] = []
    batch = None

    for lineno, raw in enumerate(source.split("\n"), start=1):
        line = raw.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        m = _LINE_RE.match(line)
        if not m:
            raise DslSyntaxError(lineno, f"unrecognized line {line.strip()[:40]!r}")
        key, rest = m.group(1), m.group(2)
        if key == "rule":
            if rule is not None:
                raise DslSyntaxError(lineno, "duplicate rule line")
            rule = rest.strip()
            if not rule:
                raise DslSyntaxError(lineno, "empty rule")
        elif key == "target":
            if targets is not None:
                raise DslSyntaxError(lineno, "duplicate target line")
            targets = [t.strip() for t in rest.split(",")]
            target_line = lineno
            if not all(_IDENT_RE.match(t) for t in targets):
                raise DslSyntaxError(lineno, "targets must be comma-separated widget ids")
            if len(set(targets)) != len(targets):
                raise DslSyntaxError(lineno, "duplicate target")
        elif key == "base":
            bm = _BASE_RE.match(rest)
            if not bm:
                raise DslSyntaxError(lineno, 'base must look like: id = "value"')
            wid = bm.group(1)
            try:
                value = json.loads(bm.group(2))
            except ValueError:
                raise DslSyntaxError(lineno, "bad base string literal") from None
            if not isinstance(value, str):
                raise DslSyntaxError(lineno, "base value must be a string")
            if wid in base:
                raise DslSyntaxError(lineno, f"duplicate base for {wid!r}")
            base[wid] = value
            base_lines[wid] = lineno
        elif key == "op":
            ops.append((lineno, _parse_op(rest.strip(), lineno)))
            if len(ops) > MAX_OPS:
                raise DslSyntaxError(lineno, f"more than {MAX_OPS} ops")
        elif key == "axis":
            if axis is not None:
                raise DslSyntaxError(lineno, "duplicate axis line")
            axis, axis_toks = _parse_axis(rest.strip(), lineno)
            axis_line = lineno
        elif key == "batch":
            if batch is not None:
                raise DslSyntaxError(lineno, "duplicate batch line")
            text = rest.strip()
            if not re.fullmatch(r"\d+", text) or not 1 <= int(text) <= MAX_BATCH:
                raise DslSyntaxError(lineno, f"batch must be an integer in 1..{MAX_BATCH}")
            batch = int(text)

    if rule is None:
        raise DslSyntaxError(None, "missing rule line")
    if targets is None:
        raise DslSyntaxError(None, "missing target line")
    for wid in targets:
        if wid not in base:
            raise UnboundWidget(target_line, f"target {wid!r} has no base value")
    for wid, lineno in base_lines.items():
        if wid not in targets:
            raise UnboundWidget(lineno, f"base {wid!r} is not a target")
    for lineno, op in ops:
        for wid in op.widgets():
            if wid not in targets:
                raise UnboundWidget(lineno, f"op {op.name} references unbound widget {wid!r}")

    refs = [(lineno, op, pname, var) for lineno, op in ops for pname, var in op.axis_refs()]
    if axis is None:
        if refs:
            raise DslSyntaxError(refs[0][0], f"axis variable ${refs[0][3]} used without an axis line")
    else:
        if len(refs) != 1:
            raise DslSyntaxError(axis_line, f"axis ${axis.name} must be used by exactly one op argument, found {len(refs)}")
        lineno, op, pname, var = refs[0]
        if var != axis.name:
            raise DslSyntaxError(lineno, f"unknown axis variable ${var}")
        kind = dict(SIGNATURES[op.name])[pname]
        for tok in axis_toks:
            _check_value(kind, tok, axis_line, pname)

    return GeneratorProgram(
        rule=rule,
        targets=tuple(targets),
        base=tuple((wid, base[wid]) for wid in targets),
        ops=tuple(op for _, op in ops),
        axis=axis,
        batch_size=batch if batch is not None else DEFAULT_BATCH,
    )


# ---------------------------------------------------------------- printing


def _fmt_value(kind: str, value: ArgValue) -> str:
    if isinstance(value, AxisRef):
        return "$" + value.name
    if kind == "str":
        return json.dumps(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_op(op: MutationOp) -> str:
    kinds = dict(SIGNATURES[op.name])
    parts = [_fmt_value(kinds[k], v) for k, v in op.args]
    if op.on is not None:
        parts.append(f"on={op.on}")
    return f"{op.name}({', '.join(parts)})"


def pretty_print(program: GeneratorProgram) -> str:
    lines = [f"rule: {program.rule}", "target: " + ", ".join(program.targets)]
    lines += [f"base: {wid} = {json.dumps(value)}" for wid, value in program.base]
    lines += [f"op: {format_op(op)}" for op in program.ops]
    if program.axis is not None:
        kind = next(
            dict(SIGNATURES[op.name])[k] for op in program.ops for k, v in op.args if isinstance(v, AxisRef)
        )
        values = ", ".join(_fmt_value(kind, v) for v in program.axis.values)
        lines.append(f"axis: ${program.axis.name} in [{values}]")
    lines.append(f"batch: {program.batch_size}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- execution


def _position(pos: str | int, length: int) -> int:
    if pos == "start":
        return 0
    if pos == "end":
        return length
    if pos == "middle":
        return length // 2
    return max(0, min(int(pos), length))


def _cap(s: str) -> str:
    return s[:MAX_OUTPUT_CHARS]


def parse_number(text: str) -> decimal.Decimal | None:
    if not NUMBER_RE.fullmatch(text):
        return None
    return decimal.Decimal(text)


def _to_decimal(value: int | float) -> decimal.Decimal:
    return decimal.Decimal(value) if isinstance(value, int) else decimal.Decimal(repr(value))


def _fmt_decimal(d: decimal.Decimal) -> str:
    return format(d, "f")


def _negate(text: str) -> str:
    if text.startswith("-"):
        return text[1:]
    if text.startswith("+"):
        return "-" + text[1:]
    return "-" + text


def _apply_single(op: MutationOp, current: str, args: dict[str, Any]) -> str | None:
    """One single-widget op; None marks a numeric op that could not apply."""
    name = op.name
    if name == "set":
        return args["v"]
    if name == "append":
        return current + args["s"]
    if name == "prepend":
        return args["s"] + current
    if name == "insert":
        at = _position(args["pos"], len(current))
        return current[:at] + args["s"] + current[at:]
    if name == "repeat":
        if not current:
            return ""
        n = min(args["n"], MAX_OUTPUT_CHARS // len(current) + 1)
        return current * n
    if name == "truncate":
        return current[: args["n"]]
    if name == "pad":
        n = min(args["n"], MAX_OUTPUT_CHARS)
        ch = args["ch"]
        if len(current) >= n or not ch:
            return current
        fill = (ch * ((n - len(current)) // len(ch) + 1))[: n - len(current)]
        return current + fill
    if name == "case_flip":
        return current.swapcase()
    if name == "empty":
        return ""
    if name == "digits":
        n = min(args["n"], MAX_OUTPUT_CHARS)
        return ("1234567890" * (n // 10 + 1))[:n]
    if name == "number_set":
        return _fmt_decimal(_to_decimal(args["v"]))
    if name == "charset_inject":
        table = CHARSET_TABLES[args["class"]]
        count = min(args["count"], MAX_OUTPUT_CHARS)
        payload = "".join(table[i % len(table)] for i in range(count))
        at = _position(args["pos"], len(current))
        return current[:at] + payload + current[at:]
    if name == "number_negate":
        return _negate(current) if parse_number(current) is not None else None
    if name == "number_scale":
        value = parse_number(current)
        if value is None:
            return None
        try:
            return _fmt_decimal(_DECIMAL_CTX.multiply(value, _to_decimal(args["f"])))
        except decimal.DecimalException:
            return None
    raise AssertionError(f"unhandled op {name}")


def _run_once(program: GeneratorProgram, axis_value: Any) -> tuple[dict[str, str], tuple[str, ...]]:
    values = {wid: _cap(v) for wid, v in program.base}
    trace = []
    for op in program.ops:
        args = {k: (axis_value if isinstance(v, AxisRef) else v) for k, v in op.args}
        if op.name == "swap":
            a, b = args["wa"], args["wb"]
            values[a], values[b] = values[b], values[a]
            trace.append(f"swap@{a},{b}")
            continue
        if op.name == "violate_order":
            lo, hi = args["w_lo"], args["w_hi"]
            high = parse_number(values[hi])
            try:
                if high is None:
                    raise decimal.InvalidOperation
                values[lo] = _cap(_fmt_decimal(_DECIMAL_CTX.add(high, _to_decimal(args["delta"]))))
                trace.append(f"violate_order@{lo},{hi}")
            except decimal.DecimalException:
                trace.append(f"violate_order@{lo},{hi}:inapplicable")
            continue
        for wid in [op.on] if op.on is not None else program.targets:
            result = _apply_single(op, values[wid], args)
            if result is None:
                trace.append(f"{op.name}@{wid}:inapplicable")
            else:
                values[wid] = _cap(result)
                trace.append(f"{op.name}@{wid}")
    return values, tuple(trace)


def execute_program(program: GeneratorProgram) -> list[UnusualInput]:
    axis_values = program.axis.values[: program.batch_size] if program.axis else (None,)
    batch: list[UnusualInput] = []
    seen: set[tuple[tuple[str, str], ...]] = set()
    for axis_value in axis_values:
        assignment, trace = _run_once(program, axis_value)
        item = UnusualInput(assignment=assignment, rule=program.rule, trace=trace, axis_value=axis_value)
        if item.key() in seen:
            continue
        seen.add(item.key())
        batch.append(item)
    return batch
