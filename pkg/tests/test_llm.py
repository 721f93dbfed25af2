import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from guifuzz.dsl import parse_program, pretty_print
from guifuzz.llm import (
    ENV_API_KEY,
    BudgetExhausted,
    CallCap,
    CompletionRequest,
    LiveProvider,
    MockProvider,
    ParseMiss,
    ProviderUnavailable,
    parse_generator_response,
    parse_valid_input_response,
    render_generator_response,
    render_valid_input_response,
)

from strategies import MARKER_RE, programs, rule_text


def req(tag="t", prompt="hi"):
    return CompletionRequest(prompt, seed_tag=tag)


def test_mock_replays_then_cycles():
    m = MockProvider({"t": ["a", "b"]})
    assert [m.complete(req()) for _ in range(5)] == ["a", "b", "a", "b", "a"]
    assert [r for _, _, r in m.transcript] == ["a", "b", "a", "b", "a"]
    assert m.calls == 5


def test_mock_cursors_are_per_tag():
    m = MockProvider({"x": ["x1", "x2"], "y": ["y1"]})
    assert [m.complete(req(t)) for t in "xyxy"] == ["x1", "y1", "x2", "y1"]


def test_call_cap():
    m = MockProvider({"t": ["a"]}, call_cap=30)
    for _ in range(30):
        m.complete(req())
    with pytest.raises(BudgetExhausted):
        m.complete(req())


def test_call_cap_view_shares_inner_cursor():
    inner = MockProvider({"t": ["a", "b", "c"]})
    first, second = CallCap(inner, 1), CallCap(inner, 2)
    assert first.complete(req()) == "a"
    with pytest.raises(BudgetExhausted):
        first.complete(req())
    assert second.complete(req()) == "b"
    assert inner.calls == 2


def test_missing_tag():
    with pytest.raises(ProviderUnavailable):
        MockProvider({"t": ["a"]}).complete(req("other"))


@pytest.mark.parametrize("script", [{"t": []}, {"t": "a"}, {"t": [1]}])
def test_bad_script(script):
    with pytest.raises(ValueError):
        MockProvider(script)


def test_script_file(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"t": ["a"]}))
    assert MockProvider.from_file(path).complete(req()) == "a"
    path.write_text("[1]")
    with pytest.raises(ProviderUnavailable):
        MockProvider.from_file(path)
    with pytest.raises(ProviderUnavailable):
        MockProvider.from_file(tmp_path / "missing.json")


def test_live_without_key(monkeypatch):
    monkeypatch.delenv(ENV_API_KEY, raising=False)
    with pytest.raises(ProviderUnavailable):
        LiveProvider()


def test_live_unreachable_endpoint():
    p = LiveProvider(endpoint="http://127.0.0.1:9/v1", api_key="k", timeout=2)
    with pytest.raises(ProviderUnavailable):
        p.complete(req())


@pytest.mark.parametrize("kw", [{"prompt": ""}, {"prompt": "x", "temperature": 3}, {"prompt": "x", "max_tokens": 0}])
def test_request_validation(kw):
    with pytest.raises(ValueError):
        CompletionRequest(**kw)


# ---------------------------------------------------------------- valid input


def test_single_widget_reply():
    r = parse_valid_input_response(
        'Constraints: the username must be pure text. The valid input is "john_doe".', ["username"]
    )
    assert r.inferred_constraints == "the username must be pure text"
    assert r.valid_input == {"username": "john_doe"}


def test_two_widget_reply():
    raw = (
        "Constraints: systolic is a number; diastolic is lower than systolic.\n"
        'The valid input for the first widget is "120".\n'
        "The valid input for the second widget is 80."
    )
    r = parse_valid_input_response(raw, ["sys", "dia"])
    assert r.valid_input == {"sys": "120", "dia": "80"}


def test_curly_quotes_and_unquoted_tail():
    r = parse_valid_input_response("constraints: plain text\nvalid input: “Anna”", ["name"])
    assert r.valid_input == {"name": "Anna"}


@pytest.mark.parametrize(
    "raw",
    [
        "",
        "Sure, here is something: 42",
        'Constraints: text. Nothing else.',
        'Constraints: . The valid input is "x".',
        'Constraints: text. The valid input is "a".',
    ],
)
def test_valid_input_parse_miss(raw):
    widgets = ["a", "b"] if raw.endswith('"a".') else ["a"]
    with pytest.raises(ParseMiss):
        parse_valid_input_response(raw, widgets)


@settings(max_examples=200)
@given(rule_text.filter(lambda s: not MARKER_RE.search(s) and "input" not in s.lower()),
       st.lists(st.text(max_size=15), min_size=1, max_size=4))
def test_valid_input_render_parse_inverse(constraints, values):
    constraints = constraints.rstrip(".;,: ")
    if not constraints.strip() or "constraint" in constraints.lower():
        return
    widgets = [f"w{i}" for i in range(len(values))]
    r = parse_valid_input_response(render_valid_input_response(constraints, values), widgets)
    assert r.valid_input == dict(zip(widgets, values))
    assert r.inferred_constraints == constraints.strip()


# ---------------------------------------------------------------- generator


def test_generator_reply():
    raw = (
        "Mutation rule: make the font size negative\n"
        "Test generator:\n"
        'rule: negate\ntarget: w_size\nbase: w_size = "18"\nop: number_negate\n'
        "End generator.\nHope this helps!"
    )
    r = parse_generator_response(raw)
    assert r.mutation_rule == "make the font size negative"
    assert r.program_source.splitlines()[-1] == "op: number_negate"


def test_missing_end_marker_takes_rest():
    r = parse_generator_response('Mutation rule: r\nTest generator:\nrule: r\ntarget: w\nbase: w = "a"')
    assert r.program_source.endswith('base: w = "a"')


@pytest.mark.parametrize(
    "raw",
    [
        "",
        "Test generator:\nrule: r",
        "Mutation rule: r",
        "Mutation rule:\nTest generator:\nrule: r\nEnd generator.",
        "Mutation rule: r\nTest generator:\nEnd generator.",
    ],
)
def test_generator_parse_miss(raw):
    with pytest.raises(ParseMiss):
        parse_generator_response(raw)


@settings(max_examples=200)
@given(rule_text.filter(lambda s: not MARKER_RE.search(s)), programs())
def test_generator_render_parse_inverse(rule, program):
    source = pretty_print(program)
    r = parse_generator_response(render_generator_response(rule, source))
    assert r.mutation_rule == rule
    assert parse_program(r.program_source) == program
