import pytest

from guifuzz.dsl import UnusualInput
from guifuzz.model import CATALOG, WidgetContext
from guifuzz.prompts import (
    NEXT_ROUND,
    EmptyContexts,
    FeedbackBundle,
    MissingValidInput,
    PromptBudgetExceeded,
    build_generator_prompt,
    build_valid_input_prompt,
    format_assignment,
    ordinal,
)
from guifuzz.store import ExampleRecord

USER = [
    WidgetContext("Wallet", "User", "Name", "Your name"),
    WidgetContext("Wallet", "User", "Email", ""),
    WidgetContext("Wallet", "User", "Phone", "Mobile;+1"),
]


def test_valid_input_prompt_opening():
    p = build_valid_input_prompt(USER)
    assert p.context.startswith(
        "We want to test the text input widgets on User page of Wallet app which has 3 text inputs."
    )
    assert "The second input widget is 'Email', its context is 'none'." in p.context
    assert "dynamic hint" not in p.context


def test_catalog_listing_is_numbered_per_category():
    text = build_valid_input_prompt(USER).candidate_constraints
    assert "5 explicit intra-constraints" in text
    assert "5 implicit intra-constraints" in text
    assert "7 inter-constraints" in text
    assert "(7) " in text and "(8) " not in text
    for entry in CATALOG:
        assert entry.description in text


def test_hint_clause_only_with_hint():
    ctx = USER[0].with_hint("Username already in use", "admin")
    text = build_valid_input_prompt([ctx]).context
    assert "dynamic hint is 'Username already in use'" in text
    assert "'admin'" in text


def test_empty_contexts():
    with pytest.raises(EmptyContexts):
        build_valid_input_prompt([])


def test_mixed_pages_rejected():
    with pytest.raises(ValueError):
        build_valid_input_prompt([USER[0], WidgetContext("Wallet", "Other", "x", "")])


def test_question_fixes_answer_format():
    q = build_valid_input_prompt(USER).question
    assert '"Constraints: <inferred constraints>."' in q
    assert "The valid input for the <ordinal> widget is" in q


def test_ordinals():
    assert [ordinal(i) for i in (1, 2, 3, 11)] == ["first", "second", "third", "11th"]


# ---------------------------------------------------------------- generator


def rec(i, rule="negate it", buggy="-1"):
    return ExampleRecord(i, WidgetContext("Shop", "Cart", f"w{i}", "Qty"), rule, buggy)


VALID = {"w_size": "12"}


def gen(**kw):
    kw.setdefault("contexts", [WidgetContext("FontSize", "Settings", "Font size", "")])
    return build_generator_prompt("a positive number", VALID, **kw)


def test_generator_sections_in_order():
    fb = FeedbackBundle(
        crash_inputs=((UnusualInput({"w_size": "-1"}), "negate"),),
        non_trigger_inputs=((UnusualInput({"w_size": "99"}), "big"),),
    )
    text = gen(examples=[rec(1), rec(2)], feedback=fb).rendered
    idx = [
        text.index("Example 1:"),
        text.index("Example 2:"),
        text.index("The inferred constraints of the inputs are: a positive number"),
        text.index('- w_size (w_size) = "12"'),
        text.index("already triggered a crash — do not repeat"),
        text.index("did not trigger a crash"),
        text.index("Please first generate a mutation rule"),
    ]
    assert idx == sorted(idx)
    assert 'w_size="-1" (mutation rule: negate)' in text


def test_seed_example_rule_shown_as_unknown():
    assert "Mutation rule: unknown" in gen(examples=[rec(1, rule=None)]).rendered


def test_zero_examples_is_valid():
    p = gen()
    assert p.examples == "" and p.examples_shown == 0
    assert not p.rendered.startswith("\n")


def test_next_round_sentence():
    assert "different mutation rule" not in gen().rendered
    assert "Please produce a different mutation rule than those above." in gen(question_variant=NEXT_ROUND).rendered


def test_batch_size_in_question():
    assert "a batch of 7 unusual inputs" in gen(batch_size=7).rendered


def test_missing_valid_input():
    with pytest.raises(MissingValidInput):
        build_generator_prompt("c", {})
    with pytest.raises(MissingValidInput):
        build_generator_prompt("", VALID)


def test_budget_sheds_examples_then_oldest_feedback():
    many = [rec(i, buggy="x" * 200) for i in range(1, 6)]
    others = tuple((UnusualInput({"w_size": str(i) * 50}), f"r{i}") for i in range(5))
    crash = ((UnusualInput({"w_size": "-1"}), "negate"),)
    full = gen(examples=many, feedback=FeedbackBundle(crash, others))
    base = gen()
    budget = len(base.rendered) + 300
    cut = gen(examples=many, feedback=FeedbackBundle(crash, others), char_budget=budget)
    assert len(cut.rendered) <= budget < len(full.rendered)
    assert cut.examples_shown == 0
    assert "r4" in cut.rendered and "r0" not in cut.rendered
    assert "negate" in cut.rendered

    mid = gen(examples=many, feedback=FeedbackBundle(crash, others), char_budget=len(full.rendered) - 10)
    assert mid.examples_shown == 4
    assert "r0" in mid.rendered


def test_budget_too_small():
    with pytest.raises(PromptBudgetExceeded):
        gen(char_budget=50)


def test_long_feedback_values_are_clipped():
    fb = FeedbackBundle(non_trigger_inputs=((UnusualInput({"w_size": "9" * 5000}), "long"),))
    text = gen(feedback=fb).rendered
    assert "(+4880 chars)" in text
    assert len(text) < 5000


def test_format_assignment_escapes_control_chars():
    assert format_assignment({"a": "x\ny\u0000"}) == 'a="x\\ny\\u0000"'


def test_prompts_deterministic():
    args = dict(examples=[rec(1), rec(2)], feedback=FeedbackBundle(non_trigger_inputs=((UnusualInput(VALID), "r"),)))
    assert gen(**args).rendered == gen(**args).rendered
    assert build_valid_input_prompt(USER).rendered == build_valid_input_prompt(USER).rendered
