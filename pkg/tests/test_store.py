import json
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from guifuzz.model import WidgetContext
from guifuzz.store import (
    EMBED_DIM,
    ExampleStore,
    MalformedRecord,
    StorageFailure,
    cosine,
    embed,
    load_records,
    load_seed_dataset,
)

from conftest import SEED
from oracles import brute_force_top_k

CTX = WidgetContext("Shop", "Checkout", "w_price", "Price;$")


def test_seed_dataset_has_fifty_records():
    store = load_seed_dataset(SEED, persist=False)
    assert len(store) == 50
    assert [r.record_id for r in store.records] == list(range(1, 51))
    assert all(r.mutation_rule is None and r.source == "seed" for r in store.records)


def test_empty_file_gives_empty_store(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    store = load_seed_dataset(path)
    assert len(store) == 0
    assert store.retrieve_top_k(CTX, 5) == []


def _line(**overrides):
    rec = {"context": {"app_name": "A", "page_name": "P", "input_widget": "w", "nearby_widgets": ""},
           "mutation_rule": None, "buggy_input": "x"}
    rec.update(overrides)
    return json.dumps({k: v for k, v in rec.items() if v is not ...})


@pytest.mark.parametrize(
    "bad",
    [
        _line(buggy_input=...),
        _line(buggy_input=""),
        _line(mutation_rule=3),
        _line(source="elsewhere"),
        _line(context=...),
        _line(context={"app_name": 5}),
        _line(record_id=7),
        "{not json",
        "[]",
    ],
)
def test_malformed_record_reports_index(bad):
    with pytest.raises(MalformedRecord) as info:
        load_records([_line(), bad])
    assert info.value.index == 2


def test_add_record_persists_and_reloads(seed_copy):
    store = load_seed_dataset(seed_copy)
    rid = store.add_record(CTX, "negate the price", "-12.5")
    assert rid == 51
    again = load_seed_dataset(seed_copy)
    assert again.records == store.records
    last = again.records[-1]
    assert (last.source, last.mutation_rule, last.buggy_input) == ("runtime", "negate the price", "-12.5")


def test_duplicate_records_are_history(seed_copy):
    store = load_seed_dataset(seed_copy)
    store.add_record(CTX, "r", "x")
    store.add_record(CTX, "r", "x")
    assert len(store) == 52


def test_deleted_file_is_storage_failure(seed_copy):
    store = load_seed_dataset(seed_copy)
    seed_copy.unlink()
    with pytest.raises(StorageFailure):
        store.add_record(CTX, "r", "x")


def test_in_memory_store_needs_no_file():
    store = ExampleStore()
    assert store.add_record(CTX, None, "x") == 1


def test_empty_buggy_input_rejected():
    with pytest.raises(ValueError):
        ExampleStore().add_record(CTX, "r", "")


# ---------------------------------------------------------------- embedding


def test_embed_empty_is_zero():
    v = embed("")
    assert v.shape == (EMBED_DIM,)
    assert not v.any()


@given(st.text(max_size=60))
def test_embed_deterministic_and_normalized(text):
    a, b = embed(text), embed(text)
    assert np.array_equal(a, b)
    assert np.all(np.isfinite(a))
    norm = np.linalg.norm(a)
    assert norm == 0 or abs(norm - 1) < 1e-12


def test_bag_of_words_order_invariance():
    assert cosine(embed("password login"), embed("login password")) == pytest.approx(1.0, abs=1e-12)
    assert cosine(embed("Password, LOGIN!"), embed("login password")) == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------- retrieval


def test_top5_over_seed_store():
    store = load_seed_dataset(SEED, persist=False)
    ranked = store.query_text("Bank Transfer amount IBAN", 5)
    assert len(ranked) == 5
    scores = [s for _, s in ranked]
    assert scores == sorted(scores, reverse=True)


def test_small_store_returns_fewer():
    store = ExampleStore()
    store.add_record(CTX, None, "a")
    store.add_record(CTX, None, "b")
    assert len(store.retrieve_top_k(CTX, 5)) == 2


def test_ties_break_by_record_id():
    store = ExampleStore()
    for i in range(5):
        store.add_record(CTX, None, str(i))
    assert [r.record_id for r in store.retrieve_top_k(CTX, 3)] == [1, 2, 3]


def test_k_must_be_positive():
    with pytest.raises(ValueError):
        ExampleStore().query_text("x", 0)


VOCAB = ["price", "min", "max", "password", "login", "date", "return", "amount", "search", "phone", "name", "ok"]


def random_store(rng: random.Random, n: int) -> ExampleStore:
    store = ExampleStore()
    for i in range(n):
        words = [rng.choice(VOCAB) for _ in range(rng.randint(0, 4))]
        ctx = WidgetContext(rng.choice(["Shop", "Bank"]), "P", " ".join(words) or "w", ";".join(rng.sample(VOCAB, 2)))
        store.add_record(ctx, None, f"in{i}")
    return store


def test_matches_brute_force_oracle_on_random_stores():
    rng = random.Random(7)
    for _ in range(20):
        store = random_store(rng, rng.randint(1, 120))
        vecs = [embed(r.context.text()).tolist() for r in store.records]
        query = " ".join(rng.choice(VOCAB) for _ in range(3))
        for k in (1, 5, 10):
            got = store.query_text(query, k)
            want = brute_force_top_k(store.records, embed(query).tolist(), vecs, k)
            assert [(r.record_id, s) for r, s in got] == [(r.record_id, s) for r, s in want]
