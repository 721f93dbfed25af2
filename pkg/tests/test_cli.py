import json

import pytest

from guifuzz.cli import EXIT_CONFIG, EXIT_DSL, EXIT_MISMATCH, EXIT_OK, EXIT_PROVIDER, main
from guifuzz.llm import ENV_API_KEY
from guifuzz.store import embed, load_seed_dataset

from conftest import BENCH, BENCH_CONFIG, SCRIPT
from oracles import brute_force_top_k


def run_args(store, report, *extra):
    return ["run", "--specs", str(BENCH), "--config", str(BENCH_CONFIG), "--provider", f"mock:{SCRIPT}",
            "--store", str(store), "--report", str(report), "-q", *extra]


def test_run_writes_report(tmp_path, seed_copy):
    report = tmp_path / "report.json"
    transcript = tmp_path / "t.jsonl"
    assert main(run_args(seed_copy, report, "--transcript", str(transcript))) == EXIT_OK
    data = json.loads(report.read_text())
    assert data["aggregates"]["targets"] == 12
    assert data["aggregates"]["detected"] >= 10
    rows = [json.loads(line) for line in transcript.read_text().splitlines()]
    assert {"target", "activity", "assignment", "outcome", "detail"} <= set(rows[0])
    assert len(load_seed_dataset(seed_copy)) == 50 + data["aggregates"]["detected"]


def test_no_persist_leaves_store_untouched(tmp_path, seed_copy):
    before = seed_copy.read_bytes()
    assert main(run_args(seed_copy, tmp_path / "r.json", "--no-persist")) == EXIT_OK
    assert seed_copy.read_bytes() == before


def test_table_goes_to_stderr(tmp_path, seed_copy, capsys):
    args = [a for a in run_args(seed_copy, tmp_path / "r.json") if a != "-q"]
    main(args)
    err = capsys.readouterr().err
    assert "Bug(%)" in err


def test_missing_specs_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["run"])
    assert info.value.code == 2


def test_live_provider_without_key(monkeypatch, capsys):
    monkeypatch.delenv(ENV_API_KEY, raising=False)
    assert main(["run", "--specs", str(BENCH), "--provider", "live"]) == EXIT_PROVIDER
    assert ENV_API_KEY in capsys.readouterr().err


@pytest.mark.parametrize("content", ["{not json", "[1]", '{"attempt_budget": -1}', '{"bogus": 1}'])
def test_bad_config(tmp_path, content):
    cfg = tmp_path / "c.json"
    cfg.write_text(content)
    assert main(["run", "--specs", str(BENCH), "--config", str(cfg), "--provider", f"mock:{SCRIPT}"]) == EXIT_CONFIG


def test_bad_provider_string():
    assert main(["run", "--specs", str(BENCH), "--provider", "psychic"]) == EXIT_CONFIG


def test_bad_specs_dir(tmp_path):
    (tmp_path / "a.json").write_text('{"app_name": "X"}')
    assert main(["run", "--specs", str(tmp_path), "--provider", f"mock:{SCRIPT}"]) == EXIT_CONFIG


def test_mock_script_missing_tag_is_provider_failure(tmp_path):
    script = tmp_path / "s.json"
    script.write_text('{"nothing": ["here"]}')
    assert main(["run", "--specs", str(BENCH), "--provider", f"mock:{script}", "-q"]) == EXIT_PROVIDER


# ---------------------------------------------------------------- dsl


def write(tmp_path, text):
    p = tmp_path / "prog.txt"
    p.write_text(text)
    return str(p)


def test_dsl_prints_batch(tmp_path, capsys):
    prog = write(tmp_path, 'rule: r\ntarget: w\nbase: w = "a"\nop: repeat($N)\naxis: $N in [1, 2, 3, 4, 5]\nbatch: 3')
    assert main(["dsl", "--program", prog]) == EXIT_OK
    first = capsys.readouterr().out
    assert [json.loads(line) for line in first.splitlines()] == [{"w": "a"}, {"w": "aa"}, {"w": "aaa"}]
    main(["dsl", "--program", prog])
    assert capsys.readouterr().out == first


def test_dsl_syntax_error_cites_line(tmp_path, capsys):
    prog = write(tmp_path, 'rule: r\ntarget: w\nop: ???\nbase: w = "a"')
    assert main(["dsl", "--program", prog]) == EXIT_DSL
    assert "line 3" in capsys.readouterr().err


def test_dsl_missing_file(tmp_path):
    assert main(["dsl", "--program", str(tmp_path / "none")]) == EXIT_CONFIG


# ---------------------------------------------------------------- store


def test_store_list_empty(tmp_path, capsys):
    path = tmp_path / "e.jsonl"
    path.write_text("")
    assert main(["store", "--store", str(path), "list"]) == EXIT_OK
    assert capsys.readouterr().out == ""


def test_store_list_seed(seed_copy, capsys):
    assert main(["store", "--store", str(seed_copy), "list"]) == EXIT_OK
    assert len(capsys.readouterr().out.splitlines()) == 50


def test_store_query_matches_oracle(seed_copy, capsys):
    text = "Bank Transfer amount"
    assert main(["store", "--store", str(seed_copy), "query", "--context", text, "--k", "5"]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5
    scores = [float(line.split("\t")[0]) for line in lines]
    assert scores == sorted(scores, reverse=True)
    store = load_seed_dataset(seed_copy, persist=False)
    vecs = [embed(r.context.text()).tolist() for r in store.records]
    want = brute_force_top_k(store.records, embed(text).tolist(), vecs, 5)
    assert [int(line.split("\t")[1]) for line in lines] == [r.record_id for r, _ in want]
    assert scores == [float(f"{s:.4f}") for _, s in want]


def test_store_malformed(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text("{oops\n")
    assert main(["store", "--store", str(path), "list"]) == EXIT_CONFIG


def test_store_query_bad_k(seed_copy):
    assert main(["store", "--store", str(seed_copy), "query", "--context", "x", "--k", "0"]) == EXIT_CONFIG


# ---------------------------------------------------------------- replay


def test_replay_reproduces_run(tmp_path, seed_copy, capsys):
    transcript = tmp_path / "t.jsonl"
    main(run_args(seed_copy, tmp_path / "r.json", "--transcript", str(transcript)))
    assert main(["replay", "--specs", str(BENCH), "--transcript", str(transcript)]) == EXIT_OK
    assert capsys.readouterr().out == ""


def test_replay_reports_mismatch(tmp_path, seed_copy, capsys):
    transcript = tmp_path / "t.jsonl"
    main(run_args(seed_copy, tmp_path / "r.json", "--transcript", str(transcript)))
    rows = [json.loads(line) for line in transcript.read_text().splitlines()]
    rows[0]["outcome"] = "crash"
    transcript.write_text("".join(json.dumps(r) + "\n" for r in rows))
    assert main(["replay", "--specs", str(BENCH), "--transcript", str(transcript)]) == EXIT_MISMATCH
    assert capsys.readouterr().out.startswith("1\t")


def test_replay_bad_row(tmp_path):
    transcript = tmp_path / "t.jsonl"
    transcript.write_text('{"target": "Nope/X"}\n')
    assert main(["replay", "--specs", str(BENCH), "--transcript", str(transcript)]) == EXIT_CONFIG
