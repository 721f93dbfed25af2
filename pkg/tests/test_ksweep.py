from guifuzz.campaign import CampaignConfig
from guifuzz.ksweep import WEAK_SUFFIX, DegradingMock, examples_shown, generator_ranks, run_k_sweep
from guifuzz.llm import CompletionRequest

from conftest import SEED


def test_examples_shown_counts_headers():
    assert examples_shown("Example 1:\nx\nExample 2:\ny\nnot Example 3:") == 2
    assert examples_shown("nothing") == 0


def test_routing_depends_on_distance_from_best_k():
    script = {"generator/A/P": ["good"], "generator/A/P" + WEAK_SUFFIX: ["weak"], "valid/A/P": ["v"]}
    mock = DegradingMock(script, {"generator/A/P": 2}, best_k=5)

    def ask(shown, tag="generator/A/P"):
        prompt = "\n".join(f"Example {i}:" for i in range(1, shown + 1)) or "q"
        return mock.complete(CompletionRequest(prompt, seed_tag=tag))

    assert ask(5) == "good"
    assert ask(3) == "good"  # distance 2, rank 2: not below
    assert ask(2) == "weak"
    assert ask(0, "valid/A/P") == "v"


def test_ranks_follow_suite_order(bench_specs):
    ranks = generator_ranks(bench_specs)
    assert sorted(ranks.values()) == list(range(12))


def test_sweep_subset(bench_specs, mock_script):
    counts = run_k_sweep(bench_specs, mock_script, SEED, ks=[4, 5], config=CampaignConfig(clock="simulated"))
    assert counts[5] > counts[4]
