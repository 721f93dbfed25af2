"""Chat-completion providers and keyword-anchored response parsers."""

from __future__ import annotations

import json
import os
import re
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

ENV_ENDPOINT = "GUIFUZZ_LLM_ENDPOINT"
ENV_API_KEY = "GUIFUZZ_LLM_API_KEY"
ENV_MODEL = "GUIFUZZ_LLM_MODEL"
DEFAULT_ENDPOINT = "https://api.openai.com/v1/chat/completions"
DEFAULT_MODEL = "gpt-3.5-turbo"

GENERATION_TEMPERATURE = 0.7
REPRODUCTION_TEMPERATURE = 0.0


class ProviderUnavailable(RuntimeError):
    pass


class BudgetExhausted(RuntimeError):
    pass


class ParseMiss(ValueError):
    pass


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    temperature: float = GENERATION_TEMPERATURE
    max_tokens: int = 1024
    seed_tag: str = ""

    def __post_init__(self) -> None:
        if not self.prompt:
            raise ValueError("prompt must be non-empty")
        if not 0 <= self.temperature <= 2:
            raise ValueError("temperature must be in [0, 2]")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")


class Provider:
    """Base provider. ``call_cap`` bounds the number of completions."""

    def __init__(self, call_cap: int | None = None) -> None:
        self.call_cap = call_cap
        self.calls = 0
        self._count_lock = threading.Lock()

    def complete(self, request: CompletionRequest) -> str:
        with self._count_lock:
            if self.call_cap is not None and self.calls >= self.call_cap:
                raise BudgetExhausted(f"LLM call cap of {self.call_cap} reached")
            self.calls += 1
        return self._complete(request)

    def _complete(self, request: CompletionRequest) -> str:
        raise NotImplementedError


class CallCap(Provider):
    """Per-campaign view of a shared provider with its own call budget."""

    def __init__(self, inner: Provider, cap: int) -> None:
        super().__init__(call_cap=cap)
        self.inner = inner

    def _complete(self, request: CompletionRequest) -> str:
        return self.inner.complete(request)


class MockProvider(Provider):
    """Scripted provider: each seed_tag maps to a response list that is
    replayed in order and then cycled."""

    def __init__(self, script: Mapping[str, Sequence[str]], call_cap: int | None = None) -> None:
        super().__init__(call_cap)
        for tag, responses in script.items():
            if isinstance(responses, str) or not responses or not all(isinstance(r, str) for r in responses):
                raise ValueError(f"script entry {tag!r} must be a non-empty list of strings")
        self.script = {tag: list(responses) for tag, responses in script.items()}
        self._cursor: dict[str, int] = {}
        self._lock = threading.Lock()
        self.transcript: list[tuple[str, str, str]] = []

    @classmethod
    def from_file(cls, path: str | os.PathLike, call_cap: int | None = None) -> "MockProvider":
        try:
            script = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ProviderUnavailable(f"cannot read mock script {path}: {exc}") from None
        if not isinstance(script, dict):
            raise ProviderUnavailable(f"mock script {path} must be a JSON object")
        try:
            return cls(script, call_cap)
        except ValueError as exc:
            raise ProviderUnavailable(str(exc)) from None

    def route(self, request: CompletionRequest) -> str:
        return request.seed_tag

    def _complete(self, request: CompletionRequest) -> str:
        tag = self.route(request)
        with self._lock:
            responses = self.script.get(tag)
            if responses is None:
                raise ProviderUnavailable(f"mock script has no entry for {tag!r}")
            i = self._cursor.get(tag, 0)
            self._cursor[tag] = i + 1
            reply = responses[i % len(responses)]
            self.transcript.append((tag, request.prompt, reply))
        return reply


class LiveProvider(Provider):
    """HTTP chat-completions endpoint configured from the environment."""

    def __init__(
        self,
        endpoint: str | None = None,
        api_key: str | None = None,
        model: str | None = None,
        call_cap: int | None = None,
        timeout: float = 120.0,
    ) -> None:
        super().__init__(call_cap)
        self.endpoint = endpoint or os.environ.get(ENV_ENDPOINT, DEFAULT_ENDPOINT)
        self.api_key = api_key if api_key is not None else os.environ.get(ENV_API_KEY, "")
        self.model = model or os.environ.get(ENV_MODEL, DEFAULT_MODEL)
        self.timeout = timeout
        if not self.api_key:
            raise ProviderUnavailable(f"no API key: set {ENV_API_KEY}")

    def _complete(self, request: CompletionRequest) -> str:
        body = json.dumps(
            {
                "model": self.model,
                "messages": [{"role": "user", "content": request.prompt}],
                "temperature": request.temperature,
                "max_tokens": request.max_tokens,
            }
        ).encode("utf-8")
        req = urllib.request.Request(
            self.endpoint,
            data=body,
            headers={"Content-Type": "application/json", "Authorization": f"Bearer {self.api_key}"},
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
            return payload["choices"][0]["message"]["content"]
        except urllib.error.HTTPError as exc:
            raise ProviderUnavailable(f"HTTP {exc.code} from {self.endpoint}") from None
        except (urllib.error.URLError, OSError, ValueError, KeyError, IndexError, TypeError) as exc:
            raise ProviderUnavailable(f"provider call failed: {exc}") from None


# ---------------------------------------------------------------- parsing

CONSTRAINT_MARKERS = (r"constraints?\s*:", r"constraints")
# where the constraint description stops
INPUT_BOUNDARY_MARKERS = (r"(?:the\s+)?valid\s+input", r"the\s+input", r"input\s+is")
# what introduces a value: "input is", "input for the second widget is", "input:"
VALUE_MARKERS = (r"input(?:\s+(?:for|of)\s+[^\n\"':]{0,60}?)?\s+(?:is|=)\s*:?", r"input\s*:")

_QUOTED = re.compile(r"\s*(?:\"((?:[^\"\\]|\\.)*)\"|“([^”]*)”|'([^'\n]*)')")


@dataclass(frozen=True)
class ValidInputResponse:
    valid_input: dict[str, str]
    inferred_constraints: str
    raw: str


@dataclass(frozen=True)
class GeneratorResponse:
    mutation_rule: str
    program_source: str
    raw: str


def _first(patterns: Sequence[str], text: str, start: int = 0) -> re.Match | None:
    best = None
    for p in patterns:
        m = re.compile(p, re.IGNORECASE).search(text, start)
        if m and (best is None or m.start() < best.start()):
            best = m
    return best


def _unquote(m: re.Match) -> str:
    if m.group(1) is not None:
        try:
            return json.loads('"' + m.group(1) + '"')
        except ValueError:
            return m.group(1)
    return m.group(2) if m.group(2) is not None else m.group(3)


def parse_valid_input_response(
    raw: str,
    expected_widgets: Sequence[str],
    constraint_markers: Sequence[str] = CONSTRAINT_MARKERS,
    boundary_markers: Sequence[str] = INPUT_BOUNDARY_MARKERS,
    value_markers: Sequence[str] = VALUE_MARKERS,
) -> ValidInputResponse:
    if not raw or not raw.strip():
        raise ParseMiss("empty response")
    cm = _first(constraint_markers, raw)
    if cm is None:
        raise ParseMiss("no constraints marker")
    bm = _first(boundary_markers, raw, cm.end())
    if bm is None:
        raise ParseMiss("no input marker after the constraints")
    constraints = raw[cm.end() : bm.start()].strip().lstrip(":").strip().rstrip(".;,:").strip()
    if not constraints:
        raise ParseMiss("empty constraints section")

    values = []
    pos = bm.start()
    while len(values) < len(expected_widgets):
        vm = _first(value_markers, raw, pos)
        if vm is None:
            break
        pos = vm.end()
        q = _QUOTED.match(raw, pos)
        if q:
            values.append(_unquote(q))
            pos = q.end()
        else:
            end = raw.find("\n", pos)
            end = len(raw) if end < 0 else end
            value = raw[pos:end].strip().rstrip(".;,").strip()
            pos = end
            if not value:
                continue
            values.append(value)
    if len(values) < len(expected_widgets):
        raise ParseMiss(f"found {len(values)} valid inputs, expected {len(expected_widgets)}")
    return ValidInputResponse(
        valid_input=dict(zip(expected_widgets, values)),
        inferred_constraints=constraints,
        raw=raw,
    )


RULE_MARKER = r"mutation\s+rule\s*:?"
GENERATOR_MARKER = r"test\s+generator\s*:?"
END_MARKER = r"end\s+generator\."


def parse_generator_response(
    raw: str,
    rule_marker: str = RULE_MARKER,
    generator_marker: str = GENERATOR_MARKER,
    end_marker: str = END_MARKER,
) -> GeneratorResponse:
    if not raw or not raw.strip():
        raise ParseMiss("empty response")
    rm = re.compile(rule_marker, re.IGNORECASE).search(raw)
    if rm is None:
        raise ParseMiss("no 'Mutation rule' marker")
    gm = re.compile(generator_marker, re.IGNORECASE).search(raw, rm.end())
    if gm is None:
        raise ParseMiss("no 'Test generator' marker")
    em = re.compile(end_marker, re.IGNORECASE).search(raw, gm.end())
    rule = raw[rm.end() : gm.start()].strip()
    program = raw[gm.end() : em.start() if em else len(raw)].strip()
    if not rule:
        raise ParseMiss("empty mutation rule")
    if not program:
        raise ParseMiss("empty test generator")
    return GeneratorResponse(mutation_rule=rule, program_source=program, raw=raw)


def render_generator_response(rule: str, program: str) -> str:
    return f"Mutation rule: {rule}\nTest generator:\n{program}\nEnd generator."


def render_valid_input_response(constraints: str, values: Sequence[str]) -> str:
    from .prompts import ordinal

    lines = [f"Constraints: {constraints}."]
    lines += [f"The valid input for the {ordinal(i)} widget is {json.dumps(v, ensure_ascii=False)}." for i, v in enumerate(values, 1)]
    return "\n".join(lines)
