"""Drive a chat backend through the reasoning pipeline and score the results.

Three backends implement one interface: a live HTTP endpoint (chat-style
JSON in, assistant text out), an in-process oracle that answers every prompt
with the symbolic engine's own output, and a transcript replayer for
reproducible audits of recorded runs.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence
from urllib.parse import urlparse

import requests

from .engine import (ColliderCandidates, EngineOptions, apply_conditional,
                     apply_unconditional, candidate_pairs,
                     filter_collider_pairs, initial_matrix, orient_colliders,
                     run_c2p)
from .errors import (BackendError, ConfigError, TransportError, UsageError)
from .hypotheses import (MODE_EXTENSION_QUANTIFIED, NO, YES, binary_answer,
                         evaluate_on_pdag)
from .matrix import AdjMatrix
from .parsing import parse_hypothesis, parse_premise
from .prompts import (PromptContext, extract_sections, identify_step,
                      is_cot_prompt, is_few_shot_prompt, render_cot,
                      render_few_shot, render_prompt)
from .relations import RelationSet
from .variables import VariableTable

log = logging.getLogger(__name__)

MODE_STEP_BY_STEP = "step-by-step"
MODE_FEW_SHOT = "few-shot"
MODE_BASELINE_COT = "baseline-cot"
EVAL_MODES = (MODE_STEP_BY_STEP, MODE_FEW_SHOT, MODE_BASELINE_COT)


# ---------------------------------------------------------------------------
# configuration and transport


@dataclass(frozen=True)
class BackendConfig:
    """Connection settings for a chat backend.

    ``endpoint`` schemes: ``http(s)://`` for a live service, ``mock://`` for
    the in-process oracle, ``replay://<dir>`` for recorded transcripts.
    Temperature stays at 0 unless explicitly overridden. The auth token is
    read from the environment variable named here and never serialized.
    """

    endpoint: str = "mock://engine"
    model: str = "oracle"
    temperature: float = 0.0
    max_tokens: int = 4096
    auth_env: str | None = None
    attempts: int = 3
    backoff: float = 0.25
    timeout: float = 60.0
    requests_per_second: float | None = None

    def scheme(self) -> str:
        return urlparse(self.endpoint).scheme

    def as_dict(self) -> dict:
        return {
            "endpoint": self.endpoint,
            "model": self.model,
            "temperature": self.temperature,
            "max_tokens": self.max_tokens,
            "auth_env": self.auth_env,
            "attempts": self.attempts,
            "backoff": self.backoff,
            "timeout": self.timeout,
            "requests_per_second": self.requests_per_second,
        }

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.as_dict(), sort_keys=True)
                              .encode()).hexdigest()[:16]


def validate_config(config: BackendConfig) -> None:
    parsed = urlparse(config.endpoint)
    if parsed.scheme in ("http", "https"):
        if not parsed.netloc:
            raise ConfigError(f"malformed endpoint URL: {config.endpoint!r}")
        if config.auth_env and not os.environ.get(config.auth_env):
            raise ConfigError(
                f"auth environment variable {config.auth_env!r} is not set")
    elif parsed.scheme == "mock":
        pass
    elif parsed.scheme == "replay":
        if not (parsed.netloc or parsed.path):
            raise ConfigError("replay endpoint needs a transcript directory")
    else:
        raise ConfigError(f"unsupported endpoint scheme: {config.endpoint!r}")
    if config.attempts < 1:
        raise ConfigError("attempts must be at least 1")


class _RateLimiter:
    def __init__(self, per_second: float):
        self._interval = 1.0 / per_second
        self._lock = threading.Lock()
        self._next = 0.0

    def wait(self):
        with self._lock:
            now = time.monotonic()
            if now < self._next:
                time.sleep(self._next - now)
                now = time.monotonic()
            self._next = now + self._interval


class HttpBackend:
    """Generic chat endpoint: ordered role/content messages in, text out."""

    def __init__(self, config: BackendConfig):
        validate_config(config)
        self.config = config
        self._token = os.environ[config.auth_env] if config.auth_env else None
        self._limiter = (_RateLimiter(config.requests_per_second)
                         if config.requests_per_second else None)
        self._local = threading.local()

    def pop_usage(self) -> dict | None:
        """Token usage of the most recent call on this thread, if reported."""
        usage = getattr(self._local, "usage", None)
        self._local.usage = None
        return usage

    def complete(self, messages: Sequence[dict], *, sample_id=None, step=None) -> str:
        payload = {
            "model": self.config.model,
            "messages": list(messages),
            "temperature": self.config.temperature,
            "max_tokens": self.config.max_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self._token:
            headers["Authorization"] = f"Bearer {self._token}"
        body = json.dumps(payload)
        log.debug("request %s digest=%s", self.config.endpoint,
                  hashlib.sha256(body.encode()).hexdigest()[:12])
        last_exc: Exception | None = None
        for attempt in range(self.config.attempts):
            if self._limiter:
                self._limiter.wait()
            try:
                resp = requests.post(self.config.endpoint, data=body,
                                     headers=headers, timeout=self.config.timeout)
            except requests.RequestException as exc:
                last_exc = exc
                time.sleep(self.config.backoff * (2 ** attempt))
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last_exc = BackendError(resp.status_code, resp.text[:200])
                time.sleep(self.config.backoff * (2 ** attempt))
                continue
            if resp.status_code != 200:
                raise BackendError(resp.status_code, resp.text[:200])
            data = resp.json()
            log.debug("response digest=%s",
                      hashlib.sha256(resp.content).hexdigest()[:12])
            if isinstance(data, dict) and isinstance(data.get("usage"), dict):
                self._local.usage = data["usage"]
            return _extract_assistant_text(data)
        if isinstance(last_exc, BackendError):
            raise last_exc
        raise TransportError(
            f"{self.config.attempts} attempt(s) to {self.config.endpoint} failed:"
            f" {last_exc}")


def _extract_assistant_text(data) -> str:
    try:
        return data["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError):
        pass
    for key in ("content", "text", "output"):
        if isinstance(data, dict) and isinstance(data.get(key), str):
            return data[key]
    raise BackendError(200, f"no assistant text in response: {str(data)[:120]}")


class ReplayBackend:
    """Replays recorded transcripts; one file per sample, exchanges in order."""

    def __init__(self, directory):
        self.directory = str(directory)
        if not os.path.isdir(self.directory):
            raise ConfigError(f"transcript directory not found: {self.directory}")
        self._cursors: dict[str, int] = {}
        self._cache: dict[str, list[dict]] = {}
        self._lock = threading.Lock()

    def _exchanges(self, sample_id: str) -> list[dict]:
        if sample_id not in self._cache:
            path = os.path.join(self.directory, f"{sample_id}.json")
            if not os.path.exists(path):
                raise TransportError(f"no transcript for sample {sample_id!r}")
            with open(path, encoding="utf-8") as fh:
                self._cache[sample_id] = json.load(fh)["exchanges"]
        return self._cache[sample_id]

    def complete(self, messages, *, sample_id=None, step=None) -> str:
        if sample_id is None:
            raise TransportError("replay needs a sample id")
        with self._lock:
            exchanges = self._exchanges(sample_id)
            cursor = self._cursors.get(sample_id, 0)
            if cursor >= len(exchanges):
                raise TransportError(f"transcript for {sample_id!r} is exhausted")
            recorded = exchanges[cursor].get("step")
            if recorded is not None and step is not None and recorded != step:
                raise TransportError(
                    f"transcript for {sample_id!r} was recorded for step "
                    f"{recorded}, not step {step}; replay with the original "
                    f"pipeline mode")
            self._cursors[sample_id] = cursor + 1
        return exchanges[cursor]["response"]


class RecordingBackend:
    """Wraps another backend and stores every exchange, one file per sample."""

    def __init__(self, inner, directory):
        self.inner = inner
        self.directory = str(directory)
        os.makedirs(self.directory, exist_ok=True)
        self._exchanges: dict[str, list[dict]] = {}
        self._lock = threading.Lock()

    def pop_usage(self):
        inner_pop = getattr(self.inner, "pop_usage", None)
        return inner_pop() if inner_pop else None

    def complete(self, messages, *, sample_id=None, step=None) -> str:
        response = self.inner.complete(messages, sample_id=sample_id, step=step)
        if sample_id is not None:
            prompt = messages[-1]["content"] if messages else ""
            entry = {
                "step": step,
                "prompt_digest": hashlib.sha256(prompt.encode()).hexdigest()[:12],
                "response": response,
            }
            with self._lock:
                self._exchanges.setdefault(sample_id, []).append(entry)
                path = os.path.join(self.directory, f"{sample_id}.json")
                with open(path, "w", encoding="utf-8") as fh:
                    json.dump({"sample_id": sample_id,
                               "exchanges": self._exchanges[sample_id]}, fh, indent=1)
        return response


class MockBackend:
    """In-process oracle: answers every prompt with the engine's own output.

    The reply is computed from the prompt text alone (premise, matrices, and
    lists are read back out of the rendered sections), so the full
    render/transport/parse path is exercised without any network.
    """

    def __init__(self, options: EngineOptions | None = None,
                 eval_mode: str = MODE_EXTENSION_QUANTIFIED):
        self.options = options or EngineOptions()
        self.eval_mode = eval_mode

    def complete(self, messages, *, sample_id=None, step=None) -> str:
        content = messages[-1]["content"] if messages else ""
        if is_few_shot_prompt(content):
            return self._few_shot_reply(content)
        if is_cot_prompt(content):
            return self._cot_reply(content)
        detected = identify_step(content)
        if detected is None:
            raise TransportError("oracle backend cannot identify the prompt")
        handler = getattr(self, f"_step_{detected}")
        return handler(extract_sections(content))

    # step handlers -------------------------------------------------------

    def _step_1(self, sections) -> str:
        doc = parse_premise(sections["Premise"])
        payload = {"number of random variables": len(doc.variables),
                   "names of random variables": list(doc.variables.names)}
        return "Here is the extraction.\n" + json.dumps(payload)

    def _step_2(self, sections) -> str:
        doc = parse_premise(sections["Premise"])
        rel = doc.relations.as_dict()
        payload = {
            "Dependencies": rel["dependencies"],
            "Unconditional Independencies": rel["unconditional_independencies"],
            "Conditional Independencies": rel["conditional_independencies"],
            "Cause-and-Effect Relations": rel["declared_causes"],
        }
        return "All of Statistical Relations:\n" + json.dumps(payload)

    def _step_3(self, sections) -> str:
        names = json.loads(sections["Random variables"])
        declared = json.loads(sections["Cause-and-effect relations"])
        table = VariableTable(names)
        matrix = initial_matrix(
            table, [(table.index(a), table.index(b)) for a, b in declared])
        return "Initial adjacency matrix:\n" + json.dumps(matrix.to_mapping())

    def _step_4(self, sections) -> str:
        matrix = AdjMatrix.from_mapping(json.loads(sections["Adjacency matrix"]))
        rels = _relations_for(matrix.vars,
                              uncond=json.loads(sections["Unconditional independencies"]))
        out = apply_unconditional(matrix, rels)
        return "Updated adjacency matrix:\n" + json.dumps(out.to_mapping())

    def _step_5(self, sections) -> str:
        matrix = AdjMatrix.from_mapping(json.loads(sections["Adjacency matrix"]))
        rels = _relations_for(matrix.vars,
                              cond=json.loads(sections["Conditional independencies"]))
        out = apply_conditional(matrix, rels)
        return "Updated adjacency matrix:\n" + json.dumps(out.to_mapping())

    def _step_6(self, sections) -> str:
        matrix = AdjMatrix.from_mapping(json.loads(sections["Adjacency matrix"]))
        cands = candidate_pairs(matrix)
        return "Candidates:\n" + json.dumps(cands.to_mapping())

    def _step_7(self, sections) -> str:
        cand_map = json.loads(sections["Candidates"])
        uncond = json.loads(sections["Unconditional independencies"])
        cond = json.loads(sections["Conditional independencies"])
        labels = sorted({*cand_map,
                         *(x for pair in uncond for x in pair),
                         *(x for entry in cond for x in entry["pair"] + entry["given"]),
                         *(x for pairs in cand_map.values() for p in pairs for x in p)})
        table = VariableTable(labels)
        rels = _relations_for(table, uncond=uncond, cond=cond)
        cands = ColliderCandidates(table, {
            table.index(row): tuple((table.index(a), table.index(b)) for a, b in pairs)
            for row, pairs in cand_map.items()})
        kept = filter_collider_pairs(cands, rels, self.options.collider_filter)
        return "Filtered candidates:\n" + json.dumps(kept.to_mapping())

    def _step_8(self, sections) -> str:
        matrix = AdjMatrix.from_mapping(json.loads(sections["Adjacency matrix"]))
        cand_map = json.loads(sections["Candidates"])
        table = matrix.vars
        cands = ColliderCandidates(table, {
            table.index(row): tuple((table.index(a), table.index(b)) for a, b in pairs)
            for row, pairs in cand_map.items()})
        out = orient_colliders(matrix, cands)
        return "Final adjacency matrix:\n" + json.dumps(out.to_mapping())

    def _step_9(self, sections) -> str:
        doc = parse_premise(sections["Premise"])
        matrix = AdjMatrix.from_mapping(json.loads(sections["Adjacency matrix"]),
                                        vars=doc.variables)
        h = parse_hypothesis(sections["Hypothesis"], doc.variables)
        verdict = evaluate_on_pdag(h, matrix, self.eval_mode)
        note = f"The evaluation over the matrix gives {verdict.answer}."
        return f'{note} Final Answer: "{binary_answer(verdict)}"'

    # bundled modes --------------------------------------------------------

    def _few_shot_reply(self, content: str) -> str:
        from .pipeline import solve_doc
        from .prompts import _format_trace_block
        sections = extract_sections(content)
        doc = parse_premise(sections["Premise"])
        res = solve_doc(doc, sections["Hypothesis"], self.options, self.eval_mode)
        return _format_trace_block(res.report())

    def _cot_reply(self, content: str) -> str:
        from .pipeline import solve_doc
        sections = extract_sections(content)
        doc = parse_premise(sections["Premise"])
        res = solve_doc(doc, sections["Hypothesis"], self.options, self.eval_mode)
        answer = binary_answer(res.verdict)
        return (f"Working through the structure of the premise step by step "
                f'leads to the verdict {res.verdict.answer}. Final Answer: "{answer}"')


def _relations_for(table: VariableTable, uncond=(), cond=()) -> RelationSet:
    return RelationSet(
        table,
        uncond_indep=frozenset((table.index(a), table.index(b)) for a, b in uncond),
        cond_indep=frozenset(
            ((table.index(e["pair"][0]), table.index(e["pair"][1])),
             frozenset(table.index(g) for g in e["given"]))
            for e in cond),
    )


def make_backend(config: BackendConfig, options: EngineOptions | None = None,
                 eval_mode: str = MODE_EXTENSION_QUANTIFIED):
    validate_config(config)
    scheme = config.scheme()
    if scheme == "mock":
        return MockBackend(options, eval_mode)
    if scheme == "replay":
        parsed = urlparse(config.endpoint)
        return ReplayBackend((parsed.netloc or "") + parsed.path)
    return HttpBackend(config)


def send(config: BackendConfig, messages: Sequence[dict]) -> str:
    """One-shot completion against whatever backend the config selects."""
    return make_backend(config).complete(messages)


# ---------------------------------------------------------------------------
# step-output parsing


@dataclass(frozen=True)
class ParsedStep:
    value: object | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.value is not None


_QUOTE_KEYS_RE = re.compile(r"([{,]\s*)([A-Za-z_][A-Za-z0-9_\- ]*?)(\s*:)")


def _json_blocks(text: str):
    depth = 0
    start = 0
    for i, ch in enumerate(text):
        if ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}" and depth:
            depth -= 1
            if depth == 0:
                yield text[start:i + 1]


def _tolerant_loads(block: str):
    for candidate in (block,
                      _QUOTE_KEYS_RE.sub(r'\1"\2"\3', block),
                      _QUOTE_KEYS_RE.sub(r'\1"\2"\3', block.replace("'", '"'))):
        try:
            return json.loads(candidate)
        except (json.JSONDecodeError, ValueError):
            continue
    return None


def _dicts_in(text: str):
    for block in _json_blocks(text):
        loaded = _tolerant_loads(block)
        if isinstance(loaded, dict):
            yield loaded


def _walk_dicts(obj):
    if isinstance(obj, dict):
        yield obj
        for v in obj.values():
            yield from _walk_dicts(v)


def _norm_pairs(value) -> list[list[str]] | None:
    if not isinstance(value, list):
        return None
    out = []
    for entry in value:
        if not (isinstance(entry, (list, tuple)) and len(entry) == 2
                and all(isinstance(x, str) for x in entry)):
            return None
        out.append(sorted(str(x) for x in entry))
    return sorted(out)


def _norm_cond_entries(value):
    if not isinstance(value, list):
        return None
    out = []
    for entry in value:
        if isinstance(entry, dict) and "pair" in entry:
            pair = entry["pair"]
            given = entry.get("given")
        elif (isinstance(entry, (list, tuple)) and len(entry) == 2
              and all(isinstance(x, (list, tuple)) for x in entry)):
            pair, given = entry
        elif (isinstance(entry, (list, tuple)) and len(entry) == 2
              and all(isinstance(x, str) for x in entry)):
            pair, given = entry, None
        else:
            return None
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
            return None
        out.append({"pair": sorted(str(x) for x in pair),
                    "given": sorted(str(g) for g in given) if given is not None else None})
    return sorted(out, key=lambda e: (e["pair"], e["given"] or []))


def _is_matrix(obj) -> bool:
    if not isinstance(obj, dict) or not obj:
        return False
    keys = set(obj)
    for row in obj.values():
        if not isinstance(row, dict) or set(row) != keys:
            return False
        for v in row.values():
            if v not in (0, 1):
                return False
    return True


def _matrix_from_rows(text: str) -> dict | None:
    rows = re.findall(r"([A-Za-z][A-Za-z0-9]*)\s*[:=]\s*\{([^{}]*)\}", text)
    if not rows:
        return None
    out = {}
    for name, inner in rows:
        cells = re.findall(r"([A-Za-z][A-Za-z0-9]*)\s*[:=]\s*([01])\b", inner)
        if not cells:
            return None
        out[name] = {c: int(v) for c, v in cells}
    return out if _is_matrix(out) else None


def _norm_candidates(obj) -> dict | None:
    if not isinstance(obj, dict):
        return None
    out = {}
    for key, value in obj.items():
        if not isinstance(value, list):
            return None
        if value and all(isinstance(x, str) for x in value):
            if len(value) != 2:
                return None
            pairs = [sorted(value)]
        else:
            pairs = []
            for entry in value:
                if not (isinstance(entry, (list, tuple)) and len(entry) == 2):
                    return None
                pairs.append(sorted(str(x) for x in entry))
        out[str(key)] = sorted(pairs)
    return out


def _candidates_from_rows(text: str) -> dict | None:
    rows = re.findall(r"([A-Za-z][A-Za-z0-9]*)\s*:\s*\[([^\[\]{}]*)\]", text)
    if not rows:
        return None
    out = {}
    for name, inner in rows:
        labels = [x.strip().strip('"\'') for x in inner.split(",") if x.strip()]
        if len(labels) != 2:
            return None
        out[name] = [sorted(labels)]
    return out


_FINAL_ANSWER_RES = (
    re.compile(r"final answer\s*[:\-]?\s*\"?(yes|no|undetermined)\"?", re.I),
    re.compile(r"answer is\s*\"?(yes|no|undetermined)\"?", re.I),
    re.compile(r"\"(yes|no|undetermined)\"", re.I),
    re.compile(r"\b(yes|no|undetermined)\b", re.I),
)


def parse_step_output(step: int, text: str) -> ParsedStep:
    """Pull the structured value for one step out of possibly chatty text.

    Never raises; a missing or malformed object comes back as a parse
    failure on the result.
    """
    if not isinstance(text, str) or not text.strip():
        return ParsedStep(None, "empty output")
    try:
        if step == 1:
            return _parse_step_1(text)
        if step == 2:
            return _parse_step_2(text)
        if step in (3, 4, 5, 8):
            for obj in _dicts_in(text):
                for inner in _walk_dicts(obj):
                    if _is_matrix(inner):
                        return ParsedStep(inner)
            fallback = _matrix_from_rows(text)
            if fallback:
                return ParsedStep(fallback)
            return ParsedStep(None, "no adjacency matrix found")
        if step in (6, 7):
            for obj in _dicts_in(text):
                norm = _norm_candidates(obj)
                if norm is not None:
                    return ParsedStep(norm)
            fallback = _candidates_from_rows(text)
            if fallback is not None:
                return ParsedStep(fallback)
            if re.search(r"\{\s*\}", text):
                return ParsedStep({})
            return ParsedStep(None, "no candidate map found")
        if step == 9:
            for pattern in _FINAL_ANSWER_RES:
                hits = pattern.findall(text)
                if hits:
                    return ParsedStep({"answer": hits[-1].capitalize()})
            return ParsedStep(None, "no final answer found")
    except Exception as exc:  # totality: arbitrary text must never blow up
        return ParsedStep(None, f"parse error: {exc}")
    return ParsedStep(None, f"unknown step {step}")


def _parse_step_1(text: str) -> ParsedStep:
    for obj in _dicts_in(text):
        for inner in _walk_dicts(obj):
            count = names = None
            for key, value in inner.items():
                low = str(key).lower()
                if "number" in low and isinstance(value, (int, str)):
                    try:
                        count = int(value)
                    except ValueError:
                        pass
                if "name" in low and isinstance(value, list):
                    names = [str(v) for v in value]
                if "name" in low and isinstance(value, str):
                    names = [v.strip() for v in value.split(",") if v.strip()]
            if count is not None and names:
                return ParsedStep({"count": count, "names": names})
    count_hit = re.search(r"number of random variables?\s*[:=]?\s*(\d+)", text, re.I)
    names_hit = re.search(
        r"names of (?:all )?(?:the )?random variables?\s*[:=]?\s*([A-Za-z0-9_,\s]+)",
        text, re.I)
    if count_hit and names_hit:
        names = [v.strip() for v in names_hit.group(1).split(",") if v.strip()]
        return ParsedStep({"count": int(count_hit.group(1)), "names": names})
    return ParsedStep(None, "no variable count/names found")


def _parse_step_2(text: str) -> ParsedStep:
    for obj in _dicts_in(text):
        for inner in _walk_dicts(obj):
            lowered = {str(k).lower(): v for k, v in inner.items()}
            deps = uncond = cond = declared = None
            for key, value in lowered.items():
                if "unconditional" in key:
                    uncond = _norm_pairs(value)
                elif "conditional" in key:
                    cond = _norm_cond_entries(value)
                elif "depend" in key and "indep" not in key:
                    deps = _norm_pairs(value)
                elif "cause" in key:
                    declared = value if isinstance(value, list) else None
            if deps is None and uncond is None:
                continue
            return ParsedStep({
                "dependencies": deps or [],
                "unconditional_independencies": uncond or [],
                "conditional_independencies": cond or [],
                "declared_causes": [list(map(str, e)) for e in (declared or [])],
            })
    return ParsedStep(None, "no relation lists found")


# ---------------------------------------------------------------------------
# evaluation records


@dataclass(frozen=True)
class StepResult:
    raw: str | None
    parsed: object | None
    match: bool
    error: str | None = None

    def as_dict(self) -> dict:
        return {"raw": self.raw, "parsed": self.parsed,
                "match": self.match, "error": self.error}


@dataclass(frozen=True)
class EvalRecord:
    """Outcome of one sample run: per-step results plus the final verdict."""

    sample_id: str
    n_vars: int
    label: str
    kind: str
    mode: str
    steps: dict[str, StepResult]
    verdict: str | None
    correct: bool
    elapsed_ms: float
    parse_failures: int
    error: str | None = None
    token_counts: dict | None = None

    def as_dict(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "n_vars": self.n_vars,
            "label": self.label,
            "kind": self.kind,
            "mode": self.mode,
            "steps": {k: v.as_dict() for k, v in self.steps.items()},
            "verdict": self.verdict,
            "correct": self.correct,
            "elapsed_ms": self.elapsed_ms,
            "parse_failures": self.parse_failures,
            "error": self.error,
            "token_counts": self.token_counts,
        }


def _reference_steps(sample, options: EngineOptions, eval_mode: str):
    doc = parse_premise(sample.premise)
    h = parse_hypothesis(sample.hypothesis_text, doc.variables)
    trace = run_c2p(doc.relations, options)
    verdict = evaluate_on_pdag(h, trace.final, eval_mode)
    refs = {
        1: {"count": len(doc.variables), "names": list(doc.variables.names)},
        2: doc.relations.as_dict(),
        3: trace.step_3.to_mapping(),
        4: trace.step_4.to_mapping(),
        5: trace.step_5.to_mapping(),
        6: trace.step_6.to_mapping(),
        7: trace.step_7.to_mapping(),
        8: trace.step_8.to_mapping(),
        9: verdict,
    }
    return refs, verdict


def _match_step(step: int, parsed, ref) -> bool:
    if parsed is None:
        return False
    if step == 1:
        return (parsed.get("count") == ref["count"]
                and set(parsed.get("names", ())) == set(ref["names"]))
    if step == 2:
        if _norm_pairs(parsed["dependencies"]) != _norm_pairs(ref["dependencies"]):
            return False
        if (_norm_pairs(parsed["unconditional_independencies"])
                != _norm_pairs(ref["unconditional_independencies"])):
            return False
        got = _norm_cond_entries(parsed["conditional_independencies"]) or []
        want = _norm_cond_entries(ref["conditional_independencies"]) or []
        if [e["pair"] for e in got] != [e["pair"] for e in want]:
            return False
        for g, w in zip(got, want):
            if g["given"] is not None and g["given"] != w["given"]:
                return False
        return True
    if step in (3, 4, 5, 8):
        return parsed == ref
    if step in (6, 7):
        return _norm_candidates(parsed) == _norm_candidates(ref)
    if step == 9:
        answer = parsed.get("answer") if isinstance(parsed, dict) else None
        if answer is None:
            return False
        return binary_answer(answer) == binary_answer(ref)
    return False


_STEP_SECTION_RE = re.compile(r"^\s*(?:\*+\s*)?Step\s+(\d+)\s*:", re.M)


def split_step_sections(text: str) -> dict[int, str]:
    """Carve a multi-step response into per-step chunks."""
    hits = list(_STEP_SECTION_RE.finditer(text))
    out: dict[int, str] = {}
    for k, hit in enumerate(hits):
        stop = hits[k + 1].start() if k + 1 < len(hits) else len(text)
        out[int(hit.group(1))] = text[hit.end():stop].strip()
    return out


def run_pipeline(sample, config: BackendConfig, mode: str = MODE_STEP_BY_STEP,
                 options: EngineOptions | None = None,
                 eval_mode: str = MODE_EXTENSION_QUANTIFIED,
                 backend=None) -> EvalRecord:
    """Evaluate one sample against a backend and grade every step.

    Backend failures abort the sample, never the batch: the record keeps the
    partial trace and an error note.
    """
    if mode not in EVAL_MODES:
        raise ConfigError(f"unknown pipeline mode {mode!r}; pick one of {EVAL_MODES}")
    options = options or EngineOptions()
    backend = backend or make_backend(config, options, eval_mode)
    refs, _ref_verdict = _reference_steps(sample, options, eval_mode)
    ctx = PromptContext(premise=sample.premise, hypothesis=sample.hypothesis_text)
    started = time.monotonic()
    steps: dict[str, StepResult] = {}
    error = None
    verdict = None
    usage_tally: dict[str, int] = {}

    def track_usage():
        pop = getattr(backend, "pop_usage", None)
        reported = pop() if pop else None
        if isinstance(reported, dict):
            for key, value in reported.items():
                if isinstance(value, int):
                    usage_tally[key] = usage_tally.get(key, 0) + value

    def finish():
        parse_failures = sum(1 for s in steps.values() if s.raw is not None and not s.match
                             and s.parsed is None)
        correct = verdict is not None and binary_answer(verdict) == sample.label
        return EvalRecord(sample.id, sample.n_vars, sample.label, sample.kind,
                          mode, steps, verdict, correct,
                          (time.monotonic() - started) * 1000.0,
                          parse_failures, error, usage_tally or None)

    if mode == MODE_STEP_BY_STEP:
        prior: dict[int, object] = {}
        for step in range(1, 10):
            try:
                prompt = render_prompt(step, ctx, prior)
            except Exception as exc:
                error = f"step {step}: {exc}"
                break
            try:
                raw = backend.complete([{"role": "user", "content": prompt}],
                                       sample_id=sample.id, step=step)
            except (TransportError, BackendError) as exc:
                error = f"step {step}: {exc}"
                break
            track_usage()
            parsed = parse_step_output(step, raw)
            match = _match_step(step, parsed.value, refs[step])
            steps[f"step_{step}"] = StepResult(raw, parsed.value, match, parsed.error)
            prior[step] = parsed.value
            if parsed.value is None and step < 9:
                error = f"step {step}: unparseable output ends the chain"
                break
        final = steps.get("step_9")
        if final and isinstance(final.parsed, dict):
            verdict = final.parsed.get("answer")
        return finish()

    if mode == MODE_FEW_SHOT:
        prompt = render_few_shot(ctx)
    else:
        prompt = render_cot(ctx)
    try:
        raw = backend.complete([{"role": "user", "content": prompt}],
                               sample_id=sample.id, step=0)
    except (TransportError, BackendError) as exc:
        error = str(exc)
        return finish()
    track_usage()
    if mode == MODE_BASELINE_COT:
        parsed = parse_step_output(9, raw)
        match = _match_step(9, parsed.value, refs[9])
        steps["step_9"] = StepResult(raw, parsed.value, match, parsed.error)
        if parsed.value:
            verdict = parsed.value.get("answer")
        return finish()
    sections = split_step_sections(raw)
    for step in range(1, 10):
        chunk = sections.get(step)
        if chunk is None and step == 9:
            chunk = raw  # final answer may sit outside an explicit section
        if chunk is None:
            steps[f"step_{step}"] = StepResult(None, None, False, "section missing")
            continue
        parsed = parse_step_output(step, chunk)
        match = _match_step(step, parsed.value, refs[step])
        steps[f"step_{step}"] = StepResult(chunk, parsed.value, match, parsed.error)
    final = steps.get("step_9")
    if final and isinstance(final.parsed, dict):
        verdict = final.parsed.get("answer")
    return finish()


def run_batch(samples: Sequence, config: BackendConfig,
              mode: str = MODE_STEP_BY_STEP,
              options: EngineOptions | None = None,
              eval_mode: str = MODE_EXTENSION_QUANTIFIED,
              backend=None, parallelism: int = 1) -> list[EvalRecord]:
    """Run many samples, optionally concurrently; order follows the input."""
    backend = backend or make_backend(config, options, eval_mode)
    if parallelism <= 1:
        return [run_pipeline(s, config, mode, options, eval_mode, backend)
                for s in samples]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        futures = [pool.submit(run_pipeline, s, config, mode, options,
                               eval_mode, backend) for s in samples]
        return [f.result() for f in futures]


# ---------------------------------------------------------------------------
# metrics


@dataclass(frozen=True)
class Metrics:
    """Confusion counts with the derived ratios.

    Ratios with a zero denominator come out as 0.0 and are flagged
    degenerate rather than raising.
    """

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if (self.tp + self.fp) else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if (self.tp + self.fn) else 0.0

    @property
    def f1(self) -> float:
        denom = 2 * self.tp + self.fp + self.fn
        return 2 * self.tp / denom if denom else 0.0

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else 0.0

    @property
    def degenerate_precision(self) -> bool:
        return (self.tp + self.fp) == 0

    @property
    def degenerate_recall(self) -> bool:
        return (self.tp + self.fn) == 0

    def as_dict(self) -> dict:
        return {
            "tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
            "precision": round(self.precision, 6),
            "recall": round(self.recall, 6),
            "f1": round(self.f1, 6),
            "accuracy": round(self.accuracy, 6),
            "degenerate_precision": self.degenerate_precision,
            "degenerate_recall": self.degenerate_recall,
        }


def metrics_from_records(records: Sequence[EvalRecord]) -> Metrics:
    tp = fp = tn = fn = 0
    for r in records:
        predicted = binary_answer(r.verdict) if r.verdict is not None else None
        if predicted is None:
            # unanswered counts against the run, never for it
            if r.label == YES:
                fn += 1
            else:
                fp += 1
        elif predicted == YES and r.label == YES:
            tp += 1
        elif predicted == YES:
            fp += 1
        elif r.label == NO:
            tn += 1
        else:
            fn += 1
    return Metrics(tp, fp, tn, fn)


STEP_TO_SUBTASK = {1: 1, 2: 2, 3: 3, 4: 4, 5: 4, 6: 4, 7: 4, 8: 4, 9: 5}


@dataclass(frozen=True)
class ScoreReport:
    overall: Metrics
    by_n_vars: dict[int, Metrics]
    step_accuracy: dict[str, float]
    subtask_accuracy: dict[int, float]
    step_accuracy_by_n_vars: dict[int, dict[str, float]]
    parse_failure_rate: float
    n_records: int

    def as_dict(self) -> dict:
        return {
            "n_records": self.n_records,
            "overall": self.overall.as_dict(),
            "by_n_vars": {str(k): v.as_dict() for k, v in sorted(self.by_n_vars.items())},
            "step_accuracy": self.step_accuracy,
            "subtask_accuracy": {str(k): v for k, v in sorted(self.subtask_accuracy.items())},
            "step_accuracy_by_n_vars": {
                str(k): v for k, v in sorted(self.step_accuracy_by_n_vars.items())},
            "parse_failure_rate": self.parse_failure_rate,
        }


def _step_table(records: Sequence[EvalRecord]) -> dict[str, float]:
    keys = sorted({k for r in records for k in r.steps}, key=lambda s: int(s.split("_")[1]))
    return {k: sum(1 for r in records if r.steps.get(k) and r.steps[k].match) / len(records)
            for k in keys}


def score(records: Sequence[EvalRecord], group_by: Sequence[str] = ("n_vars",)) -> ScoreReport:
    """Aggregate binary metrics plus per-step and per-subtask accuracy."""
    records = list(records)
    if not records:
        raise UsageError("no evaluation records to score")
    for key in group_by:
        if key not in ("n_vars", "subtask"):
            raise UsageError(f"unsupported group-by key {key!r}")
    by_n: dict[int, Metrics] = {}
    step_by_n: dict[int, dict[str, float]] = {}
    for n in sorted({r.n_vars for r in records}):
        subset = [r for r in records if r.n_vars == n]
        by_n[n] = metrics_from_records(subset)
        step_by_n[n] = _step_table(subset)
    steps = _step_table(records)
    subtasks: dict[int, float] = {}
    for subtask in sorted(set(STEP_TO_SUBTASK.values())):
        members = [f"step_{s}" for s, t in STEP_TO_SUBTASK.items() if t == subtask]
        present = [k for k in members if k in steps]
        if not present:
            continue
        hits = sum(1 for r in records
                   if all(r.steps.get(k) and r.steps[k].match for k in present))
        subtasks[subtask] = hits / len(records)
    failures = sum(1 for r in records if r.parse_failures or r.verdict is None)
    return ScoreReport(
        overall=metrics_from_records(records),
        by_n_vars=by_n,
        step_accuracy=steps,
        subtask_accuracy=subtasks,
        step_accuracy_by_n_vars=step_by_n,
        parse_failure_rate=failures / len(records),
        n_records=len(records),
    )
