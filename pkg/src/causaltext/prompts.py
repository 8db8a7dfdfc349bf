"""Prompt assets for driving a chat backend through the nine-step pipeline.

The step instructions are fixed texts; rendering appends the slot sections a
step needs (premise, matrices, independence lists, candidates, hypothesis)
in a stable layout. The few-shot variant bundles ten fully worked examples
ahead of the new premise. Slot sections use one canonical JSON shape so both
the in-process oracle backend and the output parser can read them back.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache

from .errors import TemplateError

STEP_INSTRUCTIONS: dict[int, str] = {
    1: ("Please give the number of random variables in the given premise and "
        "write the names of all random variables."),
    2: ('Extract every statistical relation among the random variables. If 2 '
        'random variables, for instance, R1 and R2, are independent, write it in '
        'this form: "R1 is independent of R2". If there exist 2 random variables, '
        'for instance, R1 and R2, that are conditionally independent given a third '
        'random variable, for instance, R3, write it in this form: "R1 and R2 are '
        'independent given R3". If two random variables, for instance, R1 and R2, '
        'are specifically mentioned to have a cause and effect relation, write it '
        'in this form: "R1 is the cause of R2". Also list every pair that is '
        'mentioned as correlated.'),
    3: ('In this phase, each random variable is treated as a node within a fully '
        'connected undirected graph, so every off-diagonal element of the '
        'adjacency matrix starts at 1 and the diagonal at 0. Then, for each pair, '
        'for instance, R1 and R2, presented in the form: "R1 is the cause of R2", '
        'set the element in ["R2", "R1"] in the adjacency matrix to 0.'),
    4: ('Update the adjacency matrix based on the specified unconditional '
        'independencies between random variables. Each pair of variables that is '
        'declared independent should have their corresponding value set to zero '
        'in the adjacency matrix. The initial adjacency matrix and the list of '
        'independencies are provided below. Please ensure all independencies are '
        'correctly reflected in the updated matrix. Instructions: - For each pair '
        'of variables listed as independent, set their corresponding entries in '
        'the adjacency matrix to 0. - Do not change any other entries.'),
    5: ('Update the adjacency matrix based on the specified conditional '
        'independencies between random variables. Each pair of variables that is '
        'declared conditionally independent should have their corresponding value '
        'set to zero in the adjacency matrix. The initial adjacency matrix and '
        'the list of independencies are provided below. Please ensure all '
        'independencies are correctly reflected in the updated matrix. '
        'Instructions: - For each pair of variables listed as independent given '
        'other variable(s), set their corresponding entries in the adjacency '
        'matrix to 0. - Do not change any other entries.'),
    6: ('Task: Given an adjacency matrix, follow these steps: Step 1: Identify '
        'all rows (key values) in the matrix where there are two or more than two '
        'columns with the value "1" in them. For each identified row, find all '
        'pairs of different columns where the values are "1". Ensure to exclude '
        'rows that do not contain any pairs from the results. Step 2: Display '
        'these pairs, "Candidates", where each row name is a key and the value is '
        'a list of column-name pairs identified in Step 1.'),
    7: ('Given the "Candidates" and the lists of independencies, follow these '
        'instructions step by step: Instruction: For each key in "Candidates", '
        'keep a pair only when the two variables of the pair are stated '
        'independent by some listed independence statement whose conditioning set '
        'does not contain the key variable; delete every other pair. Remove keys '
        'that end up with no pairs. Output the updated "Candidates" dictionary '
        'and nothing else.'),
    8: ('Given the adjacency matrix and the "Candidates" list, for each key "R" '
        'with a pair ("C1", "C2") in "Candidates", modify the adjacency matrix as '
        'follows: 1- Set the value in the "R" row and "C1" column to 0: ("R", '
        '"C1") = 0. 2- Set the value in the "R" row and "C2" column to 0: ("R", '
        '"C2") = 0. Ensure that only the specified modifications are made, and '
        'all other entries in the adjacency matrix remain unchanged.'),
    9: ('To extract and understand causal relations in the adjacency matrix, '
        'apply these rules for variables "R" and "C" listed in the matrix: 1- If '
        'the matrix entry at ["R", "C"] = 1 and ["C", "R"] = 1, then the causal '
        'direction between "R" and "C" is undetermined. 2- If the matrix entry at '
        '["R", "C"] = 1 and ["C", "R"] = 0, then "R" is a direct cause of "C", or '
        '"C" is a direct effect of "R". 3- If the matrix entry at ["R", "C"] = 0 '
        'and ["C", "R"] = 1, then "C" is a direct cause of "R", or "R" is a '
        'direct effect of "C". 4- Test each variable "R" in the matrix: "R" is a '
        'collider (common effect) if the matrix entries at ["R", "C1"] = 0, '
        '["C1", "R"] = 1, ["R", "C2"] = 0, and ["C2", "R"] = 1. Evaluate the '
        'hypothesis against the adjacency matrix with these rules. Perform it '
        'step by step and provide the final "Yes" or "No" answer in the form '
        'Final Answer: "Yes" or Final Answer: "No".'),
}

FEW_SHOT_HEADER = (
    "You will reconstruct causal structure from a verbalized premise by "
    "producing nine step outputs: the variable count and names, the list of "
    "statistical relations, the initial adjacency matrix, the matrix after "
    "removing unconditional and then conditional independencies, the candidate "
    "collider pairs, the filtered pairs, the matrix after orienting colliders, "
    "and finally the answer to the hypothesis. Follow the exact output format "
    "of the worked examples below and finish with a line of the form "
    'Final Answer: "Yes" or Final Answer: "No".')


COT_INSTRUCTION = (
    "Consider the premise below and decide whether the hypothesis follows from "
    "it. Think step by step, then finish with a line of the form "
    'Final Answer: "Yes" or Final Answer: "No".')


@dataclass(frozen=True)
class PromptTemplate:
    """One prompt asset: its step id, fixed text, and expected output shape."""

    step: int | str
    text: str
    output_schema: str


STEP_OUTPUT_SCHEMAS = {1: "variables", 2: "relations", 3: "matrix",
                       4: "matrix", 5: "matrix", 6: "candidates",
                       7: "candidates", 8: "matrix", 9: "answer"}

TEMPLATES: dict[int | str, PromptTemplate] = {
    step: PromptTemplate(step, text, STEP_OUTPUT_SCHEMAS[step])
    for step, text in STEP_INSTRUCTIONS.items()
}
TEMPLATES["few-shot-bundle"] = PromptTemplate("few-shot-bundle",
                                              FEW_SHOT_HEADER, "trace")
TEMPLATES["baseline-cot"] = PromptTemplate("baseline-cot", COT_INSTRUCTION,
                                           "answer")

_SECTION_ORDER = (
    "Premise", "Random variables", "Cause-and-effect relations",
    "Adjacency matrix", "Unconditional independencies",
    "Conditional independencies", "Candidates", "Hypothesis",
)

# slots each step needs, as (section name, prior-step key, extractor)
_STEP_SLOTS: dict[int, tuple[tuple[str, int | None, str], ...]] = {
    1: (("Premise", None, "premise"),),
    2: (("Premise", None, "premise"), ("Random variables", 1, "names")),
    3: (("Random variables", 1, "names"), ("Cause-and-effect relations", 2, "declared")),
    4: (("Adjacency matrix", 3, "matrix"), ("Unconditional independencies", 2, "uncond")),
    5: (("Adjacency matrix", 4, "matrix"), ("Conditional independencies", 2, "cond")),
    6: (("Adjacency matrix", 5, "matrix"),),
    7: (("Candidates", 6, "candidates"), ("Unconditional independencies", 2, "uncond"),
        ("Conditional independencies", 2, "cond")),
    8: (("Adjacency matrix", 5, "matrix"), ("Candidates", 7, "candidates")),
    9: (("Premise", None, "premise"), ("Adjacency matrix", 8, "matrix"),
        ("Hypothesis", None, "hypothesis")),
}


@dataclass(frozen=True)
class PromptContext:
    premise: str
    hypothesis: str | None = None


def _slot_value(extractor: str, ctx: PromptContext, prior_value) -> str:
    if extractor == "premise":
        if not ctx.premise:
            raise TemplateError("no premise available")
        return ctx.premise
    if extractor == "hypothesis":
        if not ctx.hypothesis:
            raise TemplateError("no hypothesis available")
        return ctx.hypothesis
    if prior_value is None:
        raise TemplateError(f"missing prior step output for slot {extractor!r}")
    if extractor == "names":
        return json.dumps(prior_value.get("names"))
    if extractor == "declared":
        return json.dumps(prior_value.get("declared_causes", []))
    if extractor == "uncond":
        return json.dumps(prior_value.get("unconditional_independencies", []))
    if extractor == "cond":
        return json.dumps(prior_value.get("conditional_independencies", []))
    if extractor in ("matrix", "candidates"):
        return json.dumps(prior_value)
    raise TemplateError(f"unknown slot extractor {extractor!r}")


def render_prompt(step: int, ctx: PromptContext, prior: dict[int, object]) -> str:
    """Deterministic prompt text for one step, slots filled from prior outputs."""
    if step not in STEP_INSTRUCTIONS:
        raise TemplateError(f"unknown step {step}")
    parts = [TEMPLATES[step].text]
    for section, prior_step, extractor in _STEP_SLOTS[step]:
        prior_value = prior.get(prior_step) if prior_step is not None else None
        if prior_step is not None and prior_value is None:
            raise TemplateError(f"step {step} needs the step {prior_step} output")
        value = _slot_value(extractor, ctx, prior_value)
        parts.append(f"{section}:\n{value}")
    return "\n\n".join(parts)


def extract_sections(text: str) -> dict[str, str]:
    """Recover the slot sections of a rendered prompt (used by the oracle backend)."""
    marker = re.compile(
        r"^(" + "|".join(re.escape(s) for s in _SECTION_ORDER) + r"):\s*$|^("
        + "|".join(re.escape(s) for s in _SECTION_ORDER) + r"):\s*(?=\S)",
        re.M)
    sections: dict[str, str] = {}
    hits = [(m.start(), m.group(1) or m.group(2), m.end()) for m in marker.finditer(text)]
    for k, (start, name, end) in enumerate(hits):
        stop = hits[k + 1][0] if k + 1 < len(hits) else len(text)
        sections[name] = text[end:stop].strip()
    return sections


def identify_step(text: str) -> int | None:
    """Which step instruction a rendered prompt begins with, if any."""
    for step, instruction in STEP_INSTRUCTIONS.items():
        if text.startswith(instruction[:60]):
            return step
    return None


def is_few_shot_prompt(text: str) -> bool:
    return text.startswith(FEW_SHOT_HEADER[:60])


def is_cot_prompt(text: str) -> bool:
    return text.startswith(COT_INSTRUCTION[:60])


# ---------------------------------------------------------------------------
# few-shot bundle


def _format_trace_block(report: dict) -> str:
    """The nine step outputs of a solve report, in transcript form."""
    lines = []
    lines.append("Step 1:")
    lines.append(json.dumps({"number of random variables": report["step_1"]["count"],
                             "names of random variables": report["step_1"]["names"]}))
    step2 = report["step_2"]
    lines.append("Step 2:")
    lines.append(json.dumps({
        "Dependencies": step2["dependencies"],
        "Unconditional Independencies": step2["unconditional_independencies"],
        "Conditional Independencies": step2["conditional_independencies"],
        "Cause-and-Effect Relations": step2["declared_causes"],
    }))
    for k in (3, 4, 5, 6, 7, 8):
        lines.append(f"Step {k}:")
        lines.append(json.dumps(report[f"step_{k}"]))
    lines.append("Step 9:")
    answer = report["step_9"].get("answer", "Undetermined")
    binary = "Yes" if answer == "Yes" else "No"
    lines.append(f'Final Answer: "{binary}"')
    return "\n".join(lines)


def _bundle_examples() -> list[tuple[str, str, dict]]:
    # deferred imports: the bundle is built from the engine's own solutions
    from .dataset import generate
    from .fixtures import FIVE_VAR_HYPOTHESIS, five_var_doc
    from .parsing import parse_premise
    from .pipeline import solve_doc

    examples: list[tuple[str, str, dict]] = []
    res = solve_doc(five_var_doc(), FIVE_VAR_HYPOTHESIS)
    examples.append((five_var_doc().raw_text, FIVE_VAR_HYPOTHESIS, res.report()))
    seen: set[tuple[str, str]] = set()
    for n in (3, 4):
        for sample in generate(n):
            combo = (sample.kind, sample.label)
            if combo in seen:
                continue
            seen.add(combo)
            res = solve_doc(parse_premise(sample.premise), sample.hypothesis_text)
            examples.append((sample.premise, sample.hypothesis_text, res.report()))
            if len(examples) == 10:
                return examples
    return examples


@lru_cache(maxsize=1)
def few_shot_bundle() -> str:
    """Ten worked examples, each premise plus its nine step outputs."""
    blocks = [FEW_SHOT_HEADER]
    for k, (premise, hypothesis, report) in enumerate(_bundle_examples(), start=1):
        blocks.append(f"Example {k}:\nPremise: {premise}\nHypothesis: {hypothesis}\n"
                      + _format_trace_block(report))
    return "\n\n".join(blocks)


def render_few_shot(ctx: PromptContext) -> str:
    if not ctx.premise or not ctx.hypothesis:
        raise TemplateError("few-shot prompts need both a premise and a hypothesis")
    return (few_shot_bundle()
            + "\n\nNow solve this case, producing Step 1 through Step 9 in the"
            + f" same format:\nPremise: {ctx.premise}\n"
            + f"Hypothesis: {ctx.hypothesis}")


def render_cot(ctx: PromptContext) -> str:
    if not ctx.premise or not ctx.hypothesis:
        raise TemplateError("chain-of-thought prompts need both a premise and a hypothesis")
    return (COT_INSTRUCTION + f"\n\nPremise: {ctx.premise}\n\nHypothesis: {ctx.hypothesis}")
