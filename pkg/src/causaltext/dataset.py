"""Benchmark generation: labeled premise/hypothesis records drawn from
enumerated equivalence classes.

For every equivalence class on ``n`` nodes and every hypothesis instance the
generator emits one record whose label is Yes exactly when the claim holds in
every member of the class. Premises verbalize the marginal dependencies plus
the minimal separating statements of a representative member, which the
class shares.
"""

from __future__ import annotations

import gzip as gzip_mod
import hashlib
import json
import random
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BoundsError, CapacityError, ConfigError, ResourceError
from .graphs import Dag, Mec, mec_index
from .hypotheses import NO, YES, Hypothesis, HypothesisKind, label_against_mec
from .parsing import (THEMES, PremiseDoc, parse_hypothesis, parse_premise,
                      render_hypothesis, render_premise)
from .relations import RelationSet, relations_from_dag
from .variables import VariableTable

SCHEMA_VERSION = 1

ALL_KINDS = (
    HypothesisKind.DIRECT_CAUSE,
    HypothesisKind.INDIRECT_CAUSE,
    HypothesisKind.CAUSE,
    HypothesisKind.COMMON_EFFECT,
    HypothesisKind.COMMON_CAUSE,
)

DIRECTIONAL_KINDS = (
    HypothesisKind.DIRECT_CAUSE,
    HypothesisKind.INDIRECT_CAUSE,
    HypothesisKind.CAUSE,
)

RECORD_FIELDS = ("id", "n_vars", "premise", "hypothesis", "label", "kind",
                 "mec_digest", "style", "schema_version")


@dataclass(frozen=True)
class Sample:
    """One benchmark row: premise, claim, and its ground-truth label."""

    id: str
    n_vars: int
    premise: str
    relations: RelationSet
    hypothesis: Hypothesis
    hypothesis_text: str
    label: str
    kind: str
    mec_digest: str
    style: str
    schema_version: int = SCHEMA_VERSION

    def record(self) -> dict:
        return {
            "id": self.id,
            "n_vars": self.n_vars,
            "premise": self.premise,
            "hypothesis": self.hypothesis_text,
            "label": self.label,
            "kind": self.kind,
            "mec_digest": self.mec_digest,
            "style": self.style,
            "schema_version": self.schema_version,
        }


def _hypothesis_slots(n: int, kinds: Sequence[HypothesisKind]) -> list[tuple[HypothesisKind, int, int]]:
    slots = []
    for kind in kinds:
        if kind in DIRECTIONAL_KINDS:
            slots.extend((kind, i, j) for i in range(n) for j in range(n) if i != j)
        else:
            slots.extend((kind, i, j) for i in range(n) for j in range(i + 1, n))
    return slots


def _style_tag(style: str, theme: str | None) -> str:
    if style == "symbolic":
        return "symbolic"
    return f"story:{theme or 'health'}"


def generate(n: int, kinds: Sequence[HypothesisKind] | None = None,
             style: str = "symbolic", theme: str | None = None,
             max_cond: int | None = None, minimal: bool = True,
             order: str = "canonical", seed: int | None = None) -> Iterator[Sample]:
    """Stream one sample per (equivalence class, hypothesis instance).

    ``order="canonical"`` walks classes and claims deterministically;
    ``order="shuffled"`` visits them in a seeded random order, which lets a
    consumer draw a balanced subset without labeling the whole universe.
    """
    if not 2 <= n <= 6:
        raise BoundsError(f"variable count must be between 2 and 6, got {n}")
    if order not in ("canonical", "shuffled"):
        raise ConfigError(f"unknown order {order!r}")
    if order == "shuffled" and seed is None:
        raise ConfigError("a seed is required for shuffled generation")
    kinds = tuple(kinds or ALL_KINDS)
    table = VariableTable.letters(n)
    idx = mec_index(n)
    group_order: Iterable[int] = range(idx.group_count)
    rng = None
    if order == "shuffled":
        group_order = np.random.default_rng(seed).permutation(idx.group_count)
        rng = random.Random(seed)
    tag = _style_tag(style, theme)
    names = None
    if style == "story":
        bank = THEMES.get(theme or "health")
        if bank is None:
            raise ResourceError(f"unknown theme {theme!r}; known: {sorted(THEMES)}")
        if len(bank) < n:
            raise ResourceError(f"theme bank holds {len(bank)} names but {n} are needed")
        names = {table.label(i): bank[i] for i in range(n)}
    elif style != "symbolic":
        raise ConfigError(f"unknown style {style!r}")

    for g in group_order:
        members = tuple(Dag.from_mask(n, int(m)) for m in idx.member_masks(int(g)))
        mec = Mec(n, idx.skeleton_set(int(g)), idx.vstruct_set(int(g)), members)
        rels = relations_from_dag(members[0], table, max_cond=max_cond, minimal=minimal)
        doc = PremiseDoc("", table, rels)
        premise = render_premise(doc, style, theme=theme, names=names)
        digest = mec.digest()
        slots = _hypothesis_slots(n, kinds)
        if rng is not None:
            rng.shuffle(slots)
        for kind, i, j in slots:
            h = Hypothesis(kind, table.label(i), table.label(j))
            label = label_against_mec(h, mec, table)
            text = render_hypothesis(h, table, names)
            sid = f"{n}v-{digest[:10]}-{kind.value}-{table.label(i)}{table.label(j)}-{tag}"
            yield Sample(sid, n, premise, rels, h, text, label, kind.value, digest, tag)


def balanced_sample(samples: Iterable[Sample], per_cell: int,
                    seed: int | None = None) -> list[Sample]:
    """Uniform seeded draw of ``per_cell`` samples per (n_vars, label) cell.

    Runs one reservoir pass over the whole stream, so it is only appropriate
    when the stream is enumerable; use :func:`balanced_generate` to draw from
    the full six-node universe.
    """
    if per_cell < 1:
        raise BoundsError("per_cell must be positive")
    rng = random.Random(seed)
    reservoirs: dict[tuple[int, str], list[Sample]] = {}
    seen: dict[tuple[int, str], int] = {}
    n_values: set[int] = set()
    for s in samples:
        n_values.add(s.n_vars)
        cell = (s.n_vars, s.label)
        seen[cell] = seen.get(cell, 0) + 1
        bucket = reservoirs.setdefault(cell, [])
        if len(bucket) < per_cell:
            bucket.append(s)
        else:
            k = rng.randrange(seen[cell])
            if k < per_cell:
                bucket[k] = s
    for n in sorted(n_values):
        for label in (YES, NO):
            got = len(reservoirs.get((n, label), ()))
            if got < per_cell:
                raise CapacityError(
                    f"cell (n_vars={n}, label={label}) holds {got} samples,"
                    f" need {per_cell}")
    out: list[Sample] = []
    for n in sorted(n_values):
        for label in (YES, NO):
            out.extend(sorted(reservoirs[(n, label)], key=lambda s: s.id))
    return out


def balanced_generate(ns: Sequence[int], per_cell: int, seed: int,
                      kinds: Sequence[HypothesisKind] | None = None,
                      style: str = "symbolic", theme: str | None = None,
                      minimal: bool = True) -> list[Sample]:
    """Balanced draw without enumerating the whole sample universe.

    Walks each variable count's shuffled stream until both label quotas are
    filled. The draw is reproducible for a fixed seed but, unlike
    :func:`balanced_sample`, it is not a uniform draw over the population.
    """
    if seed is None:
        raise ConfigError("a seed is required for balanced generation")
    out: list[Sample] = []
    for n in sorted(set(ns)):
        needed = {YES: per_cell, NO: per_cell}
        picked: list[Sample] = []
        stream = generate(n, kinds=kinds, style=style, theme=theme,
                          minimal=minimal, order="shuffled",
                          seed=seed * 1009 + n)
        for s in stream:
            if needed[s.label] > 0:
                needed[s.label] -= 1
                picked.append(s)
            if not needed[YES] and not needed[NO]:
                break
        for label in (YES, NO):
            if needed[label]:
                raise CapacityError(
                    f"cell (n_vars={n}, label={label}) exhausted with"
                    f" {per_cell - needed[label]} of {per_cell} samples")
        picked.sort(key=lambda s: (s.label, s.id))
        out.extend(picked)
    return out


def storyify(sample: Sample, theme: str = "health",
             bank: Sequence[str] | None = None,
             seed: int | None = None) -> Sample:
    """Re-render a sample's premise and claim with themed variable names.

    Relations, label, kind, and digest are untouched. With a seed the
    name-to-variable assignment is shuffled; otherwise the bank is applied
    in order.
    """
    table = sample.relations.vars
    pool = list(bank if bank is not None else THEMES.get(theme, ()))
    if bank is None and theme not in THEMES:
        raise ResourceError(f"unknown theme {theme!r}; known: {sorted(THEMES)}")
    if len(pool) < sample.n_vars:
        raise ResourceError(
            f"name bank holds {len(pool)} names but {sample.n_vars} are needed")
    chosen = pool[:sample.n_vars]
    if seed is not None:
        chosen = random.Random(seed).sample(pool, sample.n_vars)
    names = {table.label(i): chosen[i] for i in range(sample.n_vars)}
    doc = PremiseDoc(sample.premise, table, sample.relations)
    premise = render_premise(doc, "story", names=names)
    text = render_hypothesis(sample.hypothesis, table, names)
    tag = f"story:{theme}" if bank is None else "story:custom"
    base = sample.id.rsplit("-", 1)[0]
    return replace(sample, id=f"{base}-{tag}", premise=premise,
                   hypothesis_text=text, style=tag)


# ---------------------------------------------------------------------------
# persistence (line-delimited records)


def write_samples(path, samples: Iterable[Sample], gzip: bool = False) -> int:
    """Write one JSON record per line; returns the number of rows."""
    opener = gzip_mod.open if gzip else open
    count = 0
    with opener(path, "wt", encoding="utf-8") as fh:
        for s in samples:
            fh.write(json.dumps(s.record()) + "\n")
            count += 1
    return count


def read_samples(path) -> list[Sample]:
    """Load records, re-deriving relations and hypotheses from their text."""
    text_opener = gzip_mod.open if str(path).endswith(".gz") else open
    out = []
    with text_opener(path, "rt", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            doc = parse_premise(rec["premise"])
            h = parse_hypothesis(rec["hypothesis"], doc.variables)
            out.append(Sample(
                id=rec["id"], n_vars=rec["n_vars"], premise=rec["premise"],
                relations=doc.relations, hypothesis=h,
                hypothesis_text=rec["hypothesis"], label=rec["label"],
                kind=rec["kind"], mec_digest=rec["mec_digest"],
                style=rec["style"],
                schema_version=rec.get("schema_version", SCHEMA_VERSION)))
    return out


def dataset_digest(path) -> str:
    """Stable content hash of a dataset file."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()[:16]
