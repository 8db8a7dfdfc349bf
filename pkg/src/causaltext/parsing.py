"""Bidirectional text layer: template grammar for premises and hypotheses.

The grammar is deliberately closed. Recognized sentence forms (matched
case-insensitively, with a leading discourse marker such as "However,"
stripped):

    Suppose (that) there is a closed system of N variables, A, B and C.
    All (the) statistical relations among these N variables are as follows: ...
    Let's consider N factors: <name>, <name>, and <name>.
    <name> (A), <name> (B), and <name> (C) have relations with each other.
    X correlates with Y.            X is correlated with Y.
    There is a correlation between X and Y(, and between Z and W).
    X is independent of Y.          X and Y are independent (from each other).
    X and Y are independent given Z(, W(, and V)).
    X is the cause of Y.

Anything else is reported with its character span instead of being silently
dropped. Free prose outside the grammar ships as pre-parsed fixtures, not as
grammar extensions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import (ConsistencyError, PremiseParseError, ResourceError,
                     UnknownVariableError)
from .hypotheses import Hypothesis, HypothesisKind
from .relations import RelationSet
from .variables import VariableTable

PROVENANCE_SYMBOLIC = "symbolic"
PROVENANCE_STORY = "natural-story"
PROVENANCE_FIXTURE = "fixture"


@dataclass(frozen=True)
class PremiseDoc:
    """A premise text together with its parsed variables and relations."""

    raw_text: str
    variables: VariableTable
    relations: RelationSet
    provenance: str = PROVENANCE_SYMBOLIC

    @property
    def n_vars(self) -> int:
        return len(self.variables)


# ---------------------------------------------------------------------------
# themed name banks for story-style rendering
#
# Names must stay free of commas, parentheses, and the word "and" so the
# template grammar can re-read them.

THEMES: dict[str, tuple[str, ...]] = {
    "health": ("eating junk food", "watching television", "obesity",
               "daily exercise", "sleep quality", "blood pressure"),
    "economics": ("interest rates", "consumer spending", "inflation",
                  "unemployment", "housing prices", "wage growth"),
    "education": ("class attendance", "homework completion", "exam scores",
                  "tutoring hours", "test anxiety", "library visits"),
    "environment": ("air pollution", "traffic volume", "respiratory illness",
                    "green space coverage", "average temperature",
                    "energy consumption"),
    "marketing": ("advertising spend", "brand awareness", "website traffic",
                  "product sales", "customer loyalty", "discount frequency"),
    "social": ("social media use", "face-to-face contact", "loneliness",
               "community participation", "volunteering hours",
               "neighborhood trust"),
}

_NUMBER_WORDS = {"one": 1, "two": 2, "three": 3, "four": 4, "five": 5, "six": 6}

_SENT_RE = re.compile(r"[^.?!]+[.?!]?")
_PREFIX_RE = re.compile(
    r"^(?:however|additionally|moreover|furthermore|conversely|also|then|"
    r"in addition)\s*,\s*", re.I)
_LABEL_RE = re.compile(r"^[A-Za-z][A-Za-z0-9]*$")

_HEADER_SYSTEM = re.compile(
    r"^suppose (?:that )?there is a closed system of (?P<n>\d+) variables?"
    r"\s*[,:]?\s*(?P<list>.+)$", re.I)
_HEADER_RELATIONS = re.compile(
    r"^all (?:the )?statistical relations among these (?P<n>\d+) variables are"
    r" as follows\s*:?\s*(?P<rest>.*)$", re.I)
_HEADER_FACTORS = re.compile(
    r"^let'?s consider (?P<num>\w+) factors?\s*:?\s*(?P<list>.+)$", re.I)
_HEADER_ALIASES = re.compile(
    r"^(?P<list>.+\([A-Za-z][A-Za-z0-9]*\))\s+have relations? with each other$", re.I)
_ALIAS_ENTRY = re.compile(r"^(?P<name>.+?)\s*\((?P<label>[A-Za-z][A-Za-z0-9]*)\)$")


def _sentences(text: str):
    for m in _SENT_RE.finditer(text):
        seg = m.group()
        stripped = seg.strip()
        if not stripped:
            continue
        start = m.start() + (len(seg) - len(seg.lstrip()))
        yield start, start + len(stripped), stripped


def _clean(body: str) -> str:
    body = body.strip()
    body = body.rstrip(".?!").strip()
    return _PREFIX_RE.sub("", body)


def _split_names(listing: str) -> list[str]:
    out = []
    for chunk in listing.split(","):
        chunk = chunk.strip()
        if chunk.lower().startswith("and "):
            chunk = chunk[4:].strip()
        if not chunk:
            continue
        out.extend(p.strip() for p in re.split(r"\s+and\s+", chunk) if p.strip())
    return out


class _Scan:
    """Mutable state of one premise parse."""

    def __init__(self):
        self.labels: list[str] = []
        self.aliases: dict[str, str] = {}
        self.declared_header = False
        self.deps: set[tuple[str, str]] = set()
        self.uncond: set[tuple[str, str]] = set()
        self.cond: set[tuple[tuple[str, str], tuple[str, ...]]] = set()
        self.causes: set[tuple[str, str]] = set()
        self.parsed = 0
        self.problems: list[tuple[int, int, str]] = []

    def add_label(self, label: str, alias: str | None = None):
        if label not in self.labels:
            self.labels.append(label)
        if alias is not None:
            self.aliases[label] = alias

    def resolve(self, mention: str) -> str:
        mention = mention.strip()
        low = mention.lower()
        for label in self.labels:
            if label.lower() == low:
                return label
        for label, alias in self.aliases.items():
            if alias.lower() == low:
                return label
        if not self.declared_header and _LABEL_RE.match(mention):
            self.add_label(mention)
            return mention
        raise UnknownVariableError(f"unknown variable mention: {mention!r}")

    def pair(self, x: str, y: str) -> tuple[str, str]:
        a, b = self.resolve(x), self.resolve(y)
        if a == b:
            raise ConsistencyError(f"a relation needs two distinct variables, got {a!r} twice")
        return tuple(sorted((a, b)))  # type: ignore[return-value]


def _mention_pattern(scan: _Scan) -> str:
    if not scan.declared_header:
        return r"[A-Za-z][A-Za-z0-9]*"
    mentions = list(scan.labels) + list(scan.aliases.values())
    mentions.sort(key=len, reverse=True)
    return "(?:" + "|".join(re.escape(m) for m in mentions) + ")"


def _statement_patterns(mention: str) -> list[tuple[str, re.Pattern]]:
    m = mention
    return [
        ("corr_with", re.compile(
            rf"^(?P<x>{m}) (?:correlates|is correlated) with (?P<y>{m})$", re.I)),
        ("corr_between", re.compile(
            r"^there (?:is|exists) a correlation between (?P<body>.+)$", re.I)),
        ("indep_given", re.compile(
            rf"^(?P<x>{m}) and (?P<y>{m}) are (?:conditionally )?independent"
            rf" given (?P<given>.+)$", re.I)),
        ("indep_pair", re.compile(
            rf"^(?P<x>{m}) and (?P<y>{m}) are independent"
            rf"(?: (?:of|from) each other)?$", re.I)),
        ("indep_of", re.compile(
            rf"^(?P<x>{m}) is independent (?:of|from) (?P<y>{m})$", re.I)),
        ("cause_of", re.compile(
            rf"^(?P<x>{m}) is the cause of (?P<y>{m})$", re.I)),
    ]


def _parse_statement(scan: _Scan, body: str) -> bool:
    body = _PREFIX_RE.sub("", body)
    mention = _mention_pattern(scan)
    for name, pat in _statement_patterns(mention):
        hit = pat.match(body)
        if not hit:
            continue
        if name == "corr_with":
            scan.deps.add(scan.pair(hit["x"], hit["y"]))
        elif name == "corr_between":
            pieces = re.split(r",?\s+and between\s+", hit["body"], flags=re.I)
            pair_pat = re.compile(rf"^(?P<x>{mention}) and (?P<y>{mention})$", re.I)
            for piece in pieces:
                sub = pair_pat.match(piece.strip())
                if not sub:
                    raise ConsistencyError(f"cannot split correlation pair: {piece.strip()!r}")
                scan.deps.add(scan.pair(sub["x"], sub["y"]))
        elif name == "indep_given":
            pair = scan.pair(hit["x"], hit["y"])
            given = tuple(sorted(scan.resolve(g) for g in _split_names(hit["given"])))
            if not given:
                raise ConsistencyError("empty conditioning list")
            scan.cond.add((pair, given))
        elif name == "indep_pair" or name == "indep_of":
            scan.uncond.add(scan.pair(hit["x"], hit["y"]))
        elif name == "cause_of":
            a, b = scan.resolve(hit["x"]), scan.resolve(hit["y"])
            if a == b:
                raise ConsistencyError("a variable cannot cause itself")
            scan.causes.add((a, b))
        return True
    return False


def _parse_declaration(scan: _Scan, body: str):
    """Returns (handled, trailing statement text or None)."""
    hit = _HEADER_SYSTEM.match(body)
    if hit:
        labels = _split_names(hit["list"])
        if len(labels) != int(hit["n"]):
            raise ConsistencyError(
                f"header declares {hit['n']} variables but lists {len(labels)}")
        if len(set(labels)) != len(labels):
            raise ConsistencyError(f"duplicate variable label in header: {labels}")
        for lab in labels:
            if not _LABEL_RE.match(lab):
                raise ConsistencyError(f"bad variable label in header: {lab!r}")
            scan.add_label(lab)
        scan.declared_header = True
        return True, None
    hit = _HEADER_RELATIONS.match(body)
    if hit:
        rest = hit["rest"].strip()
        return True, rest or None
    hit = _HEADER_ALIASES.match(body)
    if hit:
        for entry in _split_names(hit["list"]):
            sub = _ALIAS_ENTRY.match(entry)
            if not sub:
                raise ConsistencyError(f"alias entry without a (label): {entry!r}")
            if sub["label"] in scan.labels:
                raise ConsistencyError(f"duplicate variable label {sub['label']!r}")
            scan.add_label(sub["label"], sub["name"].strip())
        scan.declared_header = True
        return True, None
    hit = _HEADER_FACTORS.match(body)
    if hit:
        num = hit["num"].lower()
        count = int(num) if num.isdigit() else _NUMBER_WORDS.get(num)
        names = _split_names(hit["list"])
        if count is not None and count != len(names):
            raise ConsistencyError(
                f"header declares {count} factors but lists {len(names)}")
        for i, name in enumerate(names):
            label = chr(ord("A") + i)
            scan.add_label(label, name)
        scan.declared_header = True
        return True, None
    return False, None


def scan_premise(text: str) -> tuple[_Scan, int]:
    """Low-level pass returning scan state and the sentence count.

    Guarantees parsed + len(problems) == sentence count, so nothing is ever
    silently dropped.
    """
    scan = _Scan()
    sentences = list(_sentences(text))
    pending: list[tuple[int, int, str]] = []
    for start, end, raw in sentences:
        body = _clean(raw)
        try:
            handled, rest = _parse_declaration(scan, body)
        except (ConsistencyError, UnknownVariableError) as exc:
            scan.problems.append((start, end, str(exc)))
            continue
        if handled:
            scan.parsed += 1
            if rest:
                # header sentence with an inline first statement after a colon
                scan.parsed -= 1
                pending.append((start, end, rest))
        else:
            pending.append((start, end, body))
    for start, end, body in pending:
        try:
            if _parse_statement(scan, body):
                scan.parsed += 1
            else:
                scan.problems.append((start, end, f"unrecognized sentence: {body!r}"))
        except (ConsistencyError, UnknownVariableError) as exc:
            scan.problems.append((start, end, str(exc)))
    return scan, len(sentences)


def parse_premise(text: str) -> PremiseDoc:
    """Parse a verbalized premise into variables and a relation set."""
    if not text or not text.strip():
        raise PremiseParseError([(0, 0, "empty premise")])
    scan, _count = scan_premise(text)
    if scan.problems:
        raise PremiseParseError(scan.problems)
    if not scan.labels:
        raise PremiseParseError([(0, len(text), "premise mentions no variables")])
    labels = sorted(scan.labels)
    table = VariableTable(labels, {l: a for l, a in scan.aliases.items()})
    idx = {l: i for i, l in enumerate(labels)}
    rels = RelationSet(
        table,
        dependencies=frozenset((idx[a], idx[b]) for a, b in scan.deps),
        uncond_indep=frozenset((idx[a], idx[b]) for a, b in scan.uncond),
        cond_indep=frozenset(((idx[a], idx[b]), frozenset(idx[g] for g in given))
                             for (a, b), given in scan.cond),
        declared_causes=frozenset((idx[a], idx[b]) for a, b in scan.causes),
    )
    provenance = PROVENANCE_STORY if scan.aliases else PROVENANCE_SYMBOLIC
    return PremiseDoc(text, table, rels, provenance)


# ---------------------------------------------------------------------------
# hypotheses


def _hypothesis_patterns(mention: str) -> list[tuple[HypothesisKind, re.Pattern]]:
    m = mention
    verbs = r"(?:affects?|causes?|influences?)"
    return [
        (HypothesisKind.DIRECT_CAUSE, re.compile(
            rf"^(?:does )?(?P<x>{m}) directly {verbs} (?P<y>{m})$", re.I)),
        (HypothesisKind.INDIRECT_CAUSE, re.compile(
            rf"^(?:does )?(?P<x>{m}) indirectly {verbs} (?P<y>{m})$", re.I)),
        (HypothesisKind.INDIRECT_CAUSE, re.compile(
            rf"^(?:does )?(?P<x>{m}) {verbs} (?P<y>{m}) indirectly$", re.I)),
        (HypothesisKind.COMMON_EFFECT, re.compile(
            rf"^there (?:is|exists) at least one (?:collider|common effect)"
            rf"(?: \(i\.e\.,? common effect\))? of (?P<x>{m}) and (?P<y>{m})$", re.I)),
        (HypothesisKind.COMMON_EFFECT, re.compile(
            rf"^(?P<x>{m}) and (?P<y>{m}) have (?:at least one |a )?common effect$", re.I)),
        (HypothesisKind.COMMON_CAUSE, re.compile(
            rf"^there (?:is|exists) at least one (?:confounder|common cause)"
            rf"(?: \(i\.e\.,? common cause\))? of (?P<x>{m}) and (?P<y>{m})$", re.I)),
        (HypothesisKind.COMMON_CAUSE, re.compile(
            rf"^(?P<x>{m}) and (?P<y>{m}) have (?:at least one |a )?common cause$", re.I)),
        (HypothesisKind.CAUSE, re.compile(
            rf"^(?:does )?(?P<x>{m}) {verbs} (?P<y>{m})$", re.I)),
    ]


def parse_hypothesis(text: str, vars: VariableTable) -> Hypothesis:
    """Parse a causal claim; variable mentions resolve against ``vars``."""
    body = text.strip().rstrip(".?!").strip()
    if not body:
        raise PremiseParseError([(0, 0, "empty hypothesis")])
    mentions = list(vars.names) + list(vars.aliases.values())
    mentions.sort(key=len, reverse=True)
    mention = "(?:" + "|".join(re.escape(m) for m in mentions) + ")"
    for kind, pat in _hypothesis_patterns(mention):
        hit = pat.match(body)
        if hit:
            subject = vars.label(vars.index(hit["x"]))
            obj = vars.label(vars.index(hit["y"]))
            return Hypothesis(kind, subject, obj)
    raise PremiseParseError([(0, len(text), f"unrecognized hypothesis: {body!r}")])


# ---------------------------------------------------------------------------
# rendering


def _join_plain(items: list[str]) -> str:
    if len(items) == 1:
        return items[0]
    if len(items) == 2:
        return f"{items[0]} and {items[1]}"
    return ", ".join(items[:-1]) + f" and {items[-1]}"


def _join_given(items: list[str]) -> str:
    if len(items) == 1:
        return items[0]
    if len(items) == 2:
        return f"{items[0]} and {items[1]}"
    return ", ".join(items[:-1]) + f", and {items[-1]}"


def _story_names(doc_vars: VariableTable, theme: str | None,
                 names: dict[str, str] | None) -> dict[str, str]:
    if names is not None:
        missing = [l for l in doc_vars.names if l not in names]
        if missing:
            raise ResourceError(f"no story name for label(s) {missing}")
        return dict(names)
    bank = THEMES.get(theme or "health")
    if bank is None:
        raise ResourceError(f"unknown theme {theme!r}; known: {sorted(THEMES)}")
    if len(bank) < len(doc_vars):
        raise ResourceError(
            f"theme {theme!r} offers {len(bank)} names but {len(doc_vars)} are needed")
    return {label: bank[i] for i, label in enumerate(doc_vars.names)}


def render_premise(doc: PremiseDoc, style: str = "symbolic",
                   theme: str | None = None,
                   names: dict[str, str] | None = None) -> str:
    """Render a premise deterministically in the canonical template.

    ``symbolic`` uses bare labels with the closed-system header; ``story``
    substitutes themed long names and binds them to labels in an alias
    header.
    """
    rels = doc.relations
    table = doc.variables
    lab = table.label
    if style == "symbolic":
        display = {l: l for l in table.names}
        listing = _join_plain(list(table.names))
        header = (f"Suppose that there is a closed system of {len(table)} variables,"
                  f" {listing}.")
        lead_in = (f" All statistical relations among these {len(table)} variables"
                   f" are as follows:")
    elif style == "story":
        display = _story_names(table, theme, names)
        entries = [f"{display[l]} ({l})" for l in table.names]
        header = f"{_join_given(entries)} have relations with each other."
        lead_in = ""
    else:
        raise ResourceError(f"unknown premise style {style!r}")

    parts: list[str] = []
    for a, b in sorted(rels.dependencies):
        if style == "symbolic":
            parts.append(f"{display[lab(a)]} correlates with {display[lab(b)]}.")
        else:
            parts.append(f"There is a correlation between {display[lab(a)]}"
                         f" and {display[lab(b)]}.")
    for a, b in sorted(rels.declared_causes):
        parts.append(f"{display[lab(a)]} is the cause of {display[lab(b)]}.")
    indep_parts: list[str] = []
    for a, b in sorted(rels.uncond_indep):
        if style == "symbolic":
            indep_parts.append(f"{display[lab(a)]} is independent of {display[lab(b)]}.")
        else:
            indep_parts.append(f"{display[lab(a)]} and {display[lab(b)]} are"
                               f" independent from each other.")
    for (a, b), cond in sorted(rels.cond_indep,
                               key=lambda e: (e[0], tuple(sorted(e[1])))):
        given = _join_given([display[lab(v)] for v in sorted(cond)])
        indep_parts.append(f"{display[lab(a)]} and {display[lab(b)]} are independent"
                           f" given {given}.")
    if indep_parts:
        indep_parts[0] = "However, " + indep_parts[0]
    statements = parts + indep_parts
    if not statements:
        return header
    return header + lead_in + " " + " ".join(statements)


_HYPOTHESIS_TEMPLATES = {
    HypothesisKind.DIRECT_CAUSE: "{x} directly affects {y}.",
    HypothesisKind.INDIRECT_CAUSE: "{x} indirectly affects {y}.",
    HypothesisKind.CAUSE: "{x} affects {y}.",
    HypothesisKind.COMMON_EFFECT:
        "There exists at least one collider (i.e., common effect) of {x} and {y}.",
    HypothesisKind.COMMON_CAUSE:
        "There exists at least one confounder (i.e., common cause) of {x} and {y}.",
}


def render_hypothesis(h: Hypothesis, vars: VariableTable,
                      names: dict[str, str] | None = None) -> str:
    """Canonical claim sentence; story names substitute when given."""
    display = names or {l: l for l in vars.names}
    text = _HYPOTHESIS_TEMPLATES[h.kind].format(x=display[h.subject],
                                                y=display[h.object])
    return text[0].upper() + text[1:]
