"""The deterministic nine-step matrix pipeline over a relation set.

Steps 3 through 8 transform an adjacency matrix: build the fully connected
start matrix, delete unconditionally and conditionally independent pairs,
list candidate collider pairs, filter them against the stated
independencies, and zero the collider rows so the surviving asymmetric cells
encode orientation. An optional propagation pass orients further edges.
Every step is a pure function; ``run_c2p`` composes them and keeps each
intermediate artifact for auditing.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .errors import ConfigError
from .matrix import AdjMatrix
from .relations import Pair, RelationSet
from .variables import VariableTable

FILTER_PC_CORRECT = "pc-correct"
FILTER_PAPER_LITERAL = "paper-literal"
FILTER_MODES = (FILTER_PC_CORRECT, FILTER_PAPER_LITERAL)


@dataclass(frozen=True)
class EngineOptions:
    """Pipeline switches.

    ``collider_filter`` selects how candidate pairs are screened:
    ``pc-correct`` accepts a pair when some stated independence for it has a
    conditioning set avoiding the candidate collider, ``paper-literal``
    accepts only unconditionally independent pairs. Propagation is off by
    default; switching it on orients chains after the collider pass.
    """

    collider_filter: str = FILTER_PC_CORRECT
    propagate: bool = False

    def __post_init__(self):
        if self.collider_filter not in FILTER_MODES:
            raise ConfigError(
                f"unknown collider filter {self.collider_filter!r}; pick one of {FILTER_MODES}")


@dataclass(frozen=True)
class ColliderCandidates:
    """Per-row lists of column pairs that could point into the row variable."""

    vars: VariableTable
    rows: dict[int, tuple[Pair, ...]]

    def to_mapping(self) -> dict[str, list[list[str]]]:
        lab = self.vars.label
        return {lab(r): [[lab(a), lab(b)] for a, b in pairs]
                for r, pairs in sorted(self.rows.items())}

    def is_empty(self) -> bool:
        return not self.rows

    def __eq__(self, other):
        if not isinstance(other, ColliderCandidates):
            return NotImplemented
        return self.vars == other.vars and self.rows == other.rows


def initial_matrix(vars: VariableTable, declared: Iterable[Pair] = ()) -> AdjMatrix:
    """Fully connected start matrix, with declared effect-to-cause cells zeroed.

    For each declared pair (cause, effect) the cell [effect][cause] is set
    to 0, so the surviving [cause][effect] = 1 already encodes orientation.
    """
    n = len(vars)
    cells = [[0 if r == c else 1 for c in range(n)] for r in range(n)]
    for cause, effect in declared:
        cells[effect][cause] = 0
    return AdjMatrix(vars, cells)


def apply_unconditional(matrix: AdjMatrix, rels: RelationSet) -> AdjMatrix:
    """Zero both cells of every unconditionally independent pair."""
    _require_shared_table(matrix, rels)
    zeros = []
    for a, b in rels.uncond_indep:
        zeros.append((a, b))
        zeros.append((b, a))
    return matrix.with_zeros(zeros)


def apply_conditional(matrix: AdjMatrix, rels: RelationSet) -> AdjMatrix:
    """Zero both cells of every conditionally independent pair.

    The conditioning sets themselves touch no other cell.
    """
    _require_shared_table(matrix, rels)
    zeros = []
    for (a, b), _cond in rels.cond_indep:
        zeros.append((a, b))
        zeros.append((b, a))
    return matrix.with_zeros(zeros)


def candidate_pairs(matrix: AdjMatrix) -> ColliderCandidates:
    """For each row with at least two 1-valued columns, all column pairs."""
    rows: dict[int, tuple[Pair, ...]] = {}
    for r in range(matrix.n):
        ones = [c for c in range(matrix.n) if matrix.cell(r, c) == 1]
        if len(ones) >= 2:
            rows[r] = tuple(combinations(ones, 2))
    return ColliderCandidates(matrix.vars, rows)


def filter_collider_pairs(cands: ColliderCandidates, rels: RelationSet,
                          mode: str = FILTER_PC_CORRECT) -> ColliderCandidates:
    """Keep only the column pairs whose independence certifies a collider.

    ``paper-literal``: a pair survives iff it is listed unconditionally
    independent. ``pc-correct``: a pair survives iff some stated
    independence for it conditions on a set that excludes the row variable,
    which is exactly the criterion under which the row is an orientable
    collider.
    """
    if mode not in FILTER_MODES:
        raise ConfigError(f"unknown collider filter {mode!r}; pick one of {FILTER_MODES}")
    kept: dict[int, tuple[Pair, ...]] = {}
    for r, pairs in cands.rows.items():
        survivors = []
        for pair in pairs:
            if mode == FILTER_PAPER_LITERAL:
                ok = tuple(sorted(pair)) in rels.uncond_indep
            else:
                ok = any(r not in cond for cond in rels.independence_conds(pair))
            if ok:
                survivors.append(pair)
        if survivors:
            kept[r] = tuple(survivors)
    return ColliderCandidates(cands.vars, kept)


def orient_colliders(matrix: AdjMatrix, filtered: ColliderCandidates) -> AdjMatrix:
    """Zero the row cells of every kept pair, leaving the inward columns intact.

    After this pass cells[c1][r] = cells[c2][r] = 1 with the mirror cells 0,
    which encodes c1 -> r <- c2.
    """
    zeros = []
    for r, pairs in filtered.rows.items():
        for c1, c2 in pairs:
            zeros.append((r, c1))
            zeros.append((r, c2))
    return matrix.with_zeros(zeros)


def propagate_orientations(matrix: AdjMatrix) -> AdjMatrix:
    """Orient chains until fixpoint: a -> b with b - c undirected and a, c
    non-adjacent forces b -> c (otherwise a new collider would appear).

    Orientations apply one at a time so that a later rule application always
    sees the current matrix; no pass can delete an edge.
    """
    matrix.validate_pdag()
    cells = [list(row) for row in matrix.cells]
    n = matrix.n

    def adjacent(i, j):
        return cells[i][j] or cells[j][i]

    changed = True
    while changed:
        changed = False
        for a in range(n):
            for b in range(n):
                if not (cells[a][b] and not cells[b][a]):
                    continue  # need a directed a -> b
                for c in range(n):
                    if c in (a, b) or not (cells[b][c] and cells[c][b]):
                        continue  # need an undirected b - c
                    if not adjacent(a, c):
                        cells[c][b] = 0
                        changed = True
    return AdjMatrix(matrix.vars, cells)


@dataclass(frozen=True)
class EngineTrace:
    """Every intermediate artifact of one pipeline run, keyed step_3..step_9.

    ``step_9`` holds the matrix the reasoning question is answered from; it
    equals ``step_8`` unless propagation ran.
    """

    relations: RelationSet
    options: EngineOptions
    step_3: AdjMatrix
    step_4: AdjMatrix
    step_5: AdjMatrix
    step_6: ColliderCandidates
    step_7: ColliderCandidates
    step_8: AdjMatrix
    step_9: AdjMatrix

    @property
    def final(self) -> AdjMatrix:
        return self.step_9

    def as_dict(self) -> dict:
        return {
            "step_3": self.step_3.to_mapping(),
            "step_4": self.step_4.to_mapping(),
            "step_5": self.step_5.to_mapping(),
            "step_6": self.step_6.to_mapping(),
            "step_7": self.step_7.to_mapping(),
            "step_8": self.step_8.to_mapping(),
            "step_9": self.step_9.to_mapping(),
        }


def run_c2p(rels: RelationSet, options: EngineOptions | None = None) -> EngineTrace:
    """Compose the full matrix pipeline and keep every intermediate step."""
    options = options or EngineOptions()
    m3 = initial_matrix(rels.vars, rels.declared_causes)
    m4 = apply_unconditional(m3, rels)
    m5 = apply_conditional(m4, rels)
    cands = candidate_pairs(m5)
    kept = filter_collider_pairs(cands, rels, options.collider_filter)
    m8 = orient_colliders(m5, kept)
    m9 = propagate_orientations(m8) if options.propagate else m8
    return EngineTrace(rels, options, m3, m4, m5, cands, kept, m8, m9)


def _require_shared_table(matrix: AdjMatrix, rels: RelationSet) -> None:
    if matrix.vars != rels.vars:
        raise ConfigError("matrix and relation set must share one variable table")
