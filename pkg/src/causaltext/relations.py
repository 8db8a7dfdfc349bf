"""Relation sets: the verbalized statistical facts extracted from a premise."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import BoundsError, ConsistencyError
from .graphs import Dag, SepStatement, all_dsep_statements
from .variables import VariableTable

Pair = tuple[int, int]
CondStatement = tuple[Pair, frozenset[int]]


def _canon_pair(p: Iterable[int]) -> Pair:
    a, b = p
    if a == b:
        raise ConsistencyError(f"a relation needs two distinct variables, got ({a}, {b})")
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True, eq=False)
class RelationSet:
    """Dependencies, independencies, and declared cause-effect pairs.

    All entries are index pairs into ``vars``. Unordered pairs are stored
    with the smaller index first; ``declared_causes`` keeps its order
    (cause, effect). Conditional independencies pair the variable pair with
    its conditioning index set.

    Equality compares the label sequence and the relational content;
    presentation aliases do not participate, so a story-style premise and
    its symbolic source carry equal relation sets.
    """

    vars: VariableTable
    dependencies: frozenset[Pair] = frozenset()
    uncond_indep: frozenset[Pair] = frozenset()
    cond_indep: frozenset[CondStatement] = frozenset()
    declared_causes: frozenset[Pair] = frozenset()

    def _key(self):
        return (self.vars.names, self.dependencies, self.uncond_indep,
                self.cond_indep, self.declared_causes)

    def __eq__(self, other):
        if not isinstance(other, RelationSet):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __post_init__(self):
        n = len(self.vars)
        object.__setattr__(self, "dependencies",
                           frozenset(_canon_pair(p) for p in self.dependencies))
        object.__setattr__(self, "uncond_indep",
                           frozenset(_canon_pair(p) for p in self.uncond_indep))
        object.__setattr__(self, "cond_indep",
                           frozenset((_canon_pair(p), frozenset(c)) for p, c in self.cond_indep))
        object.__setattr__(self, "declared_causes",
                           frozenset((int(a), int(b)) for a, b in self.declared_causes))
        for coll in (self.dependencies, self.uncond_indep, self.declared_causes):
            for a, b in coll:
                if not (0 <= a < n and 0 <= b < n):
                    raise BoundsError(f"pair ({a}, {b}) out of range for {n} variables")
        overlap = self.dependencies & self.uncond_indep
        if overlap:
            names = ", ".join(f"{self.vars.label(a)}-{self.vars.label(b)}" for a, b in sorted(overlap))
            raise ConsistencyError(f"pair(s) listed both dependent and independent: {names}")
        for (a, b), cond in self.cond_indep:
            if not (0 <= a < n and 0 <= b < n):
                raise BoundsError(f"pair ({a}, {b}) out of range for {n} variables")
            if a in cond or b in cond:
                raise ConsistencyError(
                    f"conditioning set of {self.vars.label(a)}-{self.vars.label(b)} contains the pair")
            for v in cond:
                if not 0 <= v < n:
                    raise BoundsError(f"conditioning index {v} out of range")
        for a, b in self.declared_causes:
            if a == b:
                raise ConsistencyError("a variable cannot cause itself")
        self._check_declared_acyclic()

    def _check_declared_acyclic(self):
        adj: dict[int, list[int]] = {}
        for a, b in self.declared_causes:
            adj.setdefault(a, []).append(b)
        visiting: set[int] = set()
        done: set[int] = set()

        def visit(u: int):
            visiting.add(u)
            for v in adj.get(u, ()):
                if v in visiting:
                    raise ConsistencyError("declared cause-effect relation is cyclic")
                if v not in done:
                    visit(v)
            visiting.discard(u)
            done.add(u)

        for start in list(adj):
            if start not in done:
                visit(start)

    # -- queries -----------------------------------------------------------

    def independence_conds(self, pair: Pair) -> tuple[frozenset[int], ...]:
        """Every conditioning set under which the pair is stated independent.

        The empty set appears first when the pair is unconditionally
        independent; conditional sets follow in sorted order.
        """
        pair = _canon_pair(pair)
        conds = []
        if pair in self.uncond_indep:
            conds.append(frozenset())
        conds.extend(sorted((c for p, c in self.cond_indep if p == pair),
                            key=lambda s: (len(s), tuple(sorted(s)))))
        return tuple(conds)

    def is_empty(self) -> bool:
        return not (self.dependencies or self.uncond_indep or self.cond_indep
                    or self.declared_causes)

    def as_dict(self) -> dict:
        lab = self.vars.label
        return {
            "dependencies": [[lab(a), lab(b)] for a, b in sorted(self.dependencies)],
            "unconditional_independencies":
                [[lab(a), lab(b)] for a, b in sorted(self.uncond_indep)],
            "conditional_independencies": [
                {"pair": [lab(a), lab(b)], "given": [lab(v) for v in sorted(c)]}
                for (a, b), c in sorted(self.cond_indep,
                                        key=lambda e: (e[0], tuple(sorted(e[1]))))
            ],
            "declared_causes": [[lab(a), lab(b)] for a, b in sorted(self.declared_causes)],
        }


def relations_from_statements(table: VariableTable,
                              statements: Iterable[SepStatement],
                              minimal: bool = True) -> RelationSet:
    """Turn separation statements into a relation set.

    Pairs with no statement become dependencies. With ``minimal`` (the
    default) only statements whose conditioning set has no separating proper
    subset are kept, which is the terse premise style; otherwise the full
    closure is verbalized.
    """
    n = len(table)
    by_pair: dict[Pair, list[frozenset[int]]] = {}
    for st in statements:
        by_pair.setdefault(st.pair, []).append(st.cond)
    deps = set()
    uncond = set()
    cond = set()
    for x in range(n):
        for y in range(x + 1, n):
            conds = by_pair.get((x, y))
            if not conds:
                deps.add((x, y))
                continue
            kept = conds
            if minimal:
                kept = [c for c in conds
                        if not any(o < c for o in conds)]
            for c in kept:
                if c:
                    cond.add(((x, y), c))
                else:
                    uncond.add((x, y))
    return RelationSet(table, frozenset(deps), frozenset(uncond), frozenset(cond))


def relations_from_dag(dag: Dag, table: VariableTable | None = None,
                       max_cond: int | None = None,
                       minimal: bool = True) -> RelationSet:
    """Relation set a faithful observer would report for ``dag``.

    ``max_cond`` defaults to ``n - 2``, which is always enough to separate
    every non-adjacent pair, so the dependencies are exactly the adjacent
    pairs.
    """
    table = table or VariableTable.letters(dag.n)
    if len(table) != dag.n:
        raise BoundsError("variable table size must match the graph")
    if dag.n < 2:
        return RelationSet(table)
    if max_cond is None:
        max_cond = dag.n - 2
    statements = all_dsep_statements(dag, max_cond)
    return relations_from_statements(table, statements, minimal=minimal)
