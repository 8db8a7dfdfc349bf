"""Directed-graph machinery: DAG enumeration, d-separation, Markov equivalence.

Graphs live on integer nodes ``0..n-1`` with ``n <= MAX_NODES``; the cap keeps
exhaustive enumeration tractable (the labeled-DAG count explodes past six
nodes). Iteration order is everywhere lexicographic on edge bitmasks, where
edge ``i -> j`` occupies bit ``i*n + j``, so every stream in this module is
reproducible byte for byte.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BoundsError, CycleError
from .matrix import AdjMatrix
from .variables import VariableTable

MAX_NODES = 6


# ---------------------------------------------------------------------------
# core types


class Dag:
    """A labeled directed acyclic graph on nodes ``0..n-1``.

    Instances are immutable; structural helpers (parent sets, descendants,
    the edge bitmask) are precomputed at construction.
    """

    __slots__ = ("_n", "_edges", "_pa", "_ch", "_mask")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if not isinstance(n, int) or not 1 <= n <= MAX_NODES:
            raise BoundsError(f"node count must be between 1 and {MAX_NODES}, got {n}")
        edge_set = frozenset((int(p), int(c)) for p, c in edges)
        pa = [0] * n
        ch = [0] * n
        mask = 0
        for p, c in edge_set:
            if p == c:
                raise CycleError(f"self-loop on node {p}")
            if not (0 <= p < n and 0 <= c < n):
                raise BoundsError(f"edge ({p}, {c}) is out of range for n={n}")
            pa[c] |= 1 << p
            ch[p] |= 1 << c
            mask |= 1 << (p * n + c)
        self._n = n
        self._edges = edge_set
        self._pa = tuple(pa)
        self._ch = tuple(ch)
        self._mask = mask
        self._check_acyclic()

    def _check_acyclic(self) -> None:
        indeg = [bin(m).count("1") for m in self._pa]
        queue = [i for i in range(self._n) if indeg[i] == 0]
        seen = 0
        while queue:
            u = queue.pop()
            seen += 1
            m = self._ch[u]
            while m:
                lsb = m & -m
                v = lsb.bit_length() - 1
                m ^= lsb
                indeg[v] -= 1
                if indeg[v] == 0:
                    queue.append(v)
        if seen != self._n:
            raise CycleError("edge set contains a directed cycle")

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "Dag":
        edges = []
        m = mask
        while m:
            lsb = m & -m
            bit = lsb.bit_length() - 1
            m ^= lsb
            edges.append(divmod(bit, n))
        return cls(n, edges)

    @property
    def n(self) -> int:
        return self._n

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return self._edges

    @property
    def mask(self) -> int:
        return self._mask

    def parent_mask(self, i: int) -> int:
        return self._pa[i]

    def child_mask(self, i: int) -> int:
        return self._ch[i]

    def parents(self, i: int) -> frozenset[int]:
        return frozenset(_bits(self._pa[i]))

    def children(self, i: int) -> frozenset[int]:
        return frozenset(_bits(self._ch[i]))

    def descendants(self, i: int) -> frozenset[int]:
        """All nodes reachable from ``i`` by one or more directed edges."""
        seen = 0
        frontier = self._ch[i]
        while frontier:
            seen |= frontier
            nxt = 0
            m = frontier
            while m:
                lsb = m & -m
                nxt |= self._ch[lsb.bit_length() - 1]
                m ^= lsb
            frontier = nxt & ~seen
        return frozenset(_bits(seen))

    def adjacent(self, i: int, j: int) -> bool:
        return bool((self._pa[i] >> j) & 1 or (self._ch[i] >> j) & 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dag):
            return NotImplemented
        return self._n == other._n and self._mask == other._mask

    def __hash__(self) -> int:
        return hash((self._n, self._mask))

    def __repr__(self) -> str:
        return f"Dag({self._n}, edges={sorted(self._edges)})"


@dataclass(frozen=True)
class SepStatement:
    """An independence fact: ``x`` and ``y`` are separated given ``cond``.

    The pair is stored unordered with the smaller index first.
    """

    x: int
    y: int
    cond: frozenset[int]

    def __post_init__(self):
        if self.x == self.y:
            raise BoundsError("a statement needs two distinct variables")
        if self.x > self.y:
            low, high = self.y, self.x
            object.__setattr__(self, "x", low)
            object.__setattr__(self, "y", high)
        object.__setattr__(self, "cond", frozenset(self.cond))
        if self.x in self.cond or self.y in self.cond:
            raise BoundsError("conditioning set may not contain the pair itself")

    @property
    def pair(self) -> tuple[int, int]:
        return (self.x, self.y)

    def sort_key(self):
        return (self.x, self.y, len(self.cond), tuple(sorted(self.cond)))


def _bits(mask: int) -> Iterator[int]:
    while mask:
        lsb = mask & -mask
        yield lsb.bit_length() - 1
        mask ^= lsb


# ---------------------------------------------------------------------------
# d-separation


def _ancestor_mask(pa: Sequence[int], seed: int) -> int:
    """Nodes in ``seed`` together with all their ancestors."""
    anc = seed
    frontier = seed
    while frontier:
        nxt = 0
        m = frontier
        while m:
            lsb = m & -m
            nxt |= pa[lsb.bit_length() - 1]
            m ^= lsb
        frontier = nxt & ~anc
        anc |= frontier
    return anc


def _d_connected(pa: Sequence[int], ch: Sequence[int], x: int, y: int, zmask: int) -> bool:
    """Reachability along active trails from ``x`` given evidence ``zmask``.

    Standard two-direction search: a trail may pass through a non-collider
    only when it is unobserved, and through a collider only when the collider
    or one of its descendants is observed.
    """
    anc_z = _ancestor_mask(pa, zmask)
    ybit = 1 << y
    up_seen = 1 << x
    down_seen = 0
    up_frontier = up_seen
    down_frontier = 0
    while up_frontier or down_frontier:
        new_up = 0
        new_down = 0
        m = up_frontier
        while m:
            lsb = m & -m
            i = lsb.bit_length() - 1
            m ^= lsb
            if not (zmask >> i) & 1:
                new_up |= pa[i]
                new_down |= ch[i]
        m = down_frontier
        while m:
            lsb = m & -m
            i = lsb.bit_length() - 1
            m ^= lsb
            if not (zmask >> i) & 1:
                new_down |= ch[i]
            if (anc_z >> i) & 1:
                new_up |= pa[i]
        new_up &= ~up_seen
        new_down &= ~down_seen
        if (new_up | new_down) & ybit:
            return True
        up_seen |= new_up
        down_seen |= new_down
        up_frontier, down_frontier = new_up, new_down
    return False


def d_separated(dag: Dag, x: int, y: int, cond: Iterable[int] = ()) -> bool:
    """True iff every path between ``x`` and ``y`` is blocked given ``cond``.

    A path is blocked when it contains a conditioned non-collider, or a
    collider such that neither the collider nor any of its descendants is
    conditioned on.
    """
    n = dag.n
    cond = frozenset(cond)
    for idx in (x, y, *cond):
        if not 0 <= idx < n:
            raise BoundsError(f"variable index {idx} is out of range for n={n}")
    if x == y:
        raise BoundsError("x and y must be distinct")
    if x in cond or y in cond:
        raise BoundsError("x and y may not appear in the conditioning set")
    zmask = 0
    for i in cond:
        zmask |= 1 << i
    return not _d_connected(dag._pa, dag._ch, x, y, zmask)


def all_dsep_statements(dag: Dag, max_cond: int) -> list[SepStatement]:
    """Every separation statement holding in ``dag`` with ``|cond| <= max_cond``.

    The result is ordered canonically (by pair, then conditioning-set size,
    then the sorted set itself) so downstream output is reproducible.
    """
    n = dag.n
    if not 0 <= max_cond <= n - 2:
        raise BoundsError(f"max_cond must be between 0 and n-2={n - 2}, got {max_cond}")
    out = []
    pa, ch = dag._pa, dag._ch
    for x in range(n):
        for y in range(x + 1, n):
            rest = [v for v in range(n) if v != x and v != y]
            for size in range(max_cond + 1):
                for sub in combinations(rest, size):
                    zmask = 0
                    for i in sub:
                        zmask |= 1 << i
                    if not _d_connected(pa, ch, x, y, zmask):
                        out.append(SepStatement(x, y, frozenset(sub)))
    out.sort(key=SepStatement.sort_key)
    return out


# ---------------------------------------------------------------------------
# skeletons, v-structures, Markov equivalence


def skeleton(dag: Dag) -> frozenset[tuple[int, int]]:
    """The undirected edge set: orientation dropped, pairs stored (small, large)."""
    return frozenset((min(p, c), max(p, c)) for p, c in dag.edges)


def v_structures(dag: Dag) -> frozenset[tuple[int, int, int]]:
    """All triples ``(x, c, y)`` with x -> c <- y and x, y non-adjacent (x < y)."""
    out = set()
    for c in range(dag.n):
        parents = sorted(_bits(dag.parent_mask(c)))
        for a in range(len(parents)):
            for b in range(a + 1, len(parents)):
                x, y = parents[a], parents[b]
                if not dag.adjacent(x, y):
                    out.add((x, c, y))
    return frozenset(out)


def markov_equivalent(d1: Dag, d2: Dag) -> bool:
    """Same skeleton and same v-structures."""
    if d1.n != d2.n:
        raise BoundsError(f"node counts differ: {d1.n} vs {d2.n}")
    return skeleton(d1) == skeleton(d2) and v_structures(d1) == v_structures(d2)


@dataclass(frozen=True)
class Mec:
    """A Markov equivalence class: its identifying key plus all member DAGs."""

    n: int
    skeleton: frozenset[tuple[int, int]]
    vstructs: frozenset[tuple[int, int, int]]
    members: tuple[Dag, ...]

    def __post_init__(self):
        if not self.members:
            raise BoundsError("an equivalence class needs at least one member")

    @property
    def key(self):
        return (self.skeleton, self.vstructs)

    def sort_key(self):
        return (tuple(sorted(self.skeleton)), tuple(sorted(self.vstructs)))

    def digest(self) -> str:
        """Stable short hash of the class key, used as a dataset field."""
        payload = f"{self.n}|{sorted(self.skeleton)}|{sorted(self.vstructs)}"
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def cpdag(self, vars: VariableTable | None = None) -> AdjMatrix:
        """Matrix encoding: v-structure edges oriented, all others undirected."""
        vars = vars or VariableTable.letters(self.n)
        cells = [[0] * self.n for _ in range(self.n)]
        for i, j in self.skeleton:
            cells[i][j] = cells[j][i] = 1
        for x, c, y in self.vstructs:
            cells[c][x] = 0
            cells[c][y] = 0
        return AdjMatrix(vars, cells)

    def __len__(self) -> int:
        return len(self.members)


def group_mecs(dags: Sequence[Dag]) -> list[Mec]:
    """Partition DAGs into Markov equivalence classes.

    Member order within a class and class order in the result are both
    deterministic (edge-bitmask order, then class key order).
    """
    dags = list(dags)
    if not dags:
        return []
    n = dags[0].n
    groups: dict[tuple, list[Dag]] = {}
    for d in dags:
        if d.n != n:
            raise BoundsError("all DAGs must share the same node count")
        groups.setdefault((skeleton(d), v_structures(d)), []).append(d)
    mecs = [
        Mec(n, skel, vst, tuple(sorted(members, key=lambda d: d.mask)))
        for (skel, vst), members in groups.items()
    ]
    mecs.sort(key=Mec.sort_key)
    return mecs


# ---------------------------------------------------------------------------
# enumeration


def dag_count(n: int) -> int:
    """Labeled-DAG count by the classic inclusion-exclusion recurrence."""
    if n < 0:
        raise BoundsError("n must be non-negative")
    counts = [1]
    for m in range(1, n + 1):
        total = 0
        for k in range(1, m + 1):
            total += (-1) ** (k + 1) * comb(m, k) * 2 ** (k * (m - k)) * counts[m - k]
        counts.append(total)
    return counts[n]


def _submasks(mask: int) -> list[int]:
    subs = [0]
    for b in _bits(mask):
        bit = 1 << b
        subs += [s | bit for s in subs]
    return subs


def _enumerate_masks(n: int) -> list[int]:
    """All DAG edge-bitmasks on ``n`` nodes, each exactly once (unsorted).

    Recursive decomposition by the unique source set: a DAG with sources S
    is a DAG on the remaining nodes plus edges from S, where each old source
    must receive at least one edge from S.
    """
    full = (1 << n) - 1
    # memo[subset] maps source-set -> list of masks for DAGs on that subset
    memo: dict[int, dict[int, list[int]]] = {0: {0: [0]}}
    subsets = sorted((s for s in range(1, full + 1)), key=lambda s: bin(s).count("1"))
    out: list[int] = []
    for subset in subsets:
        top = subset == full
        acc: dict[int, list[int]] = {}
        for s_set in _submasks(subset):
            if s_set == 0:
                continue
            rest = subset ^ s_set
            parent_opts = _submasks(s_set)
            for src2, masks2 in memo[rest].items():
                combos = [0]
                for v in _bits(rest):
                    required = (src2 >> v) & 1
                    opts = []
                    for p_set in parent_opts:
                        if required and p_set == 0:
                            continue
                        edge_bits = 0
                        for p in _bits(p_set):
                            edge_bits |= 1 << (p * n + v)
                        opts.append(edge_bits)
                    combos = [c | o for c in combos for o in opts]
                bucket = out if top else acc.setdefault(s_set, [])
                for m2 in masks2:
                    bucket.extend(m2 | c for c in combos)
        if not top:
            memo[subset] = acc
    if n == 0:
        return [0]
    return out


@lru_cache(maxsize=None)
def _dag_masks(n: int) -> np.ndarray:
    """Sorted int64 array of every DAG bitmask on ``n`` nodes."""
    masks = np.fromiter(_enumerate_masks(n), dtype=np.int64)
    masks.sort()
    return masks


def enumerate_dags(n: int) -> Iterator[Dag]:
    """Yield every labeled DAG on ``n`` nodes once, in edge-bitmask order."""
    if not isinstance(n, int) or not 1 <= n <= MAX_NODES:
        raise BoundsError(f"node count must be between 1 and {MAX_NODES}, got {n}")
    for m in _dag_masks(n):
        yield Dag.from_mask(n, int(m))


# ---------------------------------------------------------------------------
# bulk Markov-equivalence index (vectorized, for dataset generation)


def _pair_table(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _triple_table(n: int) -> list[tuple[int, int, int]]:
    out = []
    for c in range(n):
        for i in range(n):
            for j in range(i + 1, n):
                if i != c and j != c:
                    out.append((i, c, j))
    return out


class MecIndex:
    """Grouping of all DAGs on ``n`` nodes by (skeleton, v-structures) key.

    Backed by flat numpy arrays so that the six-node universe (3.78M DAGs,
    about a million classes) stays affordable. Groups are ordered by key;
    members inside a group are ordered by edge bitmask.
    """

    def __init__(self, n: int):
        if not 1 <= n <= MAX_NODES:
            raise BoundsError(f"node count must be between 1 and {MAX_NODES}, got {n}")
        self.n = n
        masks = _dag_masks(n)
        skel = np.zeros(len(masks), dtype=np.int64)
        vst = np.zeros(len(masks), dtype=np.int64)
        pairs = _pair_table(n)
        for p_idx, (i, j) in enumerate(pairs):
            both = (1 << (i * n + j)) | (1 << (j * n + i))
            skel |= ((masks & both) != 0).astype(np.int64) << p_idx
        for t_idx, (i, c, j) in enumerate(_triple_table(n)):
            into_c = ((masks & (1 << (i * n + c))) != 0) & ((masks & (1 << (j * n + c))) != 0)
            nonadj = (masks & ((1 << (i * n + j)) | (1 << (j * n + i)))) == 0
            vst |= (into_c & nonadj).astype(np.int64) << t_idx
        order = np.lexsort((masks, vst, skel))
        self._masks = masks[order]
        self._skel = skel[order]
        self._vst = vst[order]
        change = (self._skel[1:] != self._skel[:-1]) | (self._vst[1:] != self._vst[:-1])
        starts = np.flatnonzero(change) + 1
        self._starts = np.concatenate(([0], starts, [len(masks)]))
        self._pairs = pairs
        self._triples = _triple_table(n)

    @property
    def group_count(self) -> int:
        return len(self._starts) - 1

    @property
    def dag_count(self) -> int:
        return len(self._masks)

    def member_masks(self, g: int) -> np.ndarray:
        return self._masks[self._starts[g]:self._starts[g + 1]]

    def skeleton_set(self, g: int) -> frozenset[tuple[int, int]]:
        bits = int(self._skel[self._starts[g]])
        return frozenset(self._pairs[i] for i in _bits(bits))

    def vstruct_set(self, g: int) -> frozenset[tuple[int, int, int]]:
        bits = int(self._vst[self._starts[g]])
        return frozenset(self._triples[i] for i in _bits(bits))

    def mec(self, g: int) -> Mec:
        members = tuple(Dag.from_mask(self.n, int(m)) for m in self.member_masks(g))
        return Mec(self.n, self.skeleton_set(g), self.vstruct_set(g), members)


@lru_cache(maxsize=None)
def mec_index(n: int) -> MecIndex:
    return MecIndex(n)


# ---------------------------------------------------------------------------
# PDAG extension


def dag_extensions(matrix: AdjMatrix) -> list[Dag]:
    """All DAGs consistent with a PDAG-encoded matrix.

    An extension keeps the matrix skeleton, respects every directed entry,
    is acyclic, and introduces no v-structure beyond the matrix's oriented
    colliders. Returns an empty list when no consistent orientation exists.
    """
    matrix.validate_pdag()
    n = matrix.n
    directed = sorted(matrix.directed_edges())
    undirected = sorted(matrix.undirected_pairs())
    colliders = matrix.oriented_colliders()
    out = []
    for choice in range(1 << len(undirected)):
        edges = list(directed)
        for k, (i, j) in enumerate(undirected):
            edges.append((i, j) if (choice >> k) & 1 == 0 else (j, i))
        try:
            cand = Dag(n, edges)
        except CycleError:
            continue
        if v_structures(cand) == colliders:
            out.append(cand)
    out.sort(key=lambda d: d.mask)
    return out


def mec_of_dag(dag: Dag) -> Mec:
    """The full equivalence class containing ``dag``."""
    skel = skeleton(dag)
    vst = v_structures(dag)
    members = dag_extensions(Mec(dag.n, skel, vst, (dag,)).cpdag())
    return Mec(dag.n, skel, vst, tuple(members))
