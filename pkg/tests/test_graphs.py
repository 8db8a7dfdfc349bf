import random
from itertools import combinations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causaltext.errors import BoundsError, CycleError, PdagError
from causaltext.graphs import (Dag, all_dsep_statements, d_separated,
                               dag_count, dag_extensions, enumerate_dags,
                               group_mecs, markov_equivalent, mec_index,
                               mec_of_dag, skeleton, v_structures)
from causaltext.matrix import AdjMatrix
from causaltext.variables import VariableTable

from conftest import FIVE_VAR_STEP_8


def brute_force_dags(n):
    cells = [(i, j) for i in range(n) for j in range(n) if i != j]
    out = []
    for bits in product((0, 1), repeat=len(cells)):
        edges = [cells[k] for k, b in enumerate(bits) if b]
        try:
            out.append(Dag(n, edges))
        except CycleError:
            continue
    return out


def dsep_path_oracle(dag, x, y, cond):
    """Blocked-path check by exhaustive simple-path enumeration."""
    cond = set(cond)
    adj = {i: set() for i in range(dag.n)}
    for p, c in dag.edges:
        adj[p].add(c)
        adj[c].add(p)
    desc = {i: set(dag.descendants(i)) for i in range(dag.n)}

    def blocked(path):
        for k in range(1, len(path) - 1):
            prev, node, nxt = path[k - 1], path[k], path[k + 1]
            collider = (prev, node) in dag.edges and (nxt, node) in dag.edges
            if collider:
                if node not in cond and not (desc[node] & cond):
                    return True
            elif node in cond:
                return True
        return False

    stack = [[x]]
    while stack:
        path = stack.pop()
        if path[-1] == y:
            if not blocked(path):
                return False
            continue
        for nb in adj[path[-1]]:
            if nb not in path:
                stack.append(path + [nb])
    return True


class TestEnumeration:
    @pytest.mark.parametrize("n,count", [(1, 1), (2, 3), (3, 25), (4, 543)])
    def test_counts_match_brute_force(self, n, count):
        enumerated = list(enumerate_dags(n))
        assert len(enumerated) == count
        assert {d.mask for d in enumerated} == {d.mask for d in brute_force_dags(n)}

    def test_counts_match_recurrence(self):
        assert [dag_count(n) for n in range(7)] == [1, 1, 3, 25, 543, 29281, 3781503]

    def test_no_duplicates_and_sorted(self):
        masks = [d.mask for d in enumerate_dags(4)]
        assert masks == sorted(masks)
        assert len(set(masks)) == len(masks)

    @pytest.mark.parametrize("n", [0, 7, -1])
    def test_bounds(self, n):
        with pytest.raises(BoundsError):
            list(enumerate_dags(n))

    def test_dag_rejects_cycles_and_self_loops(self):
        with pytest.raises(CycleError):
            Dag(3, [(0, 1), (1, 2), (2, 0)])
        with pytest.raises(CycleError):
            Dag(2, [(0, 0)])
        with pytest.raises(BoundsError):
            Dag(2, [(0, 5)])


class TestDSeparation:
    def test_chain(self):
        chain = Dag(3, [(0, 1), (1, 2)])
        assert d_separated(chain, 0, 2, {1})
        assert not d_separated(chain, 0, 2)

    def test_collider(self):
        coll = Dag(3, [(0, 2), (1, 2)])
        assert d_separated(coll, 0, 1)
        assert not d_separated(coll, 0, 1, {2})

    def test_collider_descendant_opens_path(self):
        g = Dag(4, [(0, 2), (1, 2), (2, 3)])
        assert d_separated(g, 0, 1)
        assert not d_separated(g, 0, 1, {3})

    def test_five_var_mec_members(self, five_var):
        # every extension of the worked example's oriented matrix satisfies
        # the premise's largest conditional independence
        matrix = AdjMatrix.from_mapping(FIVE_VAR_STEP_8)
        for member in dag_extensions(matrix):
            assert d_separated(member, 2, 4, {0, 1, 3})  # C and E given A, B, D

    def test_bounds(self):
        g = Dag(3, [(0, 1)])
        with pytest.raises(BoundsError):
            d_separated(g, 0, 5)
        with pytest.raises(BoundsError):
            d_separated(g, 0, 0)
        with pytest.raises(BoundsError):
            d_separated(g, 0, 1, {1})

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_agrees_with_path_oracle_exhaustively(self, n):
        for dag in enumerate_dags(n):
            for x, y in combinations(range(n), 2):
                rest = [v for v in range(n) if v not in (x, y)]
                for size in range(len(rest) + 1):
                    for sub in combinations(rest, size):
                        assert d_separated(dag, x, y, sub) == \
                            dsep_path_oracle(dag, x, y, sub)

    def test_agrees_with_path_oracle_sampled_n5(self):
        rng = random.Random(7)
        dags = list(enumerate_dags(5))
        for dag in rng.sample(dags, 250):
            for x, y in combinations(range(5), 2):
                rest = [v for v in range(5) if v not in (x, y)]
                for size in range(4):
                    for sub in combinations(rest, size):
                        assert d_separated(dag, x, y, sub) == \
                            dsep_path_oracle(dag, x, y, sub)


class TestStatements:
    def test_collider_statements(self):
        coll = Dag(3, [(0, 2), (1, 2)])
        stmts = all_dsep_statements(coll, 1)
        assert [(s.x, s.y, set(s.cond)) for s in stmts] == [(0, 1, set())]

    def test_chain_statements(self):
        chain = Dag(3, [(0, 1), (1, 2)])
        stmts = all_dsep_statements(chain, 1)
        assert [(s.x, s.y, set(s.cond)) for s in stmts] == [(0, 2, {1})]

    def test_empty_graph_statements(self):
        empty = Dag(3)
        stmts = all_dsep_statements(empty, 1)
        # 3 pairs, each separated by the empty set and by the one third node
        assert len(stmts) == 6
        assert {(s.x, s.y) for s in stmts} == {(0, 1), (0, 2), (1, 2)}
        assert all(len(s.cond) <= 1 for s in stmts)

    def test_max_cond_bounds(self):
        with pytest.raises(BoundsError):
            all_dsep_statements(Dag(3), 2)
        with pytest.raises(BoundsError):
            all_dsep_statements(Dag(3), -1)


class TestEquivalence:
    def test_skeleton(self):
        assert skeleton(Dag(3, [(0, 1), (1, 2)])) == {(0, 1), (1, 2)}
        assert skeleton(Dag(3, [(0, 2), (1, 2)])) == {(0, 2), (1, 2)}
        assert skeleton(Dag(3)) == frozenset()

    def test_v_structures(self):
        assert v_structures(Dag(3, [(0, 2), (1, 2)])) == {(0, 2, 1)}
        assert v_structures(Dag(3, [(0, 2), (1, 2), (0, 1)])) == frozenset()
        assert v_structures(Dag(3, [(0, 1), (1, 2)])) == frozenset()

    def test_markov_equivalent(self):
        chain = Dag(3, [(0, 1), (1, 2)])
        rev = Dag(3, [(2, 1), (1, 0)])
        coll = Dag(3, [(0, 2), (1, 2)])
        assert markov_equivalent(chain, rev)
        assert not markov_equivalent(chain, coll)
        assert markov_equivalent(chain, chain)
        with pytest.raises(BoundsError):
            markov_equivalent(chain, Dag(2))

    @given(st.data())
    @settings(max_examples=60, deadline=None)
    def test_equivalence_relation(self, data):
        dags = list(enumerate_dags(3))
        a = data.draw(st.sampled_from(dags))
        b = data.draw(st.sampled_from(dags))
        c = data.draw(st.sampled_from(dags))
        assert markov_equivalent(a, a)
        assert markov_equivalent(a, b) == markov_equivalent(b, a)
        if markov_equivalent(a, b) and markov_equivalent(b, c):
            assert markov_equivalent(a, c)

    @pytest.mark.parametrize("n,count", [(1, 1), (2, 2), (3, 11), (4, 185)])
    def test_mec_counts(self, n, count):
        assert len(group_mecs(list(enumerate_dags(n)))) == count

    def test_single_dag_group(self):
        chain = Dag(3, [(0, 1), (1, 2)])
        mecs = group_mecs([chain])
        assert len(mecs) == 1 and mecs[0].members == (chain,)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_index_matches_grouping_oracle(self, n):
        oracle = group_mecs(list(enumerate_dags(n)))
        idx = mec_index(n)
        assert idx.group_count == len(oracle)
        oracle_keys = {(m.skeleton, m.vstructs) for m in oracle}
        index_keys = {(idx.skeleton_set(g), idx.vstruct_set(g))
                      for g in range(idx.group_count)}
        assert oracle_keys == index_keys
        oracle_members = {tuple(d.mask for d in m.members) for m in oracle}
        index_members = {tuple(int(v) for v in idx.member_masks(g))
                         for g in range(idx.group_count)}
        assert oracle_members == index_members


class TestExtensions:
    def test_two_node_undirected(self):
        m = AdjMatrix(VariableTable.letters(2), [[0, 1], [1, 0]])
        exts = dag_extensions(m)
        assert sorted(tuple(sorted(d.edges)) for d in exts) == [((0, 1),), ((1, 0),)]

    def test_five_var_final_matrix(self):
        matrix = AdjMatrix.from_mapping(FIVE_VAR_STEP_8)
        exts = dag_extensions(matrix)
        assert len(exts) == 2
        forced = {(0, 3), (1, 3), (0, 4), (1, 4), (2, 3)}
        for d in exts:
            assert forced <= d.edges
            assert (3, 4) in d.edges  # the remaining chain orients away from the hub

    def test_directed_cycle_rejected(self):
        cells = [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
        m = AdjMatrix(VariableTable.letters(3), cells)
        with pytest.raises(PdagError):
            dag_extensions(m)

    def test_inconsistent_matrix_has_no_extension(self):
        # A -> B, B - C undirected, D -> C: either orientation of B - C
        # creates a collider the matrix does not declare
        cells = [
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [0, 1, 0, 0],
            [0, 0, 1, 0],
        ]
        m = AdjMatrix(VariableTable.letters(4), cells)
        assert m.oriented_colliders() == frozenset()
        assert dag_extensions(m) == []

    @given(st.data())
    @settings(max_examples=40, deadline=None)
    def test_extensions_recover_equivalence_class(self, data):
        dags = list(enumerate_dags(4))
        dag = data.draw(st.sampled_from(dags))
        mec = mec_of_dag(dag)
        assert dag in mec.members
        for member in mec.members:
            assert markov_equivalent(member, dag)
        # the class regenerated from its own key equals the grouped class
        grouped = [m for m in group_mecs(dags)
                   if m.skeleton == mec.skeleton and m.vstructs == mec.vstructs]
        assert grouped[0].members == mec.members

    def test_cpdag_roundtrip(self):
        coll = Dag(3, [(0, 2), (1, 2)])
        mec = mec_of_dag(coll)
        assert len(mec.members) == 1
        cpdag = mec.cpdag()
        assert cpdag.directed_edges() == {(0, 2), (1, 2)}
