import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causaltext.engine import (ColliderCandidates, EngineOptions,
                               FILTER_PAPER_LITERAL, FILTER_PC_CORRECT,
                               apply_conditional, apply_unconditional,
                               candidate_pairs, filter_collider_pairs,
                               initial_matrix, orient_colliders,
                               propagate_orientations, run_c2p)
from causaltext.errors import ConfigError
from causaltext.graphs import (Dag, enumerate_dags, skeleton, v_structures)
from causaltext.matrix import AdjMatrix
from causaltext.relations import RelationSet, relations_from_dag
from causaltext.variables import VariableTable

from conftest import (FIVE_VAR_STEP_3, FIVE_VAR_STEP_4, FIVE_VAR_STEP_5,
                      FIVE_VAR_STEP_6, FIVE_VAR_STEP_7, FIVE_VAR_STEP_8,
                      JUNK_FOOD_STEP_3, JUNK_FOOD_STEP_4, JUNK_FOOD_STEP_6,
                      JUNK_FOOD_STEP_8)


def ones(matrix):
    return sum(sum(row) for row in matrix.cells)


class TestSteps:
    def test_initial_matrix_plain(self):
        m = initial_matrix(VariableTable.letters(3))
        assert m.to_mapping() == {
            "A": {"A": 0, "B": 1, "C": 1},
            "B": {"A": 1, "B": 0, "C": 1},
            "C": {"A": 1, "B": 1, "C": 0},
        }

    def test_initial_matrix_five_vars(self, five_var):
        m = initial_matrix(five_var.variables)
        assert m.to_mapping() == FIVE_VAR_STEP_3

    def test_initial_matrix_declared_cause(self):
        table = VariableTable.letters(2)
        m = initial_matrix(table, [(0, 1)])
        assert m.cell(0, 1) == 1 and m.cell(1, 0) == 0

    def test_apply_unconditional_five_var(self, five_var):
        m = apply_unconditional(initial_matrix(five_var.variables), five_var.relations)
        assert m.to_mapping() == FIVE_VAR_STEP_4

    def test_apply_unconditional_identity_and_total(self):
        table = VariableTable.letters(3)
        m = initial_matrix(table)
        empty = RelationSet(table)
        assert apply_unconditional(m, empty) == m
        everything = RelationSet(table, uncond_indep={(0, 1), (0, 2), (1, 2)})
        assert ones(apply_unconditional(m, everything)) == 0

    def test_apply_conditional_five_var(self, five_var):
        m4 = AdjMatrix.from_mapping(FIVE_VAR_STEP_4, five_var.variables)
        m5 = apply_conditional(m4, five_var.relations)
        assert m5.to_mapping() == FIVE_VAR_STEP_5

    def test_apply_conditional_idempotent(self, five_var):
        m4 = AdjMatrix.from_mapping(FIVE_VAR_STEP_4, five_var.variables)
        once = apply_conditional(m4, five_var.relations)
        assert apply_conditional(once, five_var.relations) == once

    def test_candidates_five_var(self, five_var):
        m5 = AdjMatrix.from_mapping(FIVE_VAR_STEP_5, five_var.variables)
        assert candidate_pairs(m5).to_mapping() == FIVE_VAR_STEP_6

    def test_candidates_zero_matrix(self):
        table = VariableTable.letters(3)
        m = AdjMatrix(table, [[0] * 3 for _ in range(3)])
        assert candidate_pairs(m).is_empty()

    def test_candidates_one_row(self):
        table = VariableTable.letters(3)
        m = AdjMatrix(table, [[0, 1, 1], [1, 0, 0], [1, 0, 0]])
        assert candidate_pairs(m).to_mapping() == {"A": [["B", "C"]]}

    def test_filter_five_var_both_modes(self, five_var):
        m5 = AdjMatrix.from_mapping(FIVE_VAR_STEP_5, five_var.variables)
        cands = candidate_pairs(m5)
        literal = filter_collider_pairs(cands, five_var.relations, FILTER_PAPER_LITERAL)
        correct = filter_collider_pairs(cands, five_var.relations, FILTER_PC_CORRECT)
        assert literal.to_mapping() == FIVE_VAR_STEP_7
        assert correct.to_mapping() == FIVE_VAR_STEP_7

    def test_filter_modes_can_differ(self):
        # collider pair certified only by a conditional statement: the
        # literal reading misses it
        dag = Dag(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
        table = VariableTable.letters(4)
        rels = relations_from_dag(dag, table)
        trace_correct = run_c2p(rels, EngineOptions(collider_filter=FILTER_PC_CORRECT))
        trace_literal = run_c2p(rels, EngineOptions(collider_filter=FILTER_PAPER_LITERAL))
        assert trace_correct.final.oriented_colliders() == v_structures(dag)
        assert trace_literal.final.oriented_colliders() != v_structures(dag)

    def test_filter_unknown_mode(self, five_var):
        cands = candidate_pairs(initial_matrix(five_var.variables))
        with pytest.raises(ConfigError):
            filter_collider_pairs(cands, five_var.relations, "nonsense")

    def test_orient_five_var(self, five_var):
        m5 = AdjMatrix.from_mapping(FIVE_VAR_STEP_5, five_var.variables)
        kept = filter_collider_pairs(candidate_pairs(m5), five_var.relations)
        assert orient_colliders(m5, kept).to_mapping() == FIVE_VAR_STEP_8

    def test_orient_empty_identity(self, five_var):
        m5 = AdjMatrix.from_mapping(FIVE_VAR_STEP_5, five_var.variables)
        empty = ColliderCandidates(five_var.variables, {})
        assert orient_colliders(m5, empty) == m5

    def test_orient_idempotent(self, five_var):
        m5 = AdjMatrix.from_mapping(FIVE_VAR_STEP_5, five_var.variables)
        kept = filter_collider_pairs(candidate_pairs(m5), five_var.relations)
        once = orient_colliders(m5, kept)
        assert orient_colliders(once, kept) == once


class TestPropagation:
    def test_basic_chain_orientation(self):
        table = VariableTable.letters(3)
        # A -> B directed, B - C undirected, A and C non-adjacent
        m = AdjMatrix(table, [[0, 1, 0], [0, 0, 1], [0, 1, 0]])
        out = propagate_orientations(m)
        assert out.directed_edges() == {(0, 1), (1, 2)}

    def test_triangle_untouched(self):
        table = VariableTable.letters(3)
        # A -> B, B - C, A - C: adjacency of A and C blocks the rule
        m = AdjMatrix(table, [[0, 1, 1], [0, 0, 1], [1, 1, 0]])
        assert propagate_orientations(m) == m

    def test_five_var_matrix_orients_the_hub_chain(self, five_var):
        # C -> D is directed, D - E undirected, and C, E are non-adjacent, so
        # the chain rule fires and orients D -> E (the orientation every
        # consistent extension carries anyway)
        m8 = AdjMatrix.from_mapping(FIVE_VAR_STEP_8, five_var.variables)
        out = propagate_orientations(m8)
        assert (3, 4) in out.directed_edges()
        assert out.skeleton_pairs() == m8.skeleton_pairs()
        assert out.oriented_colliders() == m8.oriented_colliders()

    def test_propagation_runs_to_fixpoint(self):
        table = VariableTable.letters(4)
        # A -> B, B - C, C - D in a path: two successive rule applications
        m = AdjMatrix(table, [
            [0, 1, 0, 0],
            [0, 0, 1, 0],
            [0, 1, 0, 1],
            [0, 0, 1, 0],
        ])
        out = propagate_orientations(m)
        assert out.directed_edges() == {(0, 1), (1, 2), (2, 3)}


class TestRunPipeline:
    def test_five_var_trace(self, five_var):
        trace = run_c2p(five_var.relations)
        d = trace.as_dict()
        assert d["step_3"] == FIVE_VAR_STEP_3
        assert d["step_4"] == FIVE_VAR_STEP_4
        assert d["step_5"] == FIVE_VAR_STEP_5
        assert d["step_6"] == FIVE_VAR_STEP_6
        assert d["step_7"] == FIVE_VAR_STEP_7
        assert d["step_8"] == FIVE_VAR_STEP_8
        assert d["step_9"] == FIVE_VAR_STEP_8  # no propagation by default

    def test_junk_food_trace(self, junk_food):
        trace = run_c2p(junk_food.relations)
        d = trace.as_dict()
        assert d["step_3"] == JUNK_FOOD_STEP_3
        assert d["step_4"] == JUNK_FOOD_STEP_4
        assert d["step_5"] == JUNK_FOOD_STEP_4
        assert d["step_6"] == JUNK_FOOD_STEP_6
        assert d["step_7"] == JUNK_FOOD_STEP_6
        assert d["step_8"] == JUNK_FOOD_STEP_8

    def test_no_relations_leaves_complete_graph(self):
        table = VariableTable.letters(4)
        trace = run_c2p(RelationSet(table))
        assert ones(trace.final) == 12
        assert trace.final.undirected_pairs() == {
            (i, j) for i in range(4) for j in range(i + 1, 4)}

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_oracle_equivalence_exhaustive(self, n):
        table = VariableTable.letters(n)
        for dag in enumerate_dags(n):
            trace = run_c2p(relations_from_dag(dag, table))
            assert trace.final.skeleton_pairs() == skeleton(dag)
            assert trace.final.oriented_colliders() == v_structures(dag)

    def test_oracle_equivalence_closure_premises(self):
        # the full separation closure gives the same reconstruction
        table = VariableTable.letters(4)
        for dag in enumerate_dags(4):
            rels = relations_from_dag(dag, table, minimal=False)
            trace = run_c2p(rels)
            assert trace.final.skeleton_pairs() == skeleton(dag)
            assert trace.final.oriented_colliders() == v_structures(dag)

    def test_declared_cause_orientation_survives(self):
        rng = random.Random(3)
        table = VariableTable.letters(4)
        dags = [d for d in enumerate_dags(4) if d.edges]
        for dag in rng.sample(dags, 60):
            declared = {rng.choice(sorted(dag.edges))}
            rels = relations_from_dag(dag, table)
            rels = RelationSet(table, rels.dependencies, rels.uncond_indep,
                               rels.cond_indep, frozenset(declared))
            final = run_c2p(rels).final
            for cause, effect in declared:
                assert final.cell(cause, effect) == 1
                assert final.cell(effect, cause) == 0


@st.composite
def relation_sets(draw):
    n = draw(st.integers(min_value=2, max_value=5))
    table = VariableTable.letters(n)
    deps, uncond, cond = set(), set(), set()
    for i in range(n):
        for j in range(i + 1, n):
            bucket = draw(st.sampled_from(["dep", "uncond", "cond", "none"]))
            if bucket == "dep":
                deps.add((i, j))
            elif bucket == "uncond":
                uncond.add((i, j))
            elif bucket == "cond":
                rest = [v for v in range(n) if v not in (i, j)]
                if rest:
                    size = draw(st.integers(min_value=1, max_value=len(rest)))
                    cond.add(((i, j), frozenset(draw(st.permutations(rest))[:size])))
    return RelationSet(table, frozenset(deps), frozenset(uncond), frozenset(cond))


class TestProperties:
    @given(relation_sets())
    @settings(max_examples=80, deadline=None)
    def test_monotone_and_idempotent(self, rels):
        trace = run_c2p(rels)
        counts = [ones(trace.step_3), ones(trace.step_4), ones(trace.step_5),
                  ones(trace.step_8), ones(trace.step_9)]
        assert counts == sorted(counts, reverse=True)
        assert apply_unconditional(trace.step_4, rels) == trace.step_4
        assert apply_conditional(trace.step_5, rels) == trace.step_5
