"""Tests for the invariant edge-frequency polytope and the LP contract."""

from fractions import Fraction

import pytest

from conftest import random_range2
from ergopt.core.errors import Infeasible, InvalidWord, SystemSpecError
from ergopt.core.polytope import (
    EdgeFrequencyVector,
    MarkovChain,
    bernoulli,
    choose_mode,
    cycle_mean,
    edge_expectation,
    edge_vector_to_markov,
    lp_optimize,
    optimal_face,
    uniform_cycle_vector,
    vertex_to_cycle,
)
from ergopt.core.potentials import block_indicator, lp_presentation
from ergopt.core.symbolic import Cycle, enumerate_simple_cycles


@pytest.mark.unit
class TestEdgeFrequencyVector:
    def test_cycle_vector_is_feasible(self, golden_mean):
        mu = uniform_cycle_vector(golden_mean, Cycle.of([0, 1]))
        assert mu.freq == (0, Fraction(1, 2), Fraction(1, 2))
        assert mu.is_feasible()
        assert mu.support == ((0, 1), (1, 0))

    def test_cycle_must_be_closed(self, golden_mean):
        with pytest.raises(InvalidWord):
            uniform_cycle_vector(golden_mean, Cycle.of([1]))

    def test_wrong_length(self, golden_mean):
        with pytest.raises(SystemSpecError):
            EdgeFrequencyVector(golden_mean, (1,))

    def test_flow_violation(self, golden_mean):
        unbalanced = EdgeFrequencyVector(golden_mean, (0, 1, 0))
        assert unbalanced.flow_violation() == 1
        assert not unbalanced.is_feasible()

    def test_mixture_stays_feasible(self, golden_mean):
        a = uniform_cycle_vector(golden_mean, Cycle.of([0]))
        b = uniform_cycle_vector(golden_mean, Cycle.of([0, 1]))
        assert a.mix(b, Fraction(1, 3)).is_feasible()

    def test_to_dict(self, golden_mean):
        mu = uniform_cycle_vector(golden_mean, Cycle.of([0, 1]))
        assert mu.to_dict() == {"edges": [[[0, 1], "1/2"], [[1, 0], "1/2"]]}


@pytest.mark.unit
class TestMarkovChain:
    def test_wrong_shape(self, golden_mean):
        with pytest.raises(SystemSpecError):
            MarkovChain.from_transition_matrix(golden_mean, [[1, 0]])

    def test_negative_entry(self, full2):
        with pytest.raises(SystemSpecError):
            MarkovChain.from_transition_matrix(full2, [[2, -1], [0, 1]])

    def test_row_sum(self, full2):
        with pytest.raises(SystemSpecError):
            MarkovChain.from_transition_matrix(full2, [[Fraction(1, 2), 0], [0, 1]])

    def test_mass_on_forbidden_edge(self, golden_mean):
        with pytest.raises(SystemSpecError):
            MarkovChain.from_transition_matrix(golden_mean, [[0, 1], [0, 1]])

    def test_non_unique_stationary_law(self, full2):
        with pytest.raises(SystemSpecError):
            MarkovChain.from_transition_matrix(full2, [[1, 0], [0, 1]])

    def test_bernoulli_needs_full_shift(self, golden_mean):
        with pytest.raises(SystemSpecError):
            bernoulli(golden_mean, [Fraction(1, 2), Fraction(1, 2)])

    def test_edge_frequencies_round_trip(self, full2):
        chain = bernoulli(full2, [Fraction(1, 4), Fraction(3, 4)])
        freq = chain.to_edge_frequencies()
        assert freq.is_feasible()
        back = edge_vector_to_markov(freq)
        assert back.stationary == chain.stationary
        assert back.probability((1, 0)) == Fraction(1, 4)

    def test_sample_path_follows_allowed_edges(self, golden_mean, rng):
        chain = MarkovChain.from_transition_matrix(golden_mean, [[Fraction(1, 2), Fraction(1, 2)], [1, 0]])
        path = chain.sample_path(200, rng)
        assert golden_mean.is_path(tuple(int(v) for v in path))


@pytest.mark.unit
class TestLPOptimize:
    def test_golden_mean_maximum(self, golden_mean, gm_f):
        outcome = lp_optimize(golden_mean, gm_f.edge_weights(golden_mean), "max")
        assert outcome.value == Fraction(1, 2)
        assert outcome.mode == "exact"
        assert vertex_to_cycle(outcome.solution) == Cycle.of([0, 1])

    def test_golden_mean_minimum(self, golden_mean, gm_f):
        outcome = lp_optimize(golden_mean, gm_f.edge_weights(golden_mean), "min")
        assert outcome.value == 0
        assert vertex_to_cycle(outcome.solution) == Cycle.of([0])

    def test_certificate_matches_value(self, golden_mean, gm_f):
        outcome = lp_optimize(golden_mean, gm_f.edge_weights(golden_mean), "max")
        # only the normalization row has a nonzero right-hand side
        assert outcome.certificate[golden_mean.alphabet_size] == outcome.value

    def test_objective_length_checked(self, golden_mean):
        with pytest.raises(SystemSpecError):
            lp_optimize(golden_mean, [1, 2])

    def test_float_mode(self, golden_mean, gm_f, float_settings):
        outcome = lp_optimize(golden_mean, gm_f.edge_weights(golden_mean), "max", settings=float_settings)
        assert outcome.mode == "float"
        assert outcome.value == pytest.approx(0.5)

    def test_constraint_clamped_within_tolerance(self, golden_mean, gm_f, gm_phi):
        row = gm_phi.edge_weights(golden_mean)
        rhs = Fraction(1, 2) - Fraction(1, 10**12)
        outcome = lp_optimize(golden_mean, gm_f.edge_weights(golden_mean), "max", [(row, rhs)])
        assert outcome.clamped
        assert outcome.clamped_rhs == Fraction(1, 2)
        assert outcome.value == Fraction(1, 2)

    def test_infeasible_constraint_reports_interval(self, golden_mean, gm_f, gm_phi):
        row = gm_phi.edge_weights(golden_mean)
        with pytest.raises(Infeasible) as info:
            lp_optimize(golden_mean, gm_f.edge_weights(golden_mean), "max", [(row, 2)])
        assert info.value.feasible_interval == (Fraction(1, 2), 1)
        assert info.value.exit_code == 3

    def test_range_three_potential_through_recoding(self, golden_mean):
        f = block_indicator(golden_mean, [0, 0, 1])
        sft = lp_presentation(f)
        outcome = lp_optimize(sft, f.edge_weights(sft), "max")
        assert outcome.value == Fraction(1, 3)
        assert vertex_to_cycle(outcome.solution) == Cycle.of([0, 0, 1])

    def test_vertices_are_simple_cycle_measures(self, random_instances):
        for sft, f, _ in random_instances(8):
            weights = f.edge_weights(sft)
            outcome = lp_optimize(sft, weights, "max")
            best = max(cycle_mean(sft, c, weights) for c in enumerate_simple_cycles(sft, sft.alphabet_size))
            assert outcome.value == best
            assert outcome.solution.is_feasible()
            assert edge_expectation(outcome.solution, weights) == outcome.value

    def test_range_two_matches_cycle_enumeration(self, rng, golden_mean):
        f = random_range2(rng, golden_mean)
        weights = f.edge_weights(golden_mean)
        best = max(cycle_mean(golden_mean, c, weights) for c in enumerate_simple_cycles(golden_mean, 2))
        assert lp_optimize(golden_mean, weights, "max").value == best


@pytest.mark.unit
class TestModesAndFaces:
    def test_choose_mode(self, golden_mean, float_settings):
        assert choose_mode(golden_mean, [Fraction(1, 3)]) == "exact"
        assert choose_mode(golden_mean, [0.25]) == "float"
        assert choose_mode(golden_mean, [Fraction(1, 3)], float_settings) == "float"

    def test_optimal_face_of_constant_objective(self, golden_mean):
        face = optimal_face(golden_mean, [0, 0, 0])
        assert [c.to_list() for c in face.cycles] == [[0], [0, 1]]

    def test_optimal_face_unique_maximizer(self, golden_mean, gm_f):
        face = optimal_face(golden_mean, gm_f.edge_weights(golden_mean))
        assert face.to_dict() == {"value": "1/2", "cycles": [[0, 1]]}

    def test_vertex_to_cycle_rejects_mixtures(self, golden_mean):
        a = uniform_cycle_vector(golden_mean, Cycle.of([0]))
        b = uniform_cycle_vector(golden_mean, Cycle.of([0, 1]))
        assert vertex_to_cycle(a.mix(b, Fraction(1, 2))) is None
