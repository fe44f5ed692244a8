"""Tests for finite horizons, empirical traces and irregular witnesses."""

import math
from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from ergopt.core.errors import HorizonTooLarge, NotMixing, TargetsIndistinguishable, WordTooShort
from ergopt.core.orbits import (
    birkhoff_prefix_sums,
    construct_irregular_witness,
    finite_horizon_max,
    finite_horizon_ratio_max,
    irregular_set_nonempty,
    irregular_supremum_estimate,
    ratio_at,
    sample_generic_word,
    verify_level_set_membership,
)
from ergopt.core.polytope import bernoulli, uniform_cycle_vector
from ergopt.core.potentials import CocyclePotential, constant, perturbed_additive
from ergopt.core.symbolic import Cycle, Word, enumerate_simple_cycles, validate_sft


@pytest.fixture
def diagonal(full2):
    return CocyclePotential(full2, (np.diag([2.0, 1.0]), np.diag([1.0, 3.0])))


@pytest.fixture
def fixed_points(full2):
    return uniform_cycle_vector(full2, Cycle.of([1])), uniform_cycle_vector(full2, Cycle.of([0]))


@pytest.mark.unit
class TestFiniteHorizon:
    def test_golden_mean(self, gm_f):
        result = finite_horizon_max(gm_f, 16)
        assert result.value == Fraction(1, 2)
        assert result.exact
        assert len(result.word) == 16
        assert gm_f.sft.is_path(result.word)

    def test_close_to_beta(self, random_instances):
        from ergopt.core.optimizers import max_ergodic_average

        for sft, f, _ in random_instances(5):
            beta = max_ergodic_average(f).value.value
            for n in (4, 16, 64):
                # following an optimal cycle loses at most 2 max|f| per leftover step
                assert finite_horizon_max(f, n).value >= beta - 2 * f.max_abs_weight * sft.alphabet_size / n

    def test_at_least_cycle_means_dividing_horizon(self, random_instances):
        for sft, f, _ in random_instances(8):
            cycles = enumerate_simple_cycles(sft, sft.alphabet_size)
            for n in (6, 12):
                value = finite_horizon_max(f, n).value
                for cycle in cycles:
                    if n % len(cycle) == 0:
                        assert value >= f.birkhoff_sum(cycle.as_word()) / len(cycle)

    def test_rejects_short_horizon(self, gm_f):
        with pytest.raises(WordTooShort):
            finite_horizon_max(gm_f, 0)

    def test_diagonal_cocycle(self, diagonal):
        result = finite_horizon_max(diagonal, 6)
        assert result.value == pytest.approx(math.log(3))
        assert result.word == (1,) * 6
        assert not result.exact
        assert result.upper_bound == pytest.approx(math.log(3))

    def test_cocycle_horizon_cap(self, diagonal):
        with pytest.raises(HorizonTooLarge):
            finite_horizon_max(diagonal, 15)

    def test_sequence_potential_by_enumeration(self, x0):
        result = finite_horizon_max(perturbed_additive(x0, 1), 4)
        assert result.value == 1
        assert result.word == (1, 1, 1, 0)

    def test_ratio_horizon(self, gm_f, gm_phi):
        result = finite_horizon_ratio_max(gm_f, gm_phi.shift(1), 3)
        assert result.value == Fraction(1, 2)
        assert result.word == (1, 0, 1)

    def test_ratio_horizon_needs_positive_denominator(self, gm_f, gm_phi):
        from ergopt.core.errors import PotentialMismatch

        with pytest.raises(PotentialMismatch):
            finite_horizon_ratio_max(gm_f, gm_phi, 3)


@pytest.mark.unit
class TestPrefixSums:
    def test_exact_prefix_sums(self, golden_mean):
        from ergopt.core.potentials import LocallyConstantPotential

        pair = LocallyConstantPotential(
            golden_mean, 2, {(0, 0): Fraction(1, 3), (0, 1): Fraction(1), (1, 0): Fraction(0)}
        )
        symbols = np.array([0, 0, 1, 0, 1, 0])
        cum, denom = birkhoff_prefix_sums(pair, symbols)
        assert denom == 3
        # blocks 00, 01, 10, 01, 10
        assert cum.tolist() == [0, 1, 4, 4, 7, 7]

    def test_ratio_at(self, x0, one):
        symbols = np.array([1, 1, 0, 0])
        num, den = birkhoff_prefix_sums(x0, symbols), birkhoff_prefix_sums(one, symbols)
        assert ratio_at(num, den, 2) == 1
        assert ratio_at(num, den, 4) == Fraction(1, 2)

    def test_large_denominators_stay_exact(self, full2, one):
        from ergopt.core.potentials import LocallyConstantPotential

        p, q = 2**31 - 1, 2**61 - 1
        tiny = LocallyConstantPotential(full2, 1, {(0,): Fraction(1, p), (1,): Fraction(1, q)})
        symbols = np.array([0, 1, 0, 1])
        cum, denom = birkhoff_prefix_sums(tiny, symbols)
        assert denom == p * q
        assert cum.dtype == object
        assert [int(v) for v in cum] == [0, q, q + p, 2 * q + p, 2 * q + 2 * p]
        ratio = ratio_at((cum, denom), birkhoff_prefix_sums(one, symbols), 4)
        assert ratio == (Fraction(1, p) + Fraction(1, q)) / 2


@pytest.mark.unit
class TestEmpiricalTrace:
    def test_checkpoints(self, full2, x0):
        chain = bernoulli(full2, [Fraction(1, 2), Fraction(1, 2)])
        trace = sample_generic_word(chain, 100, seed=3, potentials={"x0": x0})
        assert [c.n for c in trace.checkpoints] == [1, 2, 4, 8, 16, 32, 64, 100]
        assert all(sum(c.delta.freq) == 1 for c in trace.checkpoints)
        assert list(trace.to_dataframe().columns) == ["n", "x0"]
        assert len(trace.word) == 101

    def test_same_seed_same_word(self, full2):
        chain = bernoulli(full2, [Fraction(1, 3), Fraction(2, 3)])
        first = sample_generic_word(chain, 256, seed=11)
        second = sample_generic_word(chain, 256, seed=11)
        assert first.word == second.word

    def test_cycle_measure_is_tiled(self, golden_mean, gm_f):
        mu = uniform_cycle_vector(golden_mean, Cycle.of([0, 1]))
        trace = sample_generic_word(mu, 64, potentials={"f": gm_f})
        assert golden_mean.is_path(trace.word.symbols)
        assert trace.checkpoints[-1].averages["f"] == Fraction(1, 2)

    def test_rejects_empty_trace(self, full2):
        with pytest.raises(ValueError):
            sample_generic_word(bernoulli(full2, [Fraction(1, 2), Fraction(1, 2)]), 0)

    def test_generic_point_is_in_level_set(self, full2, x0, one):
        chain = bernoulli(full2, [Fraction(1, 2), Fraction(1, 2)])
        trace = sample_generic_word(chain, 4096, seed=0)
        report = verify_level_set_membership(trace, x0, one, Fraction(1, 2), tol=0.05)
        assert report["passed"]
        assert report["eventually_decreasing"]
        assert len(report["deviations"]) == 13

    def test_wrong_level_fails(self, full2, x0, one):
        chain = bernoulli(full2, [Fraction(1, 2), Fraction(1, 2)])
        trace = sample_generic_word(chain, 4096, seed=0)
        assert not verify_level_set_membership(trace, x0, one, Fraction(9, 10), tol=0.05)["passed"]

    def test_needs_three_checkpoints(self, full2, x0, one):
        trace = sample_generic_word(bernoulli(full2, [Fraction(1, 2), Fraction(1, 2)]), 2)
        with pytest.raises(ValueError):
            verify_level_set_membership(trace, x0, one, Fraction(1, 2), tol=0.05)


@pytest.mark.unit
class TestIrregularWitness:
    def test_schedule_and_record(self, fixed_points, x0, one):
        witness = construct_irregular_witness(*fixed_points, x0, one, depth=4, growth_factor=4, seed=0)
        assert [e.t for e in witness.schedule] == [16, 80, 400, 2000]
        assert [e.N for e in witness.schedule] == [16, 64, 320, 1600]
        assert [e.m for e in witness.schedule] == [0, 0, 0, 0]
        assert [r for _, _, r in witness.oscillation_record] == [
            1, Fraction(1, 5), Fraction(21, 25), Fraction(21, 125)
        ]
        assert witness.target_values == (1, 0)
        assert witness.metadata["block_dominance"] == pytest.approx(0.8)

    def test_dataframe(self, fixed_points, x0, one):
        witness = construct_irregular_witness(*fixed_points, x0, one, depth=3)
        frame = witness.to_dataframe()
        assert list(frame.columns) == ["k", "t_k", "ratio"]
        assert frame["ratio"].tolist() == pytest.approx([1.0, 0.2, 0.84])

    def test_connectors_on_golden_mean(self, golden_mean, gm_phi):
        one = constant(golden_mean, Fraction(1))
        mu1 = uniform_cycle_vector(golden_mean, Cycle.of([0]))
        mu2 = uniform_cycle_vector(golden_mean, Cycle.of([0, 1]))
        witness = construct_irregular_witness(mu1, mu2, gm_phi, one, depth=6, seed=1)
        assert golden_mean.is_path(tuple(int(s) for s in witness.word))
        assert witness.metadata["max_bridge"] < golden_mean.mixing_time
        ratios = [r for _, _, r in witness.oscillation_record]
        assert all(ratios[i] > ratios[i + 1] for i in range(0, len(ratios) - 1, 2))

    def test_not_mixing(self):
        periodic = validate_sft(2, [(0, 1), (1, 0)])
        mu = uniform_cycle_vector(periodic, Cycle.of([0, 1]))
        phi = constant(periodic, Fraction(1))
        with pytest.raises(NotMixing):
            construct_irregular_witness(mu, mu, phi, phi)

    def test_targets_must_differ(self, full2, x0, one):
        chain = bernoulli(full2, [Fraction(1, 2), Fraction(1, 2)])
        other = uniform_cycle_vector(full2, Cycle.of([0, 1]))
        with pytest.raises(TargetsIndistinguishable):
            construct_irregular_witness(chain, other, x0, one)

    def test_parameter_checks(self, fixed_points, x0, one):
        with pytest.raises(ValueError):
            construct_irregular_witness(*fixed_points, x0, one, depth=1)
        with pytest.raises(ValueError):
            construct_irregular_witness(*fixed_points, x0, one, growth_factor=1)

    def test_default_schedule_comes_from_settings(self, fixed_points, x0, one, default_settings):
        settings = replace(default_settings, orbit=replace(default_settings.orbit, initial_block=8))
        witness = construct_irregular_witness(*fixed_points, x0, one, depth=2, settings=settings)
        assert [e.t for e in witness.schedule] == [8, 40]


@pytest.mark.unit
class TestIrregularEstimate:
    def test_supremum_estimate(self, fixed_points, x0, one):
        witness = construct_irregular_witness(*fixed_points, x0, one, depth=8)
        estimate = irregular_supremum_estimate(x0, one, [witness])
        assert estimate.value == 1
        assert not estimate.low_depth
        assert estimate.to_dict() == {"estimate": "1", "low_depth": False, "per_witness": ["1"]}

    def test_low_depth_flag(self, fixed_points, x0, one):
        witness = construct_irregular_witness(*fixed_points, x0, one, depth=2)
        assert irregular_supremum_estimate(x0, one, [witness]).low_depth

    def test_needs_witnesses(self, x0, one):
        with pytest.raises(ValueError):
            irregular_supremum_estimate(x0, one, [])

    def test_irregular_set_nonempty(self, gm_phi, full2):
        assert irregular_set_nonempty(gm_phi)
        assert not irregular_set_nonempty(constant(full2, Fraction(2)))

    def test_witness_word_is_finite_prefix(self, fixed_points, x0, one):
        witness = construct_irregular_witness(*fixed_points, x0, one, depth=3)
        assert x0.birkhoff_sum(Word(tuple(int(s) for s in witness.word[:16]))) == 16
