"""Tests for system-spec loading and validation."""

import json
from fractions import Fraction

import pytest

from ergopt.core.errors import IncompleteWeightTable, SingularMatrix, SpecError, StrandedSymbol, SystemSpecError
from ergopt.core.potentials import CocyclePotential, LocallyConstantPotential, SequencePotential
from ergopt.system import load_system, parse_system, role_names, to_number


def minimal(**overrides):
    document = {
        "format": 1,
        "sft": {"builtin": "golden_mean"},
        "potentials": {"f": {"kind": "builtin", "name": "indicator", "symbol": 1}},
        "run": {"F": "f"},
    }
    document.update(overrides)
    return document


@pytest.mark.unit
class TestExampleSystems:
    def test_golden_mean(self, systems_dir, golden_mean):
        system = load_system(systems_dir / "golden_mean.yaml")
        assert system.sft == golden_mean
        assert sorted(system.potentials) == ["f", "pair", "phi"]
        assert system.run["alpha"] == Fraction(3, 4)
        assert system.potential("pair").weights[(0, 0)] == Fraction(1, 3)
        assert role_names(system) == ["F", "PHI"]

    def test_decimal_alpha_is_exact(self, systems_dir):
        assert load_system(systems_dir / "gm_f1_phi0.yaml").run["alpha"] == Fraction(3, 4)

    def test_every_example_loads(self, systems_dir):
        for path in sorted(systems_dir.glob("*.yaml")):
            assert load_system(path).source == path

    def test_linear_roof(self, systems_dir):
        system = load_system(systems_dir / "suspension_golden_mean.yaml")
        assert system.roof().potential.weights == {(0,): 2, (1,): 1}
        assert system.observable("phi").fiber_integrated == system.potential("mark0")

    def test_cocycle(self, systems_dir):
        system = load_system(systems_dir / "diagonal_cocycle.yaml")
        assert isinstance(system.role("F"), CocyclePotential)


@pytest.mark.unit
class TestNumbers:
    def test_to_number(self):
        assert to_number("3/4") == Fraction(3, 4)
        assert to_number("0.75") == Fraction(3, 4)
        assert to_number(0.1) == Fraction(1, 10)
        assert to_number(2) == 2

    @pytest.mark.parametrize("bad", ["abc", "1/0", True])
    def test_bad_numbers(self, bad):
        with pytest.raises(SystemSpecError):
            to_number(bad)


@pytest.mark.unit
class TestParsing:
    def test_explicit_sft(self):
        document = minimal(sft={"alphabet": 2, "allowed": [[0, 0], [0, 1], [1, 0]]})
        assert parse_system(document).sft.edges == ((0, 0), (0, 1), (1, 0))

    def test_stranded_symbol(self):
        document = minimal(sft={"alphabet": 2, "allowed": [[0, 0], [0, 1]]})
        with pytest.raises(StrandedSymbol):
            parse_system(document)

    def test_wrong_format_version(self):
        with pytest.raises(SystemSpecError):
            parse_system(minimal(format=2))

    def test_unknown_section(self):
        with pytest.raises(SystemSpecError):
            parse_system(minimal(extras={}))

    def test_not_a_mapping(self):
        with pytest.raises(SystemSpecError):
            parse_system(["format", 1])

    @pytest.mark.parametrize("key", ["0,1", [0, 1], "01"])
    def test_block_keys(self, key):
        potentials = {"p": {"kind": "table", "range": 2, "weights": [[key, 1], ["00", 0], ["10", 0]]}}
        system = parse_system(minimal(potentials=potentials, run={}))
        assert system.potential("p").weights[(0, 1)] == 1

    def test_unquoted_key_needs_range_one(self):
        potentials = {"p": {"kind": "table", "range": 2, "weights": {1: 0}}}
        with pytest.raises(SystemSpecError):
            parse_system(minimal(potentials=potentials, run={}))

    def test_incomplete_table(self):
        potentials = {"p": {"kind": "table", "range": 1, "weights": {"0": 1}}}
        with pytest.raises(IncompleteWeightTable):
            parse_system(minimal(potentials=potentials, run={}))

    def test_singular_cocycle(self):
        potentials = {"A": {"kind": "cocycle", "matrices": [[[1, 0], [0, 1]], [[1, 1], [1, 1]]]}}
        with pytest.raises(SingularMatrix):
            parse_system(minimal(potentials=potentials, run={}))

    def test_linear_combination(self):
        potentials = {
            "f": {"kind": "builtin", "name": "indicator", "symbol": 1},
            "g": {"kind": "linear", "constant": "1/2", "terms": [[2, "f"]]},
        }
        system = parse_system(minimal(potentials=potentials))
        assert system.potential("g").weights == {(0,): Fraction(1, 2), (1,): Fraction(5, 2)}

    def test_self_reference(self):
        potentials = {"g": {"kind": "linear", "terms": [[1, "g"]]}}
        with pytest.raises(SystemSpecError):
            parse_system(minimal(potentials=potentials, run={}))

    def test_perturbed_additive(self):
        potentials = {
            "f": {"kind": "builtin", "name": "indicator", "symbol": 1},
            "s": {"kind": "perturbed_additive", "base": "f", "c": 3, "xi": "1/1000"},
        }
        system = parse_system(minimal(potentials=potentials))
        seq = system.potential("s")
        assert isinstance(seq, SequencePotential)
        assert seq.best_approximant() == (system.potential("f"), Fraction(1, 1000))

    def test_unknown_builtin(self):
        potentials = {"f": {"kind": "builtin", "name": "sawtooth"}}
        with pytest.raises(SystemSpecError):
            parse_system(minimal(potentials=potentials))

    def test_role_names_unknown_potential(self):
        with pytest.raises(SystemSpecError):
            parse_system(minimal(run={"F": "missing"}))

    def test_suspension_names_unknown_potential(self):
        with pytest.raises(SystemSpecError):
            parse_system(minimal(suspension={"roof": "missing"}))


@pytest.mark.unit
class TestSystemSpec:
    def test_role_defaults(self, golden_mean):
        system = parse_system(minimal())
        denominator = system.role("G")
        assert isinstance(denominator, LocallyConstantPotential)
        assert denominator.min_weight == 1
        with pytest.raises(SystemSpecError):
            system.role("PHI")
        assert system.role("PHI", "f") == system.potential("f")

    def test_measures(self):
        system = parse_system(minimal(sft={"builtin": "full_shift", "size": 2}))
        assert system.measure({"cycle": [0, 1]}).stationary == (Fraction(1, 2), Fraction(1, 2))
        assert system.measure({"bernoulli": ["1/3", "2/3"]}).stationary == (Fraction(1, 3), Fraction(2, 3))
        chain = system.measure({"transitions": [["1/2", "1/2"], [1, 0]]})
        assert chain.stationary == (Fraction(2, 3), Fraction(1, 3))

    def test_missing_measure(self):
        with pytest.raises(SystemSpecError):
            parse_system(minimal()).measure()

    def test_no_suspension(self):
        with pytest.raises(SystemSpecError):
            parse_system(minimal()).roof()

    def test_to_dict(self, systems_dir):
        payload = load_system(systems_dir / "golden_mean.yaml").to_dict()
        assert payload["run"]["alpha"] == "3/4"
        assert payload["potentials"]["pair"]["weights"] == {"00": "1/3", "01": "1", "10": "0"}
        json.dumps(payload)


@pytest.mark.unit
class TestLoading:
    def test_missing_file(self, temp_dir):
        with pytest.raises(SystemSpecError) as info:
            load_system(temp_dir / "absent.yaml")
        assert info.value.exit_code == 2

    def test_bad_yaml(self, temp_dir):
        path = temp_dir / "broken.yaml"
        path.write_text("format: [1\n")
        with pytest.raises(SystemSpecError):
            load_system(path)

    def test_json_spec(self, temp_dir):
        path = temp_dir / "system.json"
        path.write_text(json.dumps(minimal()))
        assert load_system(path).role("F").weights == {(0,): 0, (1,): 1}

    def test_spec_writer_round_trip(self, spec_writer):
        path = spec_writer(minimal(run={"F": "f", "alpha": 0.25}))
        assert load_system(path).run["alpha"] == Fraction(1, 4)

    def test_errors_are_spec_errors(self):
        assert issubclass(SystemSpecError, SpecError)
