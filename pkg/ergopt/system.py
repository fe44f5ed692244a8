"""
System description files.

A system spec is a YAML (or JSON) document with a versioned ``format`` field:

    format: 1
    sft:
      alphabet: 2
      allowed: [[0, 0], [0, 1], [1, 0]]     # or: builtin: golden_mean | full_shift, size: N
    potentials:
      f:   {kind: builtin, name: indicator, symbol: 1}
      phi: {kind: table, range: 1, weights: {"0": 1, "1": 0}}
      g:   {kind: linear, terms: [[1, f]], constant: 1}
      A:   {kind: cocycle, matrices: [[[2, 0], [0, 2]], [[2, 0], [0, 2]]]}
    suspension:
      roof: g
      observable: f
      phi: phi
    run:
      F: f
      PHI: phi
      alpha: "3/4"

Numbers may be integers, decimal strings or "p/q" strings; YAML floats are
read through their decimal representation, so every weight is an exact rational.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Set, Union

import jsonschema
import yaml

from ergopt.core.errors import SystemSpecError
from ergopt.core.intervals import Number, format_number, parse_number
from ergopt.core.polytope import MarkovChain, bernoulli, edge_vector_to_markov, uniform_cycle_vector
from ergopt.core.potentials import (
    CocyclePotential,
    LocallyConstantPotential,
    Potential,
    block_indicator,
    constant,
    indicator,
    perturbed_additive,
    symbol_value,
)
from ergopt.core.suspension import FlowObservable, RoofFunction
from ergopt.core.symbolic import SFT, Block, Cycle, full_shift, golden_mean_shift, validate_sft

logger = logging.getLogger(__name__)

SPEC_FORMAT = 1

SYSTEM_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["format", "sft"],
    "properties": {
        "format": {"const": SPEC_FORMAT},
        "description": {"type": "string"},
        "sft": {
            "type": "object",
            "properties": {
                "builtin": {"enum": ["golden_mean", "full_shift"]},
                "size": {"type": "integer", "minimum": 1},
                "alphabet": {"type": "integer"},
                "allowed": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "items": {"type": "integer"},
                        "minItems": 2,
                        "maxItems": 2,
                    },
                },
            },
            "additionalProperties": False,
        },
        "potentials": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["kind"],
                "properties": {
                    "kind": {"enum": ["builtin", "table", "cocycle", "linear", "perturbed_additive"]}
                },
            },
        },
        "suspension": {
            "type": "object",
            "required": ["roof"],
            "properties": {
                "roof": {"type": "string"},
                "observable": {"type": "string"},
                "phi": {"type": "string"},
            },
            "additionalProperties": False,
        },
        "run": {"type": "object"},
    },
    "additionalProperties": False,
}

ROLES = ("F", "PHI", "G", "PSI")


@dataclass
class SystemSpec:
    """A parsed system: SFT, named potentials, role mapping, run parameters."""

    sft: SFT
    potentials: Dict[str, Potential]
    run: Dict[str, Any] = field(default_factory=dict)
    suspension: Dict[str, Any] = field(default_factory=dict)
    source: Optional[Path] = None

    def potential(self, name: str) -> Potential:
        if name not in self.potentials:
            raise SystemSpecError(f"unknown potential {name!r}", name=name)
        return self.potentials[name]

    def role(self, role: str, default: Optional[str] = None) -> Potential:
        """Potential bound to F, PHI, G or PSI; G and PSI default to the constant 1."""
        name = self.run.get(role, default)
        if name is None:
            if role in ("G", "PSI"):
                return constant(self.sft, Fraction(1))
            raise SystemSpecError(f"run section does not bind role {role}", role=role)
        return self.potential(name)

    def parameter(self, key: str, default: Any = None) -> Any:
        return self.run.get(key, default)

    def roof(self) -> RoofFunction:
        if not self.suspension:
            raise SystemSpecError("spec has no suspension section")
        return RoofFunction(_require_table(self.potential(self.suspension["roof"]), "roof"))

    def observable(self, key: str) -> FlowObservable:
        name = self.suspension.get(key)
        if name is None:
            raise SystemSpecError(f"suspension section does not name {key!r}")
        return FlowObservable(_require_table(self.potential(name), key))

    def measure(self, spec: Optional[Dict[str, Any]] = None) -> MarkovChain:
        """Measure from run.measure: {cycle: [...]}, {bernoulli: [...]} or {transitions: [[...]]}."""
        spec = spec or self.run.get("measure")
        if not spec:
            raise SystemSpecError("no measure given (run.measure)")
        if "cycle" in spec:
            cycle = Cycle.of(int(s) for s in spec["cycle"])
            return edge_vector_to_markov(uniform_cycle_vector(self.sft, cycle))
        if "bernoulli" in spec:
            return bernoulli(self.sft, [to_number(p) for p in spec["bernoulli"]])
        if "transitions" in spec:
            return MarkovChain.from_transition_matrix(
                self.sft, [[to_number(p) for p in row] for row in spec["transitions"]]
            )
        raise SystemSpecError(f"unrecognised measure {spec!r}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "format": SPEC_FORMAT,
            "sft": self.sft.to_dict(),
            "potentials": {name: p.to_dict() for name, p in sorted(self.potentials.items())},
            "run": {k: _jsonable(v) for k, v in sorted(self.run.items())},
            "suspension": dict(sorted(self.suspension.items())),
        }


def _jsonable(value: Any) -> Any:
    if isinstance(value, (Fraction, float)):
        return format_number(value)
    return value


def _require_table(potential: Potential, what: str) -> LocallyConstantPotential:
    if not isinstance(potential, LocallyConstantPotential):
        raise SystemSpecError(f"{what} must be a block-weight table")
    return potential


def to_number(value: Any) -> Number:
    """Exact rational from ints, "p/q" or decimal strings, and YAML floats."""
    try:
        if isinstance(value, float):
            return parse_number(repr(value))
        return parse_number(value)
    except (ValueError, ZeroDivisionError) as e:
        raise SystemSpecError(f"invalid number {value!r}: {e}")


def _parse_block(key: Any, k: int) -> Block:
    if isinstance(key, (list, tuple)):
        return tuple(int(s) for s in key)
    if isinstance(key, int):
        if k != 1:
            raise SystemSpecError(f"block key {key!r} must be quoted for range {k}")
        return (key,)
    text = str(key).strip()
    try:
        if "," in text:
            return tuple(int(s) for s in text.split(","))
        return tuple(int(c) for c in text)
    except ValueError:
        raise SystemSpecError(f"cannot read block key {key!r}")


def _parse_sft(section: Dict[str, Any]) -> SFT:
    builtin = section.get("builtin")
    if builtin == "golden_mean":
        return golden_mean_shift()
    if builtin == "full_shift":
        return full_shift(int(section.get("size", 2)))
    if "alphabet" not in section or "allowed" not in section:
        raise SystemSpecError("sft section needs alphabet and allowed (or a builtin)")
    return validate_sft(int(section["alphabet"]), [tuple(p) for p in section["allowed"]])


class _PotentialBuilder:
    def __init__(self, sft: SFT, table: Dict[str, Dict[str, Any]]):
        self.sft = sft
        self.table = table
        self.built: Dict[str, Potential] = {}
        self.pending: Set[str] = set()

    def build(self, name: str) -> Potential:
        if name in self.built:
            return self.built[name]
        if name not in self.table:
            raise SystemSpecError(f"unknown potential {name!r}", name=name)
        if name in self.pending:
            raise SystemSpecError(f"potential {name!r} refers to itself", name=name)
        self.pending.add(name)
        entry = self.table[name]
        builder = getattr(self, f"_build_{entry['kind']}")
        potential = builder(name, entry)
        self.pending.discard(name)
        self.built[name] = potential
        return potential

    def _build_builtin(self, name: str, entry: Dict[str, Any]) -> Potential:
        kind = entry.get("name")
        if kind == "indicator":
            return indicator(self.sft, int(entry["symbol"]))
        if kind == "symbol_value":
            return symbol_value(self.sft)
        if kind == "constant":
            return constant(self.sft, to_number(entry.get("value", 1)))
        if kind == "block_indicator":
            return block_indicator(self.sft, [int(s) for s in entry["block"]])
        raise SystemSpecError(f"potential {name!r}: unknown builtin {kind!r}")

    def _build_table(self, name: str, entry: Dict[str, Any]) -> Potential:
        k = int(entry.get("range", 1))
        raw = entry.get("weights")
        if isinstance(raw, dict):
            pairs = list(raw.items())
        elif isinstance(raw, list):
            pairs = [(block, value) for block, value in raw]
        else:
            raise SystemSpecError(f"potential {name!r}: weights must be a mapping or a list of pairs")
        weights = {_parse_block(block, k): to_number(value) for block, value in pairs}
        return LocallyConstantPotential(self.sft, k, weights)

    def _build_cocycle(self, name: str, entry: Dict[str, Any]) -> Potential:
        matrices = [[[float(to_number(x)) for x in row] for row in m] for m in entry["matrices"]]
        return CocyclePotential(self.sft, tuple(matrices))

    def _build_linear(self, name: str, entry: Dict[str, Any]) -> Potential:
        result = constant(self.sft, to_number(entry.get("constant", 0)))
        for coefficient, ref in entry.get("terms", []):
            term = _require_table(self.build(ref), f"term {ref!r} of {name!r}")
            result = result + term.scale(to_number(coefficient))
        return result

    def _build_perturbed_additive(self, name: str, entry: Dict[str, Any]) -> Potential:
        base = _require_table(self.build(entry["base"]), f"base of {name!r}")
        return perturbed_additive(base, to_number(entry.get("c", 1)), to_number(entry.get("xi", "1/100")))


def parse_system(document: Dict[str, Any], source: Optional[Path] = None) -> SystemSpec:
    """Validate and build a system from an already-loaded document."""
    if not isinstance(document, dict):
        raise SystemSpecError("system spec must be a mapping")
    errors = [
        f"{'.'.join(str(p) for p in e.path) or '<root>'}: {e.message}"
        for e in jsonschema.Draft7Validator(SYSTEM_SCHEMA).iter_errors(document)
    ]
    if errors:
        raise SystemSpecError(f"invalid system spec: {errors}")

    sft = _parse_sft(document["sft"])
    builder = _PotentialBuilder(sft, document.get("potentials", {}))
    potentials = {name: builder.build(name) for name in sorted(document.get("potentials", {}))}

    run = dict(document.get("run", {}))
    for key in ("alpha",):
        if key in run:
            run[key] = to_number(run[key])
    for role in ROLES:
        if role in run and run[role] not in potentials:
            raise SystemSpecError(f"role {role} names unknown potential {run[role]!r}")

    suspension = dict(document.get("suspension", {}))
    for key, name in suspension.items():
        if name not in potentials:
            raise SystemSpecError(f"suspension {key} names unknown potential {name!r}")

    logger.debug(f"parsed system with {sft.alphabet_size} symbols and {len(potentials)} potentials")
    return SystemSpec(sft, potentials, run, suspension, source)


def load_system(path: Union[str, Path]) -> SystemSpec:
    """Load a system spec from a YAML or JSON file."""
    path = Path(path)
    if not path.exists():
        raise SystemSpecError(f"system spec not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            if path.suffix == ".json":
                document = json.load(f)
            else:
                document = yaml.safe_load(f)
    except (yaml.YAMLError, json.JSONDecodeError) as e:
        raise SystemSpecError(f"cannot parse {path}: {e}")
    return parse_system(document, path)


def role_names(spec: SystemSpec) -> List[str]:
    return [role for role in ROLES if role in spec.run]
