"""Invariant measures at edge-frequency resolution.

The polytope of nonnegative, normalized, flow-conserving edge vectors of an SFT
is the image of its invariant measures on 2-blocks; its vertices are the
uniform measures on simple cycles. lp_optimize is the single LP contract every
optimizer goes through.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ergopt.config import Settings, get_settings
from ergopt.core.errors import Infeasible, InvalidWord, NumericallyUnstable, SystemSpecError
from ergopt.core.intervals import Number, all_rational, format_number
from ergopt.core.simplex import INFEASIBLE, OPTIMAL, solve_equality_lp, solve_linear_system
from ergopt.core.symbolic import SFT, Cycle, Edge, enumerate_simple_cycles

logger = logging.getLogger(__name__)

ExtraRow = Tuple[Sequence[Number], Number]


@dataclass(frozen=True)
class EdgeFrequencyVector:
    """Frequencies aligned with sft.edges."""

    sft: SFT
    freq: Tuple[Number, ...]

    def __post_init__(self) -> None:
        if len(self.freq) != len(self.sft.edges):
            raise SystemSpecError(
                f"frequency vector has {len(self.freq)} entries for {len(self.sft.edges)} edges"
            )

    @property
    def support(self) -> Tuple[Edge, ...]:
        return tuple(e for e, f in zip(self.sft.edges, self.freq) if f > 0)

    def as_dict(self) -> Dict[Edge, Number]:
        return {e: f for e, f in zip(self.sft.edges, self.freq) if f != 0}

    def outflow(self) -> List[Number]:
        out: List[Number] = [0] * self.sft.alphabet_size
        for (a, _), f in zip(self.sft.edges, self.freq):
            out[a] += f
        return out

    def inflow(self) -> List[Number]:
        inc: List[Number] = [0] * self.sft.alphabet_size
        for (_, b), f in zip(self.sft.edges, self.freq):
            inc[b] += f
        return inc

    def flow_violation(self) -> Number:
        """Largest |inflow - outflow| over vertices."""
        return max(abs(i - o) for i, o in zip(self.inflow(), self.outflow()))

    def is_feasible(self, tol: float = 0.0) -> bool:
        if any(f < -tol for f in self.freq):
            return False
        return abs(sum(self.freq) - 1) <= tol and self.flow_violation() <= tol

    def mix(self, other: "EdgeFrequencyVector", t: Number) -> "EdgeFrequencyVector":
        """t * self + (1 - t) * other."""
        if other.sft != self.sft:
            raise SystemSpecError("cannot mix vectors on different SFTs")
        return EdgeFrequencyVector(
            self.sft, tuple(t * a + (1 - t) * b for a, b in zip(self.freq, other.freq))
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "edges": [
                [list(self.sft.edge_block(e)), format_number(f)]
                for e, f in zip(self.sft.edges, self.freq)
                if f != 0
            ]
        }


@dataclass
class LPOutcome:
    value: Optional[Number]
    solution: Optional[EdgeFrequencyVector]
    status: str
    certificate: Tuple[Number, ...] = ()
    mode: str = "exact"
    basis: Tuple[int, ...] = ()
    clamped: bool = False
    clamped_rhs: Optional[Number] = None

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "status": self.status,
            "mode": self.mode,
            "value": format_number(self.value) if self.value is not None else None,
        }
        if self.solution is not None:
            result["solution"] = self.solution.to_dict()
        if self.clamped:
            result["clamped_rhs"] = format_number(self.clamped_rhs)
        return result


@dataclass(frozen=True)
class MarkovChain:
    """Stationary Markov chain on the vertices of an SFT."""

    sft: SFT
    transitions: Dict[Edge, Number] = field(hash=False)
    stationary: Tuple[Number, ...]

    @classmethod
    def from_transition_matrix(cls, sft: SFT, matrix: Sequence[Sequence[Number]]) -> "MarkovChain":
        """Chain with the given row-stochastic matrix and its unique stationary law."""
        n = sft.alphabet_size
        if len(matrix) != n or any(len(row) != n for row in matrix):
            raise SystemSpecError(f"transition matrix must be {n}x{n}")
        transitions: Dict[Edge, Number] = {}
        for a, row in enumerate(matrix):
            if any(p < 0 for p in row):
                raise SystemSpecError(f"negative transition probability in row {a}")
            if abs(sum(row) - 1) > 1e-12:
                raise SystemSpecError(f"row {a} of transition matrix does not sum to 1")
            for b, p in enumerate(row):
                if p != 0:
                    if (a, b) not in sft.allowed:
                        raise SystemSpecError(f"transition {a}->{b} has mass but is not allowed")
                    transitions[(a, b)] = p
        entries = [p for row in matrix for p in row]
        if all_rational(entries):
            # pi (P - I) = 0 with sum(pi) = 1, written column-wise
            A = [[Fraction(matrix[a][b]) - (1 if a == b else 0) for a in range(n)] for b in range(n)]
            A.append([Fraction(1)] * n)
            try:
                pi: Sequence[Number] = solve_linear_system(A, [0] * n + [1])
            except ValueError as e:
                raise SystemSpecError(f"no unique stationary distribution: {e}")
        else:
            P = np.array(matrix, dtype=float)
            A_np = np.vstack([P.T - np.eye(n), np.ones(n)])
            b_np = np.zeros(n + 1)
            b_np[-1] = 1.0
            pi = [float(v) for v in np.linalg.lstsq(A_np, b_np, rcond=None)[0]]
        return cls(sft, transitions, tuple(pi))

    def probability(self, edge: Edge) -> Number:
        return self.transitions.get(edge, 0)

    def transition_matrix(self) -> np.ndarray:
        n = self.sft.alphabet_size
        P = np.zeros((n, n))
        for (a, b), p in self.transitions.items():
            P[a, b] = float(p)
        return P

    def path_probability(self, path: Sequence[int]) -> Number:
        p = self.stationary[path[0]]
        for e in zip(path, path[1:]):
            if p == 0:
                break
            p = p * self.transitions.get(e, 0)
        return p

    def to_edge_frequencies(self) -> EdgeFrequencyVector:
        return EdgeFrequencyVector(
            self.sft,
            tuple(self.stationary[a] * self.transitions.get((a, b), 0) for a, b in self.sft.edges),
        )

    def sample_path(self, length: int, rng: np.random.Generator) -> np.ndarray:
        """Vertex path with length vertices, started from the stationary law."""
        P = self.transition_matrix()
        pi = np.array([float(p) for p in self.stationary])
        cumulative = np.cumsum(P, axis=1)
        path = np.empty(length, dtype=np.int64)
        path[0] = rng.choice(len(pi), p=pi / pi.sum())
        draws = rng.random(max(length - 1, 0))
        for i in range(1, length):
            row = cumulative[path[i - 1]]
            path[i] = min(int(np.searchsorted(row, draws[i - 1] * row[-1], side="right")), len(row) - 1)
        return path

    def to_dict(self) -> Dict[str, Any]:
        return {
            "transitions": [[a, b, format_number(p)] for (a, b), p in sorted(self.transitions.items())],
            "stationary": [format_number(p) for p in self.stationary],
        }


def flow_rows(sft: SFT) -> List[List[int]]:
    """One conservation row per vertex: outflow minus inflow."""
    rows = [[0] * len(sft.edges) for _ in range(sft.alphabet_size)]
    for j, (a, b) in enumerate(sft.edges):
        if a != b:
            rows[a][j] += 1
            rows[b][j] -= 1
    return rows


def choose_mode(sft: SFT, data: Sequence[Number], settings: Optional[Settings] = None) -> str:
    """exact for small rational instances, float otherwise (unless forced by config)."""
    numerics = (settings or get_settings()).numerics
    if numerics.arithmetic != "auto":
        return numerics.arithmetic
    if len(sft.edges) <= numerics.exact_edge_limit and all_rational(data):
        return "exact"
    return "float"


def _polytope_system(
    sft: SFT, extra_eq: Sequence[ExtraRow]
) -> Tuple[List[List[Number]], List[Number]]:
    A: List[List[Number]] = [list(r) for r in flow_rows(sft)]
    b: List[Number] = [0] * sft.alphabet_size
    A.append([1] * len(sft.edges))
    b.append(1)
    for weights, rhs in extra_eq:
        if len(weights) != len(sft.edges):
            raise SystemSpecError("extra constraint must weight every edge")
        A.append(list(weights))
        b.append(rhs)
    return A, b


def lp_optimize(
    sft: SFT,
    objective: Sequence[Number],
    sense: str = "max",
    extra_eq: Sequence[ExtraRow] = (),
    mode: Optional[str] = None,
    settings: Optional[Settings] = None,
    warm_basis: Optional[Sequence[int]] = None,
) -> LPOutcome:
    """Optimize an edge objective over the invariant edge-frequency polytope."""
    settings = settings or get_settings()
    if len(objective) != len(sft.edges):
        raise SystemSpecError(
            f"objective has {len(objective)} weights for {len(sft.edges)} edges"
        )
    data = list(objective) + [v for w, r in extra_eq for v in list(w) + [r]]
    mode = mode or choose_mode(sft, data, settings)
    numerics = settings.numerics

    A, b = _polytope_system(sft, extra_eq)
    raw = solve_equality_lp(
        A, b, objective, sense=sense, mode=mode,
        tol=numerics.float_tolerance, max_pivots=numerics.max_pivots, warm_basis=warm_basis,
    )

    if raw.status == INFEASIBLE:
        return _resolve_infeasible(sft, objective, sense, extra_eq, mode, settings)
    if raw.status != OPTIMAL:
        raise NumericallyUnstable(f"LP over the invariant polytope reported {raw.status}")

    return LPOutcome(
        value=raw.value,
        solution=EdgeFrequencyVector(sft, tuple(raw.x)),
        status=raw.status,
        certificate=tuple(raw.duals),
        mode=raw.mode,
        basis=raw.basis,
    )


def _resolve_infeasible(
    sft: SFT,
    objective: Sequence[Number],
    sense: str,
    extra_eq: Sequence[ExtraRow],
    mode: str,
    settings: Settings,
) -> LPOutcome:
    if len(extra_eq) != 1:
        raise Infeasible("constraints admit no invariant measure")
    weights, rhs = extra_eq[0]
    lo = lp_optimize(sft, weights, "min", mode=mode, settings=settings).value
    hi = lp_optimize(sft, weights, "max", mode=mode, settings=settings).value
    tol = settings.numerics.clamp_tolerance
    if lo - tol <= rhs <= hi + tol:
        clamped = lo if rhs < lo else hi
        logger.warning(f"constraint rhs {float(rhs):.12g} clamped to feasible endpoint {float(clamped):.12g}")
        outcome = lp_optimize(sft, objective, sense, [(weights, clamped)], mode=mode, settings=settings)
        outcome.clamped = True
        outcome.clamped_rhs = clamped
        return outcome
    raise Infeasible(
        f"constraint value {format_number(rhs)} outside feasible interval "
        f"[{format_number(lo)}, {format_number(hi)}]",
        feasible_interval=(lo, hi),
    )


def vertex_to_cycle(solution: EdgeFrequencyVector) -> Optional[Cycle]:
    """The simple cycle carrying a vertex solution, projected to base symbols.

    None when the support is not a single simple cycle with equal weights.
    """
    support = solution.support
    if not support:
        return None
    succ: Dict[int, int] = {}
    for a, b in support:
        if a in succ:
            return None
        succ[a] = b
    if len(set(succ.values())) != len(succ):
        return None

    start = min(succ)
    path = [start]
    while True:
        nxt = succ[path[-1]]
        if nxt == start:
            break
        if nxt not in succ or nxt in path:
            return None
        path.append(nxt)
    if len(path) != len(succ):
        return None

    weights = {f for f in solution.freq if f > 0}
    if len(weights) > 1 and max(weights) - min(weights) > 1e-12:
        return None
    return Cycle.of(path).project(solution.sft)


def edge_vector_to_markov(solution: EdgeFrequencyVector) -> MarkovChain:
    """Chain with p(a->b) = freq(a->b) / outflow(a) on the support."""
    outflow = solution.outflow()
    transitions: Dict[Edge, Number] = {}
    for (a, b), f in zip(solution.sft.edges, solution.freq):
        if f > 0:
            transitions[(a, b)] = f / outflow[a]
    return MarkovChain(solution.sft, transitions, tuple(outflow))


def uniform_cycle_vector(sft: SFT, cycle: Cycle) -> EdgeFrequencyVector:
    """Uniform edge frequencies along a cycle of sft (edges counted with multiplicity)."""
    if not cycle.is_closed_in(sft):
        raise InvalidWord(f"cycle {cycle.to_list()} is not closed in the SFT")
    share = Fraction(1, len(cycle))
    freq: List[Number] = [Fraction(0)] * len(sft.edges)
    for e in cycle.edges:
        freq[sft.edge_index[e]] += share
    return EdgeFrequencyVector(sft, tuple(freq))


def bernoulli(sft: SFT, probabilities: Sequence[Number]) -> MarkovChain:
    """Product measure on a full shift."""
    n = sft.alphabet_size
    if len(probabilities) != n:
        raise SystemSpecError(f"need {n} symbol probabilities, got {len(probabilities)}")
    if len(sft.allowed) != n * n:
        raise SystemSpecError("Bernoulli measures need a full shift")
    if any(p < 0 for p in probabilities) or abs(sum(probabilities) - 1) > 1e-12:
        raise SystemSpecError("symbol probabilities must be nonnegative and sum to 1")
    transitions = {(a, b): probabilities[b] for a in range(n) for b in range(n) if probabilities[b] != 0}
    return MarkovChain(sft, transitions, tuple(probabilities))


def edge_expectation(vector: EdgeFrequencyVector, weights: Sequence[Number]) -> Number:
    return sum((w * f for w, f in zip(weights, vector.freq)), Fraction(0) if all_rational(weights) else 0.0)


def cycle_mean(sft: SFT, cycle: Cycle, weights: Sequence[Number]) -> Number:
    total = sum(weights[sft.edge_index[e]] for e in cycle.edges)
    if all_rational([total]):
        return Fraction(total, len(cycle))
    return total / len(cycle)


@dataclass
class OptimalFace:
    """Optimal value of an unconstrained edge LP and the ergodic vertices attaining it."""

    value: Number
    cycles: List[Cycle]
    vertices: List[EdgeFrequencyVector]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": format_number(self.value),
            "cycles": [c.to_list() for c in self.cycles],
        }


def optimal_face(
    sft: SFT,
    objective: Sequence[Number],
    sense: str = "max",
    settings: Optional[Settings] = None,
) -> OptimalFace:
    """All simple cycles whose uniform measure is optimal, i.e. the vertices of the face."""
    outcome = lp_optimize(sft, objective, sense, settings=settings)
    tol = 0 if outcome.mode == "exact" else (settings or get_settings()).numerics.float_tolerance
    cycles = []
    vertices = []
    for cycle in enumerate_simple_cycles(sft, sft.alphabet_size, settings):
        if abs(cycle_mean(sft, cycle, objective) - outcome.value) <= tol:
            cycles.append(cycle)
            vertices.append(uniform_cycle_vector(sft, cycle))
    return OptimalFace(outcome.value, cycles, vertices)
