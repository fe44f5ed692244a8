"""Pointwise side: finite-horizon maxima, empirical traces and irregular points.

Long words are handled as numpy symbol arrays; Birkhoff sums of locally
constant potentials along them are prefix sums over block codes, kept exact
(integer numerators over a common denominator) when the weights are rational.
"""
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ergopt.config import Settings, get_settings
from ergopt.core.errors import (
    BudgetExceeded,
    HorizonTooLarge,
    InvalidParameter,
    InvalidWord,
    NotMixing,
    PotentialMismatch,
    TargetsIndistinguishable,
    WordTooShort,
)
from ergopt.core.intervals import Number, format_number, is_rational
from ergopt.core.polytope import EdgeFrequencyVector, MarkovChain, edge_vector_to_markov
from ergopt.core.potentials import (
    CocyclePotential,
    LocallyConstantPotential,
    Potential,
    SequencePotential,
    lp_presentation,
    measure_average,
)
from ergopt.core.symbolic import SFT, Word, allowed_blocks, shortest_connector

logger = logging.getLogger(__name__)

Measure = Union[MarkovChain, EdgeFrequencyVector]


def _as_chain(measure: Measure) -> MarkovChain:
    return edge_vector_to_markov(measure) if isinstance(measure, EdgeFrequencyVector) else measure


# finite horizon


@dataclass
class HorizonResult:
    """(1/n) max_x f_n(x) and, for cocycles, the certified bound min_j (1/j) max f_j."""

    n: int
    value: Number
    word: Tuple[int, ...]
    upper_bound: Optional[Number] = None
    exact: bool = True

    def to_dict(self) -> Dict[str, Any]:
        result = {
            "n": self.n,
            "value": format_number(self.value),
            "word": list(self.word),
            "exact": self.exact,
        }
        if self.upper_bound is not None:
            result["upper_bound"] = format_number(self.upper_bound)
        return result


def _max_weight_walk(sft: SFT, weights: Sequence[Number], n: int) -> Tuple[Number, List[int]]:
    """Max-plus DP: heaviest walk with n edges, returned as its vertex path."""
    incoming: List[List[Tuple[int, Number]]] = [[] for _ in range(sft.alphabet_size)]
    for (u, v), w in zip(sft.edges, weights):
        incoming[v].append((u, w))
    zero = weights[0] * 0
    best = [zero] * sft.alphabet_size
    back: List[List[int]] = []
    for _ in range(n):
        row, arg = [], []
        for v in range(sft.alphabet_size):
            u, val = max(((u, best[u] + w) for u, w in incoming[v]), key=lambda p: (p[1], -p[0]))
            row.append(val)
            arg.append(u)
        best = row
        back.append(arg)
    end = max(range(sft.alphabet_size), key=lambda v: (best[v], -v))
    path = [end]
    for arg in reversed(back):
        path.append(arg[path[-1]])
    return best[end], path[::-1]


def _locally_constant_horizon(potential: LocallyConstantPotential, n: int) -> HorizonResult:
    sft = lp_presentation(potential)
    total, path = _max_weight_walk(sft, potential.edge_weights(sft), n)
    value = Fraction(total, n) if is_rational(total) else total / n
    word = sft.path_word(path)[:n + potential.range - 1]
    return HorizonResult(n, value, tuple(word))


def _cocycle_horizon(potential: CocyclePotential, n: int, settings: Settings) -> HorizonResult:
    """Branch and bound over words, pruning with ||A_rest P|| <= exp(M_rest) ||P||."""
    cap = settings.budgets.cocycle_horizon_cap
    if n > cap:
        raise HorizonTooLarge(f"cocycle horizon {n} exceeds cap {cap}", n=n, cap=cap)
    sft = potential.sft
    budget = settings.budgets.bnb_node_budget
    nodes = 0
    M: List[float] = [0.0]
    best_words: List[Tuple[int, ...]] = [()]

    for length in range(1, n + 1):
        best = -math.inf
        best_word: Tuple[int, ...] = ()
        stack = [((s,), potential.matrices[s]) for s in range(sft.alphabet_size)]
        while stack:
            word, P = stack.pop()
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"branch and bound exceeded {budget} nodes", budget=budget)
            log_norm = math.log(np.linalg.norm(P, ord=2))
            if len(word) == length:
                if log_norm > best or (log_norm == best and word < best_word):
                    best, best_word = log_norm, word
                continue
            if log_norm + M[length - len(word)] < best - 1e-12:
                continue
            for s in sft.successors[word[-1]]:
                stack.append((word + (s,), potential.matrices[s] @ P))
        M.append(best)
        best_words.append(best_word)
        logger.debug(f"max f_{length} = {best:.6g}")

    upper = min(M[j] / j for j in range(1, n + 1))
    return HorizonResult(n, M[n] / n, best_words[n], upper_bound=upper, exact=False)


def _sequence_horizon(potential: SequencePotential, n: int, settings: Settings) -> HorizonResult:
    cap = settings.budgets.word_enumeration_cap
    words = allowed_blocks(potential.sft, n) if potential.sft.alphabet_size ** n <= cap * 16 else None
    if words is None or len(words) > cap:
        raise HorizonTooLarge(f"more than {cap} words of length {n}", n=n, cap=cap)
    best_word = max(words, key=lambda w: (potential.birkhoff_sum(Word(w)), [-s for s in w]))
    value = potential.birkhoff_sum(Word(best_word))
    return HorizonResult(n, value / n if not is_rational(value) else Fraction(value, n), tuple(best_word), exact=False)


def finite_horizon_max(
    potential: Potential, n: int, settings: Optional[Settings] = None
) -> HorizonResult:
    """(1/n) max_x f_n(x)."""
    settings = settings or get_settings()
    if n < 1:
        raise WordTooShort(n, 1)
    if isinstance(potential, LocallyConstantPotential):
        if n < potential.range:
            raise WordTooShort(n, potential.range)
        return _locally_constant_horizon(potential, n)
    if isinstance(potential, CocyclePotential):
        return _cocycle_horizon(potential, n, settings)
    if isinstance(potential, SequencePotential):
        return _sequence_horizon(potential, n, settings)
    raise PotentialMismatch(f"unsupported potential {type(potential).__name__}")


def finite_horizon_ratio_max(
    F: LocallyConstantPotential, G: LocallyConstantPotential, n: int, max_iter: int = 1000
) -> HorizonResult:
    """max_x S_n f(x) / S_n g(x) for g > 0, by Dinkelbach over the max-plus DP."""
    if G.min_weight <= 0:
        raise PotentialMismatch("denominator potential must be positive")
    sft = lp_presentation(F, G)
    num, den = F.edge_weights(sft), G.edge_weights(sft)

    def walk_ratio(path: Sequence[int]) -> Number:
        idx = sft.edge_index
        edges = [idx[e] for e in zip(path, path[1:])]
        a, b = sum(num[i] for i in edges), sum(den[i] for i in edges)
        return Fraction(a) / Fraction(b) if is_rational(a) and is_rational(b) else a / b

    _, path = _max_weight_walk(sft, num, n)
    lam = walk_ratio(path)
    for _ in range(max_iter):
        value, candidate = _max_weight_walk(sft, [a - lam * b for a, b in zip(num, den)], n)
        if value <= 0 or (not is_rational(value) and value <= 1e-12):
            word = sft.path_word(path)[:n + max(F.range, G.range) - 1]
            return HorizonResult(n, lam, tuple(word))
        path, lam = candidate, walk_ratio(candidate)
    raise HorizonTooLarge(f"ratio iteration did not settle in {max_iter} steps")


# empirical traces


def _block_codes(symbols: np.ndarray, k: int, alphabet: int) -> np.ndarray:
    count = len(symbols) - k + 1
    codes = np.zeros(max(count, 0), dtype=np.int64)
    for j in range(k):
        codes = codes * alphabet + symbols[j:j + count]
    return codes


def birkhoff_prefix_sums(potential: LocallyConstantPotential, symbols: np.ndarray) -> Tuple[np.ndarray, int]:
    """cum[i] = D * S_i f along symbols (blocks fully inside), and the denominator D."""
    k, alphabet = potential.range, potential.sft.alphabet_size
    codes = _block_codes(symbols, k, alphabet)
    if potential.is_rational:
        denom = 1
        for w in potential.weights.values():
            denom = denom * Fraction(w).denominator // math.gcd(denom, Fraction(w).denominator)
        scaled = {block: int(Fraction(w) * denom) for block, w in potential.weights.items()}
        largest = max((abs(v) for v in scaled.values()), default=0)
        # the running sum must stay inside int64; otherwise use Python ints
        dtype = np.int64 if largest * max(len(symbols), 1) <= np.iinfo(np.int64).max else object
        table = np.zeros(alphabet ** k, dtype=np.int64).astype(dtype)
        for block, v in scaled.items():
            table[_block_codes(np.array(block), k, alphabet)[0]] = v
    else:
        denom = 1
        table = np.zeros(alphabet ** k, dtype=float)
        for block, w in potential.weights.items():
            table[_block_codes(np.array(block), k, alphabet)[0]] = float(w)
    return np.concatenate([np.zeros(1, dtype=table.dtype), np.cumsum(table[codes])]), denom


def _average_at(cum: np.ndarray, denom: int, n: int) -> Number:
    n = min(n, len(cum) - 1)
    if cum.dtype != float:
        return Fraction(int(cum[n]), denom * n)
    return float(cum[n]) / n


def ratio_at(num: Tuple[np.ndarray, int], den: Tuple[np.ndarray, int], n: int) -> Number:
    a, b = _average_at(*num, n), _average_at(*den, n)
    return a / b


@dataclass
class Checkpoint:
    n: int
    delta: EdgeFrequencyVector
    averages: Dict[str, Number] = field(default_factory=dict)


@dataclass
class EmpiricalTrace:
    """Sampled orbit segment with empirical measures at checkpoints."""

    word: Word
    checkpoints: List[Checkpoint]
    seed: int

    def to_dataframe(self) -> pd.DataFrame:
        rows = []
        for c in self.checkpoints:
            row: Dict[str, Any] = {"n": c.n}
            row.update({name: format_number(v) for name, v in sorted(c.averages.items())})
            rows.append(row)
        return pd.DataFrame(rows)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "length": len(self.word),
            "seed": self.seed,
            "checkpoints": [
                {"n": c.n, "averages": {k: format_number(v) for k, v in sorted(c.averages.items())}}
                for c in self.checkpoints
            ],
        }


def _checkpoint_lengths(n: int) -> List[int]:
    lengths = [1 << j for j in range(n.bit_length()) if (1 << j) <= n]
    if lengths[-1] != n:
        lengths.append(n)
    return lengths


def _sample_symbols(chain: MarkovChain, vertices: int, rng: np.random.Generator) -> np.ndarray:
    """Vertex path; deterministic chains are tiled instead of stepped."""
    out_degree: Dict[int, int] = {}
    for a, _ in chain.transitions:
        out_degree[a] = out_degree.get(a, 0) + 1
    if out_degree and all(d == 1 for d in out_degree.values()):
        successor = {a: b for (a, b) in chain.transitions}
        pi = np.array([float(p) for p in chain.stationary])
        start = int(rng.choice(len(pi), p=pi / pi.sum()))
        cycle = [start]
        while successor[cycle[-1]] != start:
            cycle.append(successor[cycle[-1]])
        reps = vertices // len(cycle) + 1
        return np.tile(np.array(cycle, dtype=np.int64), reps)[:vertices]
    return chain.sample_path(vertices, rng)


def _base_symbols(sft: SFT, path: np.ndarray) -> np.ndarray:
    first = np.array([label[0] for label in sft.labels], dtype=np.int64)
    return first[path]


def sample_generic_word(
    measure: Measure,
    n: int,
    seed: int = 0,
    potentials: Optional[Mapping[str, LocallyConstantPotential]] = None,
) -> EmpiricalTrace:
    """Run the stationary chain for n transitions; checkpoints at powers of 2 and n."""
    if n < 1:
        raise InvalidParameter("n must be at least 1", n=n)
    chain = _as_chain(measure)
    sft = chain.sft
    potentials = dict(potentials or {})
    lookahead = max([p.range for p in potentials.values()] + [1])
    rng = np.random.default_rng(seed)
    path = _sample_symbols(chain, n + lookahead, rng)
    symbols = _base_symbols(sft, path)

    edge_id = np.full((sft.alphabet_size, sft.alphabet_size), -1, dtype=np.int64)
    for i, (a, b) in enumerate(sft.edges):
        edge_id[a, b] = i
    steps = edge_id[path[:n], path[1:n + 1]]
    sums = {name: birkhoff_prefix_sums(p, symbols) for name, p in potentials.items()}

    checkpoints = []
    for c in _checkpoint_lengths(n):
        counts = np.bincount(steps[:c], minlength=len(sft.edges))
        delta = EdgeFrequencyVector(sft, tuple(Fraction(int(k), c) for k in counts))
        averages = {name: _average_at(*cum, c) for name, cum in sums.items()}
        checkpoints.append(Checkpoint(c, delta, averages))
    word = Word(tuple(int(s) for s in sft.path_word(path[:n + 1].tolist())))
    return EmpiricalTrace(word, checkpoints, seed)


def verify_level_set_membership(
    trace: EmpiricalTrace,
    Phi: LocallyConstantPotential,
    Psi: LocallyConstantPotential,
    alpha: Number,
    tol: float,
) -> Dict[str, Any]:
    """Report on |phi_n / psi_n - alpha| along the trace's checkpoints."""
    if len(trace.checkpoints) < 3:
        raise InvalidParameter("need at least 3 checkpoints")
    symbols = np.array(trace.word.symbols, dtype=np.int64)
    num, den = birkhoff_prefix_sums(Phi, symbols), birkhoff_prefix_sums(Psi, symbols)
    deviations = [(c.n, abs(ratio_at(num, den, c.n) - alpha)) for c in trace.checkpoints]
    values = [d for _, d in deviations]
    third = max(1, len(values) // 3)
    settling = max(values[-third:]) <= max(values[:third])
    final = values[-1]
    passed = final <= tol and settling
    if not passed:
        logger.info(f"level-set check failed: final deviation {float(final):.4g}, tol {tol}")
    return {
        "passed": passed,
        "alpha": format_number(alpha),
        "final_deviation": float(final),
        "eventually_decreasing": settling,
        "deviations": [[n, float(d)] for n, d in deviations],
    }


# irregular points


@dataclass(frozen=True)
class ScheduleEntry:
    k: int
    N: int
    m: int
    t: int
    rho: int


@dataclass
class IrregularWitness:
    """Finite word alternating long generic blocks of two measures."""

    word: np.ndarray
    schedule: List[ScheduleEntry]
    targets: Tuple[MarkovChain, MarkovChain]
    target_values: Tuple[Number, Number]
    oscillation_record: List[Tuple[int, int, Number]]
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def depth(self) -> int:
        return len(self.schedule)

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{"k": k, "t_k": t, "ratio": float(r)} for k, t, r in self.oscillation_record],
            columns=["k", "t_k", "ratio"],
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "length": int(len(self.word)),
            "prefix": [int(s) for s in self.word[:64]],
            "schedule": [
                {"k": e.k, "N_k": e.N, "m_k": e.m, "t_k": e.t, "rho": e.rho} for e in self.schedule
            ],
            "target_values": [format_number(v) for v in self.target_values],
            "oscillation_record": [
                {"k": k, "t_k": t, "ratio": format_number(r)} for k, t, r in self.oscillation_record
            ],
            "metadata": self.metadata,
        }


def _check_word(sft: SFT, symbols: np.ndarray) -> None:
    A = sft.adjacency_matrix()
    bad = np.flatnonzero(A[symbols[:-1], symbols[1:]] == 0)
    if len(bad):
        i = int(bad[0])
        raise InvalidWord(f"constructed word breaks at position {i}", position=i)


def construct_irregular_witness(
    mu1: Measure,
    mu2: Measure,
    Phi: LocallyConstantPotential,
    Psi: LocallyConstantPotential,
    depth: int = 8,
    growth_factor: Optional[int] = None,
    seed: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> IrregularWitness:
    """Alternate generic blocks of mu1 (odd k) and mu2 (even k), bridged by connecting words.

    N_1 = initial_block, N_{k+1} = growth_factor * t_k, t_k = t_{k-1} + m_k + N_k.
    """
    settings = settings or get_settings()
    growth = growth_factor or settings.orbit.growth_factor
    seed = settings.orbit.default_seed if seed is None else seed
    if depth < 2:
        raise InvalidParameter("depth must be at least 2", depth=depth)
    if growth < 2:
        raise InvalidParameter("growth_factor must be at least 2", growth_factor=growth)
    chains = (_as_chain(mu1), _as_chain(mu2))
    base = chains[0].sft.root
    if not base.is_mixing:
        raise NotMixing("irregular points need a mixing SFT")

    def level_ratio(chain: MarkovChain) -> Number:
        a = measure_average(Phi, chain, settings=settings).value
        b = measure_average(Psi, chain, settings=settings).value
        return a / b

    targets = (level_ratio(chains[0]), level_ratio(chains[1]))
    if abs(targets[0] - targets[1]) <= 1e-12:
        raise TargetsIndistinguishable(
            f"both measures give Phi/Psi = {format_number(targets[0])}", value=targets[0]
        )

    rng = np.random.default_rng(seed)
    pieces: List[np.ndarray] = []
    schedule: List[ScheduleEntry] = []
    t = 0
    bridge_total = 0
    for k in range(1, depth + 1):
        rho = 1 if k % 2 else 2
        chain = chains[rho - 1]
        N = settings.orbit.initial_block if k == 1 else growth * t
        block = _base_symbols(chain.sft, _sample_symbols(chain, N, rng))
        m = 0
        if pieces:
            connector = shortest_connector(base, int(pieces[-1][-1]), int(block[0]))
            m = len(connector)
            if m:
                pieces.append(np.array(connector, dtype=np.int64))
            bridge_total += m
        pieces.append(block)
        t += m + N
        schedule.append(ScheduleEntry(k, N, m, t, rho))
        logger.debug(f"block {k}: N={N} m={m} t={t} rho={rho}")

    word = np.concatenate(pieces)
    _check_word(base, word)

    num, den = birkhoff_prefix_sums(Phi, word), birkhoff_prefix_sums(Psi, word)
    record = [(e.k, e.t, ratio_at(num, den, e.t)) for e in schedule]
    deviations = [abs(r - targets[0 if k % 2 else 1]) for k, _, r in record]
    settling = [float(abs(deviations[i + 2] - deviations[i])) for i in range(len(deviations) - 2)]
    metadata = {
        "seed": seed,
        "growth_factor": growth,
        "shadowing_epsilon": 0,
        "bridge_symbols": bridge_total,
        "max_bridge": max((e.m for e in schedule), default=0),
        "mixing_time": base.mixing_time,
        "block_dominance": float(1 - Fraction(1, growth + 1)),
        "schedule_rule": "N_{k+1} = growth_factor * t_k (geometric, not super-exponential)",
        "deviations": [float(d) for d in deviations],
        "settling": settling,
    }
    return IrregularWitness(word, schedule, chains, targets, record, metadata)


@dataclass
class IrregularEstimate:
    value: Number
    low_depth: bool
    per_witness: List[Number]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "estimate": format_number(self.value),
            "low_depth": self.low_depth,
            "per_witness": [format_number(v) for v in self.per_witness],
        }


def irregular_supremum_estimate(
    F: LocallyConstantPotential,
    G: LocallyConstantPotential,
    witnesses: Sequence[IrregularWitness],
    min_depth: int = 4,
) -> IrregularEstimate:
    """Max over witnesses of f_n/g_n at the odd checkpoints t_k."""
    if not witnesses:
        raise InvalidParameter("need at least one witness")
    per_witness = []
    for w in witnesses:
        num, den = birkhoff_prefix_sums(F, w.word), birkhoff_prefix_sums(G, w.word)
        per_witness.append(max(ratio_at(num, den, e.t) for e in w.schedule if e.k % 2 == 1))
    low_depth = min(w.depth for w in witnesses) < min_depth
    if low_depth:
        logger.warning(f"irregular estimate from depth < {min_depth} is crude")
    return IrregularEstimate(max(per_witness), low_depth, per_witness)


def irregular_set_nonempty(Phi: Potential, settings: Optional[Settings] = None) -> bool:
    """True iff eta(Phi) < beta(Phi); otherwise (1/n) phi_n converges uniformly."""
    from ergopt.core.optimizers import max_ergodic_average, min_ergodic_average

    eta = min_ergodic_average(Phi, settings).value
    beta = max_ergodic_average(Phi, settings).value
    return beta.lo > eta.hi
