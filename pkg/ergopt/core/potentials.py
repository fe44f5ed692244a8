"""Potentials: sequences f_n over an SFT and their additive approximants.

Three families share one interface (birkhoff_sum, approximant, is_rational):
- LocallyConstantPotential: f_n = S_n f for a block-weight table f
- CocyclePotential: f_n = log ||A_{x_{n-1}} ... A_{x_0}|| for invertible matrices
- SequencePotential: any f_n given by a callback, with declared approximants
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from ergopt.config import Settings, get_settings
from ergopt.core.errors import (
    BudgetExceeded,
    DenominatorViolated,
    IncompleteWeightTable,
    InvalidWord,
    MaxEffortExceeded,
    NoApproximantAvailable,
    PotentialMismatch,
    SingularMatrix,
    WordTooShort,
)
from ergopt.core.intervals import Interval, Number, all_rational, format_number
from ergopt.core.polytope import EdgeFrequencyVector, MarkovChain, edge_vector_to_markov
from ergopt.core.symbolic import (
    SFT,
    Block,
    Word,
    allowed_blocks,
    recode_k_blocks,
    shortest_connector,
)

logger = logging.getLogger(__name__)


class Potential(ABC):
    """A sequence of functions f_n on the SFT, evaluated on finite words."""

    sft: SFT

    @property
    @abstractmethod
    def kind(self) -> str:
        ...

    @abstractmethod
    def birkhoff_sum(self, word: Word) -> Number:
        ...

    @abstractmethod
    def approximant(self, xi: Number) -> Tuple["LocallyConstantPotential", Number]:
        ...

    @property
    def is_rational(self) -> bool:
        return False


@dataclass(frozen=True)
class LocallyConstantPotential(Potential):
    """f(x) = weights[x_0 ... x_{k-1}] for allowed k-blocks."""

    sft: SFT
    range: int
    weights: Mapping[Block, Number] = field(hash=False)

    def __post_init__(self) -> None:
        if self.range < 1:
            raise IncompleteWeightTable("potential range must be at least 1")
        expected = set(allowed_blocks(self.sft, self.range))
        given = set(self.weights)
        if given != expected:
            missing = sorted(expected - given)[:5]
            extra = sorted(given - expected)[:5]
            raise IncompleteWeightTable(
                f"weight table must cover exactly the allowed {self.range}-blocks "
                f"(missing {missing}, not allowed {extra})",
                missing=len(expected - given),
                extra=len(given - expected),
            )

    @property
    def kind(self) -> str:
        return "locally_constant"

    @property
    def is_rational(self) -> bool:
        return all_rational(self.weights.values())

    def weight(self, block: Block) -> Number:
        return self.weights[tuple(block)]

    @property
    def max_abs_weight(self) -> Number:
        return max(abs(w) for w in self.weights.values())

    @property
    def min_weight(self) -> Number:
        return min(self.weights.values())

    def birkhoff_sum(self, word: Word) -> Number:
        n = len(word)
        if n < self.range:
            raise WordTooShort(n, self.range)
        total: Number = Fraction(0) if self.is_rational else 0.0
        for i in range(n):
            block = word.block_at(i, self.range)
            if block not in self.weights:
                raise InvalidWord(f"block {block} at position {i} is not allowed", position=i)
            total += self.weights[block]
        return total

    def approximant(self, xi: Number) -> Tuple["LocallyConstantPotential", Number]:
        if xi <= 0:
            raise ValueError("xi must be positive")
        return self, 0

    def edge_weights(self, sft: SFT) -> List[Number]:
        """Weights per edge of a presentation whose edges span at least range symbols."""
        if sft.root != self.sft:
            raise PotentialMismatch("potential lives on a different SFT")
        if sft.block_length + 1 < self.range:
            raise PotentialMismatch(
                f"presentation with {sft.block_length}-blocks cannot carry a range-{self.range} potential"
            )
        return [self.weights[sft.edge_block(e)[:self.range]] for e in sft.edges]

    def lift(self, k: int) -> "LocallyConstantPotential":
        """The same function written on k-blocks, k >= range."""
        if k < self.range:
            raise ValueError(f"cannot lift a range-{self.range} potential to range {k}")
        return LocallyConstantPotential(
            self.sft, k, {b: self.weights[b[:self.range]] for b in allowed_blocks(self.sft, k)}
        )

    def _combine(self, other: "LocallyConstantPotential", op: Callable[[Number, Number], Number]):
        if other.sft != self.sft:
            raise PotentialMismatch("potentials live on different SFTs")
        k = max(self.range, other.range)
        a, b = self.lift(k), other.lift(k)
        return LocallyConstantPotential(self.sft, k, {blk: op(a.weights[blk], b.weights[blk]) for blk in a.weights})

    def add(self, other: "LocallyConstantPotential") -> "LocallyConstantPotential":
        return self._combine(other, lambda x, y: x + y)

    def __add__(self, other: "LocallyConstantPotential") -> "LocallyConstantPotential":
        return self.add(other)

    def __sub__(self, other: "LocallyConstantPotential") -> "LocallyConstantPotential":
        return self._combine(other, lambda x, y: x - y)

    def scale(self, c: Number) -> "LocallyConstantPotential":
        return LocallyConstantPotential(self.sft, self.range, {b: c * w for b, w in self.weights.items()})

    def shift(self, c: Number) -> "LocallyConstantPotential":
        return LocallyConstantPotential(self.sft, self.range, {b: w + c for b, w in self.weights.items()})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "range": self.range,
            "weights": {"".join(map(str, b)) if len(self.sft.labels) <= 10 else ",".join(map(str, b)):
                        format_number(w) for b, w in sorted(self.weights.items())},
        }


def indicator(sft: SFT, symbol: int) -> LocallyConstantPotential:
    return LocallyConstantPotential(sft, 1, {(s,): Fraction(int(s == symbol)) for s in range(sft.alphabet_size)})


def symbol_value(sft: SFT) -> LocallyConstantPotential:
    """f(x) = x_0."""
    return LocallyConstantPotential(sft, 1, {(s,): Fraction(s) for s in range(sft.alphabet_size)})


def constant(sft: SFT, c: Number) -> LocallyConstantPotential:
    return LocallyConstantPotential(sft, 1, {(s,): c for s in range(sft.alphabet_size)})


def block_indicator(sft: SFT, block: Sequence[int]) -> LocallyConstantPotential:
    target = tuple(block)
    k = len(target)
    return LocallyConstantPotential(sft, k, {b: Fraction(int(b == target)) for b in allowed_blocks(sft, k)})


@dataclass(frozen=True)
class CocyclePotential(Potential):
    """Matrix cocycle over the shift; one invertible d x d matrix per symbol."""

    sft: SFT
    matrices: Tuple[np.ndarray, ...] = field(hash=False, compare=False)

    def __post_init__(self) -> None:
        mats = tuple(np.asarray(m, dtype=float) for m in self.matrices)
        object.__setattr__(self, "matrices", mats)
        if len(mats) != self.sft.alphabet_size:
            raise PotentialMismatch(
                f"cocycle has {len(mats)} matrices for {self.sft.alphabet_size} symbols"
            )
        d = mats[0].shape[0]
        for s, m in enumerate(mats):
            if m.shape != (d, d):
                raise PotentialMismatch(f"matrix for symbol {s} is not {d}x{d}")
            if abs(np.linalg.det(m)) == 0.0:
                raise SingularMatrix(f"matrix for symbol {s} is singular", symbol=s)

    @property
    def kind(self) -> str:
        return "cocycle"

    @property
    def dimension(self) -> int:
        return self.matrices[0].shape[0]

    @property
    def is_diagonal(self) -> bool:
        return all(np.count_nonzero(m - np.diag(np.diagonal(m))) == 0 for m in self.matrices)

    def product(self, symbols: Sequence[int]) -> np.ndarray:
        """A_{w_{n-1}} ... A_{w_0}."""
        P = np.eye(self.dimension)
        for s in symbols:
            P = self.matrices[s] @ P
        return P

    def birkhoff_sum(self, word: Word) -> float:
        if len(word) == 0:
            raise WordTooShort(0, 1)
        return float(np.log(np.linalg.norm(self.product(word.symbols), ord=2)))

    def log_growth(self, symbols: Sequence[int]) -> float:
        """f_n along symbols with per-step renormalization, for long words."""
        v = np.eye(self.dimension)
        total = 0.0
        for s in symbols:
            v = self.matrices[s] @ v
            nrm = np.linalg.norm(v, ord=2)
            total += math.log(nrm)
            v = v / nrm
        return total

    def approximant(self, xi: Number = 1) -> Tuple[LocallyConstantPotential, float]:
        """(1/d) log|det A_s| per symbol; error bounds f_n - S_n g per step."""
        d = self.dimension
        weights = {}
        error = 0.0
        for s, m in enumerate(self.matrices):
            g = math.log(abs(np.linalg.det(m))) / d
            weights[(s,)] = g
            error = max(error, math.log(np.linalg.norm(m, ord=2)) - g)
        return LocallyConstantPotential(self.sft, 1, weights), max(error, 0.0)

    def diagonal_components(self) -> List[LocallyConstantPotential]:
        """For diagonal cocycles: g_i(s) = log|A_s[i, i]|; f_n = max_i S_n g_i."""
        if not self.is_diagonal:
            raise PotentialMismatch("cocycle is not diagonal")
        return [
            LocallyConstantPotential(
                self.sft, 1, {(s,): math.log(abs(m[i, i])) for s, m in enumerate(self.matrices)}
            )
            for i in range(self.dimension)
        ]

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "dimension": self.dimension,
                "matrices": [m.tolist() for m in self.matrices]}


@dataclass(frozen=True)
class SequencePotential(Potential):
    """f_n given by evaluator(word); asymptotic additivity is asserted via declared approximants.

    The evaluator must be pure: it may be called concurrently.
    """

    sft: SFT
    evaluator: Callable[[Word], Number] = field(hash=False, compare=False)
    declared_xi_family: Tuple[Tuple[Number, LocallyConstantPotential], ...] = field(
        default=(), hash=False, compare=False
    )
    name: str = "sequence"

    def __post_init__(self) -> None:
        for xi, g in self.declared_xi_family:
            if xi <= 0:
                raise ValueError("declared xi values must be positive")
            if g.sft != self.sft:
                raise PotentialMismatch("declared approximant lives on a different SFT")

    @property
    def kind(self) -> str:
        return "sequence"

    @property
    def is_rational(self) -> bool:
        return all(g.is_rational for _, g in self.declared_xi_family)

    def birkhoff_sum(self, word: Word) -> Number:
        return self.evaluator(word)

    def approximant(self, xi: Number) -> Tuple[LocallyConstantPotential, Number]:
        if xi <= 0:
            raise ValueError("xi must be positive")
        candidates = sorted(
            ((x, g) for x, g in self.declared_xi_family if x <= xi), key=lambda pair: pair[0]
        )
        if not candidates:
            raise NoApproximantAvailable(
                f"potential {self.name!r} declares no approximant with xi <= {format_number(xi)}"
            )
        return candidates[0][1], candidates[0][0]

    def best_approximant(self) -> Tuple[LocallyConstantPotential, Number]:
        if not self.declared_xi_family:
            raise NoApproximantAvailable(f"potential {self.name!r} declares no approximants")
        xi, g = min(self.declared_xi_family, key=lambda pair: pair[0])
        return g, xi

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "name": self.name,
                "declared_xi": [format_number(x) for x, _ in self.declared_xi_family]}


def perturbed_additive(
    base: LocallyConstantPotential, c: Number, xi: Number = Fraction(1, 100)
) -> SequencePotential:
    """f_n = S_n f + c (x_0 - x_{n-1}); asymptotically additive with approximant f."""

    def evaluate(word: Word) -> Number:
        return base.birkhoff_sum(word) + c * (word.symbols[0] - word.symbols[-1])

    return SequencePotential(base.sft, evaluate, ((xi, base),), name="perturbed_additive")


@dataclass(frozen=True)
class DenominatorBound:
    """sigma > 0 with (1/n) psi_n >= sigma everywhere."""

    sigma: Number

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise DenominatorViolated(f"denominator bound must be positive, got {self.sigma}")

    @classmethod
    def from_potential(cls, potential: LocallyConstantPotential) -> "DenominatorBound":
        sigma = potential.min_weight
        if not sigma > 0:
            raise DenominatorViolated(
                f"denominator potential has minimum block weight {format_number(sigma)}", sigma=sigma
            )
        return cls(sigma)

    def check(self, potential: LocallyConstantPotential) -> None:
        if potential.min_weight < self.sigma:
            raise DenominatorViolated(
                f"block weight {format_number(potential.min_weight)} below declared sigma "
                f"{format_number(self.sigma)}"
            )


@lru_cache(maxsize=64)
def presentation(sft: SFT, max_range: int) -> SFT:
    """Presentation whose edges carry range-<=max_range potentials."""
    return recode_k_blocks(sft, max(1, max_range - 1)).sft


def lp_presentation(*potentials: LocallyConstantPotential) -> SFT:
    sfts = {p.sft for p in potentials}
    if len(sfts) != 1:
        raise PotentialMismatch("potentials live on different SFTs")
    return presentation(sfts.pop(), max(p.range for p in potentials))


def random_periodic_word(sft: SFT, n: int, rng: np.random.Generator) -> Word:
    """Random walk of n symbols closed up by a connector, so wrap-around blocks are allowed."""
    walk = [int(rng.integers(sft.alphabet_size))]
    for _ in range(n - 1):
        succ = sft.successors[walk[-1]]
        walk.append(int(succ[rng.integers(len(succ))]))
    return Word(tuple(walk) + shortest_connector(sft, walk[-1], walk[0]))


def spot_check_approximants(
    potential: SequencePotential,
    n: int = 512,
    samples: int = 20,
    seed: int = 0,
) -> List[Dict[str, Any]]:
    """Sampled (1/n) max |f_n - S_n g| against each declared xi."""
    rng = np.random.default_rng(seed)
    words = [random_periodic_word(potential.sft, n, rng) for _ in range(samples)]
    report = []
    for xi, g in potential.declared_xi_family:
        observed = max(
            abs(float(potential.birkhoff_sum(w)) - float(g.birkhoff_sum(w))) / len(w) for w in words
        )
        ok = observed < float(xi)
        if not ok:
            logger.warning(f"{potential.name}: observed deviation {observed:.4g} exceeds declared xi {float(xi):.4g}")
        report.append({"xi": format_number(xi), "observed": observed, "ok": ok})
    return report


def subadditivity_defect(
    potential: CocyclePotential, n: int, m: int, samples: int = 50, seed: int = 0
) -> float:
    """max over sampled words of f_{n+m}(x) - f_n(x) - f_m(T^n x); <= 0 up to rounding."""
    rng = np.random.default_rng(seed)
    worst = -math.inf
    for _ in range(samples):
        w = random_periodic_word(potential.sft, n + m, rng).symbols[:n + m]
        whole = potential.log_growth(w)
        worst = max(worst, whole - potential.log_growth(w[:n]) - potential.log_growth(w[n:]))
    return worst


def _block_expectation(potential: LocallyConstantPotential, chain: MarkovChain) -> Number:
    sft = chain.sft
    if sft.root != potential.sft:
        raise PotentialMismatch("measure and potential live on different SFTs")
    vertices = max(1, potential.range - sft.block_length + 1)
    total: Number = 0
    for path in allowed_blocks(sft, vertices):
        p = chain.path_probability(path)
        if p != 0:
            total += p * potential.weights[sft.path_word(path)[:potential.range]]
    return total


def _word_expectations(
    potential: CocyclePotential, chain: MarkovChain, lengths: Sequence[int], cap: int
) -> Dict[int, float]:
    """Exact integral of f_n under the chain for each n in lengths, by word enumeration."""
    sft = chain.sft
    A = np.stack([potential.matrices[sft.labels[v][0]] for v in range(sft.alphabet_size)])
    P = chain.transition_matrix()
    pi = np.array([float(p) for p in chain.stationary])

    last = np.flatnonzero(pi > 0)
    probs = pi[last]
    prods = A[last]
    targets = set(lengths)
    out: Dict[int, float] = {}
    n = 1
    while True:
        if n in targets:
            norms = np.linalg.norm(prods, ord=2, axis=(1, 2))
            out[n] = float(np.sum(probs * np.log(norms)))
        if n >= max(targets):
            return out
        new_probs, new_last, new_prods = [], [], []
        for s in range(sft.alphabet_size):
            ps = P[last, s]
            mask = ps > 0
            if mask.any():
                new_probs.append(probs[mask] * ps[mask])
                new_last.append(np.full(int(mask.sum()), s))
                new_prods.append(A[s] @ prods[mask])
        probs = np.concatenate(new_probs)
        last = np.concatenate(new_last)
        prods = np.concatenate(new_prods)
        if len(probs) > cap:
            raise BudgetExceeded(f"more than {cap} words of length {n + 1} under the measure", cap=cap)
        n += 1


def cocycle_upper_bounds(
    potential: CocyclePotential, chain: MarkovChain, settings: Optional[Settings] = None
) -> List[Tuple[int, float]]:
    """(n, (1/n) int f_n dmu) for n = 1, 2, 4, ... while enumeration stays in budget.

    Subadditivity and invariance make this sequence nonincreasing with limit F_*(mu).
    """
    budgets = (settings or get_settings()).budgets
    bounds: List[Tuple[int, float]] = []
    for j in range(budgets.measure_max_doublings + 1):
        n = 2 ** j
        try:
            value = _word_expectations(potential, chain, [n], budgets.word_enumeration_cap)[n]
        except BudgetExceeded:
            break
        bounds.append((n, value / n))
    return bounds


def _monte_carlo_estimate(
    potential: CocyclePotential, chain: MarkovChain, settings: Settings, length: int = 256
) -> Tuple[float, float]:
    """Mean and standard error of (1/L) f_L over sampled chain paths."""
    rng = np.random.default_rng(settings.orbit.default_seed)
    labels = chain.sft.labels
    values = []
    for _ in range(settings.budgets.monte_carlo_samples):
        path = chain.sample_path(length, rng)
        values.append(potential.log_growth([labels[v][0] for v in path]) / length)
    arr = np.array(values)
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0


def _support_components(chain: MarkovChain) -> List[List[int]]:
    graph = nx.DiGraph()
    graph.add_nodes_from(v for v, p in enumerate(chain.stationary) if p > 0)
    graph.add_edges_from(e for e, p in chain.transitions.items() if p > 0 and chain.stationary[e[0]] > 0)
    return [sorted(c) for c in nx.strongly_connected_components(graph)]


def measure_average(
    potential: Potential,
    measure: Any,
    tolerance: float = 1e-6,
    settings: Optional[Settings] = None,
) -> Interval:
    """F_*(mu) = lim (1/n) int f_n dmu as a certified interval.

    measure may be a MarkovChain or an EdgeFrequencyVector. Raises
    MaxEffortExceeded (carrying the best interval) when wider than tolerance.
    """
    settings = settings or get_settings()
    chain = edge_vector_to_markov(measure) if isinstance(measure, EdgeFrequencyVector) else measure
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")

    if isinstance(potential, LocallyConstantPotential):
        return Interval.point(_block_expectation(potential, chain))

    if isinstance(potential, SequencePotential):
        g, xi = potential.best_approximant()
        interval = Interval.around(_block_expectation(g, chain), xi)
        if interval.width > tolerance:
            raise MaxEffortExceeded(
                f"declared approximants only give width {float(interval.width):.3g}", best=interval
            )
        return interval

    if isinstance(potential, CocyclePotential):
        if potential.is_diagonal:
            total = 0.0
            for component in _support_components(chain):
                mass = sum(float(chain.stationary[v]) for v in component)
                sub = MarkovChain(
                    chain.sft,
                    {e: p for e, p in chain.transitions.items() if e[0] in component},
                    tuple(
                        (float(p) / mass if v in component else 0.0)
                        for v, p in enumerate(chain.stationary)
                    ),
                )
                total += mass * max(
                    float(_block_expectation(g, sub)) for g in potential.diagonal_components()
                )
            return Interval.point(total)

        g, err = potential.approximant()
        lower = float(_block_expectation(g, chain))
        bounds = cocycle_upper_bounds(potential, chain, settings)
        upper = min(v for _, v in bounds) if bounds else lower + err
        upper = min(upper, lower + err)
        mc_mean, mc_err = _monte_carlo_estimate(potential, chain, settings)
        lower = max(lower, min(mc_mean - 3 * mc_err, upper))
        interval = Interval(min(lower, upper), upper)
        logger.debug(f"cocycle average in [{interval.lo:.6g}, {interval.hi:.6g}] (MC {mc_mean:.6g} +/- {mc_err:.2g})")
        if interval.width > tolerance:
            raise MaxEffortExceeded(
                f"cocycle average interval width {interval.width:.3g} exceeds tolerance {tolerance:.3g}",
                best=interval,
            )
        return interval

    raise PotentialMismatch(f"unsupported potential type {type(potential).__name__}")
