"""Maximum, minimum and conditional ergodic averages; spectra; ratio optimization.

Every optimizer works on the additive approximant of its potentials, written as
edge weights on a common block presentation, and widens the LP value by the
approximant error. Locally constant inputs therefore give exact values.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ergopt.config import Settings, get_settings
from ergopt.core.errors import CrossCheckFailed, ErgoptError, Infeasible, InvalidParameter, UnimodalityViolation
from ergopt.core.intervals import Interval, Number, all_rational, format_number, is_rational
from ergopt.core.polytope import (
    EdgeFrequencyVector,
    OptimalFace,
    choose_mode,
    cycle_mean,
    flow_rows,
    lp_optimize,
    optimal_face,
    vertex_to_cycle,
)
from ergopt.core.potentials import (
    CocyclePotential,
    DenominatorBound,
    LocallyConstantPotential,
    Potential,
    SequencePotential,
    lp_presentation,
)
from ergopt.core.simplex import INFEASIBLE, OPTIMAL, solve_equality_lp
from ergopt.core.symbolic import SFT, Cycle, enumerate_simple_cycles

logger = logging.getLogger(__name__)


def additive_view(potential: Potential) -> Tuple[LocallyConstantPotential, Number]:
    """Approximant used by the LP and the error it carries."""
    if isinstance(potential, LocallyConstantPotential):
        return potential, 0
    if isinstance(potential, CocyclePotential):
        return potential.approximant()
    if isinstance(potential, SequencePotential):
        return potential.best_approximant()
    raise TypeError(f"unsupported potential {type(potential).__name__}")


def _tolerance(mode: str, settings: Settings) -> Number:
    return 0 if mode == "exact" else settings.numerics.float_tolerance


def _ratio(num: Number, den: Number) -> Number:
    if is_rational(num) and is_rational(den):
        return Fraction(num) / Fraction(den)
    return num / den


# graph algorithms


def max_mean_cycle(
    sft: SFT, weights: Sequence[Number], tol: Optional[float] = None
) -> Tuple[Number, Cycle]:
    """Karp's algorithm with every vertex as a source; exact on rational weights.

    Returns the maximum cycle mean and a vertex cycle of sft attaining it. On float
    weights a cycle attains the maximum when its mean is within tol of it.
    """
    n = sft.alphabet_size
    exact = all_rational(weights)
    zero: Number = Fraction(0) if exact else 0.0
    if exact:
        tol = 0
    elif tol is None:
        tol = get_settings().numerics.float_tolerance
    incoming: List[List[Tuple[int, Number]]] = [[] for _ in range(n)]
    for (u, v), w in zip(sft.edges, weights):
        incoming[v].append((u, w))

    D: List[List[Number]] = [[zero] * n]
    pred: List[List[int]] = [[-1] * n]
    for k in range(1, n + 1):
        row, back = [], []
        for v in range(n):
            best_u, best = max(((u, D[k - 1][u] + w) for u, w in incoming[v]), key=lambda p: (p[1], -p[0]))
            row.append(best)
            back.append(best_u)
        D.append(row)
        pred.append(back)

    best_value: Optional[Number] = None
    best_vertex = 0
    for v in range(n):
        worst = min(_ratio(D[n][v] - D[k][v], n - k) for k in range(n))
        if best_value is None or worst > best_value:
            best_value, best_vertex = worst, v

    walk = [best_vertex]
    for k in range(n, 0, -1):
        walk.append(pred[k][walk[-1]])
    walk.reverse()

    w_of = dict(zip(sft.edges, weights))
    candidates: List[Tuple[Number, Cycle]] = []
    last_seen: Dict[int, int] = {}
    for i, v in enumerate(walk):
        if v in last_seen:
            cyc = Cycle.of(walk[last_seen[v]:i])
            total = sum(w_of[e] for e in cyc.edges)
            candidates.append((_ratio(total, len(cyc)), cyc))
        last_seen[v] = i
    mean, cycle = max(candidates, key=lambda c: (c[0], -len(c[1]), [-s for s in c[1].symbols]))
    if abs(mean - best_value) > tol:
        logger.debug(f"Karp walk cycle mean {mean} below optimum {best_value}; scanning simple cycles")
        for cyc in enumerate_simple_cycles(sft, n):
            if abs(cycle_mean(sft, cyc, weights) - best_value) <= tol:
                return best_value, cyc
    return best_value, cycle


def dinkelbach_ratio(
    sft: SFT, num: Sequence[Number], den: Sequence[Number], tol: float = 1e-12, max_iter: int = 1000
) -> Tuple[Number, Cycle]:
    """max over cycles of sum(num)/sum(den), den > 0, by parametric max-mean-cycle."""
    _, cycle = max_mean_cycle(sft, num)
    idx = sft.edge_index

    def cycle_ratio(c: Cycle) -> Number:
        return _ratio(sum(num[idx[e]] for e in c.edges), sum(den[idx[e]] for e in c.edges))

    lam = cycle_ratio(cycle)
    exact = all_rational(list(num) + list(den))
    for _ in range(max_iter):
        shifted = [a - lam * b for a, b in zip(num, den)]
        value, candidate = max_mean_cycle(sft, shifted)
        if value <= 0 or (not exact and value <= tol):
            return lam, cycle
        cycle, lam = candidate, cycle_ratio(candidate)
    raise CrossCheckFailed(f"Dinkelbach iteration did not settle in {max_iter} steps")


# result types


@dataclass
class ErgodicAverage:
    """beta or eta of a potential."""

    value: Interval
    mode: str
    witness_cycle: Optional[Cycle] = None
    solution: Optional[EdgeFrequencyVector] = None
    approximant_error: Number = 0

    def to_dict(self, key: str) -> Dict[str, Any]:
        result = {key: _interval_json(self.value), "mode": self.mode}
        if self.witness_cycle is not None:
            result["witness_cycle"] = self.witness_cycle.to_list()
        return result


@dataclass
class ConditionalResult:
    alpha: Number
    value: Interval
    witness: EdgeFrequencyVector
    mode: str
    basis: Tuple[int, ...] = ()
    clamped: bool = False

    def to_dict(self) -> Dict[str, Any]:
        result = {
            "alpha": format_number(self.alpha),
            "lambda": _interval_json(self.value),
            "mode": self.mode,
            "witness": self.witness.to_dict(),
        }
        if self.clamped:
            result["clamped"] = True
        return result


@dataclass
class RatioResult:
    value: Interval
    witness: EdgeFrequencyVector
    mode: str
    alpha: Optional[Number] = None
    witness_cycle: Optional[Cycle] = None

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            "ratio": _interval_json(self.value),
            "mode": self.mode,
            "witness": self.witness.to_dict(),
        }
        if self.alpha is not None:
            result["alpha"] = format_number(self.alpha)
        if self.witness_cycle is not None:
            result["witness_cycle"] = self.witness_cycle.to_list()
        return result


@dataclass
class SpectrumResult:
    range: Interval
    grid: List[Tuple[Number, Interval]]
    flat_top: Tuple[Number, Number]
    alpha_star_witness: Number
    beta_f: Number
    max_adjacent_jump: float
    mode: str
    witnesses: List[EdgeFrequencyVector] = field(default_factory=list, repr=False)

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {"alpha": format_number(a), "lambda_lo": format_number(v.lo), "lambda_hi": format_number(v.hi)}
                for a, v in self.grid
            ],
            columns=["alpha", "lambda_lo", "lambda_hi"],
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "range": [format_number(self.range.lo), format_number(self.range.hi)],
            "flat_top": [format_number(self.flat_top[0]), format_number(self.flat_top[1])],
            "alpha_star": format_number(self.alpha_star_witness),
            "beta_f": format_number(self.beta_f),
            "max_adjacent_jump": float(self.max_adjacent_jump),
            "mode": self.mode,
            "grid": [[format_number(a), _interval_json(v)] for a, v in self.grid],
        }


def _interval_json(interval: Interval) -> Any:
    if interval.is_point:
        return format_number(interval.lo)
    return {"lo": format_number(interval.lo), "hi": format_number(interval.hi)}


# extremal averages


def _additive_extremum(
    potential: LocallyConstantPotential, sense: str, settings: Settings
) -> Tuple[Number, Cycle, EdgeFrequencyVector, str]:
    """Max (or min) cycle mean from Karp, cross-checked against the LP."""
    sft = lp_presentation(potential)
    weights = potential.edge_weights(sft)
    sign = 1 if sense == "max" else -1
    graph_value, cycle = max_mean_cycle(sft, [sign * w for w in weights], settings.numerics.float_tolerance)
    graph_value = sign * graph_value

    outcome = lp_optimize(sft, weights, sense, settings=settings)
    tol = _tolerance(outcome.mode, settings)
    if abs(outcome.value - graph_value) > tol:
        raise CrossCheckFailed(
            f"max-mean-cycle {format_number(graph_value)} disagrees with LP {format_number(outcome.value)}",
            graph=graph_value,
            lp=outcome.value,
        )
    value = graph_value if outcome.mode == "exact" else outcome.value
    return value, cycle.project(sft), outcome.solution, outcome.mode


def _cocycle_extremum(potential: CocyclePotential, sense: str, settings: Settings) -> ErgodicAverage:
    from ergopt.core.orbits import finite_horizon_max

    if potential.is_diagonal and sense == "max":
        best = None
        for g in potential.diagonal_components():
            value, cycle, solution, _ = _additive_extremum(g, "max", settings)
            if best is None or value > best[0]:
                best = (value, cycle, solution)
        return ErgodicAverage(Interval.point(float(best[0])), "float", best[1], best[2])

    g, err = potential.approximant()
    value, cycle, solution, _ = _additive_extremum(g, sense, settings)
    value = float(value)
    if sense == "max":
        lo, hi = value, value + err
        periodic = _periodic_lower_bound(potential, settings)
        lo = max(lo, periodic)
        horizon = min(settings.budgets.cocycle_horizon_cap, 8)
        try:
            hi = min(hi, finite_horizon_max(potential, horizon, settings).upper_bound)
        except ErgoptError as e:
            logger.debug(f"finite-horizon bound skipped: {e}")
        interval = Interval(min(lo, hi), hi)
    else:
        interval = Interval(value, value + err)
    return ErgodicAverage(interval, "float", cycle, solution, err)


def _periodic_lower_bound(potential: CocyclePotential, settings: Settings) -> float:
    """max over short simple cycles of (1/p) log spectral radius of the cycle product."""
    best = -np.inf
    for cycle in enumerate_simple_cycles(potential.sft, min(potential.sft.alphabet_size, 6), settings):
        rho = max(abs(np.linalg.eigvals(potential.product(cycle.symbols))))
        best = max(best, float(np.log(rho)) / len(cycle))
    return best


def _extremal_average(potential: Potential, sense: str, settings: Optional[Settings]) -> ErgodicAverage:
    settings = settings or get_settings()
    if isinstance(potential, LocallyConstantPotential):
        value, cycle, solution, mode = _additive_extremum(potential, sense, settings)
        return ErgodicAverage(Interval.point(value), mode, cycle, solution)
    if isinstance(potential, CocyclePotential):
        return _cocycle_extremum(potential, sense, settings)
    g, xi = additive_view(potential)
    value, cycle, solution, mode = _additive_extremum(g, sense, settings)
    return ErgodicAverage(Interval.around(value, xi), mode, cycle, solution, xi)


def max_ergodic_average(potential: Potential, settings: Optional[Settings] = None) -> ErgodicAverage:
    """beta(F) = sup over invariant measures of F_*(mu)."""
    result = _extremal_average(potential, "max", settings)
    logger.info(f"beta = {_interval_json(result.value)} ({result.mode})")
    return result


def min_ergodic_average(potential: Potential, settings: Optional[Settings] = None) -> ErgodicAverage:
    """eta(F) = inf over invariant measures of F_*(mu)."""
    result = _extremal_average(potential, "min", settings)
    logger.info(f"eta = {_interval_json(result.value)} ({result.mode})")
    return result


def level_set_range(potential: Potential, settings: Optional[Settings] = None) -> Interval:
    """[eta, beta]: the values alpha whose level sets are nonempty on a mixing SFT."""
    eta = min_ergodic_average(potential, settings).value
    beta = max_ergodic_average(potential, settings).value
    return Interval(eta.lo, max(eta.lo, beta.hi))


def maximizing_measures(
    potential: LocallyConstantPotential, settings: Optional[Settings] = None
) -> OptimalFace:
    """The face of F-maximizing measures, described by its ergodic vertices."""
    sft = lp_presentation(potential)
    face = optimal_face(sft, potential.edge_weights(sft), "max", settings)
    face.cycles = [c.project(sft) for c in face.cycles]
    return face


# conditional averages


def conditional_max(
    F: Potential,
    Phi: Potential,
    alpha: Number,
    settings: Optional[Settings] = None,
    warm_basis: Optional[Sequence[int]] = None,
) -> ConditionalResult:
    """Lambda_{F|Phi}(alpha) = sup {F_*(mu) : Phi_*(mu) = alpha}."""
    settings = settings or get_settings()
    f, xi_f = additive_view(F)
    phi, xi_phi = additive_view(Phi)
    sft = lp_presentation(f, phi)
    objective = f.edge_weights(sft)
    constraint = phi.edge_weights(sft)
    outcome = lp_optimize(
        sft, objective, "max", [(constraint, alpha)], settings=settings, warm_basis=warm_basis
    )
    value = Interval.point(outcome.value).widen(xi_f + xi_phi)
    return ConditionalResult(
        alpha=alpha,
        value=value,
        witness=outcome.solution,
        mode=outcome.mode,
        basis=outcome.basis,
        clamped=outcome.clamped,
    )


def _grid(lo: Number, hi: Number, size: int) -> List[Number]:
    if is_rational(lo) and is_rational(hi):
        return [Fraction(lo) + (Fraction(hi) - Fraction(lo)) * i / (size - 1) for i in range(size)]
    return [float(v) for v in np.linspace(float(lo), float(hi), size)]


def spectrum(
    F: Potential, Phi: Potential, grid_size: int, settings: Optional[Settings] = None
) -> SpectrumResult:
    """Sweep Lambda_{F|Phi} over a uniform grid of [eta(Phi), beta(Phi)]."""
    if grid_size < 3:
        raise InvalidParameter("grid_size must be at least 3", grid_size=grid_size)
    settings = settings or get_settings()
    f, xi_f = additive_view(F)
    phi, xi_phi = additive_view(Phi)
    sft = lp_presentation(f, phi)
    objective = f.edge_weights(sft)
    constraint = phi.edge_weights(sft)

    eta = lp_optimize(sft, constraint, "min", settings=settings).value
    beta_phi = lp_optimize(sft, constraint, "max", settings=settings).value
    alphas = _grid(eta, beta_phi, grid_size)

    def solve(alpha: Number, basis: Optional[Sequence[int]] = None):
        return lp_optimize(sft, objective, "max", [(constraint, alpha)], settings=settings, warm_basis=basis)

    outcomes = []
    if settings.spectrum_workers > 1:
        with ThreadPoolExecutor(max_workers=settings.spectrum_workers) as pool:
            outcomes = list(pool.map(solve, alphas))
    else:
        basis = None
        for alpha in alphas:
            outcome = solve(alpha, basis)
            basis = outcome.basis
            outcomes.append(outcome)
    mode = outcomes[0].mode
    tol = _tolerance(mode, settings)

    beta_f = lp_optimize(sft, objective, "max", settings=settings).value
    top_row = [(objective, beta_f)]
    alpha_1 = lp_optimize(sft, constraint, "min", top_row, settings=settings).value
    alpha_2 = lp_optimize(sft, constraint, "max", top_row, settings=settings).value

    values = [o.value for o in outcomes]
    for i in range(len(alphas) - 1):
        a, b = alphas[i], alphas[i + 1]
        if b <= alpha_1 and values[i] > values[i + 1] + tol:
            raise UnimodalityViolation((a, b, alpha_1), (values[i], values[i + 1], beta_f))
        if a >= alpha_2 and values[i] + tol < values[i + 1]:
            raise UnimodalityViolation((alpha_2, a, b), (beta_f, values[i], values[i + 1]))
    for a, v in zip(alphas, values):
        if alpha_1 <= a <= alpha_2 and abs(v - beta_f) > tol:
            raise UnimodalityViolation((alpha_1, a, alpha_2), (beta_f, v, beta_f))

    jump = max((abs(float(values[i + 1]) - float(values[i])) for i in range(len(values) - 1)), default=0.0)
    widen = xi_f + xi_phi
    return SpectrumResult(
        range=Interval(eta, beta_phi),
        grid=[(a, Interval.point(v).widen(widen)) for a, v in zip(alphas, values)],
        flat_top=(alpha_1, alpha_2),
        alpha_star_witness=alpha_1,
        beta_f=beta_f,
        max_adjacent_jump=jump,
        mode=mode,
        witnesses=[o.solution for o in outcomes],
    )


# ratio optimization


def _ratio_lp(
    sft: SFT,
    num: Sequence[Number],
    den: Sequence[Number],
    constraint: Optional[Sequence[Number]],
    sense: str,
    settings: Settings,
) -> Tuple[str, Optional[Number], Optional[EdgeFrequencyVector], str]:
    """Charnes-Cooper form: y = x / (g.x), t = 1 / (g.x); returns status, value, x, mode."""
    E = len(sft.edges)
    data = list(num) + list(den) + (list(constraint) if constraint is not None else [])
    mode = choose_mode(sft, data, settings)
    A: List[List[Number]] = [list(r) + [0] for r in flow_rows(sft)]
    b: List[Number] = [0] * sft.alphabet_size
    A.append([1] * E + [-1])
    b.append(0)
    A.append(list(den) + [0])
    b.append(1)
    if constraint is not None:
        A.append(list(constraint) + [0])
        b.append(0)
    raw = solve_equality_lp(
        A, b, list(num) + [0], sense=sense, mode=mode,
        tol=settings.numerics.float_tolerance, max_pivots=settings.numerics.max_pivots,
    )
    if raw.status != OPTIMAL:
        return raw.status, None, None, mode
    t = raw.x[E]
    x = EdgeFrequencyVector(sft, tuple(y / t for y in raw.x[:E]))
    return OPTIMAL, raw.value, x, mode


def _check_denominator(g: LocallyConstantPotential, sigma: Optional[DenominatorBound]) -> DenominatorBound:
    if sigma is None:
        return DenominatorBound.from_potential(g)
    sigma.check(g)
    return sigma


def _ergodic_ratio_witness(
    sft: SFT, num: Sequence[Number], den: Sequence[Number], value: Number, tol: Number,
    settings: Settings,
) -> Optional[Cycle]:
    idx = sft.edge_index
    for cycle in enumerate_simple_cycles(sft, sft.alphabet_size, settings):
        r = _ratio(sum(num[idx[e]] for e in cycle.edges), sum(den[idx[e]] for e in cycle.edges))
        if abs(r - value) <= tol:
            return cycle
    return None


def ratio_max_constrained(
    F: Potential,
    G: Potential,
    Phi: Potential,
    Psi: Potential,
    alpha: Number,
    sigma: Optional[DenominatorBound] = None,
    settings: Optional[Settings] = None,
) -> RatioResult:
    """sup F_*/G_* over measures with Phi_*/Psi_* = alpha."""
    settings = settings or get_settings()
    f, xi_f = additive_view(F)
    g, xi_g = additive_view(G)
    phi, xi_phi = additive_view(Phi)
    psi, xi_psi = additive_view(Psi)
    sigma = _check_denominator(g, sigma)
    sigma_psi = DenominatorBound.from_potential(psi)

    sft = lp_presentation(f, g, phi, psi)
    num, den = f.edge_weights(sft), g.edge_weights(sft)
    phi_w, psi_w = phi.edge_weights(sft), psi.edge_weights(sft)

    status, value, x, mode = _ratio_lp(
        sft, num, den, [a - alpha * b for a, b in zip(phi_w, psi_w)], "max", settings
    )
    if status == INFEASIBLE:
        lo = _ratio_lp(sft, phi_w, psi_w, None, "min", settings)[1]
        hi = _ratio_lp(sft, phi_w, psi_w, None, "max", settings)[1]
        tol = settings.numerics.clamp_tolerance
        if lo - tol <= alpha <= hi + tol:
            clamped = lo if alpha < lo else hi
            logger.warning(f"ratio constraint {float(alpha):.12g} clamped to {float(clamped):.12g}")
            status, value, x, mode = _ratio_lp(
                sft, num, den, [a - clamped * b for a, b in zip(phi_w, psi_w)], "max", settings
            )
        else:
            raise Infeasible(
                f"ratio constraint {format_number(alpha)} outside feasible interval "
                f"[{format_number(lo)}, {format_number(hi)}]",
                feasible_interval=(lo, hi),
            )
    if status != OPTIMAL:
        raise Infeasible(f"ratio LP reported {status}")

    error = (xi_f + abs(value) * xi_g) / sigma.sigma if (xi_f or xi_g) else 0
    # the level set itself was cut out by the approximants of Phi and Psi
    if xi_phi or xi_psi:
        error += (xi_phi + abs(alpha) * xi_psi) / sigma_psi.sigma
    return RatioResult(Interval.point(value).widen(error), x, mode, alpha=alpha)


def ratio_max(
    F: Potential,
    G: Potential,
    sigma: Optional[DenominatorBound] = None,
    settings: Optional[Settings] = None,
) -> RatioResult:
    """sup F_*/G_* over all invariant measures, attained on a simple cycle."""
    settings = settings or get_settings()
    f, xi_f = additive_view(F)
    g, xi_g = additive_view(G)
    sigma = _check_denominator(g, sigma)
    sft = lp_presentation(f, g)
    num, den = f.edge_weights(sft), g.edge_weights(sft)

    status, value, x, mode = _ratio_lp(sft, num, den, None, "max", settings)
    if status != OPTIMAL:
        raise Infeasible(f"ratio LP reported {status}")
    tol = _tolerance(mode, settings)

    graph_value, graph_cycle = dinkelbach_ratio(sft, num, den)
    if abs(graph_value - value) > max(tol, 1e-12 if mode != "exact" else 0):
        raise CrossCheckFailed(
            f"Dinkelbach ratio {format_number(graph_value)} disagrees with LP {format_number(value)}"
        )

    cycle = vertex_to_cycle(x)
    if cycle is None:
        found = _ergodic_ratio_witness(sft, num, den, value, tol, settings)
        if found is None:
            raise CrossCheckFailed("no simple cycle attains the optimal ratio")
        cycle = found.project(sft)

    error = (xi_f + abs(value) * xi_g) / sigma.sigma if (xi_f or xi_g) else 0
    return RatioResult(Interval.point(value).widen(error), x, mode, witness_cycle=cycle)


def ratio_min(
    F: Potential,
    G: Potential,
    sigma: Optional[DenominatorBound] = None,
    settings: Optional[Settings] = None,
) -> RatioResult:
    """inf F_*/G_*, as minus the sup of (-F)_*/G_*."""
    f, xi_f = additive_view(F)
    negated = ratio_max(f.scale(-1), G, sigma, settings)
    value = negated.value.scale(-1).widen(xi_f)
    return RatioResult(value, negated.witness, negated.mode, witness_cycle=negated.witness_cycle)


# extreme points


def extreme_point_check(
    F: Potential, Phi: Potential, settings: Optional[Settings] = None
) -> Dict[str, Any]:
    """At alpha = eta(Phi) and beta(Phi) the conditional optimum sits on one simple cycle."""
    settings = settings or get_settings()
    f, xi_f = additive_view(F)
    phi, xi_phi = additive_view(Phi)
    sft = lp_presentation(f, phi)
    constraint = phi.edge_weights(sft)
    objective = f.edge_weights(sft)

    report: Dict[str, Any] = {"endpoints": [], "approximant_error": format_number(xi_f + xi_phi)}
    for name, sense in (("eta", "min"), ("beta", "max")):
        alpha = lp_optimize(sft, constraint, sense, settings=settings).value
        result = conditional_max(F, Phi, alpha, settings)
        tol = _tolerance(result.mode, settings)
        cycle = vertex_to_cycle(result.witness)
        if cycle is None:
            for candidate in enumerate_simple_cycles(sft, sft.alphabet_size, settings):
                if (
                    abs(cycle_mean(sft, candidate, constraint) - alpha) <= tol
                    and abs(cycle_mean(sft, candidate, objective) - result.value.value) <= tol
                ):
                    cycle = candidate.project(sft)
                    break
        if cycle is None:
            raise CrossCheckFailed(f"no single-cycle optimizer at alpha = {name}")
        report["endpoints"].append(
            {
                "endpoint": name,
                "alpha": format_number(alpha),
                "lambda": _interval_json(result.value),
                "cycle": cycle.to_list(),
            }
        )
    report["ok"] = True
    return report
