"""Suspension flows over SFTs, reduced to ratio problems on the base.

A flow-invariant measure is mu_tau = (mu x Lebesgue) / int tau dmu on the space
under the roof tau, and an observable H enters only through its fiber integral
h(x) = int_0^tau(x) H(x, t) dt. Hence int H dmu_tau = int h dmu / int tau dmu.
"""
import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

from ergopt.config import Settings, get_settings
from ergopt.core.errors import DenominatorViolated, HypothesisFails, PotentialMismatch
from ergopt.core.intervals import Interval, Number, format_number
from ergopt.core.optimizers import RatioResult, ratio_max, ratio_max_constrained, ratio_min
from ergopt.core.orbits import Measure, birkhoff_prefix_sums, construct_irregular_witness, ratio_at
from ergopt.core.polytope import uniform_cycle_vector
from ergopt.core.potentials import DenominatorBound, LocallyConstantPotential, measure_average

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RoofFunction:
    potential: LocallyConstantPotential

    def __post_init__(self) -> None:
        if not self.potential.min_weight > 0:
            raise DenominatorViolated(
                f"roof function must be positive, minimum weight is {format_number(self.potential.min_weight)}"
            )

    @property
    def sigma(self) -> DenominatorBound:
        return DenominatorBound(self.potential.min_weight)


@dataclass(frozen=True)
class FlowObservable:
    """Observable given by its fiber integral h, a block-weight table on the base."""

    fiber_integrated: LocallyConstantPotential

    def check_roof(self, roof: RoofFunction) -> None:
        if self.fiber_integrated.sft != roof.potential.sft:
            raise PotentialMismatch("observable and roof live on different SFTs")


@dataclass
class FlowOptimum:
    value: Interval
    base: RatioResult
    roof: RoofFunction

    def to_dict(self) -> Dict[str, Any]:
        result = self.base.to_dict()
        result.pop("ratio")
        result["flow_value"] = format_number(self.value.lo) if self.value.is_point else {
            "lo": format_number(self.value.lo), "hi": format_number(self.value.hi)}
        return result


def flow_average(H: FlowObservable, mu: Measure, tau: RoofFunction, settings: Optional[Settings] = None) -> Number:
    """int H dmu_tau = int h dmu / int tau dmu."""
    H.check_roof(tau)
    num = measure_average(H.fiber_integrated, mu, settings=settings).value
    den = measure_average(tau.potential, mu, settings=settings).value
    return num / den


def flow_average_range(
    Phi: FlowObservable, tau: RoofFunction, settings: Optional[Settings] = None
) -> Interval:
    """inf and sup of flow averages of Phi over flow-invariant measures."""
    Phi.check_roof(tau)
    lo = ratio_min(Phi.fiber_integrated, tau.potential, tau.sigma, settings).value
    hi = ratio_max(Phi.fiber_integrated, tau.potential, tau.sigma, settings).value
    return Interval(lo.lo, hi.hi)


def flow_level_set_optimum(
    H: FlowObservable,
    Phi: FlowObservable,
    alpha: Number,
    tau: RoofFunction,
    settings: Optional[Settings] = None,
) -> FlowOptimum:
    """sup {int H dmu_tau : int Phi dmu_tau = alpha}."""
    H.check_roof(tau)
    Phi.check_roof(tau)
    base = ratio_max_constrained(
        H.fiber_integrated, tau.potential, Phi.fiber_integrated, tau.potential, alpha, tau.sigma, settings
    )
    return FlowOptimum(base.value, base, tau)


def flow_irregular_optimum(
    H: FlowObservable,
    Phi: FlowObservable,
    tau: RoofFunction,
    depth: int = 8,
    growth_factor: Optional[int] = None,
    seed: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> Dict[str, Any]:
    """sup of limsup flow averages of H over Phi-irregular points, with a witness."""
    settings = settings or get_settings()
    H.check_roof(tau)
    Phi.check_roof(tau)
    phi, roof, h = Phi.fiber_integrated, tau.potential, H.fiber_integrated

    phi_lo = ratio_min(phi, roof, tau.sigma, settings)
    phi_hi = ratio_max(phi, roof, tau.sigma, settings)
    if not phi_hi.value.lo > phi_lo.value.hi:
        raise HypothesisFails(
            f"flow average of Phi is constant ({format_number(phi_hi.value.value)}); the irregular set is empty"
        )

    optimum = ratio_max(h, roof, tau.sigma, settings)
    base = roof.sft
    first = uniform_cycle_vector(base, optimum.witness_cycle)
    first_ratio = flow_average(Phi, first, tau, settings)
    second = None
    for candidate in (phi_hi.witness_cycle, phi_lo.witness_cycle):
        vector = uniform_cycle_vector(base, candidate)
        if flow_average(Phi, vector, tau, settings) != first_ratio:
            second = vector
            break
    if second is None:
        raise HypothesisFails("no target measure separates the flow averages of Phi")

    witness = construct_irregular_witness(
        first, second, phi, roof, depth=depth, growth_factor=growth_factor, seed=seed, settings=settings
    )
    h_sums, tau_sums = birkhoff_prefix_sums(h, witness.word), birkhoff_prefix_sums(roof, witness.word)
    flow_record = [
        {"k": e.k, "t_k": e.t, "flow_average": format_number(ratio_at(h_sums, tau_sums, e.t))}
        for e in witness.schedule
    ]
    logger.info(f"flow irregular optimum {format_number(optimum.value.value)} at depth {depth}")
    return {
        "value": format_number(optimum.value.value),
        "mode": optimum.mode,
        "witness_cycle": optimum.witness_cycle.to_list(),
        "hypothesis": {
            "phi_min": format_number(phi_lo.value.value),
            "phi_max": format_number(phi_hi.value.value),
        },
        "witness": witness.to_dict(),
        "flow_record": flow_record,
    }
