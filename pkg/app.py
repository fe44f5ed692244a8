#!/usr/bin/env python3
"""
ergopt command-line application

Batch front-end over the ergopt library. Every command reads a system spec
(see config/systems/), runs one computation and prints deterministic JSON on
stdout; logs go to stderr.

Usage:
    ergopt [--config CONFIG] [--log-level LEVEL] [--metrics-out FILE] COMMAND SPEC [OPTIONS]

Examples:
    ergopt beta config/systems/golden_mean.yaml
    ergopt lambda --alpha 0.75 config/systems/gm_f1_phi0.yaml
    ergopt spectrum --grid 9 --csv out/ config/systems/gm_f1_phi0.yaml
    ergopt irregular --depth 8 --growth 4 --seed 0 config/systems/full_shift_x0.yaml

Exit codes: 0 success, 2 malformed input, 3 infeasible, 4 numerical failure, 1 other.
"""

import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import click

from ergopt import __version__
from ergopt.config import Settings, load_config, set_settings
from ergopt.core.errors import ErgoptError, HypothesisFails, SystemSpecError
from ergopt.core.intervals import Number, format_number, is_rational
from ergopt.core.optimizers import (
    conditional_max,
    extreme_point_check,
    level_set_range,
    max_ergodic_average,
    min_ergodic_average,
    ratio_max,
    ratio_max_constrained,
    ratio_min,
    spectrum,
)
from ergopt.core.orbits import (
    construct_irregular_witness,
    finite_horizon_max,
    irregular_supremum_estimate,
)
from ergopt.core.polytope import EdgeFrequencyVector, uniform_cycle_vector
from ergopt.core.potentials import LocallyConstantPotential, Potential, measure_average
from ergopt.core.suspension import (
    flow_average,
    flow_average_range,
    flow_irregular_optimum,
    flow_level_set_optimum,
)
from ergopt.core.symbolic import Cycle, enumerate_simple_cycles
from ergopt.monitoring import MetricsCollector, get_collector
from ergopt.system import SystemSpec, load_system, role_names, to_number

logger = logging.getLogger("ergopt")

SUSPENSION_COMMANDS = ("average", "range", "level-set", "irregular")


def _mode_of(*values: Number) -> str:
    return "exact" if all(is_rational(v) for v in values) else "float"


def _table(potential: Potential, role: str) -> LocallyConstantPotential:
    if not isinstance(potential, LocallyConstantPotential):
        raise SystemSpecError(f"{role} must be a block-weight table for this command", role=role)
    return potential


class ErgoptApp:
    """Runs ergopt commands against system specs."""

    def __init__(self, config: Optional[Dict[str, Any]] = None, log_level: Optional[str] = None):
        self.config = config if config is not None else load_config()
        self.settings = Settings.from_dict(self.config)
        set_settings(self.settings)
        self.metrics: MetricsCollector = get_collector()

        self._setup_logging(log_level)

    def _setup_logging(self, log_level: Optional[str] = None) -> None:
        """Configure the root logger on stderr so stdout stays machine-readable."""
        level = (log_level or self.settings.log_level).upper()
        logging.basicConfig(
            level=getattr(logging, level, logging.INFO),
            format=self.settings.log_format,
            stream=sys.stderr,
            force=True,
        )

    def load(self, spec_path: str) -> SystemSpec:
        system = load_system(spec_path)
        logger.info(f"loaded {spec_path}: {system.sft.alphabet_size} symbols, {len(system.potentials)} potentials")
        return system

    # commands

    def info(self, system: SystemSpec) -> Dict[str, Any]:
        sft = system.sft
        cycles = enumerate_simple_cycles(sft, sft.alphabet_size, self.settings)
        potentials = {}
        for name, potential in sorted(system.potentials.items()):
            entry: Dict[str, Any] = {"kind": potential.kind}
            if isinstance(potential, LocallyConstantPotential):
                entry["range"] = potential.range
            potentials[name] = entry
        return {
            "sft": sft.to_dict(),
            "mixing": sft.is_mixing,
            "mixing_time": sft.mixing_time,
            "edges": len(sft.edges),
            "simple_cycles": len(cycles),
            "potentials": potentials,
            "roles": {role: system.run[role] for role in role_names(system)},
            "mode": "exact",
        }

    def beta(self, system: SystemSpec, potential: Optional[str] = None) -> Dict[str, Any]:
        target = system.potential(potential) if potential else system.role("F")
        return max_ergodic_average(target, self.settings).to_dict("beta")

    def eta(self, system: SystemSpec, potential: Optional[str] = None) -> Dict[str, Any]:
        target = system.potential(potential) if potential else system.role("F")
        return min_ergodic_average(target, self.settings).to_dict("eta")

    def conditional(self, system: SystemSpec, alpha: Optional[Number]) -> Dict[str, Any]:
        alpha = self._alpha(system, alpha)
        F, Phi = system.role("F"), system.role("PHI")
        result = conditional_max(F, Phi, alpha, self.settings).to_dict()
        result["range"] = [format_number(v) for v in self._range(Phi)]
        return result

    def spectrum(self, system: SystemSpec, grid: Optional[int], csv_dir: Optional[str]) -> Dict[str, Any]:
        size = int(grid or system.parameter("grid", 9))
        F, Phi = system.role("F"), system.role("PHI")
        result = spectrum(F, Phi, size, self.settings)
        output = result.to_dict()
        output["endpoints"] = extreme_point_check(F, Phi, self.settings)
        if csv_dir:
            output["csv"] = self._write_csv(result.to_dataframe(), csv_dir, "spectrum.csv")
        return output

    def ratio(self, system: SystemSpec, alpha: Optional[Number]) -> Dict[str, Any]:
        F, G = system.role("F"), system.role("G")
        if alpha is None and "alpha" not in system.run:
            return ratio_max(F, G, settings=self.settings).to_dict()
        alpha = self._alpha(system, alpha)
        Phi, Psi = system.role("PHI"), system.role("PSI")
        return ratio_max_constrained(F, G, Phi, Psi, alpha, settings=self.settings).to_dict()

    def irregular(
        self,
        system: SystemSpec,
        depth: Optional[int],
        growth: Optional[int],
        seed: Optional[int],
        csv_dir: Optional[str],
    ) -> Dict[str, Any]:
        F = _table(system.role("F"), "F")
        G = _table(system.role("G"), "G")
        Phi = _table(system.role("PHI", system.run.get("F")), "PHI")
        Psi = _table(system.role("PSI"), "PSI")
        depth = int(depth or system.parameter("depth", 8))
        growth = growth or system.parameter("growth")
        seed = seed if seed is not None else system.parameter("seed")

        optimum = ratio_max(F, G, settings=self.settings)
        mu1, mu2 = self._irregular_targets(system, optimum.witness_cycle, Phi, Psi)
        witness = construct_irregular_witness(
            mu1, mu2, Phi, Psi, depth=depth, growth_factor=growth, seed=seed, settings=self.settings
        )
        estimate = irregular_supremum_estimate(F, G, [witness])
        output = {
            "ratio_max": format_number(optimum.value.value),
            "witness_cycle": optimum.witness_cycle.to_list() if optimum.witness_cycle else None,
            "estimate": estimate.to_dict(),
            "witness": witness.to_dict(),
            "mode": optimum.mode,
        }
        if csv_dir:
            output["csv"] = self._write_csv(witness.to_dataframe(), csv_dir, "oscillation.csv")
        return output

    def suspension(
        self,
        system: SystemSpec,
        sub: str,
        alpha: Optional[Number],
        depth: Optional[int],
        seed: Optional[int],
    ) -> Dict[str, Any]:
        tau = system.roof()
        if sub == "average":
            H = system.observable("observable")
            value = flow_average(H, system.measure(), tau, self.settings)
            return {"flow_average": format_number(value), "mode": _mode_of(value)}
        if sub == "range":
            Phi = system.observable("phi")
            interval = flow_average_range(Phi, tau, self.settings)
            return {
                "range": [format_number(interval.lo), format_number(interval.hi)],
                "mode": _mode_of(interval.lo, interval.hi),
            }
        if sub == "level-set":
            alpha = self._alpha(system, alpha)
            optimum = flow_level_set_optimum(
                system.observable("observable"), system.observable("phi"), alpha, tau, self.settings
            )
            return optimum.to_dict()
        return flow_irregular_optimum(
            system.observable("observable"),
            system.observable("phi"),
            tau,
            depth=int(depth or system.parameter("depth", 8)),
            seed=seed if seed is not None else system.parameter("seed"),
            settings=self.settings,
        )

    def horizon(self, system: SystemSpec, n: Optional[int], potential: Optional[str]) -> Dict[str, Any]:
        target = system.potential(potential) if potential else system.role("F")
        n = int(n or system.parameter("n", 16))
        result = finite_horizon_max(target, n, self.settings)
        output = result.to_dict()
        output["mode"] = "exact" if result.exact and is_rational(result.value) else "float"
        if isinstance(target, LocallyConstantPotential):
            beta = max_ergodic_average(target, self.settings).value.value
            output["beta"] = format_number(beta)
            output["gap"] = format_number(result.value - beta)
            output["gap_bound"] = format_number(2 * target.range * target.max_abs_weight / n)
        return output

    def validate(self, system: SystemSpec) -> Dict[str, Any]:
        output = system.to_dict()
        output["mode"] = "exact"
        return output

    # helpers

    def _alpha(self, system: SystemSpec, alpha: Optional[Number]) -> Number:
        if alpha is None:
            alpha = system.parameter("alpha")
        if alpha is None:
            raise SystemSpecError("no alpha given (--alpha or run.alpha)")
        return alpha

    def _range(self, Phi: Potential) -> Tuple[Number, Number]:
        interval = level_set_range(Phi, self.settings)
        return interval.lo, interval.hi

    def _irregular_targets(
        self,
        system: SystemSpec,
        optimal_cycle: Optional[Cycle],
        Phi: LocallyConstantPotential,
        Psi: LocallyConstantPotential,
    ) -> Tuple[EdgeFrequencyVector, EdgeFrequencyVector]:
        """run.targets if given, else the F/G-optimal cycle and a cycle with a different Phi/Psi ratio."""
        sft = system.sft
        if "targets" in system.run:
            first, second = system.run["targets"]
            return (
                uniform_cycle_vector(sft, Cycle.of(int(s) for s in first)),
                uniform_cycle_vector(sft, Cycle.of(int(s) for s in second)),
            )
        if optimal_cycle is None:
            raise HypothesisFails("the ratio optimum has no cycle witness to target")

        def level(vector: EdgeFrequencyVector) -> Number:
            num = measure_average(Phi, vector, settings=self.settings).value
            return num / measure_average(Psi, vector, settings=self.settings).value

        first = uniform_cycle_vector(sft, optimal_cycle)
        candidates: List[Optional[Cycle]] = [
            ratio_min(Phi, Psi, settings=self.settings).witness_cycle,
            ratio_max(Phi, Psi, settings=self.settings).witness_cycle,
        ]
        for cycle in candidates:
            if cycle is None:
                continue
            vector = uniform_cycle_vector(sft, cycle)
            if level(vector) != level(first):
                return first, vector
        raise HypothesisFails("Phi/Psi is constant on the candidate cycles; the irregular set is empty")

    def _write_csv(self, frame: Any, csv_dir: str, name: str) -> str:
        directory = Path(csv_dir)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / name
        frame.to_csv(path, index=False)
        logger.info(f"wrote {len(frame)} rows to {path}")
        return str(path)


def _emit(app: ErgoptApp, command: str, action: Callable[[], Dict[str, Any]]) -> None:
    """Run one command; JSON on stdout, structured error on stderr with the mapped exit code."""
    logger.info(f"running {command}")
    try:
        result = action()
    except ErgoptError as e:
        logger.error(f"{command} failed: {type(e).__name__}: {e.message}")
        click.echo(json.dumps(e.to_dict(), sort_keys=True), err=True)
        sys.exit(e.exit_code)
    except ValueError as e:
        logger.error(f"{command} failed: {e}")
        click.echo(json.dumps({"error": "ValueError", "message": str(e)}, sort_keys=True), err=True)
        sys.exit(1)
    click.echo(json.dumps(result, sort_keys=True, indent=2))


def _parse_alpha(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[Number]:
    if value is None:
        return None
    try:
        return to_number(value)
    except SystemSpecError as e:
        raise click.BadParameter(e.message)


spec_argument = click.argument("spec", type=click.Path(dir_okay=False))
alpha_option = click.option("--alpha", callback=_parse_alpha, help='Level value, e.g. 0.75 or "3/4".')
csv_option = click.option("--csv", "csv_dir", type=click.Path(file_okay=False), help="Directory for CSV side files.")


@click.group()
@click.version_option(__version__, prog_name="ergopt")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="Configuration file path.")
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], case_sensitive=False),
    help="Override global.logging.level.",
)
@click.option("--metrics-out", type=click.Path(dir_okay=False), help="Write Prometheus metrics here on exit.")
@click.pass_context
def cli(ctx: click.Context, config_path: Optional[str], log_level: Optional[str], metrics_out: Optional[str]) -> None:
    """Ergodic optimization over subshifts of finite type."""
    try:
        config = load_config(config_path)
    except ErgoptError as e:
        click.echo(json.dumps(e.to_dict(), sort_keys=True), err=True)
        sys.exit(e.exit_code)
    app = ErgoptApp(config, log_level)
    ctx.obj = app
    if metrics_out:
        ctx.call_on_close(lambda: app.metrics.export_prometheus(metrics_out))


@cli.command()
@spec_argument
@click.pass_obj
def info(app: ErgoptApp, spec: str) -> None:
    """SFT diagnostics: mixing time, edges, simple cycles, potentials."""
    _emit(app, "info", lambda: app.info(app.load(spec)))


@cli.command()
@spec_argument
@click.option("--potential", help="Potential name (default: role F).")
@click.pass_obj
def beta(app: ErgoptApp, spec: str, potential: Optional[str]) -> None:
    """Maximum ergodic average."""
    _emit(app, "beta", lambda: app.beta(app.load(spec), potential))


@cli.command()
@spec_argument
@click.option("--potential", help="Potential name (default: role F).")
@click.pass_obj
def eta(app: ErgoptApp, spec: str, potential: Optional[str]) -> None:
    """Minimum ergodic average."""
    _emit(app, "eta", lambda: app.eta(app.load(spec), potential))


@cli.command("lambda")
@spec_argument
@alpha_option
@click.pass_obj
def lambda_(app: ErgoptApp, spec: str, alpha: Optional[Number]) -> None:
    """Conditional maximum of F over measures with Phi-average alpha."""
    _emit(app, "lambda", lambda: app.conditional(app.load(spec), alpha))


@cli.command("spectrum")
@spec_argument
@click.option("--grid", type=int, help="Number of alpha grid points (at least 3).")
@csv_option
@click.pass_obj
def spectrum_command(app: ErgoptApp, spec: str, grid: Optional[int], csv_dir: Optional[str]) -> None:
    """Conditional spectrum over [eta(Phi), beta(Phi)] with its flat top."""
    _emit(app, "spectrum", lambda: app.spectrum(app.load(spec), grid, csv_dir))


@cli.command()
@spec_argument
@alpha_option
@click.pass_obj
def ratio(app: ErgoptApp, spec: str, alpha: Optional[Number]) -> None:
    """Maximum of F/G, optionally on the level set Phi/Psi = alpha."""
    _emit(app, "ratio", lambda: app.ratio(app.load(spec), alpha))


@cli.command()
@spec_argument
@click.option("--depth", type=int, help="Number of alternating blocks.")
@click.option("--growth", type=int, help="Block growth factor.")
@click.option("--seed", type=int, help="Random seed for generic blocks.")
@csv_option
@click.pass_obj
def irregular(
    app: ErgoptApp,
    spec: str,
    depth: Optional[int],
    growth: Optional[int],
    seed: Optional[int],
    csv_dir: Optional[str],
) -> None:
    """Build a Phi-irregular witness and estimate the supremum of F/G over it."""
    _emit(app, "irregular", lambda: app.irregular(app.load(spec), depth, growth, seed, csv_dir))


@cli.command()
@click.argument("sub", type=click.Choice(SUSPENSION_COMMANDS))
@spec_argument
@alpha_option
@click.option("--depth", type=int, help="Witness depth for the irregular subcommand.")
@click.option("--seed", type=int, help="Random seed for the irregular subcommand.")
@click.pass_obj
def suspension(
    app: ErgoptApp,
    sub: str,
    spec: str,
    alpha: Optional[Number],
    depth: Optional[int],
    seed: Optional[int],
) -> None:
    """Suspension-flow averages reduced to ratios on the base."""
    _emit(app, f"suspension {sub}", lambda: app.suspension(app.load(spec), sub, alpha, depth, seed))


@cli.command()
@spec_argument
@click.option("--n", "n", type=int, help="Word length.")
@click.option("--potential", help="Potential name (default: role F).")
@click.pass_obj
def horizon(app: ErgoptApp, spec: str, n: Optional[int], potential: Optional[str]) -> None:
    """Finite-horizon maximum (1/n) max f_n against beta."""
    _emit(app, "horizon", lambda: app.horizon(app.load(spec), n, potential))


@cli.command()
@spec_argument
@click.pass_obj
def validate(app: ErgoptApp, spec: str) -> None:
    """Parse a system spec and print its normalised form."""
    _emit(app, "validate", lambda: app.validate(app.load(spec)))


def main() -> None:
    """Main entry point."""
    cli()


if __name__ == "__main__":
    main()
