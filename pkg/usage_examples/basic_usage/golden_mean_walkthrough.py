#!/usr/bin/env python3
"""
Golden-Mean Walkthrough

Computes the headline quantities for the golden-mean shift with
F = indicator of symbol 1 and Phi = indicator of symbol 0.

Usage:
    python golden_mean_walkthrough.py

Features:
- beta / eta with their periodic witnesses
- conditional maximum at alpha = 3/4
- spectrum sweep and its flat top
- finite-horizon maximum against beta
"""

import sys
from fractions import Fraction
from pathlib import Path

# Add parent directory to path for imports
sys.path.append(str(Path(__file__).parent.parent.parent))

from ergopt.core.intervals import format_number
from ergopt.core.optimizers import conditional_max, max_ergodic_average, min_ergodic_average, spectrum
from ergopt.core.orbits import finite_horizon_max
from ergopt.core.potentials import indicator
from ergopt.core.symbolic import golden_mean_shift


def demonstrate_extremal_averages(F):
    print("=" * 60)
    print("Extremal ergodic averages")
    print("=" * 60)
    beta = max_ergodic_average(F)
    eta = min_ergodic_average(F)
    print(f"beta(F) = {format_number(beta.value.value)} on cycle {beta.witness_cycle.to_list()}")
    print(f"eta(F)  = {format_number(eta.value.value)} on cycle {eta.witness_cycle.to_list()}")


def demonstrate_spectrum(F, Phi):
    print("\n" + "=" * 60)
    print("Conditional spectrum alpha -> Lambda(alpha)")
    print("=" * 60)
    result = conditional_max(F, Phi, Fraction(3, 4))
    print(f"Lambda(3/4) = {format_number(result.value.value)} ({result.mode})")

    sweep = spectrum(F, Phi, 9)
    print(sweep.to_dataframe().to_string(index=False))
    lo, hi = sweep.flat_top
    print(f"flat top: [{format_number(lo)}, {format_number(hi)}], beta(F) = {format_number(sweep.beta_f)}")


def demonstrate_horizon(F):
    print("\n" + "=" * 60)
    print("Finite horizons")
    print("=" * 60)
    for n in (4, 16, 64):
        result = finite_horizon_max(F, n)
        print(f"n = {n:3d}: (1/n) max f_n = {format_number(result.value)}")


def main():
    sft = golden_mean_shift()
    F, Phi = indicator(sft, 1), indicator(sft, 0)
    demonstrate_extremal_averages(F)
    demonstrate_spectrum(F, Phi)
    demonstrate_horizon(F)


if __name__ == "__main__":
    main()
