#!/usr/bin/env python3
"""
Solver Metrics Demo

Runs a spectrum sweep on random instances and prints the LP counters, then
writes a Prometheus text file that a node-exporter textfile collector can
pick up.

Usage:
    python solver_metrics.py [METRICS_FILE]
"""

import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

# Add parent directory to path for imports
sys.path.append(str(Path(__file__).parent.parent.parent))

from ergopt.core.optimizers import spectrum
from ergopt.core.potentials import LocallyConstantPotential
from ergopt.core.symbolic import validate_sft
from ergopt.monitoring import get_collector


def random_instance(rng):
    n = int(rng.integers(2, 5))
    edges = sorted({(i, (i + 1) % n) for i in range(n)} | {(0, 0)} | {(0, i) for i in range(n)})
    sft = validate_sft(n, edges)

    def weights():
        return {(s,): Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4))) for s in range(n)}

    return LocallyConstantPotential(sft, 1, weights()), LocallyConstantPotential(sft, 1, weights())


def main():
    metrics_file = sys.argv[1] if len(sys.argv) > 1 else "ergopt.prom"
    rng = np.random.default_rng(7)
    collector = get_collector()

    for _ in range(5):
        F, Phi = random_instance(rng)
        spectrum(F, Phi, 9)

    print(json.dumps(collector.get_metrics_summary(), indent=2))
    if collector.export_prometheus(metrics_file):
        print(f"wrote {metrics_file}")


if __name__ == "__main__":
    main()
