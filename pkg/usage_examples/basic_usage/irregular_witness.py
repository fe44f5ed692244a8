#!/usr/bin/env python3
"""
Irregular Witness Example

Builds a point of the full 2-shift whose average of x_0 oscillates between
the fixed points (1) and (0), then writes the oscillation record to CSV.

Usage:
    python irregular_witness.py [OUTPUT_DIR]
"""

import sys
from fractions import Fraction
from pathlib import Path

# Add parent directory to path for imports
sys.path.append(str(Path(__file__).parent.parent.parent))

from ergopt.core.orbits import construct_irregular_witness, irregular_supremum_estimate
from ergopt.core.polytope import uniform_cycle_vector
from ergopt.core.potentials import constant, symbol_value
from ergopt.core.symbolic import Cycle, full_shift


def main():
    output_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out")
    sft = full_shift(2)
    x0, one = symbol_value(sft), constant(sft, Fraction(1))
    mu1 = uniform_cycle_vector(sft, Cycle.of([1]))
    mu2 = uniform_cycle_vector(sft, Cycle.of([0]))

    witness = construct_irregular_witness(mu1, mu2, x0, one, depth=8, growth_factor=4, seed=0)
    frame = witness.to_dataframe()
    print(frame.to_string(index=False))
    print(f"word length: {len(witness.word)}")
    print(f"block dominance: {witness.metadata['block_dominance']:.3f}")

    estimate = irregular_supremum_estimate(x0, one, [witness])
    print(f"supremum estimate: {estimate.to_dict()['estimate']}")

    output_dir.mkdir(parents=True, exist_ok=True)
    frame.to_csv(output_dir / "oscillation.csv", index=False)
    print(f"wrote {output_dir / 'oscillation.csv'}")


if __name__ == "__main__":
    main()
