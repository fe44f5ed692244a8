"""
Core ergodic optimization modules.

    symbolic     SFTs, words, cycles, block recodings
    potentials   block-weight tables, matrix cocycles, sequence potentials
    polytope     edge-frequency polytope, Markov measures, LP optimization
    simplex      exact rational simplex and the float LP backend
    optimizers   beta/eta, conditional spectra, ratio optima
    orbits       finite horizons, generic words, irregular witnesses
    suspension   flows under a roof function

Modules are imported directly (``from ergopt.core.optimizers import ...``);
this package does not re-export them because ergopt.config depends on
ergopt.core.errors.
"""
