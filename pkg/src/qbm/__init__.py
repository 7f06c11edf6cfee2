"""Desk-scale emulation of grid-superposition Box-Muller sampling.

Subpackages:
    fixedpoint  -- bit-exact (n, p) register arithmetic
    funcapprox  -- piecewise-polynomial sin/cos/ln/sqrt with range reduction
    boxmuller   -- grid sample multisets, correlation, multivariate maps
    qae         -- exact amplitude-estimation statistics
    estimators  -- the three expectation estimators with error budgets
    bounds      -- Riemann-sum lemma verifiers
    resources   -- closed-form T-count / T-depth / qubit estimates
    metrics     -- sample-quality metrics (exp error, quantile RMS)
    cli         -- `qbm` command-line front end
"""

__version__ = "0.1.0"
