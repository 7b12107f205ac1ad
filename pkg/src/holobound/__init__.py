"""Certificate toolkit for arithmetic holonomy bounds.

Exact power-series identity checks, torus quadrature for conformal
capacity integrals, holonomy-quotient evaluation with irrationality
exponent thresholds, 2-adic zeta machinery, and the Diophantine
reduction chain over the rationals.
"""

__version__ = "0.1.0"
