"""
Quadrature, Monte Carlo and rate-fitting oracles.
"""
