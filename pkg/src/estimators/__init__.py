"""
Density estimators built on weight functions and shifted kernels.
"""
