"""
Kernel families, weight functions and kernel moments.
"""
