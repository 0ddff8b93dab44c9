"""
Log-normal reference distribution.
"""
