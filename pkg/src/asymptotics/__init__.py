"""
Leading-order bias, variance and MISE predictions.
"""
