"""
Plugin and cross-validation bandwidth selection.
"""
