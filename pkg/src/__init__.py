"""
Asymmetric kernel density estimation for positive random variables.
"""
from loguru import logger

__version__ = "0.1.0"

# Library code stays quiet unless an application opts in (see src.log).
logger.disable("src")
