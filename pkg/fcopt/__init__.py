"""
fcopt: methods for fully composite convex optimization, min_x F(x, f(x)).
"""

__version__ = "0.1.0"
