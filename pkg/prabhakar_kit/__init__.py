"""
prabhakar_kit

Prabhakar fractional operators, the Green's function of a nonlocal fractional
boundary value problem, and a certifier for its Hartman-Wintner-type inequality.
"""

__version__ = "0.1.0a0"
