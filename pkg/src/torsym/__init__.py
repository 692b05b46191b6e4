"""
torsym - exact symmetry computations for characteristic pairs of quasitoric manifolds.
"""

__version__ = "0.1.0"
