"""Exact-arithmetic toolkit for the topology of real regular jacobian
elliptic surfaces: arithmetic restriction enumeration, trigonal curve
analysis on even Hirzebruch surfaces, and combinatorial patchworking,
with cross-checks between all three routes.
"""

__version__ = "0.1.0"
