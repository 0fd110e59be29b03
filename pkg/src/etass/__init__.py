"""Exact recomputation of the eta-inverted R-motivic stable stems.

Pipeline: a rho-Bockstein spectral sequence over GF(2) produces the
h1-inverted Ext ring, an Adams spectral sequence runs on top of it, the
stem groups are read off the final page, and the three-fold bracket
structure generating them is rebuilt and checked.  Everything is exact
integer/GF(2) arithmetic inside a finite Milnor-Witt/Chow window.
"""

__version__ = "0.1.0"
