"""Numerical laboratory for degrees of compact-group-valued cocycles.

Skew products over torus translation flows with fibers in T^d, SU(2),
SO(3,R) and U(2): cocycle iteration, degree fields, straightening,
Koopman correlation series and ergodicity/mixing/spectral verdicts.
"""

__version__ = "0.1.0"
