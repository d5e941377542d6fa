"""Finite and numeric verification of the non-split Cartan / G(p) computations:
subgroups of GL_2(F_p), cusps of modular curves, Siegel-unit expansions and the
Runge-method bounds."""

from .fp_arith import PrimeContext, make_context

__all__ = ["PrimeContext", "make_context"]
__version__ = "0.1.0"
