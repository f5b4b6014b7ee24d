"""Simultaneous rational approximation to values of the exponential function.

Exact Hermite-point recurrences and Mahler determinants over Q, streaming
continued fractions of e^a driven by 2x2 integer matrix reduction, p-adic
exponentials and ultrametric estimates, rooted forests on p-adic point sets,
steepest-ascent path tracing for complex polynomials, and two-dimensional
successive minima with interval certification.
"""

__version__ = "0.1.0"
