"""Expected area of the planar Wiener sausage: theory evaluators, Laplace
inversion of the Bessel transforms, and a Monte Carlo harness."""

__version__ = "0.1.0"
