"""euleralpha: a numerical laboratory for 2D Euler and Euler-alpha flows.

Pseudospectral vorticity solver, contour dynamics for vortex patches with
log and screened (Bessel) kernels, Littlewood-Paley / Besov norm machinery,
and a convergence-rate harness for the alpha -> 0 limit.
"""

__version__ = "0.1.0"

from .kernels import AlphaKernel, bessel_k, green_helmholtz, psi_derivative

__all__ = [
    "AlphaKernel",
    "bessel_k",
    "green_helmholtz",
    "psi_derivative",
    "__version__",
]
