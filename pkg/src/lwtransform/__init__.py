"""Numerical Lebedev-Whittaker transforms for GL(2) and GL(3).

Submodules
----------
specfun     complex Gamma and K_{it}(x)
spectral    spectral parameters, Weyl orbits, Haar weight
whittaker   completed Whittaker functions and the Jacquet-integral oracle
quadrature  Gauss-Legendre boxes, line integrals, lattice functions
transform   forward/inverse transform, c-function, Plancherel density
verify      Stade's formula, residue limit, Mellin checks
cli         batch command-line front end
"""

from .errors import (
    BoundaryError,
    BudgetExceeded,
    ContourTruncationError,
    ConvergenceError,
    DegenerateParameters,
    DomainError,
    LWError,
    PoleError,
    TailBudgetExceeded,
    UnsupportedRank,
    UsageError,
)
from .quadrature import ContourSpec, GridFunction, QuadratureRule, smooth_bump
from .specfun import bessel_k_imag_order, gamma, log_gamma
from .spectral import SecondSpectralPoint, SpectralPoint, alpha_from_t, haar_weight
from .transform import (
    TransformReport,
    c_function,
    forward,
    inverse,
    plancherel_density,
    roundtrip,
)
from .whittaker import WhittakerEvaluator, jacquet_oracle, whittaker_gl2, whittaker_gl3

__version__ = "0.1.0"

__all__ = [
    "BoundaryError",
    "BudgetExceeded",
    "ContourSpec",
    "ContourTruncationError",
    "ConvergenceError",
    "DegenerateParameters",
    "DomainError",
    "GridFunction",
    "LWError",
    "PoleError",
    "QuadratureRule",
    "SecondSpectralPoint",
    "SpectralPoint",
    "TailBudgetExceeded",
    "TransformReport",
    "UnsupportedRank",
    "UsageError",
    "WhittakerEvaluator",
    "alpha_from_t",
    "bessel_k_imag_order",
    "c_function",
    "forward",
    "gamma",
    "haar_weight",
    "inverse",
    "jacquet_oracle",
    "log_gamma",
    "plancherel_density",
    "roundtrip",
    "smooth_bump",
    "whittaker_gl2",
    "whittaker_gl3",
]
