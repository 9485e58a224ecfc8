"""Convex-roof quantum resource measures via Stiefel-trivialized descent.

Computes mixed-state resource measures defined as optimizations over
pure-state decompositions — entanglement of formation, linear entropy of
entanglement, geometric coherence, stabilizer purity/entropy, quantum
Fisher information, constrained Holevo capacity — by parametrizing the
decompositions through trivializations of the complex Stiefel manifold and
running multi-start quasi-Newton descent with hand-written adjoints.
"""

__version__ = "0.1.0"

from .ensemble import (
    AuxiliaryEnsemble,
    DensityMatrix,
    SpectralPrep,
    auxiliary_states,
    grad_wrt_stiefel,
    spectral_prep,
)
from .errors import (
    ConvroofError,
    InvalidInputError,
    InvalidStateError,
    NotPSDError,
    RankDeficiencyError,
    SolverFailureError,
)
from .measures import EPSILON, LSE_TEMPERATURE, MeasureSpec, StabilityConfig
from .solver import SolveResult, SolverConfig, lbfgs_minimize, solve

__all__ = [
    "__version__",
    "AuxiliaryEnsemble",
    "DensityMatrix",
    "SpectralPrep",
    "auxiliary_states",
    "grad_wrt_stiefel",
    "spectral_prep",
    "ConvroofError",
    "InvalidInputError",
    "InvalidStateError",
    "NotPSDError",
    "RankDeficiencyError",
    "SolverFailureError",
    "EPSILON",
    "LSE_TEMPERATURE",
    "MeasureSpec",
    "StabilityConfig",
    "SolveResult",
    "SolverConfig",
    "lbfgs_minimize",
    "solve",
]
