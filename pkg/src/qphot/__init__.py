"""Photon statistics of multimode Gaussian states, q-deformed Planck law and
Floquet invariants of periodic quadratic Hamiltonians."""

from .errors import (
    CutoffCapExceeded,
    InvalidStateError,
    NoPrincipalLogError,
    NonSymplecticError,
    NumericalAccuracyError,
    QphotError,
    ResourceLimitError,
    SingularityError,
)
from .gaussian_state import (
    GaussianState,
    apply_symplectic,
    make_coherent,
    make_squeezed_vacuum,
    make_thermal,
    make_vacuum,
    mean_photon_number,
    purity,
    validate,
)
from .photon_distribution import PhotonDistribution, adaptive_cutoff, mean_from_pnd, pnd, prob_zero

__version__ = "0.1.0"
