from .eigen import (
    banded_hermitian_eigenvalues,
    block_tridiagonal_inertia,
    check_hermitian,
    cyclic_tridiagonal_eigenvalues,
    generalized_hermitian_eigenvalues,
    hermitian_eigenvalues,
    inverse_iteration,
    symmetric_reduction,
    tridiagonal_eigenvalues,
    tridiagonal_eigenvectors,
    tridiagonal_form,
)
from .fitting import envelope_indices, fit_exponential_envelope
from .sets import directed_distances, hausdorff_distance

__all__ = [
    "banded_hermitian_eigenvalues",
    "block_tridiagonal_inertia",
    "cyclic_tridiagonal_eigenvalues",
    "check_hermitian",
    "directed_distances",
    "envelope_indices",
    "fit_exponential_envelope",
    "generalized_hermitian_eigenvalues",
    "hausdorff_distance",
    "hermitian_eigenvalues",
    "inverse_iteration",
    "symmetric_reduction",
    "tridiagonal_eigenvalues",
    "tridiagonal_eigenvectors",
    "tridiagonal_form",
]
