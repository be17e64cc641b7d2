"""Numerical tolerances shared by every module."""
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    hermitian: float = 1e-12
    trace: float = 1e-12
    psd: float = 1e-10
    eig_clamp: float = 1e-10
    jacobi_offdiag: float = 1e-14
    cg_orthonormal: float = 1e-12
    kraus_completeness: float = 1e-12
    covariance: float = 1e-9
    membership: float = 1e-10
    witness: float = 1e-10
    unit_vector: float = 1e-12

    def override(self, **kwargs) -> "Tolerances":
        return replace(self, **kwargs)


DEFAULT_TOL = Tolerances()
