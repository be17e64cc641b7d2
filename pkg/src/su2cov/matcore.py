"""Dense complex linear algebra, spectra and entropies.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Spectral work on
the hot paths goes through LAPACK (``numpy.linalg.eigvalsh``); a cyclic Jacobi
solver is kept alongside as an independent cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, Tolerances


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def _require_square(m: np.ndarray) -> int:
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    return m.shape[0]


def hermiticity_error(a) -> float:
    m = as_matrix(a)
    _require_square(m)
    return float(np.max(np.abs(m - m.conj().T), initial=0.0))


def check_hermitian(a, tol: float = DEFAULT_TOL.hermitian) -> np.ndarray:
    m = as_matrix(a)
    err = hermiticity_error(m)
    if err > tol:
        raise ValueError(f"matrix is not Hermitian: max |A - A^dag| = {err:.3e} > {tol:.1e}")
    return m


@dataclass(frozen=True)
class Spectrum:
    """Real eigenvalues sorted in descending order."""

    eigenvalues: np.ndarray

    def __len__(self) -> int:
        return len(self.eigenvalues)

    @property
    def min(self) -> float:
        return float(self.eigenvalues[-1])

    def grouped(self, tol: float = 1e-9) -> list[tuple[float, int]]:
        """Collapse eigenvalues closer than ``tol`` into (value, multiplicity) pairs."""
        groups: list[list[float]] = []
        for v in self.eigenvalues:
            if groups and abs(groups[-1][-1] - v) <= tol:
                groups[-1].append(float(v))
            else:
                groups.append([float(v)])
        return [(float(np.mean(g)), len(g)) for g in groups]


def jacobi_eigenvalues(a, tol: float = DEFAULT_TOL.jacobi_offdiag, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.

    The n x n Hermitian matrix ``H = X + iY`` is embedded as the real symmetric
    matrix ``[[X, -Y], [Y, X]]`` whose spectrum is that of ``H`` with every
    eigenvalue doubled.  Returned values are sorted descending.
    """
    h = check_hermitian(a)
    n = h.shape[0]
    s = np.block([[h.real, -h.imag], [h.imag, h.real]])
    s = 0.5 * (s + s.T)
    size = 2 * n
    scale = max(np.linalg.norm(s), 1e-300)
    for _ in range(max_sweeps):
        off = np.linalg.norm(s - np.diag(np.diag(s)))
        if off <= tol * scale:
            break
        for p in range(size - 1):
            for q in range(p + 1, size):
                apq = s[p, q]
                if abs(apq) <= 1e-300 + 1e-18 * scale:
                    continue
                tau = (s[q, q] - s[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                sn = t * c
                sp, sq = s[:, p].copy(), s[:, q].copy()
                s[:, p] = c * sp - sn * sq
                s[:, q] = sn * sp + c * sq
                sp, sq = s[p, :].copy(), s[q, :].copy()
                s[p, :] = c * sp - sn * sq
                s[q, :] = sn * sp + c * sq
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    vals = np.sort(np.diag(s))[::-1]
    return vals[::2].copy()


def hermitian_eigenvalues(a, method: str = "lapack", tol: Tolerances = DEFAULT_TOL) -> Spectrum:
    m = check_hermitian(a, tol.hermitian)
    if method == "jacobi":
        vals = jacobi_eigenvalues(m, tol.jacobi_offdiag)
    elif method == "lapack":
        vals = np.linalg.eigvalsh(m)[::-1]
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return Spectrum(np.asarray(vals, dtype=float))


def hermitian_eigh(a, tol: Tolerances = DEFAULT_TOL) -> tuple[Spectrum, np.ndarray]:
    """Eigenvalues (descending) and the matching orthonormal eigenvectors as columns."""
    m = check_hermitian(a, tol.hermitian)
    vals, vecs = np.linalg.eigh(m)
    return Spectrum(vals[::-1].copy()), vecs[:, ::-1].copy()


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def _bipartite_view(m: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    da, db = dims
    n = _require_square(m)
    if da * db != n:
        raise ValueError(f"dims {dims} do not match matrix size {n}")
    return m.reshape(da, db, da, db)


def partial_transpose(m, dims: tuple[int, int], side: str = "B") -> np.ndarray:
    """Transpose one tensor factor of an operator on H_A (x) H_B."""
    mat = as_matrix(m)
    t = _bipartite_view(mat, dims)
    if side == "B":
        out = t.transpose(0, 3, 2, 1)
    elif side == "A":
        out = t.transpose(2, 1, 0, 3)
    else:
        raise ValueError("side must be 'A' or 'B'")
    return out.reshape(mat.shape).copy()


def partial_trace(m, dims: tuple[int, int], side: str = "B") -> np.ndarray:
    """Trace out factor ``side`` of an operator on H_A (x) H_B."""
    t = _bipartite_view(as_matrix(m), dims)
    if side == "B":
        return np.einsum("ijkj->ik", t)
    if side == "A":
        return np.einsum("ijil->jl", t)
    raise ValueError("side must be 'A' or 'B'")


def check_density(rho, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    m = check_hermitian(rho, tol.hermitian)
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol.trace:
        raise ValueError(f"density matrix trace {tr!r} differs from 1")
    lam_min = np.linalg.eigvalsh(m)[0]
    if lam_min < -tol.psd:
        raise ValueError(f"density matrix has eigenvalue {lam_min:.3e} < 0")
    return m


def entropy_from_eigenvalues(vals, clamp: float = DEFAULT_TOL.eig_clamp) -> np.ndarray:
    """-sum(lam ln lam) along the last axis, with 0 ln 0 = 0.

    Values in [-clamp, 0) are treated as zero; anything more negative raises.
    """
    lam = np.asarray(vals, dtype=float)
    if lam.size and lam.min() < -clamp:
        raise ValueError(f"eigenvalue {lam.min():.3e} below clamp -{clamp:.1e}")
    lam = np.clip(lam, 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(lam > 0, -lam * np.log(np.where(lam > 0, lam, 1.0)), 0.0)
    return terms.sum(axis=-1)


def von_neumann_entropy(rho, tol: Tolerances = DEFAULT_TOL) -> float:
    """Entropy in nats of a density matrix."""
    m = check_density(rho, tol)
    return float(entropy_from_eigenvalues(np.linalg.eigvalsh(m), tol.eig_clamp))


def binary_entropy(t: float) -> float:
    if t <= 0.0 or t >= 1.0:
        return 0.0
    return float(-t * np.log(t) - (1 - t) * np.log(1 - t))


def fannes_audenaert_bound(trace_distance: float, dim: int) -> float:
    """Upper bound on |H(rho) - H(sigma)| for states at the given trace distance.

    ``T ln(d - 1) + h(T)``, valid for ``T <= 1 - 1/d``; beyond that the trivial
    bound ``ln d`` is returned.
    """
    t = float(trace_distance)
    if t < 0:
        raise ValueError("trace distance must be non-negative")
    if dim < 2:
        return 0.0
    if t >= 1.0 - 1.0 / dim:
        return float(np.log(dim))
    return t * float(np.log(dim - 1)) + binary_entropy(t)
