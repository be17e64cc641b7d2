import numpy as np
import pytest
from hypothesis import given, strategies as st

from su2cov.matcore import (
    Spectrum,
    binary_entropy,
    check_density,
    entropy_from_eigenvalues,
    fannes_audenaert_bound,
    hermitian_eigenvalues,
    jacobi_eigenvalues,
    partial_trace,
    partial_transpose,
    von_neumann_entropy,
)


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return a + a.conj().T


def random_density(rng, n, rank=None):
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


@given(st.integers(1, 7), st.integers(0, 2**31 - 1))
def test_jacobi_matches_lapack(n, seed):
    h = random_hermitian(np.random.default_rng(seed), n)
    np.testing.assert_allclose(jacobi_eigenvalues(h), np.linalg.eigvalsh(h)[::-1], atol=1e-10)


def test_jacobi_known_spectrum():
    # Pauli Y has eigenvalues +-1 and is purely imaginary
    y = np.array([[0, -1j], [1j, 0]])
    np.testing.assert_allclose(jacobi_eigenvalues(y), [1.0, -1.0], atol=1e-14)


def test_eigen_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        hermitian_eigenvalues(np.eye(2), method="qr")


def test_spectrum_grouping():
    s = Spectrum(np.array([2.0, 2.0 + 1e-12, 1.0, -0.5]))
    assert [m for _, m in s.grouped()] == [2, 1, 1]
    assert s.min == -0.5


@given(st.integers(1, 3), st.integers(1, 4), st.integers(0, 2**31 - 1))
def test_partial_transpose_involution_and_kron(da, db, seed):
    rng = np.random.default_rng(seed)
    a, b = random_hermitian(rng, da), random_hermitian(rng, db)
    m = np.kron(a, b)
    np.testing.assert_allclose(partial_transpose(m, (da, db), "B"), np.kron(a, b.T), atol=1e-12)
    np.testing.assert_allclose(partial_transpose(m, (da, db), "A"), np.kron(a.T, b), atol=1e-12)
    np.testing.assert_allclose(partial_transpose(partial_transpose(m, (da, db)), (da, db)), m)
    np.testing.assert_allclose(partial_trace(m, (da, db), "B"), a * np.trace(b), atol=1e-10)
    np.testing.assert_allclose(partial_trace(m, (da, db), "A"), b * np.trace(a), atol=1e-10)


def test_partial_transpose_of_bell_state_is_swap_over_two():
    bell = np.zeros(4)
    bell[[0, 3]] = 1 / np.sqrt(2)
    pt = partial_transpose(np.outer(bell, bell), (2, 2))
    swap = np.eye(4)[[0, 2, 1, 3]]
    np.testing.assert_allclose(pt, swap / 2, atol=1e-15)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        partial_transpose(np.eye(6), (2, 2))
    with pytest.raises(ValueError):
        partial_trace(np.eye(6), (4, 2), "A")


@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_entropy_bounds(n, seed):
    rho = random_density(np.random.default_rng(seed), n)
    h = von_neumann_entropy(rho)
    assert -1e-12 <= h <= np.log(n) + 1e-12


def test_entropy_known_values():
    assert von_neumann_entropy(np.eye(3) / 3) == pytest.approx(np.log(3), abs=1e-14)
    assert von_neumann_entropy(np.diag([1.0, 0.0])) == 0.0
    assert binary_entropy(0.5) == pytest.approx(np.log(2))
    assert binary_entropy(0.0) == binary_entropy(1.0) == 0.0


def test_entropy_clamp():
    assert entropy_from_eigenvalues([1.0, -5e-11]) == 0.0
    with pytest.raises(ValueError):
        entropy_from_eigenvalues([1.0, -1e-6])


def test_check_density_rejects():
    with pytest.raises(ValueError):
        check_density(np.diag([0.7, 0.7]))
    with pytest.raises(ValueError):
        check_density(np.diag([1.5, -0.5]))


@given(st.integers(2, 5), st.integers(0, 2**31 - 1), st.floats(0.0, 1.0))
def test_fannes_audenaert_holds(n, seed, mix):
    rng = np.random.default_rng(seed)
    rho, sigma = random_density(rng, n), random_density(rng, n)
    sigma = mix * rho + (1 - mix) * sigma
    t = 0.5 * np.abs(np.linalg.eigvalsh(rho - sigma)).sum()
    gap = abs(von_neumann_entropy(rho) - von_neumann_entropy(sigma))
    assert gap <= fannes_audenaert_bound(t, n) + 1e-12


def test_fannes_trivial_regime():
    assert fannes_audenaert_bound(0.0, 4) == 0.0
    assert fannes_audenaert_bound(0.9, 3) == pytest.approx(np.log(3))
    with pytest.raises(ValueError):
        fannes_audenaert_bound(-0.1, 3)
