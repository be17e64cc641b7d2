import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from su2cov.su2rep import (
    SU2Element,
    admissible,
    cg_coefficient_exact,
    cg_table,
    diagonal_element,
    haar_sample,
    intertwining_residual,
    isometry,
    orthonormality_error,
    r_matrix,
    wigner_pi,
)

TRIPLES = [(l, m, k) for l in range(6) for m in range(6) for k in range(11) if admissible(l, m, k)]


def su2(seed):
    return haar_sample(np.random.default_rng(seed))


def test_admissible():
    assert admissible(1, 1, 0) and admissible(1, 1, 2)
    assert not admissible(1, 1, 1)
    assert not admissible(1, 2, 4)


def test_cg_known_values():
    # <1/2 1/2; 1/2 -1/2 | 0 0> = 1/sqrt(2)
    assert cg_coefficient_exact(1, 1, 1, -1, 0, 0) == (1, Fraction(1, 2))
    # <1/2 -1/2; 1/2 1/2 | 0 0> = -1/sqrt(2)
    assert cg_coefficient_exact(1, -1, 1, 1, 0, 0) == (-1, Fraction(1, 2))
    # <1 1; 1 -1 | 2 0> = 1/sqrt(6)
    assert cg_coefficient_exact(2, 2, 2, -2, 4, 0) == (1, Fraction(1, 6))
    # <1 0; 1 0 | 1 0> = 0
    assert cg_coefficient_exact(2, 0, 2, 0, 2, 0)[0] == 0


def test_cg_selection_rule():
    assert cg_coefficient_exact(2, 2, 2, 0, 2, 0) == (0, Fraction(0))


@pytest.mark.parametrize("l,m,k", TRIPLES)
def test_isometry_orthonormal(l, m, k):
    assert orthonormality_error(l, m, k) <= 1e-12


@given(st.sampled_from(TRIPLES), st.integers(0, 2**31 - 1))
def test_isometry_intertwines(triple, seed):
    assert intertwining_residual(*triple, su2(seed)) <= 1e-10


def test_inadmissible_raises():
    with pytest.raises(ValueError):
        cg_table(1, 1, 1)


def test_singlet_column():
    v = isometry(1, 1, 0)[:, 0].real
    np.testing.assert_allclose(v, [0, 1 / math.sqrt(2), -1 / math.sqrt(2), 0], atol=1e-15)


@given(st.integers(0, 6), st.integers(0, 2**31 - 1), st.integers(0, 2**31 - 1))
def test_wigner_is_unitary_homomorphism(l, s1, s2):
    u, v = su2(s1), su2(s2)
    pu, pv = wigner_pi(l, u), wigner_pi(l, v)
    np.testing.assert_allclose(pu @ pu.conj().T, np.eye(l + 1), atol=1e-12)
    np.testing.assert_allclose(wigner_pi(l, u @ v), pu @ pv, atol=1e-11)


def test_wigner_low_spins():
    u = su2(3)
    np.testing.assert_allclose(wigner_pi(1, u), u.matrix())
    np.testing.assert_allclose(wigner_pi(0, u), [[1]])
    d = wigner_pi(3, diagonal_element(0.3))
    np.testing.assert_allclose(np.diag(d), np.exp(1j * 0.3 * np.array([3, 1, -1, -3])), atol=1e-14)


def test_su2_element_validation():
    with pytest.raises(ValueError):
        SU2Element(1.0, 1.0)
    e = SU2Element.identity()
    np.testing.assert_allclose(e.matrix(), np.eye(2))


def test_r_matrix():
    r = r_matrix(2)
    np.testing.assert_allclose(r, [[0, 0, 1], [0, -1, 0], [1, 0, 0]])
    np.testing.assert_allclose(r @ r.conj().T, np.eye(3))
