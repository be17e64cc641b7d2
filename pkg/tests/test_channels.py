import numpy as np
import pytest
from hypothesis import given, strategies as st

from su2cov.channels import (
    ChannelFamilyParams,
    KrausMap,
    QuantumChannel,
    cg_channel,
    channel_from_json,
    channel_to_json,
    choi_apply,
    cov1l,
    cov22,
    covariance_residual,
    covl1,
    family_channel,
    family_spins,
    matrix_units,
)
from su2cov.matcore import von_neumann_entropy
from su2cov.su2rep import haar_sample

unit = st.floats(0.0, 1.0)
spin = st.integers(1, 5)


@st.composite
def family_params(draw):
    fam = draw(st.sampled_from(["cov1l", "covl1", "cov22"]))
    if fam == "cov22":
        p = draw(unit)
        q = draw(st.floats(0.0, 1.0)) * (1 - p)
        return ChannelFamilyParams(fam, p, 2, q)
    return ChannelFamilyParams(fam, draw(unit), draw(spin))


def test_examples_from_action_formulas():
    np.testing.assert_allclose(cg_channel(1, 2, 1).apply(np.diag([1, 0])), np.diag([2 / 3, 1 / 3, 0]), atol=1e-15)
    np.testing.assert_allclose(cg_channel(1, 2, 3).apply(np.diag([1, 0])), np.diag([1 / 6, 1 / 3, 1 / 2]), atol=1e-15)
    np.testing.assert_allclose(cg_channel(2, 2, 2).apply(np.diag([1, 0, 0])), np.diag([0.5, 0.5, 0]), atol=1e-15)
    np.testing.assert_allclose(cov22(0.3, 0.2).apply(np.diag([0, 1, 0])), np.diag([0.21, 0.58, 0.21]), atol=1e-15)
    np.testing.assert_allclose(cg_channel(2, 2, 0).apply(np.arange(9).reshape(3, 3)), np.arange(9).reshape(3, 3))


def test_kraus_counts_keep_zero_weight_slots():
    assert len(cov1l(3, 0.0)) == 2 * 3 + 2
    assert len(cov22(0.0, 0.0)) == 9
    assert len(covl1(2, 1.0)) == 6


@given(family_params())
def test_trace_preserving_and_choi(params):
    ch = family_channel(params)
    assert ch.completeness_error() <= 1e-12
    c = ch.choi()
    assert np.linalg.eigvalsh(c)[0] >= -1e-12
    assert np.trace(c).real == pytest.approx(ch.in_dim, abs=1e-12)
    units = matrix_units(ch.in_dim)
    np.testing.assert_allclose(choi_apply(c, units[1], (ch.in_dim, ch.out_dim)), ch.apply(units[1]), atol=1e-12)


@given(family_params(), st.integers(0, 2**31 - 1))
def test_covariance(params, seed):
    ch = family_channel(params)
    k, l = family_spins(params)
    assert covariance_residual(ch, k, l, haar_sample(np.random.default_rng(seed))) <= 1e-9


@given(family_params(), st.integers(0, 2**31 - 1))
def test_complementary_pure_inputs_share_spectrum(params, seed):
    rng = np.random.default_rng(seed)
    ch = family_channel(params)
    v = rng.standard_normal(ch.in_dim) + 1j * rng.standard_normal(ch.in_dim)
    rho = np.outer(v, v.conj()) / np.vdot(v, v).real
    h_out = von_neumann_entropy(ch.apply(rho))
    h_env = von_neumann_entropy(ch.complementary().apply(rho))
    assert h_out == pytest.approx(h_env, abs=1e-9)


@given(unit, spin, st.integers(0, 2**31 - 1))
def test_covl1_is_scaled_adjoint(p, l, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    y = rng.standard_normal((l + 1, l + 1)) + 1j * rng.standard_normal((l + 1, l + 1))
    lhs = (l + 1) / 2 * np.trace(cov1l(l, p).apply(x) @ y)
    rhs = np.trace(x @ covl1(l, p).apply(y))
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_depolarizing_point():
    for l in range(1, 6):
        ch = cov1l(l, (l + 2) / (2 * (l + 1)))
        np.testing.assert_allclose(ch.apply(np.diag([0.3, 0.7])), np.eye(l + 1) / (l + 1), atol=1e-14)


def test_covl1_action():
    l, p = 3, 0.4
    s = p * (l + 1) / (l + 2)
    x = np.zeros((l + 1, l + 1))
    x[0, 0] = 1
    np.testing.assert_allclose(covl1(l, p).apply(x), np.diag([1 - s, s]), atol=1e-14)


def test_tensor_and_adjoint():
    a = cov1l(1, 0.2)
    two = a.tensor(a)
    rho = np.diag([0.1, 0.2, 0.3, 0.4]).astype(complex)
    expected = np.kron(a.apply(np.diag([1, 0])), a.apply(np.diag([1, 0])))
    np.testing.assert_allclose(two.apply(np.diag([1, 0, 0, 0])), expected, atol=1e-14)
    assert two.apply(rho).trace().real == pytest.approx(1.0)
    assert isinstance(a.adjoint(), KrausMap)


def test_batched_apply():
    ch = cov22(0.2, 0.3)
    units = matrix_units(3)
    batch = ch.apply(units)
    for u, out in zip(units, batch):
        np.testing.assert_allclose(ch.apply(u), out)


def test_json_round_trip():
    params = ChannelFamilyParams("cov22", 0.3, 2, 0.4)
    ch = family_channel(params)
    back = channel_from_json(channel_to_json(ch, params))
    for a, b in zip(ch.kraus, back.kraus):
        np.testing.assert_array_equal(a, b)


def test_errors():
    with pytest.raises(ValueError):
        cg_channel(1, 1, 1)
    with pytest.raises(ValueError):
        cov1l(2, 1.2)
    with pytest.raises(ValueError):
        cov22(0.7, 0.7)
    with pytest.raises(ValueError):
        ChannelFamilyParams("werner", 0.1, 2)
    with pytest.raises(ValueError):
        ChannelFamilyParams("cov1l", 0.1)
    with pytest.raises(ValueError):
        QuantumChannel((np.eye(2) * 2,), 2, 2)
    with pytest.raises(ValueError):
        cov1l(2, 0.3).apply(np.eye(3))
    assert ChannelFamilyParams("cov22", 0.1, None, 0.2).l == 2
