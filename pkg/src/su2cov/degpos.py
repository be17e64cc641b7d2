"""Non-degradability witnesses and positivity regions of covariant linear maps."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import ChannelFamilyParams, KrausMap, cov1l, cov22, covl1, extreme_channels, matrix_units
from .config import DEFAULT_TOL
from .su2rep import haar_arrays, r_matrix

WITNESS_KINDS = ("cov1l_entry", "covl1_entry", "cov22_M", "cov22_N", "tie_case")
CONCLUSIONS = ("not_degradable", "degradable_known", "inconclusive")


@dataclass
class WitnessReport:
    """Outcome of a degradability check.

    ``witness_value`` is recomputed from the constructed complementary channel;
    ``closed_form`` is the analytic value it should equal.  ``details`` keeps
    auxiliary entries used by the argument.
    """

    params: ChannelFamilyParams
    witness_kind: str | None
    witness_value: float
    conclusion: str
    closed_form: float | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.conclusion not in CONCLUSIONS:
            raise ValueError(f"unknown conclusion {self.conclusion!r}")
        if self.witness_kind is not None and self.witness_kind not in WITNESS_KINDS:
            raise ValueError(f"unknown witness kind {self.witness_kind!r}")

    @property
    def difference(self) -> float | None:
        if self.closed_form is None:
            return None
        return abs(self.witness_value - self.closed_form)

    def as_dict(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "witness_kind": self.witness_kind,
            "witness_value": self.witness_value,
            "closed_form": self.closed_form,
            "difference": self.difference,
            "conclusion": self.conclusion,
            "details": self.details,
        }


def _projector(d: int, i: int) -> np.ndarray:
    x = np.zeros((d, d), dtype=complex)
    x[i, i] = 1.0
    return x


def _known(params: ChannelFamilyParams) -> WitnessReport:
    return WitnessReport(params, None, 0.0, "degradable_known")


def _check_unit(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p = {p} outside [0, 1]")


def _conclude(value: float, tol: float) -> str:
    return "not_degradable" if abs(value) > tol else "inconclusive"


def cov1l_diagonal_output(l: int, p: float) -> np.ndarray:
    """a_i = <i|Phi_p(|0><0|)|i>."""
    i = np.arange(l + 1)
    return (1 - p) * 2 * (l - i) / (l * (l + 1)) + p * 2 * (i + 1) / ((l + 1) * (l + 2))


def degradability_witness_cov1l(l: int, p: float, tol: float = DEFAULT_TOL.witness) -> WitnessReport:
    """Refute degradability of Phi_p for p > 0 by a positive input with non-positive image.

    With a_i = <i|Phi_p(|0><0|)|i>, any degrading map would send the diagonal
    input sum_i (1 + s (l - 2i)/l)|i><i| (s = +-1, always positive) to
    (l+1)/2 (E0 + E1) + s (E0 - E1)/(a_0 - a_l), where Ek = Phi^c(|k><k|).
    The sign s is chosen so that the last diagonal entry is negative.
    """
    _check_unit(p)
    params = ChannelFamilyParams("cov1l", p, l)
    if p == 0.0:
        return _known(params)
    env = cov1l(l, p).complementary()
    e0, e1 = env.apply(_projector(2, 0)), env.apply(_projector(2, 1))
    last = 2 * l + 1
    details = {
        "entry_ket0": float(e0[last, last].real),
        "entry_ket1": float(e1[last, last].real),
        "entry_ket0_closed_form": 0.0,
        "entry_ket1_closed_form": 2 * p / (l + 2),
    }
    a = cov1l_diagonal_output(l, p)
    gap = a[0] - a[l]
    if abs(gap) <= 1e-14:
        value = float(np.linalg.norm(e0 - e1))
        return WitnessReport(params, "tie_case", value, _conclude(value, tol), None, details)
    s = 1.0 if gap > 0 else -1.0
    coeffs = 1 + s * (l - 2 * np.arange(l + 1)) / l
    assert coeffs.min() >= 0
    out = 0.5 * (l + 1) * (e0 + e1) + s * (e0 - e1) / gap
    value = float(out[last, last].real)
    c = (l + 2) - 2 * (l + 1) * p
    closed = p * (l + 1) / (l + 2) * (1 - s * (l + 2) / c)
    details.update({
        "input_coefficients": coeffs.tolist(),
        "branch": "direct" if s > 0 else "mirrored",
        "min_output_diagonal": float(np.min(np.diag(out).real)),
    })
    return WitnessReport(params, "cov1l_entry", value, "not_degradable" if value < -tol else "inconclusive",
                         closed, details)


def degradability_witness_covl1(l: int, p: float, tol: float = DEFAULT_TOL.witness) -> WitnessReport:
    """Complementary image of X = (1 - s)|0><0| - s|l><l|, s = p(l+1)/(l+2).

    Psi_p(X) = (1 - 2s)|0><0|, so a positive degrading map forces the diagonal
    of Psi^c(X) to carry the sign of 1 - 2s.  Entry l violates this when
    1 - 2s > 0, entry 2l+1 when 1 - 2s < 0 (0-based indices).
    """
    _check_unit(p)
    params = ChannelFamilyParams("covl1", p, l)
    if p == 0.0:
        return _known(params)
    env = covl1(l, p).complementary()
    d = l + 1
    s = p * (l + 1) / (l + 2)
    lead = 1 - 2 * s
    if abs(lead) <= 1e-14:
        value = float(np.linalg.norm(env.apply(_projector(d, 0)) - env.apply(_projector(d, l))))
        return WitnessReport(params, "tie_case", value, _conclude(value, tol))
    x = (1 - s) * _projector(d, 0) - s * _projector(d, l)
    out = env.apply(x)
    if lead > 0:
        idx, closed = l, -s * s
        violated = out[idx, idx].real < -tol
    else:
        idx, closed = 2 * l + 1, (1 - s) * s
        violated = out[idx, idx].real > tol
    value = float(out[idx, idx].real)
    return WitnessReport(params, "covl1_entry", value, "not_degradable" if violated else "inconclusive",
                         closed, {"index": idx, "output_leading_coefficient": lead})


def cov22_witness_matrices(p: float, q: float) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
    """The combinations M and N of complementary outputs on |0>, |1>, |2>."""
    env = cov22(p, q).complementary()
    e = [env.apply(_projector(3, i)) for i in range(3)]
    f = p / 2 + 3 * q / 10
    g = 1 - p - 6 * q / 10
    m = -f * e[0] + (1 - f) * e[1] - f * e[2]
    n = -g * e[0] + (p + 6 * q / 10) * e[1] - g * e[2]
    return m, n, e


def degradability_witness_cov22(p: float, q: float, tol: float = DEFAULT_TOL.witness) -> WitnessReport:
    """M = Psi((1 - 3p/2 - 9q/10)|1><1|) and N = Psi(-(1 - 3p/2 - 9q/10)(|0><0| + |2><2|))
    for any degrading map Psi; whichever must be positive is shown not to be.
    """
    params = ChannelFamilyParams("cov22", p, 2, q)
    if not params.in_simplex:
        raise ValueError(f"(p, q) = ({p}, {q}) outside the simplex")
    if (p, q) in ((0.0, 0.0), (1.0, 0.0)):
        return _known(params)
    m, n, e = cov22_witness_matrices(p, q)
    lead = 1 - 1.5 * p - 0.9 * q
    if abs(lead) <= 1e-14:
        value = float(np.linalg.norm(sum(e) / 3 - e[1]))
        return WitnessReport(params, "tie_case", value, _conclude(value, tol))
    f = p / 2 + 3 * q / 10
    if lead > 0:
        # slot 4 belongs to sqrt(q) K_5, so the entry scales with q
        kind, mat, idx = "cov22_M", m, 4
        closed = -(6 * q / 10) * f
        reference = -(6 * p / 10) * f
    else:
        kind, mat, idx = "cov22_N", n, 8
        closed = reference = -(6 * q / 10) * (1 - p - 6 * q / 10)
    value = float(mat[idx, idx].real)
    min_eig = float(np.linalg.eigvalsh(mat)[0])
    details = {"index": idx, "lead": lead, "min_eigenvalue": min_eig, "closed_form_reference": reference}
    if value < -tol or min_eig < -tol:
        conclusion = "not_degradable"
    else:
        conclusion = "inconclusive"
    return WitnessReport(params, kind, value, conclusion, closed, details)


def degradability_witness(params: ChannelFamilyParams, tol: float = DEFAULT_TOL.witness) -> WitnessReport:
    if params.family == "cov1l":
        return degradability_witness_cov1l(params.l, params.p, tol)
    if params.family == "covl1":
        return degradability_witness_covl1(params.l, params.p, tol)
    return degradability_witness_cov22(params.p, params.q, tol)


class LinearCovariantMap:
    """Affine combination of a family's extreme channels, valid for any real parameters.

    Outside the simplex this is only a Hermiticity- and trace-preserving linear
    map, so it is evaluated through the extreme channels rather than a Kraus list.
    """

    def __init__(self, params: ChannelFamilyParams):
        if params.family == "covl1":
            raise ValueError("positivity regions are provided for cov1l and cov22 only")
        self.params = params
        self.weights = params.weights()
        self.extremes: list[KrausMap] = extreme_channels(params)
        self.in_dim, self.out_dim = params.dims

    def apply(self, x) -> np.ndarray:
        return sum(w * ch.apply(x) for w, ch in zip(self.weights, self.extremes))

    __call__ = apply

    def choi(self) -> np.ndarray:
        return sum(w * ch.choi() for w, ch in zip(self.weights, self.extremes))


@dataclass
class PositivityReport:
    params: ChannelFamilyParams
    member: bool
    evidence: dict
    mc_min_eigenvalue: float
    samples: int

    def as_dict(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "member": self.member,
            "evidence": self.evidence,
            "mc_min_eigenvalue": self.mc_min_eigenvalue,
            "samples": self.samples,
        }


def haar_pure_states(rng: np.random.Generator, dim: int, n: int) -> np.ndarray:
    if dim == 2:
        # pi_1(U)|0> is Haar on the qubit sphere
        a, b = haar_arrays(rng, n)
        return np.stack([a, -np.conj(b)], axis=1)
    z = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def min_output_eigenvalue(lin: LinearCovariantMap, samples: int = 1000, seed: int = 0) -> float:
    """Smallest output eigenvalue over Haar pure inputs plus the basis states."""
    rng = np.random.default_rng(seed)
    vecs = np.vstack([np.eye(lin.in_dim, dtype=complex), haar_pure_states(rng, lin.in_dim, samples)])
    rhos = vecs[:, :, None] * vecs.conj()[:, None, :]
    return float(np.linalg.eigvalsh(lin.apply(rhos))[:, 0].min())


def positivity_member_cov1l(l: int, p: float, tol: float = 0.0) -> bool:
    return -tol <= p <= (l + 2) / (l + 1) + tol


def positivity_member_cov22(p: float, q: float, tol: float = 0.0) -> bool:
    return q >= -tol and -tol <= 5 * p + 3 * q <= 5 + tol and 5 * p + 9 * q <= 10 + tol


def positivity_region_cov1l(l: int, p: float, samples: int = 1000, seed: int = 0) -> PositivityReport:
    params = ChannelFamilyParams("cov1l", p, l)
    lin = LinearCovariantMap(params)
    out0, out1 = lin.apply(_projector(2, 0)), lin.apply(_projector(2, 1))
    evidence = {
        "ket0_entry0": float(out0[0, 0].real),
        "ket0_entry0_closed_form": 2 / (l + 1) * (1 - p * (l + 1) / (l + 2)),
        "ket1_entry0": float(out1[0, 0].real),
        "ket1_entry0_closed_form": 2 * p / (l + 2),
    }
    return PositivityReport(params, positivity_member_cov1l(l, p), evidence,
                            min_output_eigenvalue(lin, samples, seed), samples)


def positivity_region_cov22(p: float, q: float, samples: int = 1000, seed: int = 0) -> PositivityReport:
    params = ChannelFamilyParams("cov22", p, 2, q)
    lin = LinearCovariantMap(params)
    evidence = {
        f"ket{i}_diagonal": np.diag(lin.apply(_projector(3, i))).real.tolist() for i in range(3)
    }
    return PositivityReport(params, positivity_member_cov22(p, q), evidence,
                            min_output_eigenvalue(lin, samples, seed), samples)


COV22_POSITIVE_VERTICES = ((0.0, 0.0), (1.0, 0.0), (0.5, 5 / 6), (-1.0, 5 / 3))


def facet_probes(depth: float = 0.05) -> list[tuple[str, tuple[float, float]]]:
    """Points ``depth`` beyond the midpoint of each facet of the Cov22 positivity trapezoid."""
    v = np.array(COV22_POSITIVE_VERTICES)
    centre = v.mean(axis=0)
    names = ("q=0", "5p+3q=5", "5p+9q=10", "5p+3q=0")
    probes = []
    for k, name in enumerate(names):
        a, b = v[k], v[(k + 1) % 4]
        t = b - a
        nrm = np.array([t[1], -t[0]]) / np.linalg.norm(t)
        mid = 0.5 * (a + b)
        if np.dot(nrm, mid - centre) < 0:
            nrm = -nrm
        pt = mid + depth * nrm
        probes.append((name, (float(pt[0]), float(pt[1]))))
    return probes


def _transpose_conj(r: np.ndarray, x: np.ndarray) -> np.ndarray:
    return r @ np.swapaxes(x, -1, -2) @ r.conj().T


def decomposability_errors_cov1l(l: int) -> float:
    """max |Phi_{(l+2)/(l+1)}(E) - R_l (Phi^{1->l}_{l-1}(E))^t R_l^dag| over matrix units E."""
    units = matrix_units(2)
    lin = LinearCovariantMap(ChannelFamilyParams("cov1l", (l + 2) / (l + 1), l))
    low = extreme_channels(ChannelFamilyParams("cov1l", 0.0, l))[0]
    return float(np.max(np.abs(lin.apply(units) - _transpose_conj(r_matrix(l), low.apply(units)))))


def decomposability_errors_cov22() -> dict:
    """Entrywise residuals of the two non-CP vertex identities on the nine matrix units."""
    units = matrix_units(3)
    r2 = r_matrix(2)
    phi0, phi2, phi4 = extreme_channels(ChannelFamilyParams("cov22", 0.0, 2, 0.0))
    psi = phi0.apply(units) / 3 - phi2.apply(units) + 5 * phi4.apply(units) / 3
    err_psi = np.max(np.abs(psi - _transpose_conj(r2, units)))
    # Psi is the vertex (-1, 5/3); (1/2, 5/6) is -Phi_0/2 + Phi_2 + Psi/2
    other = -phi0.apply(units) / 2 + phi2.apply(units) + psi / 2
    traces = np.trace(units, axis1=1, axis2=2)[:, None, None]
    depol = (traces * np.eye(3) - units) / 2
    err_depol = np.max(np.abs(other - depol))
    err_phi2 = np.max(np.abs(other - _transpose_conj(r2, phi2.apply(units))))
    v_psi = LinearCovariantMap(ChannelFamilyParams("cov22", -1.0, 2, 5 / 3)).apply(units)
    v_other = LinearCovariantMap(ChannelFamilyParams("cov22", 0.5, 2, 5 / 6)).apply(units)
    err_vertex = max(np.max(np.abs(v_psi - psi)), np.max(np.abs(v_other - other)))
    return {
        "psi_transpose": float(err_psi),
        "vertex_depolarizing_form": float(err_depol),
        "vertex_transposed_phi2": float(err_phi2),
        "vertex_parametrization": float(err_vertex),
    }


__all__ = [
    "COV22_POSITIVE_VERTICES",
    "LinearCovariantMap",
    "PositivityReport",
    "WitnessReport",
    "cov22_witness_matrices",
    "decomposability_errors_cov1l",
    "decomposability_errors_cov22",
    "degradability_witness",
    "degradability_witness_cov1l",
    "degradability_witness_cov22",
    "degradability_witness_covl1",
    "facet_probes",
    "min_output_eigenvalue",
    "positivity_member_cov1l",
    "positivity_member_cov22",
    "positivity_region_cov1l",
    "positivity_region_cov22",
]
