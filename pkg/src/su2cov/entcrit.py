"""PPT spectra, PPT/EBT regions and constructive EBT certificates.

EBT is certified only at the extreme points of each PPT region, by Monte Carlo
SU(2) twirling of a product state: every sample contributes a product state, so
the empirical average is separable by construction, and its distance to the
target normalized Choi matrix is reported.  Interior points are convex
combinations of those extreme points.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channels import ChannelFamilyParams, KrausMap, cg_channel, family_channel
from .config import DEFAULT_TOL
from .matcore import Spectrum, hermitian_eigenvalues, partial_transpose
from .su2rep import cg_table, haar_arrays, wigner_pi_batch


@dataclass(frozen=True)
class RegionReport:
    params: ChannelFamilyParams | None
    closed_form_member: bool | None
    spectrum: Spectrum
    margin: float
    tol: float = DEFAULT_TOL.membership

    @property
    def numeric_member(self) -> bool:
        return self.margin >= -self.tol

    def as_dict(self) -> dict:
        return {
            "params": None if self.params is None else self.params.as_dict(),
            "closed_form_member": self.closed_form_member,
            "numeric_member": self.numeric_member,
            "margin": self.margin,
            "spectrum": [float(v) for v in self.spectrum.eigenvalues],
        }


def ppt_region_closed_form(params: ChannelFamilyParams, tol: float = DEFAULT_TOL.membership) -> bool:
    p, q = params.p, params.q
    if params.family in ("cov1l", "covl1"):
        return 1.0 / (params.l + 1) - tol <= p <= 1.0 + tol
    return -tol <= p <= 0.5 + tol and 2.0 / 3.0 - tol <= p + q <= 1.0 + tol


def ppt_spectrum_closed_form(params: ChannelFamilyParams) -> list[tuple[float, int]]:
    """Eigenvalues of the partially transposed Choi matrix with multiplicities."""
    p, q = params.p, params.q
    if params.family in ("cov1l", "covl1"):
        l = params.l
        lam1 = (1 - p) * 2 / (l + 1) + p * 2 / ((l + 1) * (l + 2))
        lam2 = (1 - p) * (-2 / (l * (l + 1))) + p * 2 / (l + 1)
        if params.family == "covl1":
            # Psi_p = ((l+1)/2) Phi_p^*, and the Choi matrix of an adjoint is a
            # leg-swapped transpose, which leaves the PT spectrum unchanged.
            s = (l + 1) / 2
            lam1, lam2 = s * lam1, s * lam2
        return [(lam1, l + 2), (lam2, l)]
    if params.family == "cov22":
        return [(1 - 2 * p, 1), (1 - p / 2 - 9 * q / 10, 5), ((3 * p + 3 * q - 2) / 2, 3)]
    raise ValueError(f"unsupported family {params.family}")


def expand_spectrum(pairs: list[tuple[float, int]]) -> Spectrum:
    vals = np.concatenate([np.full(mult, val) for val, mult in pairs])
    return Spectrum(np.sort(vals)[::-1])


def pt_choi(channel: KrausMap) -> np.ndarray:
    return partial_transpose(channel.choi(), (channel.in_dim, channel.out_dim), "B")


def ppt_test(channel: KrausMap, params: ChannelFamilyParams | None = None,
             tol: float = DEFAULT_TOL.membership) -> RegionReport:
    spec = hermitian_eigenvalues(pt_choi(channel))
    member = None if params is None else ppt_region_closed_form(params, tol)
    return RegionReport(params, member, spec, spec.min, tol)


def ppt_test_params(params: ChannelFamilyParams, tol: float = DEFAULT_TOL.membership) -> RegionReport:
    return ppt_test(family_channel(params), params, tol)


def _basis(dims: tuple[int, int], terms: list[tuple[float, int, int]]) -> np.ndarray:
    v = np.zeros(dims[0] * dims[1], dtype=complex)
    for c, a, b in terms:
        v[a * dims[1] + b] += c
    return v / np.linalg.norm(v)


def ppt_eigenvectors(params: ChannelFamilyParams) -> list[tuple[str, np.ndarray, float]]:
    """Listed eigenvectors of the partially transposed Choi matrix and their eigenvalues."""
    p, q = params.p, params.q
    out = []
    if params.family == "cov1l":
        l = params.l
        (lam1, _), (lam2, _) = ppt_spectrum_closed_form(params)
        dims = (2, l + 1)
        out.append(("|0,0>", _basis(dims, [(1, 0, 0)]), lam1))
        out.append((f"|1,{l}>", _basis(dims, [(1, 1, l)]), lam1))
        for s in range(l):
            out.append((f"sym s={s}", _basis(dims, [(np.sqrt(l - s), 0, s + 1), (np.sqrt(s + 1), 1, s)]), lam1))
        for s in range(l):
            out.append((f"anti s={s}", _basis(dims, [(np.sqrt(s + 1), 0, s + 1), (-np.sqrt(l - s), 1, s)]), lam2))
        return out
    if params.family == "cov22":
        dims = (3, 3)
        e1, e2, e3 = 1 - 2 * p, 1 - p / 2 - 9 * q / 10, (3 * p + 3 * q - 2) / 2
        out.append(("|02>-|11>+|20>", _basis(dims, [(1, 0, 2), (-1, 1, 1), (1, 2, 0)]), e1))
        out.append(("|00>", _basis(dims, [(1, 0, 0)]), e2))
        out.append(("|22>", _basis(dims, [(1, 2, 2)]), e2))
        out.append(("|01>+|10>", _basis(dims, [(1, 0, 1), (1, 1, 0)]), e2))
        out.append(("|12>+|21>", _basis(dims, [(1, 1, 2), (1, 2, 1)]), e2))
        out.append(("|02>+2|11>+|20>", _basis(dims, [(1, 0, 2), (2, 1, 1), (1, 2, 0)]), e2))
        out.append(("|01>-|10>", _basis(dims, [(1, 0, 1), (-1, 1, 0)]), e3))
        out.append(("|12>-|21>", _basis(dims, [(1, 1, 2), (-1, 2, 1)]), e3))
        out.append(("|02>-|20>", _basis(dims, [(1, 0, 2), (-1, 2, 0)]), e3))
        return out
    raise ValueError("eigenvector lists are available for cov1l and cov22")


def ppt_eigenvector_check(params: ChannelFamilyParams) -> list[tuple[str, float, float]]:
    """(label, expected eigenvalue, residual ||PT(C) v - lam v||) per listed eigenvector."""
    m = pt_choi(family_channel(params))
    return [(name, lam, float(np.linalg.norm(m @ v - lam * v))) for name, v, lam in ppt_eigenvectors(params)]


def twirl_weights(m: int, l: int, i1: int, i2: int) -> dict[int, float]:
    """Mixture weights of Phi^{m->l}_k predicted by the averaging formula."""
    if not (0 <= i1 <= m and 0 <= i2 <= l):
        raise ValueError(f"indices (i1, i2) = ({i1}, {i2}) out of range for (m, l) = ({m}, {l})")
    out = {}
    for k in range(abs(l - m), l + m + 1, 2):
        c = cg_table(m, l, k).coeffs
        out[k] = float(np.sum(c[m - i1, i2, :] ** 2))
    return out


def twirl_target(m: int, l: int, i1: int, i2: int) -> np.ndarray:
    """(1/(m+1)) C_Psi with Psi = sum_k w_k Phi^{m->l}_k."""
    target = np.zeros(((m + 1) * (l + 1),) * 2, dtype=complex)
    for k, w in twirl_weights(m, l, i1, i2).items():
        if w > 0:
            target += w * cg_channel(m, l, k).choi()
    return target / (m + 1)


def twirl_empirical(m: int, l: int, i1: int, i2: int, samples: int, rng: np.random.Generator,
                    chunk: int = 25_000) -> np.ndarray:
    """Monte Carlo mean of conj(pi_m)|i1><i1|pi_m^t (x) pi_l|i2><i2|pi_l^dag over Haar samples."""
    if samples < 1:
        raise ValueError("need at least one sample")
    if not (0 <= i1 <= m and 0 <= i2 <= l):
        raise ValueError(f"indices (i1, i2) = ({i1}, {i2}) out of range for (m, l) = ({m}, {l})")
    dim = (m + 1) * (l + 1)
    acc = np.zeros((dim, dim), dtype=complex)
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        a, b = haar_arrays(rng, n)
        v = np.conj(wigner_pi_batch(m, a, b)[:, :, i1])
        w = wigner_pi_batch(l, a, b)[:, :, i2]
        z = (v[:, :, None] * w[:, None, :]).reshape(n, dim)
        acc += z.T @ z.conj()
        done += n
    return acc / samples


@dataclass(frozen=True)
class TwirlCertificate:
    m: int
    l: int
    i1: int
    i2: int
    sample_count: int
    weights: dict
    empirical_choi: np.ndarray = field(repr=False)
    target_choi: np.ndarray = field(repr=False)

    @property
    def frobenius_gap(self) -> float:
        return float(np.linalg.norm(self.empirical_choi - self.target_choi))

    def as_dict(self) -> dict:
        return {
            "m": self.m, "l": self.l, "i1": self.i1, "i2": self.i2,
            "samples": self.sample_count,
            "weights": {str(k): v for k, v in self.weights.items()},
            "gap": self.frobenius_gap,
        }


def twirl_average(m: int, l: int, i1: int, i2: int, samples: int,
                  rng: np.random.Generator) -> TwirlCertificate:
    emp = twirl_empirical(m, l, i1, i2, samples, rng)
    return TwirlCertificate(m, l, i1, i2, samples, twirl_weights(m, l, i1, i2), emp,
                            twirl_target(m, l, i1, i2))


def swap_transpose(mat: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    """Map a Choi matrix of Phi on A(x)B to the (unscaled) Choi matrix of Phi^* on B(x)A.

    Leg swap followed by full transposition; both send product states to
    product states.
    """
    da, db = dims
    t = np.asarray(mat).reshape(da, db, da, db).transpose(1, 0, 3, 2).reshape(da * db, da * db)
    return t.T.copy()


# twirl indices (m, i1, i2) certifying each extreme point of the PPT regions
def ppt_vertices(params: ChannelFamilyParams) -> list[tuple[ChannelFamilyParams, tuple[int, int, int]]]:
    if params.family in ("cov1l", "covl1"):
        l = params.l
        return [
            (ChannelFamilyParams(params.family, 1 / (l + 1), l), (1, 0, 0)),
            (ChannelFamilyParams(params.family, 1.0, l), (1, 1, 0)),
        ]
    return [
        (ChannelFamilyParams("cov22", 0.0, 2, 2 / 3), (2, 1, 1)),
        (ChannelFamilyParams("cov22", 0.5, 2, 1 / 6), (2, 2, 2)),
        (ChannelFamilyParams("cov22", 0.0, 2, 1.0), (2, 2, 0)),
        (ChannelFamilyParams("cov22", 0.5, 2, 0.5), (2, 2, 1)),
    ]


def ppt_vertex_weights(params: ChannelFamilyParams) -> list[float]:
    """Convex weights of ``params`` over ``ppt_vertices(params)``."""
    if params.family in ("cov1l", "covl1"):
        l = params.l
        t = (1 - params.p) * (l + 1) / l
        return [t, 1 - t]
    u = 2 * params.p
    v = 3 * (params.p + params.q) - 2
    return [(1 - u) * (1 - v), u * (1 - v), (1 - u) * v, u * v]


def normalized_choi(params: ChannelFamilyParams) -> np.ndarray:
    ch = family_channel(params)
    return ch.choi() / ch.in_dim


@dataclass
class EBTCertificate:
    params: ChannelFamilyParams
    member: bool
    margin: float
    spectrum: Spectrum
    decomposition: list = field(default_factory=list)
    twirls: list = field(default_factory=list)
    decomposition_error: float | None = None
    twirl_gaps: list = field(default_factory=list)

    @property
    def region(self) -> str:
        return "EBT" if self.member else "not-EBT"

    def as_dict(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "region": self.region,
            "margin": self.margin,
            "spectrum": [float(v) for v in self.spectrum.eigenvalues],
            "decomposition": [
                {"weight": w, "vertex": vp.as_dict()} for w, vp in self.decomposition
            ],
            "decomposition_error": self.decomposition_error,
            "twirl": [
                dict(t.as_dict(), gap=g) for t, g in zip(self.twirls, self.twirl_gaps)
            ],
        }


def ebt_certify(params: ChannelFamilyParams, samples: int = 100_000,
                rng: np.random.Generator | None = None,
                tol: float = DEFAULT_TOL.membership) -> EBTCertificate:
    """Constructive EBT certificate inside the PPT region, negative-eigenvalue witness outside."""
    rng = np.random.default_rng(0) if rng is None else rng
    report = ppt_test_params(params, tol)
    cert = EBTCertificate(params, bool(report.closed_form_member), report.margin, report.spectrum)
    if not cert.member:
        return cert
    vertices = ppt_vertices(params)
    weights = ppt_vertex_weights(params)
    recon = np.zeros_like(normalized_choi(params))
    for w, (vp, (m, i1, i2)) in zip(weights, vertices):
        cert.decomposition.append((float(w), vp))
        recon += w * normalized_choi(vp)
        if samples <= 0:
            continue
        l_out = vp.l if vp.family != "cov22" else 2
        tw = twirl_average(m, l_out, i1, i2, samples, rng)
        target = normalized_choi(vp)
        emp = tw.empirical_choi
        if vp.family == "covl1":
            emp = swap_transpose(emp, (2, vp.l + 1))
        cert.twirls.append(tw)
        cert.twirl_gaps.append(float(np.linalg.norm(emp - target)))
    cert.decomposition_error = float(np.max(np.abs(recon - normalized_choi(params))))
    return cert
