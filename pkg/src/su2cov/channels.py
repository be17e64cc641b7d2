"""Clebsch-Gordan channels and the three low-rank covariant families."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .su2rep import SU2Element, admissible, isometry, wigner_pi

FAMILIES = ("cov1l", "covl1", "cov22")


@dataclass(frozen=True)
class KrausMap:
    """Completely positive map X -> sum_i K_i X K_i^dag."""

    kraus: tuple
    in_dim: int
    out_dim: int

    def __post_init__(self):
        ks = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if not ks:
            raise ValueError("Kraus list must be nonempty")
        for k in ks:
            if k.shape != (self.out_dim, self.in_dim):
                raise ValueError(f"Kraus operator shape {k.shape} != {(self.out_dim, self.in_dim)}")
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ks)

    @property
    def stacked(self) -> np.ndarray:
        return np.stack(self.kraus)

    def __len__(self) -> int:
        return len(self.kraus)

    def apply(self, x) -> np.ndarray:
        """Image of one matrix, or of a stack of matrices along the leading axis."""
        x = np.asarray(x, dtype=complex)
        if x.shape[-2:] != (self.in_dim, self.in_dim):
            raise ValueError(f"input shape {x.shape} incompatible with input dimension {self.in_dim}")
        k = self.stacked
        return np.einsum("kab,...bc,kdc->...ad", k, x, k.conj())

    __call__ = apply

    def completeness_error(self) -> float:
        k = self.stacked
        s = np.einsum("kba,kbc->ac", k.conj(), k)
        return float(np.max(np.abs(s - np.eye(self.in_dim))))

    def choi(self) -> np.ndarray:
        """Unnormalized Choi matrix sum_ij |i><j| (x) Phi(|i><j|), input leg first."""
        v = self.stacked.transpose(0, 2, 1).reshape(len(self), -1)
        return v.T @ v.conj()

    def complementary(self) -> "KrausMap":
        """Environment map X -> [Tr(K_i X K_j^dag)]_ij for this Kraus list."""
        k = self.stacked
        return type(self)(tuple(k[:, b, :] for b in range(self.out_dim)), self.in_dim, len(self))

    def adjoint(self) -> "KrausMap":
        return KrausMap(tuple(k.conj().T for k in self.kraus), self.out_dim, self.in_dim)

    def tensor(self, other: "KrausMap") -> "KrausMap":
        ks = tuple(np.kron(a, b) for a in self.kraus for b in other.kraus)
        return type(self)(ks, self.in_dim * other.in_dim, self.out_dim * other.out_dim)


@dataclass(frozen=True)
class QuantumChannel(KrausMap):
    """Trace-preserving Kraus map."""

    def __post_init__(self):
        super().__post_init__()
        err = self.completeness_error()
        if err > 1e-10:
            raise ValueError(f"Kraus operators are not trace preserving (error {err:.2e})")


def cg_channel(k: int, l: int, m: int) -> QuantumChannel:
    """Phi^{k->l}_m: Stinespring isometry alpha^{l,m}_k with the H_m leg traced out."""
    if not admissible(l, m, k):
        raise ValueError(f"inadmissible triple (k={k}, l={l}, m={m})")
    v = isometry(l, m, k).reshape(l + 1, m + 1, k + 1)
    return QuantumChannel(tuple(v[:, j, :] for j in range(m + 1)), k + 1, l + 1)


@dataclass(frozen=True)
class ChannelFamilyParams:
    family: str
    p: float
    l: int | None = None
    q: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.family != "cov22" and (self.l is None or self.l < 1):
            raise ValueError(f"family {self.family} needs a positive integer l")
        if self.family == "cov22":
            object.__setattr__(self, "l", 2)

    @property
    def in_simplex(self) -> bool:
        eps = 1e-15
        if self.family == "cov22":
            return self.p >= -eps and self.q >= -eps and self.p + self.q <= 1 + eps
        return -eps <= self.p <= 1 + eps

    @property
    def dims(self) -> tuple[int, int]:
        if self.family == "cov1l":
            return 2, self.l + 1
        if self.family == "covl1":
            return self.l + 1, 2
        return 3, 3

    def weights(self) -> tuple[float, ...]:
        if self.family == "cov22":
            return (1 - self.p - self.q, self.p, self.q)
        return (1 - self.p, self.p)

    def as_dict(self) -> dict:
        d = {"family": self.family, "l": self.l, "p": self.p}
        if self.family == "cov22":
            d["q"] = self.q
        return d


def extreme_channels(params: ChannelFamilyParams) -> list[QuantumChannel]:
    """Vertices of the family's simplex, in the order matching ``params.weights()``."""
    l = params.l
    if params.family == "cov1l":
        return [cg_channel(1, l, l - 1), cg_channel(1, l, l + 1)]
    if params.family == "covl1":
        scale = np.sqrt((l + 1) / 2)
        out = []
        for ch in (cg_channel(1, l, l - 1), cg_channel(1, l, l + 1)):
            out.append(QuantumChannel(tuple(scale * k.conj().T for k in ch.kraus), l + 1, 2))
        return out
    return [cg_channel(2, 2, 0), cg_channel(2, 2, 2), cg_channel(2, 2, 4)]


def mixture(weights: Sequence[float], channels: Sequence[KrausMap]) -> QuantumChannel:
    """sqrt(weight)-scaled concatenation of Kraus lists; zero weights keep their slots."""
    ks = []
    for w, ch in zip(weights, channels):
        if w < 0:
            if w < -1e-15:
                raise ValueError("negative mixture weight")
            w = 0.0
        ks.extend(np.sqrt(w) * k for k in ch.kraus)
    ch0 = channels[0]
    return QuantumChannel(tuple(ks), ch0.in_dim, ch0.out_dim)


def family_channel(params: ChannelFamilyParams) -> QuantumChannel:
    """Kraus form of a point of CovQC(1,l), CovQC(l,1) or CovQC(2,2).

    Kraus ordering is that of the concatenated extreme channels: for cov1l the
    first l operators come from Phi^{1->l}_{l-1} and the next l + 2 from
    Phi^{1->l}_{l+1}; cov22 has 1 + 3 + 5 operators.
    """
    if not params.in_simplex:
        raise ValueError(
            f"{params} lies outside the channel simplex; use degpos.LinearCovariantMap for linear maps"
        )
    return mixture(params.weights(), extreme_channels(params))


def cov1l(l: int, p: float) -> QuantumChannel:
    return family_channel(ChannelFamilyParams("cov1l", p, l))


def covl1(l: int, p: float) -> QuantumChannel:
    return family_channel(ChannelFamilyParams("covl1", p, l))


def cov22(p: float, q: float) -> QuantumChannel:
    return family_channel(ChannelFamilyParams("cov22", p, 2, q))


def family_spins(params: ChannelFamilyParams) -> tuple[int, int]:
    """(k, l) labels of the input and output irreps."""
    d_in, d_out = params.dims
    return d_in - 1, d_out - 1


def covariance_residual(channel: KrausMap, k: int, l: int, u: SU2Element) -> float:
    """max over matrix units X of ||Phi(pi_k X pi_k^dag) - pi_l Phi(X) pi_l^dag||_F."""
    if channel.in_dim != k + 1 or channel.out_dim != l + 1:
        raise ValueError("channel dimensions do not match the representation labels")
    pk, pl = wigner_pi(k, u), wigner_pi(l, u)
    units = matrix_units(k + 1)
    lhs = channel.apply(pk @ units @ pk.conj().T)
    rhs = pl @ channel.apply(units) @ pl.conj().T
    return float(np.max(np.linalg.norm(lhs - rhs, axis=(1, 2))))


def choi_apply(choi: np.ndarray, x, dims: tuple[int, int]) -> np.ndarray:
    """Phi(X) = Tr_A[(X^t (x) Id) C]."""
    da, db = dims
    c = np.asarray(choi).reshape(da, db, da, db)
    return np.einsum("ij,ibjd->bd", np.asarray(x, dtype=complex), c)


def channel_to_json(channel: KrausMap, params: ChannelFamilyParams | None = None) -> str:
    doc = dict(params.as_dict()) if params is not None else {"family": None, "l": None, "p": None}
    doc.setdefault("q", None)
    doc["in_dim"] = channel.in_dim
    doc["out_dim"] = channel.out_dim
    doc["kraus"] = [
        [[float(z.real), float(z.imag)] for z in k.ravel()] for k in channel.kraus
    ]
    return json.dumps(doc, indent=1)


def channel_from_json(text: str) -> QuantumChannel:
    doc = json.loads(text)
    din, dout = doc["in_dim"], doc["out_dim"]
    ks = tuple(
        np.array([complex(re, im) for re, im in k]).reshape(dout, din) for k in doc["kraus"]
    )
    return QuantumChannel(ks, din, dout)


def matrix_units(d: int) -> np.ndarray:
    e = np.zeros((d * d, d, d), dtype=complex)
    for i in range(d):
        for j in range(d):
            e[i * d + j, i, j] = 1.0
    return e


__all__ = [
    "ChannelFamilyParams",
    "FAMILIES",
    "KrausMap",
    "QuantumChannel",
    "cg_channel",
    "channel_from_json",
    "channel_to_json",
    "choi_apply",
    "cov1l",
    "cov22",
    "covariance_residual",
    "covl1",
    "extreme_channels",
    "family_channel",
    "family_spins",
    "matrix_units",
    "mixture",
]
