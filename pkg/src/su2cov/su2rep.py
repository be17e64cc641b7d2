"""SU(2) representation theory for the channel constructions.

Basis convention: the vector |i> of H_k (dimension k + 1) carries weight
m_z = k/2 - i, so |0> is the highest-weight vector.  Clebsch-Gordan
coefficients follow Condon-Shortley, and ``wigner_pi`` restricts U^{(x) k} to
the symmetric subspace in the normalized occupation (Dicke) basis, which is the
representation those coefficients intertwine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np


def admissible(l: int, m: int, k: int) -> bool:
    return (
        min(l, m, k) >= 0
        and abs(l - m) <= k <= l + m
        and (l + m + k) % 2 == 0
    )


def _require_admissible(l: int, m: int, k: int) -> None:
    if not admissible(l, m, k):
        raise ValueError(f"inadmissible Clebsch-Gordan triple (l, m, k) = ({l}, {m}, {k})")


def _fact(n: int) -> int:
    if n < 0:
        raise ValueError("negative factorial argument")
    return math.factorial(n)


def cg_coefficient_exact(j1: int, m1: int, j2: int, m2: int, j: int, mj: int) -> tuple[int, Fraction]:
    """<j1/2 m1/2; j2/2 m2/2 | j/2 mj/2> as ``sign * sqrt(value)``.

    All arguments are doubled spins / weights.  Evaluated with Racah's formula
    in exact integer arithmetic.  Returns ``(sign, value)`` with ``value >= 0``.
    """
    if m1 + m2 != mj:
        return 0, Fraction(0)
    if abs(m1) > j1 or abs(m2) > j2 or abs(mj) > j:
        return 0, Fraction(0)
    for spin, weight in ((j1, m1), (j2, m2), (j, mj)):
        if (spin - weight) % 2:
            raise ValueError("weight parity does not match spin")
    if not (abs(j1 - j2) <= j <= j1 + j2) or (j1 + j2 + j) % 2:
        return 0, Fraction(0)

    def h(x: int) -> int:
        assert x % 2 == 0
        return x // 2

    pref = Fraction(
        (j + 1)
        * _fact(h(j + j1 - j2))
        * _fact(h(j - j1 + j2))
        * _fact(h(j1 + j2 - j)),
        _fact(h(j1 + j2 + j) + 1),
    )
    pref *= (
        _fact(h(j + mj)) * _fact(h(j - mj))
        * _fact(h(j1 - m1)) * _fact(h(j1 + m1))
        * _fact(h(j2 - m2)) * _fact(h(j2 + m2))
    )
    total = Fraction(0)
    kmin = max(0, h(j2 - j - m1), h(j1 - j + m2))
    kmax = min(h(j1 + j2 - j), h(j1 - m1), h(j2 + m2))
    for s in range(kmin, kmax + 1):
        den = (
            _fact(s)
            * _fact(h(j1 + j2 - j) - s)
            * _fact(h(j1 - m1) - s)
            * _fact(h(j2 + m2) - s)
            * _fact(h(j - j2 + m1) + s)
            * _fact(h(j - j1 - m2) + s)
        )
        total += Fraction((-1) ** s, den)
    if total == 0:
        return 0, Fraction(0)
    sign = 1 if total > 0 else -1
    return sign, total * total * pref


@dataclass(frozen=True)
class CGTable:
    """C[i1, i2, i] = coefficient of |i1 i2> in alpha^{l,m}_k |i>."""

    l: int
    m: int
    k: int
    coeffs: np.ndarray


@lru_cache(maxsize=None)
def _cg_array(l: int, m: int, k: int) -> np.ndarray:
    c = np.zeros((l + 1, m + 1, k + 1))
    for i1 in range(l + 1):
        for i2 in range(m + 1):
            # weight selection: (l - 2 i1) + (m - 2 i2) = k - 2 i
            twice = l + m - k - 2 * i1 - 2 * i2
            if twice % 2:
                continue
            i = -(twice // 2)
            if not 0 <= i <= k:
                continue
            sign, val = cg_coefficient_exact(l, l - 2 * i1, m, m - 2 * i2, k, k - 2 * i)
            if sign:
                c[i1, i2, i] = sign * math.sqrt(val)
    # global sign: first nonzero entry of column 0 positive (Condon-Shortley already does this)
    col0 = c[:, :, 0].ravel()
    first = col0[np.flatnonzero(col0)[0]]
    if first < 0:
        c = -c
    c.setflags(write=False)
    return c


def cg_table(l: int, m: int, k: int) -> CGTable:
    _require_admissible(l, m, k)
    return CGTable(l, m, k, _cg_array(l, m, k))


def isometry(l: int, m: int, k: int) -> np.ndarray:
    """Matrix of alpha^{l,m}_k : H_k -> H_l (x) H_m in the lexicographic product basis."""
    t = cg_table(l, m, k)
    return t.coeffs.reshape((l + 1) * (m + 1), k + 1).astype(complex)


@dataclass(frozen=True)
class SU2Element:
    """U = [[a, b], [-conj(b), conj(a)]] with |a|^2 + |b|^2 = 1."""

    a: complex
    b: complex

    def __post_init__(self):
        norm = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"|a|^2 + |b|^2 = {norm!r} != 1")

    @classmethod
    def identity(cls) -> "SU2Element":
        return cls(1.0 + 0j, 0j)

    @classmethod
    def from_matrix(cls, u) -> "SU2Element":
        u = np.asarray(u, dtype=complex)
        return cls(complex(u[0, 0]), complex(u[0, 1]))

    def matrix(self) -> np.ndarray:
        a, b = self.a, self.b
        return np.array([[a, b], [-np.conj(b), np.conj(a)]], dtype=complex)

    def __matmul__(self, other: "SU2Element") -> "SU2Element":
        return SU2Element.from_matrix(self.matrix() @ other.matrix())


def _poly_mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Batched polynomial product along the last axis."""
    n = p.shape[-1] + q.shape[-1] - 1
    out = np.zeros(p.shape[:-1] + (n,), dtype=complex)
    for j in range(q.shape[-1]):
        out[..., j : j + p.shape[-1]] += p * q[..., j : j + 1]
    return out


def wigner_pi_batch(l: int, a, b) -> np.ndarray:
    """pi_l(U) for arrays of SU(2) parameters; returns shape (..., l+1, l+1)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    shape = np.broadcast(a, b).shape
    a = np.broadcast_to(a, shape)[..., None]
    b = np.broadcast_to(b, shape)[..., None]
    # coefficients in y of U|0> = a x - conj(b) y and U|1> = b x + conj(a) y
    col0 = np.concatenate([a, -np.conj(b)], axis=-1)
    col1 = np.concatenate([b, np.conj(a)], axis=-1)
    pow0 = [np.ones(shape + (1,), dtype=complex)]
    pow1 = [np.ones(shape + (1,), dtype=complex)]
    for _ in range(l):
        pow0.append(_poly_mul(pow0[-1], col0))
        pow1.append(_poly_mul(pow1[-1], col1))
    binom = np.array([math.comb(l, i) for i in range(l + 1)], dtype=float)
    out = np.empty(shape + (l + 1, l + 1), dtype=complex)
    for j in range(l + 1):
        coef = _poly_mul(pow0[l - j], pow1[j])
        out[..., :, j] = coef * np.sqrt(binom[j] / binom)
    return out


def wigner_pi(l: int, u: SU2Element) -> np.ndarray:
    if l < 0:
        raise ValueError("spin label must be non-negative")
    if l == 1:
        return u.matrix()
    return wigner_pi_batch(l, u.a, u.b)


def r_matrix(m: int) -> np.ndarray:
    """R_m = sum_j (-1)^j |m - j><j|."""
    if m < 0:
        raise ValueError("m must be non-negative")
    r = np.zeros((m + 1, m + 1), dtype=complex)
    for j in range(m + 1):
        r[m - j, j] = (-1) ** j
    return r


def haar_arrays(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``n`` Haar-random SU(2) elements as parameter arrays (a, b)."""
    x = rng.standard_normal((n, 4))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return x[:, 0] + 1j * x[:, 1], x[:, 2] + 1j * x[:, 3]


def haar_sample(rng: np.random.Generator) -> SU2Element:
    """One Haar-random element: a normalized Gaussian quaternion."""
    a, b = haar_arrays(rng, 1)
    return SU2Element(complex(a[0]), complex(b[0]))


def diagonal_element(theta: float) -> SU2Element:
    """diag(e^{i theta}, e^{-i theta}) as an SU(2) element."""
    return SU2Element(complex(np.exp(1j * theta)), 0j)


def intertwining_residual(l: int, m: int, k: int, u: SU2Element) -> float:
    v = isometry(l, m, k)
    lhs = v @ wigner_pi(k, u)
    rhs = np.kron(wigner_pi(l, u), wigner_pi(m, u)) @ v
    return float(np.linalg.norm(lhs - rhs))


def orthonormality_error(l: int, m: int, k: int) -> float:
    v = isometry(l, m, k)
    return float(np.max(np.abs(v.conj().T @ v - np.eye(k + 1))))


__all__ = [
    "CGTable",
    "SU2Element",
    "admissible",
    "cg_coefficient_exact",
    "cg_table",
    "haar_arrays",
    "haar_sample",
    "intertwining_residual",
    "isometry",
    "orthonormality_error",
    "r_matrix",
    "diagonal_element",
    "wigner_pi",
    "wigner_pi_batch",
]
