"""Minimum output entropy, Holevo information and coherent information.

Entropies are in nats throughout.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .channels import ChannelFamilyParams, KrausMap, cov1l, cov22
from .config import DEFAULT_TOL
from .matcore import (
    check_density,
    entropy_from_eigenvalues,
    von_neumann_entropy,
)

KET_LABELS = ("ket0", "ket1", "custom")


@dataclass(frozen=True)
class MoeResult:
    params: ChannelFamilyParams | None
    h_min: float
    minimizer_label: str
    minimizer_state: np.ndarray = field(repr=False)
    out_dim: int = 0

    @property
    def holevo(self) -> float:
        return float(np.log(self.out_dim)) - self.h_min

    def as_dict(self) -> dict:
        return {
            "params": None if self.params is None else self.params.as_dict(),
            "h_min": self.h_min,
            "holevo": self.holevo,
            "minimizer": self.minimizer_label,
        }


def _basis_state(d: int, i: int) -> np.ndarray:
    rho = np.zeros((d, d), dtype=complex)
    rho[i, i] = 1.0
    return rho


def output_entropy(channel: KrausMap, rho) -> float:
    return von_neumann_entropy(channel.apply(rho))


def moe_cov1l(l: int, p: float) -> MoeResult:
    """H_min of Phi_p is attained at the coherent state |0><0| (and equally at |1><1|)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p = {p} outside [0, 1]")
    rho = _basis_state(2, 0)
    h = output_entropy(cov1l(l, p), rho)
    return MoeResult(ChannelFamilyParams("cov1l", p, l), h, "ket0", rho, l + 1)


def moe_cov22_rule(p: float, q: float) -> str:
    """Closed-form minimizer label: ket0 where (5p - 3q)(5p + 6q - 5) <= 0."""
    return "ket0" if (5 * p - 3 * q) * (5 * p + 6 * q - 5) <= 0 else "ket1"


def moe_cov22(p: float, q: float, tie_tol: float = 1e-9) -> MoeResult:
    if p < 0 or q < 0 or p + q > 1 + 1e-15:
        raise ValueError(f"(p, q) = ({p}, {q}) outside the simplex")
    ch = cov22(p, q)
    h0 = output_entropy(ch, _basis_state(3, 0))
    h1 = output_entropy(ch, _basis_state(3, 1))
    label = moe_cov22_rule(p, q)
    if abs(h0 - h1) <= tie_tol:
        label = "ket0"
    h, idx = (h0, 0) if label == "ket0" else (h1, 1)
    return MoeResult(ChannelFamilyParams("cov22", p, 2, q), h, label, _basis_state(3, idx), 3)


def _pure_states(params: np.ndarray, dim: int) -> np.ndarray:
    """Unit vectors from angle coordinates; shape (n, dim)."""
    params = np.atleast_2d(params)
    if dim == 2:
        th, ph = params[:, 0], params[:, 1]
        return np.stack([np.cos(th / 2), np.sin(th / 2) * np.exp(1j * ph)], axis=1)
    if dim == 3:
        t1, t2, f1, f2 = params.T
        return np.stack(
            [np.cos(t1) + 0j, np.sin(t1) * np.cos(t2) * np.exp(1j * f1),
             np.sin(t1) * np.sin(t2) * np.exp(1j * f2)],
            axis=1,
        )
    raise ValueError(f"brute-force MOE supports input dimension 2 or 3, not {dim}")


def pure_output_entropies(channel: KrausMap, vecs: np.ndarray) -> np.ndarray:
    rhos = vecs[:, :, None] * vecs.conj()[:, None, :]
    out = channel.apply(rhos)
    return entropy_from_eigenvalues(np.linalg.eigvalsh(out))


def moe_brute_force(channel: KrausMap, grid_density: int = 64, starts: int = 6,
                    params: ChannelFamilyParams | None = None) -> MoeResult:
    """Minimum output entropy over pure inputs by grid search plus local refinement.

    Qubit inputs use a (theta, phi) Bloch-sphere grid; qutrit inputs use a
    Halton sequence over two polar and two phase angles.  The best ``starts``
    grid points are refined with Powell's direction-set method.
    """
    dim = channel.in_dim
    if dim == 2:
        th = np.linspace(0, np.pi, grid_density)
        ph = np.linspace(0, 2 * np.pi, 2 * grid_density, endpoint=False)
        pts = np.stack(np.meshgrid(th, ph, indexing="ij"), axis=-1).reshape(-1, 2)
    elif dim == 3:
        sample = qmc.Halton(d=4, scramble=False).random(grid_density**2)
        pts = sample * np.array([np.pi / 2, np.pi / 2, 2 * np.pi, 2 * np.pi])
        # the basis states are cheap and are where the closed forms live
        pts = np.vstack([pts, [[0, 0, 0, 0], [np.pi / 2, 0, 0, 0], [np.pi / 2, np.pi / 2, 0, 0]]])
    else:
        raise ValueError(f"brute-force MOE supports input dimension 2 or 3, not {dim}")
    vals = pure_output_entropies(channel, _pure_states(pts, dim))
    order = np.argsort(vals)[:starts]

    def objective(x):
        return float(pure_output_entropies(channel, _pure_states(x, dim))[0])

    best_x, best_v = pts[order[0]], float(vals[order[0]])
    for idx in order:
        res = minimize(objective, pts[idx], method="Powell",
                       options={"xtol": 1e-10, "ftol": 1e-14, "maxfev": 20000})
        if res.fun < best_v:
            best_x, best_v = res.x, float(res.fun)
    vec = _pure_states(best_x, dim)[0]
    return MoeResult(params, best_v, "custom", np.outer(vec, vec.conj()), channel.out_dim)


def fixed_eigenvalue_check(p: float, q: float, xi, tol: float = DEFAULT_TOL.unit_vector) -> float:
    """Distance from p/2 + 3q/10 to the nearest eigenvalue of N_{p,q}(|xi><xi|)."""
    xi = np.asarray(xi, dtype=complex).ravel()
    if xi.shape != (3,):
        raise ValueError("xi must be a vector in C^3")
    if abs(np.linalg.norm(xi) - 1.0) > tol:
        raise ValueError("xi must be a unit vector")
    vals = np.linalg.eigvalsh(cov22(p, q).apply(np.outer(xi, xi.conj())))
    return float(np.min(np.abs(vals - (p / 2 + 3 * q / 10))))


def coherent_info_lower_bound(channel: KrausMap, rho) -> float:
    """H(Phi(rho)) - H(Phi^c(rho)), a lower bound on Q^(1)(Phi)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (channel.in_dim, channel.in_dim):
        raise ValueError("state dimension does not match the channel input")
    check_density(rho)
    return von_neumann_entropy(channel.apply(rho)) - von_neumann_entropy(channel.complementary().apply(rho))


def _fannes_vec(t: np.ndarray, dim: int) -> np.ndarray:
    tt = np.clip(t, 1e-300, 0.5)
    h = -tt * np.log(tt) - (1 - tt) * np.log1p(-tt)
    out = np.where(t > 0, t * np.log(dim - 1) + h, 0.0)
    # beyond the Fannes-Audenaert range only the trivial bound holds
    return np.where(t >= 1 - 1 / dim, np.log(dim), out)


class DiagonalScan:
    """Coherent-information objective on diagonal qubit inputs D_lam = diag(lam, 1 - lam)."""

    def __init__(self, l: int, p: float):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p = {p} outside [0, 1]")
        self.l, self.p = l, p
        self.channel = cov1l(l, p)
        env = self.channel.complementary()
        e0, e1 = _basis_state(2, 0), _basis_state(2, 1)
        out0, out1 = self.channel.apply(e0), self.channel.apply(e1)
        # covariance forces diagonal outputs on diagonal inputs
        assert np.allclose(out0, np.diag(np.diag(out0)), atol=1e-14)
        assert np.allclose(out1, np.diag(np.diag(out1)), atol=1e-14)
        self.out_diag = (np.diag(out0).real, np.diag(out1).real)
        self.env = (env.apply(e0), env.apply(e1))
        self.d_out = self.channel.out_dim
        self.d_env = env.out_dim

    def terms(self, lam, chunk: int = 50_000) -> tuple[np.ndarray, np.ndarray]:
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        a0, a1 = self.out_diag
        h_out = entropy_from_eigenvalues(lam[:, None] * a0 + (1 - lam[:, None]) * a1)
        h_env = np.empty_like(lam)
        e0, e1 = self.env
        for s in range(0, len(lam), chunk):
            x = lam[s : s + chunk, None, None]
            h_env[s : s + chunk] = entropy_from_eigenvalues(np.linalg.eigvalsh(x * e0 + (1 - x) * e1))
        return h_out, h_env

    def objective(self, lam) -> np.ndarray:
        h_out, h_env = self.terms(lam)
        return h_out - h_env

    def continuity_bound(self, width) -> np.ndarray:
        """Max change of the objective within half an interval of the given width.

        ||D_lam - D_mu||_1 / 2 = |lam - mu| and channels contract trace
        distance, so Fannes-Audenaert applies to both entropies.
        """
        t = np.atleast_1d(np.asarray(width, dtype=float)) / 2
        return _fannes_vec(t, self.d_out) + _fannes_vec(t, self.d_env)


@dataclass
class CoherentInfoResult:
    l: int
    p: float
    q1: float
    argmax_lambda: float
    grid_resolution: float
    fannes_error_bound: float
    certified_upper: float | None = None
    certificate_intervals: int = 0
    scan: dict | None = field(default=None, repr=False)

    def as_dict(self) -> dict:
        return {
            "l": self.l, "p": self.p, "q1": self.q1, "argmax_lambda": self.argmax_lambda,
            "grid_resolution": self.grid_resolution,
            "fannes_error_bound": self.fannes_error_bound,
            "certified_upper": self.certified_upper,
            "certificate_intervals": self.certificate_intervals,
        }


def certify_upper_bound(scan: DiagonalScan, lam: np.ndarray, vals: np.ndarray,
                        target: float, max_rounds: int = 60) -> tuple[float, int]:
    """Rigorous-in-exact-arithmetic upper bound on max_lam objective(lam).

    Every interval [a, b] between evaluated points contributes
    max(f(a), f(b)) + continuity_bound(b - a).  Intervals whose contribution
    exceeds ``target`` are bisected until it does not, or until ``max_rounds``.
    Returns (bound, number of final intervals).
    """
    lo, hi = lam[:-1], lam[1:]
    flo, fhi = vals[:-1], vals[1:]
    done_bounds = []
    n_final = 0
    for _ in range(max_rounds):
        bound = np.maximum(flo, fhi) + scan.continuity_bound(hi - lo)
        ok = bound <= target
        done_bounds.append(bound[ok])
        n_final += int(ok.sum())
        lo, hi, flo, fhi = lo[~ok], hi[~ok], flo[~ok], fhi[~ok]
        if lo.size == 0:
            break
        mid = 0.5 * (lo + hi)
        fmid = scan.objective(mid)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        flo, fhi = np.concatenate([flo, fmid]), np.concatenate([fmid, fhi])
    if lo.size:
        done_bounds.append(np.maximum(flo, fhi) + scan.continuity_bound(hi - lo))
        n_final += lo.size
    return float(max(np.max(b) for b in done_bounds if b.size)), n_final


def coherent_info_single(l: int, p: float, grid_points: int = 100_001,
                         certify_target: float | None = 1e-5,
                         keep_scan: bool = False) -> CoherentInfoResult:
    """Q^(1)(Phi_p) by a uniform lambda-scan over diagonal inputs."""
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    scan = DiagonalScan(l, p)
    lam = np.linspace(0.0, 1.0, grid_points)
    h_out, h_env = scan.terms(lam)
    ic = h_out - h_env
    j = int(np.argmax(ic))
    step = 1.0 / (grid_points - 1)
    res = CoherentInfoResult(
        l, p, float(ic[j]), float(lam[j]), step, float(scan.continuity_bound(step)[0])
    )
    if certify_target is not None:
        res.certified_upper, res.certificate_intervals = certify_upper_bound(
            scan, lam, ic, max(certify_target, res.q1 + res.fannes_error_bound * 1e-3)
        )
    if keep_scan:
        res.scan = {"lambda": lam, "h_out": h_out, "h_env": h_env, "ic": ic}
    return res


TWO_COPY_PROBE = np.diag([0.5, 0.0, 0.0, 0.5]).astype(complex)


def two_copy_terms(l: int, p: float, rho=TWO_COPY_PROBE) -> tuple[float, float]:
    """(H((Phi x Phi)(rho)), H((Phi^c x Phi^c)(rho))) for the tensor-square channel."""
    ch = cov1l(l, p)
    two = ch.tensor(ch)
    return von_neumann_entropy(two.apply(rho)), von_neumann_entropy(two.complementary().apply(rho))


def two_copy_diagonal_ascent(l: int, p: float) -> tuple[float, np.ndarray]:
    """Best two-copy coherent information over diagonal inputs in the product basis."""
    ch = cov1l(l, p)
    two = ch.tensor(ch)
    env = two.complementary()

    def neg(x):
        w = np.exp(x - x.max())
        rho = np.diag(w / w.sum()).astype(complex)
        return -(entropy_from_eigenvalues(np.linalg.eigvalsh(two.apply(rho)))
                 - entropy_from_eigenvalues(np.linalg.eigvalsh(env.apply(rho))))

    best = None
    for x0 in (np.log(np.array([0.5, 1e-9, 1e-9, 0.5])), np.zeros(4)):
        r = minimize(neg, x0, method="Nelder-Mead", options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
        if best is None or r.fun < best.fun:
            best = r
    w = np.exp(best.x - best.x.max())
    return float(-best.fun), w / w.sum()


def superactivation_experiment(l: int, p: float, grid_points: int = 100_001,
                               certify_target: float = 1e-5, ascent: bool = False,
                               keep_scan: bool = False) -> dict:
    single = coherent_info_single(l, p, grid_points, certify_target, keep_scan=keep_scan)
    h_out, h_env = two_copy_terms(l, p)
    half = 0.5 * (h_out - h_env)
    q1_upper = single.certified_upper if single.certified_upper is not None else single.q1 + single.fannes_error_bound
    report = {
        "l": l,
        "p": p,
        "grid_points": grid_points,
        "q1_upper_via_scan": single.q1,
        "argmax_lambda": single.argmax_lambda,
        "fannes_bound": single.fannes_error_bound,
        "certified_q1_upper": q1_upper,
        "certificate_intervals": single.certificate_intervals,
        "two_copy_h_out": h_out,
        "two_copy_h_env": h_env,
        "two_copy_half_bound": half,
        "gap": half - q1_upper,
    }
    if ascent:
        val, w = two_copy_diagonal_ascent(l, p)
        report["two_copy_ascent_half_bound"] = 0.5 * val
        report["two_copy_ascent_weights"] = [float(x) for x in w]
    if keep_scan:
        report["_scan"] = single.scan
    return report
