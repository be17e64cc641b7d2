"""Release-gate checks: nine numerical criteria with computed-vs-expected records.

Each ``criterion_N`` returns a :class:`CriterionResult`.  A tolerance override
replaces every numeric tolerance; checks that pass at their nominal tolerance
but fail under the override are flagged ``tolerance_induced``.
"""
from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import su2rep
from .capacity import moe_brute_force, moe_cov1l, moe_cov22, moe_cov22_rule, output_entropy, superactivation_experiment
from .channels import ChannelFamilyParams, cg_channel, cov22, family_channel, family_spins, matrix_units
from .degpos import (
    decomposability_errors_cov1l,
    decomposability_errors_cov22,
    degradability_witness_cov1l,
    degradability_witness_cov22,
    degradability_witness_covl1,
    facet_probes,
    min_output_eigenvalue,
    positivity_member_cov22,
    LinearCovariantMap,
)
from .entcrit import expand_spectrum, ppt_region_closed_form, ppt_spectrum_closed_form, ppt_test, twirl_average
from .su2rep import SU2Element, haar_arrays
from .capacity import fixed_eigenvalue_check


@dataclass
class Check:
    name: str
    computed: Any
    expected: Any
    error: float | None
    tol: float | None
    passed: bool
    tolerance_induced: bool = False

    def as_dict(self) -> dict:
        return {
            "name": self.name, "computed": self.computed, "expected": self.expected,
            "error": self.error, "tol": self.tol, "passed": self.passed,
            "tolerance_induced": self.tolerance_induced,
        }


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list = field(default_factory=list)
    runtime: float = 0.0
    budget: float = 0.0
    notes: str = ""

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and self.runtime < self.budget

    @property
    def tolerance_induced(self) -> bool:
        failed = [c for c in self.checks if not c.passed]
        return bool(failed) and all(c.tolerance_induced for c in failed)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def summary_line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = ""
        if not self.passed:
            bad = self.failures()
            extra = f"; {len(bad)} failing check(s), first: {bad[0].name}" if bad else "; over time budget"
            if self.tolerance_induced:
                extra += " (tolerance-induced)"
        return f"[{status}] criterion {self.number}: {self.title} ({self.runtime:.1f}s / {self.budget:.0f}s){extra}"

    def as_dict(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "passed": self.passed,
            "tolerance_induced": self.tolerance_induced,
            "runtime": self.runtime,
            "budget": self.budget,
            "notes": self.notes,
            "checks": [c.as_dict() for c in self.checks],
        }


class Recorder:
    """Accumulates checks, applying an optional tolerance override."""

    def __init__(self, result: CriterionResult, override: float | None):
        self.result = result
        self.override = override

    def close(self, name: str, computed, expected, tol: float) -> Check:
        err = float(np.max(np.abs(np.asarray(computed, dtype=complex) - np.asarray(expected, dtype=complex))))
        return self.bound(name, err, tol, computed=_plain(computed), expected=_plain(expected))

    def bound(self, name: str, value: float, tol: float, computed=None, expected=None) -> Check:
        """value <= tol, with tol replaced by the override when set."""
        value = float(value)
        nominal = value <= tol
        eff_tol = tol if self.override is None else self.override
        ok = value <= eff_tol
        chk = Check(name, value if computed is None else computed, expected, value, eff_tol, ok,
                    tolerance_induced=nominal and not ok)
        self.result.checks.append(chk)
        return chk

    def truth(self, name: str, ok: bool, computed=None, expected=None) -> Check:
        chk = Check(name, computed, expected, None, None, bool(ok))
        self.result.checks.append(chk)
        return chk


def _plain(x):
    a = np.asarray(x)
    if a.size == 1:
        v = a.item()
        return float(v.real) if isinstance(v, complex) and v.imag == 0 else (float(v) if not isinstance(v, complex) else [v.real, v.imag])
    return None


def _run(number: int, title: str, budget: float, override: float | None,
         body: Callable[[Recorder], str | None]) -> CriterionResult:
    res = CriterionResult(number, title, budget=budget)
    rec = Recorder(res, override)
    t0 = time.perf_counter()
    notes = body(rec)
    res.runtime = time.perf_counter() - t0
    res.notes = notes or ""
    return res


# --- independent closed forms for channel actions -------------------------------

def _low_action(l: int, i: int, j: int) -> np.ndarray:
    c = 2 / (l * (l + 1))
    idx = np.arange(l + 1)
    if (i, j) == (0, 0):
        return np.diag(c * (l - idx)).astype(complex)
    if (i, j) == (1, 1):
        return np.diag(c * idx).astype(complex)
    off = np.diag(c * np.sqrt((l - idx[:-1]) * (idx[:-1] + 1)), 1).astype(complex)
    return off if (i, j) == (0, 1) else off.T.conj()


def _high_action(l: int, i: int, j: int) -> np.ndarray:
    c = 2 / ((l + 1) * (l + 2))
    idx = np.arange(l + 1)
    if (i, j) == (0, 0):
        return np.diag(c * (idx + 1)).astype(complex)
    if (i, j) == (1, 1):
        return np.diag(c * (l - idx + 1)).astype(complex)
    off = np.diag(-c * np.sqrt((l - idx[:-1]) * (idx[:-1] + 1)), 1).astype(complex)
    return off if (i, j) == (0, 1) else off.T.conj()


def _phi2_action(a: np.ndarray) -> np.ndarray:
    return 0.5 * np.array([
        [a[0, 0] + a[1, 1], a[1, 2], -a[0, 2]],
        [a[2, 1], a[0, 0] + a[2, 2], a[0, 1]],
        [-a[2, 0], a[1, 0], a[1, 1] + a[2, 2]],
    ])


def _phi4_action(a: np.ndarray) -> np.ndarray:
    return 0.1 * np.array([
        [a[0, 0] + 3 * a[1, 1] + 6 * a[2, 2], -2 * a[0, 1] - 3 * a[1, 2], a[0, 2]],
        [-2 * a[1, 0] - 3 * a[2, 1], 3 * a[0, 0] + 4 * a[1, 1] + 3 * a[2, 2], -3 * a[0, 1] - 2 * a[1, 2]],
        [a[2, 0], -3 * a[1, 0] - 2 * a[2, 1], 6 * a[0, 0] + 3 * a[1, 1] + a[2, 2]],
    ])


def criterion_1(override: float | None = None) -> CriterionResult:
    def body(rec: Recorder):
        tol = 1e-12
        for l in range(1, 7):
            low, high = cg_channel(1, l, l - 1), cg_channel(1, l, l + 1)
            worst_low = worst_high = 0.0
            for i in range(2):
                for j in range(2):
                    e = np.zeros((2, 2), dtype=complex)
                    e[i, j] = 1
                    worst_low = max(worst_low, np.max(np.abs(low.apply(e) - _low_action(l, i, j))))
                    worst_high = max(worst_high, np.max(np.abs(high.apply(e) - _high_action(l, i, j))))
            rec.bound(f"Phi^(1->{l})_{l - 1} on matrix units", worst_low, tol)
            rec.bound(f"Phi^(1->{l})_{l + 1} on matrix units", worst_high, tol)
        units = matrix_units(3)
        for k, ref in ((0, lambda a: a), (2, _phi2_action), (4, _phi4_action)):
            ch = cg_channel(2, 2, k)
            err = max(np.max(np.abs(ch.apply(u) - ref(u))) for u in units)
            rec.bound(f"Phi^(2->2)_{k} on matrix units", err, tol)

    return _run(1, "channel actions on matrix units", 1.0, override, body)


def _simplex_grid(n: int) -> list[tuple[float, float]]:
    pts = []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            pts.append((i / n, j / n))
    return pts


def _haar_elements(rng, n) -> list[SU2Element]:
    a, b = haar_arrays(rng, n)
    return [SU2Element(complex(x), complex(y)) for x, y in zip(a, b)]


def criterion_2(override: float | None = None, seed: int = 2) -> CriterionResult:
    from .channels import covariance_residual

    def body(rec: Recorder):
        rng = np.random.default_rng(seed)
        plist = [ChannelFamilyParams(f, p, l) for f in ("cov1l", "covl1") for l in range(1, 6)
                 for p in np.linspace(0, 1, 5)]
        plist += [ChannelFamilyParams("cov22", p, 2, q) for p, q in _simplex_grid(4)]
        for params in plist:
            ch = family_channel(params)
            k, l = family_spins(params)
            worst = max(covariance_residual(ch, k, l, u) for u in _haar_elements(rng, 20))
            rec.bound(f"covariance {params.family} l={params.l} p={params.p:.3g} q={params.q:.3g}", worst, 1e-9)

    return _run(2, "SU(2) covariance under Haar samples", 10.0, override, body)


def criterion_3(override: float | None = None) -> CriterionResult:
    def body(rec: Recorder):
        tol = 1e-10
        for fam in ("cov1l", "covl1"):
            for l in range(1, 6):
                grid = np.linspace(0, 1, 50)
                step = grid[1] - grid[0]
                worst = 0.0
                members = []
                for p in grid:
                    params = ChannelFamilyParams(fam, float(p), l)
                    rep = ppt_test(family_channel(params), params)
                    ref = expand_spectrum(ppt_spectrum_closed_form(params)).eigenvalues
                    worst = max(worst, np.max(np.abs(rep.spectrum.eigenvalues - ref)))
                    members.append(rep.numeric_member)
                rec.bound(f"{fam} l={l} PT spectrum vs closed form", worst, tol)
                first = grid[int(np.argmax(members))] if any(members) else np.inf
                rec.truth(f"{fam} l={l} PPT threshold within one grid step of 1/(l+1)",
                          abs(first - 1 / (l + 1)) <= step and all(members[int(np.argmax(members)):]),
                          computed=float(first), expected=1 / (l + 1))
        n = 30
        step = 1 / (n - 1)
        worst = 0.0
        bad = []
        for p in np.linspace(0, 1, n):
            for q in np.linspace(0, 1, n):
                if p + q > 1 + 1e-12:
                    continue
                params = ChannelFamilyParams("cov22", float(p), 2, float(min(q, 1 - p)))
                rep = ppt_test(family_channel(params), params)
                ref = expand_spectrum(ppt_spectrum_closed_form(params)).eigenvalues
                worst = max(worst, np.max(np.abs(rep.spectrum.eigenvalues - ref)))
                if rep.numeric_member != ppt_region_closed_form(params):
                    near = min(abs(p - 0.5), abs(p + q - 2 / 3), abs(p + q - 1))
                    if near > step:
                        bad.append((float(p), float(q)))
        rec.bound("cov22 PT spectrum vs closed form on 30x30 grid", worst, tol)
        rec.truth("cov22 membership agrees with facets p=1/2, p+q=2/3, p+q=1 up to one grid step",
                  not bad, computed=bad[:5], expected=[])

    return _run(3, "PPT spectra and regions", 30.0, override, body)


TWIRL_CASES = ((1, 2, 0, 0), (1, 2, 1, 0), (2, 2, 1, 1), (2, 2, 2, 2), (2, 2, 2, 0), (2, 2, 2, 1))


def criterion_4(override: float | None = None, seed: int = 4, samples: int = 100_000) -> CriterionResult:
    def body(rec: Recorder):
        rng = np.random.default_rng(seed)
        for m, l, i1, i2 in TWIRL_CASES:
            tw = twirl_average(m, l, i1, i2, samples, rng)
            rec.bound(f"twirl gap m={m} l={l} (i1,i2)=({i1},{i2}) N={samples}", tw.frobenius_gap, 0.03)
        # ~1/sqrt(N): the slope of log(gap) against log(N), averaged over repeats
        ns = np.array([1_000, 10_000, 100_000])
        gaps = np.array([[twirl_average(2, 2, 1, 1, int(n), rng).frobenius_gap for n in ns] for _ in range(3)])
        slope = float(np.polyfit(np.log(ns), np.log(gaps.mean(axis=0)), 1)[0])
        rec.bound("twirl gap scaling exponent |slope + 1/2|", abs(slope + 0.5), 0.15)
        return f"scaling slope {slope:.3f}"

    return _run(4, "twirl averages reproduce covariant Choi targets", 120.0, override, body)


def criterion_5(override: float | None = None, grid_density: int = 48) -> CriterionResult:
    def body(rec: Recorder):
        ch = cov22(0.5, 0.5)
        h1 = output_entropy(ch, np.diag([0, 1, 0]).astype(complex))
        h0 = output_entropy(ch, np.diag([1, 0, 0]).astype(complex))
        rec.close("H(N_(.5,.5)(|1><1|))", h1, 1.055, 5e-3)
        rec.close("H(N_(.5,.5)(|0><0|))", h0, 1.089, 5e-3)
        rec.truth("minimizer at (.5,.5) is ket1", moe_cov22(0.5, 0.5).minimizer_label == "ket1")
        for l in range(1, 6):
            p = (l + 2) / (2 * (l + 1))
            rec.close(f"Holevo information at depolarizing point l={l}", moe_cov1l(l, p).holevo, 0.0, 1e-10)
        worst = 0.0
        for l in range(1, 6):
            for p in np.linspace(0, 1, 21):
                bf = moe_brute_force(family_channel(ChannelFamilyParams("cov1l", float(p), l)), 16)
                worst = max(worst, abs(bf.h_min - moe_cov1l(l, float(p)).h_min))
        rec.bound("Cov1L brute-force MOE vs coherent-state rule", worst, 1e-6)
        worst = 0.0
        mismatched = []
        for p, q in _simplex_grid(20):
            q = min(q, 1 - p)
            closed = moe_cov22(p, q)
            bf = moe_brute_force(cov22(p, q), grid_density)
            worst = max(worst, abs(bf.h_min - closed.h_min))
            near_tie = min(abs(p - 3 * q / 5), abs(p - (5 - 6 * q) / 5)) <= 1e-6
            if not near_tie:
                h0 = output_entropy(cov22(p, q), np.diag([1, 0, 0]).astype(complex))
                h1 = output_entropy(cov22(p, q), np.diag([0, 1, 0]).astype(complex))
                numeric = "ket0" if h0 < h1 else "ket1"
                if numeric != moe_cov22_rule(p, q):
                    mismatched.append((p, q))
        rec.bound("Cov22 brute-force MOE vs two-candidate rule on 21x21 grid", worst, 1e-6)
        rec.truth("Cov22 minimizer labels match the sign rule off the tie curves",
                  not mismatched, computed=mismatched[:5], expected=[])

    return _run(5, "minimum output entropy and Holevo information", 300.0, override, body)


def criterion_6(override: float | None = None, seed: int = 6) -> CriterionResult:
    def body(rec: Recorder):
        rng = np.random.default_rng(seed)
        worst = 0.0
        for p in np.linspace(0, 1, 10):
            for q in np.linspace(0, 1, 10):
                if p + q > 1 + 1e-12:
                    continue
                q = min(q, 1 - p)
                z = rng.standard_normal((100, 3)) + 1j * rng.standard_normal((100, 3))
                z /= np.linalg.norm(z, axis=1, keepdims=True)
                worst = max(worst, max(fixed_eigenvalue_check(p, q, xi) for xi in z))
        rec.bound("distance of p/2 + 3q/10 to output spectrum", worst, 1e-10)

    return _run(6, "input-independent output eigenvalue", 30.0, override, body)


def criterion_7(override: float | None = None, grid_points: int = 100_001) -> CriterionResult:
    def body(rec: Recorder):
        rep = superactivation_experiment(2, 0.1045, grid_points)
        rec.bound("single-copy scan maximum", rep["q1_upper_via_scan"], 1e-6)
        rec.bound("certified single-copy upper bound", rep["certified_q1_upper"], 1e-5)
        rec.close("two-copy output entropy", rep["two_copy_h_out"], 2.0727, 5e-4)
        rec.close("two-copy environment entropy", rep["two_copy_h_env"], 2.0648, 5e-4)
        rec.bound("two-copy half bound shortfall below 0.0039", 0.0039 - rep["two_copy_half_bound"], 1e-4)
        return (f"uniform-grid Fannes bound {rep['fannes_bound']:.3e}; "
                f"adaptive certificate {rep['certified_q1_upper']:.3e}")

    return _run(7, "almost superactivation of coherent information", 120.0, override, body)


def criterion_8(override: float | None = None) -> CriterionResult:
    def body(rec: Recorder):
        tol = 1e-10
        e0 = e1 = 0.0
        for l in range(1, 6):
            for p in np.linspace(0.05, 1, 20):
                r = degradability_witness_cov1l(l, float(p))
                e0 = max(e0, abs(r.details["entry_ket0"] - r.details["entry_ket0_closed_form"]))
                e1 = max(e1, abs(r.details["entry_ket1"] - r.details["entry_ket1_closed_form"]))
        rec.bound("Cov1L complementary entry on |0><0| (closed form 0)", e0, tol)
        rec.bound("Cov1L complementary entry on |1><1| (closed form 2p/(l+2))", e1, tol)
        worst = 0.0
        for l in range(1, 6):
            for p in np.linspace(0.02, 0.98, 20):
                r = degradability_witness_covl1(l, float(p))
                if r.witness_kind == "covl1_entry" and r.details["output_leading_coefficient"] > 0:
                    worst = max(worst, r.difference)
        rec.bound("CovL1 witness vs -(p(l+1)/(l+2))^2", worst, tol)
        m_pub = m_fix = n_err = 0.0
        m_bad = []
        for p in np.linspace(0, 1, 15):
            for q in np.linspace(0, 1, 15):
                if p + q > 1 + 1e-12:
                    continue
                r = degradability_witness_cov22(float(p), float(min(q, 1 - p)))
                if r.witness_kind == "cov22_M":
                    pub = abs(r.witness_value - r.details["closed_form_reference"])
                    m_pub = max(m_pub, pub)
                    m_fix = max(m_fix, r.difference)
                    if pub > tol:
                        m_bad.append((round(float(p), 4), round(float(q), 4)))
                elif r.witness_kind == "cov22_N":
                    n_err = max(n_err, r.difference)
        rec.bound("Cov22 <4|M|4> vs -(6p/10)(p/2+3q/10) (reference form)", m_pub, tol)
        rec.bound("Cov22 <8|N|8> vs -(6q/10)(1-p-6q/10)", n_err, tol)
        return (f"<4|M|4> matches -(6q/10)(p/2+3q/10) to {m_fix:.1e}; the stated 6p/10 prefactor "
                f"fails at {len(m_bad)} grid points with p != q")

    return _run(8, "degradability witnesses", 10.0, override, body)


def criterion_9(override: float | None = None, samples: int = 1000, seed: int = 9) -> CriterionResult:
    def body(rec: Recorder):
        tol = 1e-12
        rec.bound("Cov1L boundary map equals R_l (Phi_low)^t R_l^dag",
                  max(decomposability_errors_cov1l(l) for l in range(1, 7)), tol)
        for name, err in decomposability_errors_cov22().items():
            rec.bound(f"Cov22 identity: {name}", err, tol)
        inside = 0.0
        for l in range(1, 6):
            for p in np.linspace(0, (l + 2) / (l + 1), 11):
                lin = LinearCovariantMap(ChannelFamilyParams("cov1l", float(p), l))
                inside = min(inside, min_output_eigenvalue(lin, samples, seed))
        for p in np.linspace(-1, 1, 15):
            for q in np.linspace(0, 5 / 3, 15):
                if positivity_member_cov22(p, q):
                    lin = LinearCovariantMap(ChannelFamilyParams("cov22", float(p), 2, float(q)))
                    inside = min(inside, min_output_eigenvalue(lin, samples, seed))
        rec.bound("most negative output eigenvalue inside positivity regions", -inside, 1e-10)
        for l in range(1, 6):
            for label, p in (("p=0", -0.05), ("p=(l+2)/(l+1)", (l + 2) / (l + 1) + 0.05)):
                lin = LinearCovariantMap(ChannelFamilyParams("cov1l", p, l))
                depth = -min_output_eigenvalue(lin, samples, seed)
                rec.truth(f"Cov1L l={l} violation 0.05 beyond {label}", depth >= 1e-4, computed=depth, expected=">= 1e-4")
        for label, (p, q) in facet_probes(0.05):
            lin = LinearCovariantMap(ChannelFamilyParams("cov22", p, 2, q))
            depth = -min_output_eigenvalue(lin, samples, seed)
            rec.truth(f"Cov22 violation 0.05 beyond facet {label}", depth >= 1e-4, computed=depth, expected=">= 1e-4")

    return _run(9, "positivity regions and decomposability", 60.0, override, body)


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9,
}


def run_all(override: float | None = None, only: list[int] | None = None) -> list[CriterionResult]:
    numbers = sorted(CRITERIA) if only is None else only
    return [CRITERIA[n](override=override) for n in numbers]


@contextmanager
def tampered_cg_sign():
    """Flip one Clebsch-Gordan sign in every table with a multi-entry column.

    Columns of an isometry have disjoint supports, so orthonormality (and trace
    preservation) survives while the intertwining property does not.
    """
    original = su2rep._cg_array

    def tampered(l, m, k):
        c = original(l, m, k).copy()
        for i in range(k + 1):
            nz = np.argwhere(c[:, :, i] != 0)
            if len(nz) >= 2:
                a, b = nz[0]
                c[a, b, i] = -c[a, b, i]
                break
        c.setflags(write=False)
        return c

    su2rep._cg_array = tampered
    try:
        yield
    finally:
        su2rep._cg_array = original
