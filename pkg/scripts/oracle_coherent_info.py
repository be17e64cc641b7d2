"""Independent oracle for the single-copy coherent information of Phi_p.

The environment entropy is taken from the purification |psi> = sqrt(lam)|00> +
sqrt(1-lam)|11> pushed through id (x) Phi via the Choi matrix, instead of from a
Kraus-built complementary channel.  A 10^6+1 point lambda scan is followed by a
bounded scalar refinement.

    python3 scripts/oracle_coherent_info.py --l 2 --p 0
"""
import argparse

import numpy as np
from scipy.optimize import minimize_scalar

from su2cov.channels import cov1l


def entropy(vals):
    vals = vals[vals > 1e-300]
    return float(-(vals * np.log(vals)).sum())


def objective_factory(l, p):
    ch = cov1l(l, p)
    choi = ch.choi().reshape(2, l + 1, 2, l + 1)
    a0 = np.diag(ch.apply(np.diag([1.0, 0.0]))).real
    a1 = np.diag(ch.apply(np.diag([0.0, 1.0]))).real

    def f(lam):
        s = np.sqrt([lam, 1 - lam])
        # (id (x) Phi)(|psi><psi|) = sum_ij s_i s_j |i><j| (x) Phi(|i><j|)
        joint = (choi * s[:, None, None, None] * s[None, None, :, None]).reshape(2 * (l + 1), -1)
        h_env = entropy(np.clip(np.linalg.eigvalsh(joint), 0, None))
        return entropy(lam * a0 + (1 - lam) * a1) - h_env

    return f


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--l", type=int, default=2)
    ap.add_argument("--p", type=float, default=0.0)
    ap.add_argument("--points", type=int, default=1_000_001)
    args = ap.parse_args()
    f = objective_factory(args.l, args.p)
    grid = np.linspace(0, 1, args.points)
    # coarse pass, then the full-resolution window around the best coarse point
    coarse = grid[:: max(1, args.points // 2000)]
    j = int(np.argmax([f(x) for x in coarse]))
    lo, hi = coarse[max(j - 1, 0)], coarse[min(j + 1, len(coarse) - 1)]
    window = grid[(grid >= lo) & (grid <= hi)]
    vals = np.array([f(x) for x in window])
    best = window[int(np.argmax(vals))]
    step = 1 / (args.points - 1)
    res = minimize_scalar(lambda x: -f(x), bounds=(max(best - step, 0), min(best + step, 1)),
                          method="bounded", options={"xatol": 1e-12})
    print(f"scan max {vals.max():.17g} at lambda {best:.17g}; refined {-res.fun:.17g} at {res.x:.17g}")


if __name__ == "__main__":
    main()
