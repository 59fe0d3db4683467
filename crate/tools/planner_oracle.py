"""Independent high-precision re-evaluation of the architecture planner.

Writes crates/relu-constructor/tests/data/planner_oracle.json: 100 random
(beta, d_eff, n, profile, N/M) inputs with W and D computed in 60-digit
arithmetic. Rerun after changing the sampling below; the Rust test only reads
the frozen file.
"""
import json
import random
from pathlib import Path

from mpmath import mp, mpf, ceil, log, power

mp.dps = 60

PROFILES = ["deep_fixed_width", "wide_fixed_depth", "deep_and_wide",
            "rectangle_min_size", "manifold", "minkowski"]


def s_of(beta):
    return int(ceil(beta)) - 1


def nlog(k):
    return k * int(ceil(log(8 * k, 2)))


def t_log(n, e):
    t = power(n, e)
    return int(ceil(t * log(8 * t, 2)))


def plan(beta, d, n, profile, N, M):
    s1 = s_of(beta) + 1
    e = mpf(d) / (2 * (d + 2 * beta))
    dp = d ** s1
    deep = 21 * s1 * s1 * t_log(n, e)
    if profile in ("deep_fixed_width", "manifold"):
        return 38 * s1 * s1 * dp * nlog(N), deep
    if profile == "wide_fixed_depth":
        return 38 * s1 * s1 * dp * t_log(n, e), 21 * s1 * s1 * nlog(M)
    if profile == "deep_and_wide":
        k = max(1, int(ceil(power(n, e / 2))))
        return 38 * s1 * s1 * dp * nlog(k), 21 * s1 * s1 * nlog(k)
    if profile == "rectangle_min_size":
        return 114 * s1 * s1 * dp, deep
    return 114 * s1 * s1 * 3 ** d * dp, deep


def main():
    rng = random.Random(20240611)
    cases = []
    for i in range(100):
        beta_q = rng.randint(1, 16)  # beta in quarters, 0.25 .. 4
        beta = mpf(beta_q) / 4
        d = rng.randint(1, 6)
        n = rng.choice([rng.randint(2, 100), rng.randint(100, 10**5), rng.randint(10**5, 10**9)])
        profile = PROFILES[i % len(PROFILES)]
        N = rng.randint(1, 9) if profile in ("deep_fixed_width", "manifold") else None
        M = rng.randint(1, 9) if profile == "wide_fixed_depth" else None
        w, dd = plan(beta, d, n, profile, N, M)
        cases.append({"beta": float(beta), "d_eff": d, "n": n, "profile": profile,
                      "n_param": N, "m_param": M, "W": w, "D": dd})
    out = Path(__file__).resolve().parent.parent / "crates/relu-constructor/tests/data/planner_oracle.json"
    out.write_text(json.dumps(cases, indent=1) + "\n")


if __name__ == "__main__":
    main()
