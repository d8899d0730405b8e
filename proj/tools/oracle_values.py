#!/usr/bin/env python3
"""High-precision reference values for the unit and acceptance tests.

Everything here is computed with mpmath at 50 significant digits directly
from the closed forms, independently of the C++ code. The output is
tests/fixtures/oracle_values.json; tests compare against it.

Usage: tools/oracle_values.py [--out FILE]
"""
import argparse
import json

import mpmath as mp

mp.mp.dps = 50
E = mp.e


def vr_sigma2(tau, beta, n):
    return tau**2 / (32 * mp.log(8 * mp.mpf(n) ** 2 / beta))


def round_cap_real(tau, beta, n):
    return beta / 4 * mp.exp(mp.mpf(n) * tau**2 / 8)


def ev_values(tau, beta):
    gamma = 36 * mp.log(8 / beta) / tau**2
    n0 = int(mp.ceil(gamma / 2))
    rounds = []
    for t in range(3):
        n = n0 * 3**t
        b = beta / 2 / 2**t
        cap = round_cap_real(tau, b, n)
        rounds.append({
            "t": t,
            "N_t": n,
            "beta_t": float(b),
            "I_t_real": float(cap),
            "I_t": int(mp.floor(cap)) if cap < 2**62 else 2**62,
            "sigma2_t": float(vr_sigma2(tau, b, n)),
        })
    return {
        "Gamma": float(gamma),
        "N_0": n0,
        "rounding_grant": float(2 * n0 - gamma),
        "min_N0": float(18 * mp.log(2) / tau**2),
        "rounds": rounds,
    }


def low_price_sum(tau, m):
    return mp.fsum(96 / (tau**2 * i) for i in range(1, m + 1))


def to_feasibility(tau, beta, m, budget):
    l4 = mp.log(4 * m / beta)
    ln208 = mp.log(208 / tau)
    sqrt_term = 9984 * l4 * mp.sqrt(32 * budget * mp.log(1664 * ln208 / (beta * tau))) / tau**2
    log_term = 21632 * mp.log(6656 * ln208 / (beta * tau)) / tau**2
    return {
        "zeta": float(3 * tau / 4),
        "sigma": float(tau / (48 * l4)),
        "pure_dp_min_n": float(768 * budget * l4 / tau**2),
        "approx_dp_term_sqrt": float(sqrt_term),
        "approx_dp_term_log": float(log_term),
        "approx_dp_min_n": float(max(sqrt_term, log_term)),
        "nonadaptive_min_n": float(8 * (mp.log(8) + mp.log(m) - mp.log(beta)) / tau**2),
    }


def to_bounds(tau, beta, p, c=9984):
    b = mp.log(1664 * E * mp.log(208 / tau) / ((E - 1) * tau * beta))
    b1 = (mp.mpf(c) / 9984) ** 2 * 21632 * mp.log(6656 * E**2 * mp.log(208 / tau) / ((E - 1) * tau * beta)) / tau**2
    b2 = (8 * c**2 * b / tau**4 + 4 * c**2 / ((1 - p) * tau**4)) ** (1 / (2 - 2 * p))
    b3 = ((3 - 2 * p) / (2 * p)) ** ((3 - 2 * p) / p)
    bounds = [b1, b2, b3]
    binding = max(range(3), key=lambda k: bounds[k]) + 1
    return {"tau": float(tau), "beta": float(beta), "p": float(p), "c": c,
            "bound_1": float(b1), "bound_2": float(b2), "bound_3": float(b3), "binding": binding}


def to_schedule(tau, beta, p, n, t, c=9984):
    nt = int(mp.ceil(n * mp.exp(t)))
    bt = (E - 1) * beta / E * mp.exp(-t)
    budget = tau**4 * mp.mpf(nt) ** (2 - 2 * p) / (8 * c**2 * mp.log(1664 * mp.log(208 / tau) / (tau * bt)))
    log_m = mp.log(bt / 4) + 2 * mp.mpf(nt) ** p
    return {"tau": float(tau), "beta": float(beta), "p": float(p), "n": n, "t": t, "c": c,
            "N_t": nt, "beta_t": float(bt), "B_t": float(budget), "log_M_t": float(log_m)}


def min_n_unit_budget(tau, beta, p, c=9984):
    b0 = (E - 1) * beta / E
    need = 8 * c**2 * mp.log(1664 * mp.log(208 / tau) / (tau * b0)) / tau**4
    return float(need ** (1 / (2 - 2 * p)))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="tests/fixtures/oracle_values.json")
    args = ap.parse_args()
    tau, beta = mp.mpf("0.4"), mp.mpf("0.1")
    out = {
        "version": 1,
        "script": "tools/oracle_values.py",
        "digits": mp.mp.dps,
        "vr_sigma2_0.4_0.1_500": float(vr_sigma2(tau, beta, 500)),
        "round_cap_real_0.4_0.1_500": float(round_cap_real(tau, beta, 500)),
        "round_cap_real_0.4_0.1_100": float(round_cap_real(tau, beta, 100)),
        "ev_0.4_0.1": ev_values(tau, beta),
        "low_price_sum_0.4_500": float(low_price_sum(tau, 500)),
        "low_price_bound_0.4_500": float(96 / tau**2 * (1 + mp.log(500))),
        "trunc_gauss_acceptance_500": float(mp.erf(mp.mpf("0.1") / mp.sqrt(2 * vr_sigma2(tau, beta, 500)))),
        "thresholdout_0.2_0.05_1000_4": to_feasibility(mp.mpf("0.2"), mp.mpf("0.05"), 1000, 4),
        "thresholdout_0.4_0.1_200_10": to_feasibility(tau, beta, 200, 10),
        "to_bounds": [
            to_bounds(mp.mpf("0.5"), mp.mpf("0.2"), mp.mpf("0.5")),
            to_bounds(tau, beta, mp.mpf("0.5"), 1),
            to_bounds(mp.mpf("0.2"), mp.mpf("0.05"), mp.mpf("0.1")),
        ],
        "to_schedule": [
            to_schedule(tau, beta, mp.mpf("0.5"), 100, 0),
            to_schedule(tau, beta, mp.mpf("0.5"), 100, 2),
            to_schedule(tau, beta, mp.mpf("0.5"), 4353, 1, 1),
        ],
        "to_min_n_unit_budget_0.5_0.2_0.5": min_n_unit_budget(mp.mpf("0.5"), mp.mpf("0.2"), mp.mpf("0.5")),
        "laplace_tail_ln100": 0.01,
    }
    with open(args.out, "w") as f:
        json.dump(out, f, indent=2)
        f.write("\n")
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
