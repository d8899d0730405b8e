#!/usr/bin/env python3
"""Monte Carlo calibration of the sign-aggregation attacker.

Independent numpy model of the probe/aggregate attack, used to choose the
probe count k stored in tests/fixtures/attack_calibration.json. It models two
answerers:

  naive : answers the empirical mean on one dataset S of size n (no checks).
  ev    : the chained validation rounds at (tau, beta): round 0 on N0 samples
          answering at most I0 queries, round 1 on 3*N0 samples, truncated
          Gaussian noise added to the S-mean; success means the final
          aggregated query fails the S/T agreement check (|E_S - E_T| > tau/2).

Naive success means E_S[q*] - E[q*] > tau (an accuracy violation).
The smallest k on the grid where both success rates reach the target is
written out, together with the result of the smaller tau/2 naive rule.

Usage: tools/calibrate_attack.py [--trials 40] [--out FILE]
"""
import argparse
import json
import math

import numpy as np

TAU = 0.4
BETA = 0.1
DOMAIN = 16384
NAIVE_N = 500
TARGET = 0.95
SEED = 20261019


def ev_rounds(tau, beta):
    gamma_budget = 36.0 * math.log(8.0 / beta) / tau**2
    n0 = math.ceil(gamma_budget / 2.0)
    rounds = []
    for t in range(2):
        n = n0 * 3**t
        b = beta / 2.0 / 2**t
        cap = math.floor(b / 4.0 * math.exp(n * tau**2 / 8.0))
        sigma2 = tau**2 / (32.0 * math.log(8.0 * n * n / b))
        rounds.append((n, cap, sigma2))
    return rounds


def trunc_normal(rng, sigma, gamma):
    while True:
        z = rng.normal(0.0, sigma)
        if abs(z) <= gamma:
            return z


def probe_batch(rng, count):
    return rng.integers(0, 2, size=(count, DOMAIN), dtype=np.int8)


def attack_naive(rng, k):
    s = rng.integers(0, DOMAIN, NAIVE_N)
    votes = np.zeros(DOMAIN, dtype=np.int64)
    done = 0
    while done < k:
        batch = probe_batch(rng, min(512, k - done))
        answers = batch[:, s].mean(axis=1)
        chosen = batch[answers > 0.5]
        votes += (2 * chosen.astype(np.int64) - 1).sum(axis=0)
        done += batch.shape[0]
    q = (votes > 0).astype(np.float64)
    return q[s].mean() - q.mean()


def attack_ev(rng, k, rounds):
    data = []
    for n, _, _ in rounds:
        data.append((rng.integers(0, DOMAIN, n), rng.integers(0, DOMAIN, n)))
    votes = np.zeros(DOMAIN, dtype=np.int64)
    cap0 = rounds[0][1]
    done = 0
    while done < k:
        batch = probe_batch(rng, min(512, k - done))
        for row in batch:
            r = 0 if done < cap0 else 1
            s, _ = data[r]
            _, _, sigma2 = rounds[r]
            a = row[s].mean() + trunc_normal(rng, math.sqrt(sigma2), TAU / 4.0)
            if a > 0.5:
                votes += 2 * row.astype(np.int64) - 1
            done += 1
    q = (votes > 0).astype(np.float64)
    s, t = data[0] if k < cap0 else data[1]
    return abs(q[s].mean() - q[t].mean())


def rate(fn, trials, threshold):
    hits = sum(1 for _ in range(trials) if fn() > threshold)
    return hits / trials


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=int, default=40)
    ap.add_argument("--out", default="tests/fixtures/attack_calibration.json")
    args = ap.parse_args()

    rng = np.random.default_rng(SEED)
    rounds = ev_rounds(TAU, BETA)

    half_rule = None
    for k in range(50, 401, 50):
        r = rate(lambda: attack_naive(rng, k), args.trials, TAU / 2.0)
        print(f"tau/2 rule k={k} naive={r:.3f}", flush=True)
        if r >= 0.9:
            half_rule = {"k": k, "naive_rate": r}
            break

    chosen = None
    for k in range(500, 10001, 500):
        naive = rate(lambda: attack_naive(rng, k), args.trials, TAU)
        print(f"k={k} naive={naive:.3f}", flush=True)
        if naive < TARGET:
            continue
        ev = rate(lambda: attack_ev(rng, k, rounds), args.trials, TAU / 2.0)
        print(f"k={k} ev={ev:.3f}", flush=True)
        if ev >= TARGET:
            chosen = {"k": k, "naive_rate": naive, "ev_rate": ev}
            break

    fixture = {
        "version": 1,
        "script": "tools/calibrate_attack.py",
        "seed": SEED,
        "trials_per_point": args.trials,
        "target_rate": TARGET,
        "tau": TAU,
        "beta": BETA,
        "domain_size": DOMAIN,
        "naive_n": NAIVE_N,
        "probes": chosen["k"] if chosen else None,
        "naive_violation_rate": chosen["naive_rate"] if chosen else None,
        "ev_halt_rate": chosen["ev_rate"] if chosen else None,
        "tau_half_rule_k_max_400": half_rule,
    }
    with open(args.out, "w") as f:
        json.dump(fixture, f, indent=2)
        f.write("\n")
    print(json.dumps(fixture, indent=2))


if __name__ == "__main__":
    main()
