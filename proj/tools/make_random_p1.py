#!/usr/bin/env python3
"""Writes corpus/random_p1_XX.json for seeds 1..10.

Odd seeds draw f0, f1 independently; even seeds build f0 = alpha f1 + sigma with
sigma a nonnegative quadratic. Each file is grid-checked on [-10, 10]^2 before it is
written and the expected verdict is recorded.
"""
import itertools
import json
import random
import sys
from pathlib import Path

N = 2


def rand_quadratic(rng):
    a, b, c = (rng.uniform(-2, 2) for _ in range(3))
    Q = [[round(a, 3), round(b, 3)], [round(b, 3), round(c, 3)]]
    cv = [round(rng.uniform(-2, 2), 3) for _ in range(N)]
    d = round(rng.uniform(-3, 3), 3)
    return Q, cv, d


def psd_quadratic(rng):
    L = [[rng.uniform(-1, 1) for _ in range(N + 1)] for _ in range(N + 1)]
    B = [[sum(L[i][k] * L[j][k] for k in range(N + 1)) for j in range(N + 1)] for i in range(N + 1)]
    Q = [[round(B[i][j], 3) for j in range(N)] for i in range(N)]
    # keep the bordered matrix PSD after rounding by adding a margin to the constant
    return Q, [round(B[i][N], 3) for i in range(N)], round(B[N][N] / 2 + 0.05, 3), B


def evaluate(f, x):
    Q, c, d = f
    return 0.5 * sum(x[i] * Q[i][j] * x[j] for i in range(N) for j in range(N)) + sum(ci * xi for ci, xi in zip(c, x)) + d


def grid_violated(f0, f1):
    axis = [-10 + 0.5 * k for k in range(41)]
    for x in itertools.product(axis, repeat=N):
        if evaluate(f1, x) >= -1e-6 and evaluate(f0, x) < -1e-6:
            return True
    return False


def slater(f1):
    axis = [-10 + 0.5 * k for k in range(41)]
    return any(evaluate(f1, x) > 1e-3 for x in itertools.product(axis, repeat=N))


def build(seed):
    rng = random.Random(seed)
    while True:
        f1 = rand_quadratic(rng)
        if not slater(f1):
            continue
        if seed % 2:
            f0 = rand_quadratic(rng)
        else:
            alpha = round(rng.uniform(0.2, 2.0), 3)
            SQ, sc, sd, _ = psd_quadratic(rng)
            Q1, c1, d1 = f1
            f0 = ([[round(alpha * Q1[i][j] + SQ[i][j], 6) for j in range(N)] for i in range(N)],
                  [round(alpha * c1[i] + sc[i], 6) for i in range(N)],
                  round(alpha * d1 + sd, 6))
        return f0, f1


def main(out_dir):
    out = Path(out_dir)
    for seed in range(1, 11):
        f0, f1 = build(seed)
        verdict = "InvalidWithCounterexample" if grid_violated(f0, f1) else "ValidWithCertificate"
        doc = {
            "name": f"random_p1_{seed:02d}",
            "description": f"seeded random p = 1 quadratic pair (generator seed {seed})",
            "n": N,
            "p": 1,
            "functions": [{"quadratic": {"Q": f[0], "c": f[1], "d": f[2]}} for f in (f0, f1)],
            "config": {"R": 10, "N": 4096, "seed": seed},
            "expected_verdict": verdict,
        }
        (out / f"random_p1_{seed:02d}.json").write_text(json.dumps(doc, indent=2) + "\n")
        print(seed, verdict)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "corpus")
