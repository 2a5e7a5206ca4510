"""The R_{1,1} residue as eps -> 0, and the one-variable Mellin checks."""

import math

import numpy as np

from lwtransform.verify import (
    mellin_kernel,
    mellin_plancherel,
    mellin_roundtrip,
    residue_limit,
    symmetric_test_function,
)

rng = np.random.default_rng(1)
H = symmetric_test_function(rng.normal(size=4))
t1, t2 = 0.8, -0.3
lim = residue_limit(H, t1, t2)
print(f"target H/6 = {lim['target']:.10f}")
print("     eps        rel err     ratio")
ratios = [float("nan")] + lim["ratios"]
for e, r, q in zip(lim["eps"], lim["rel_errors"], ratios):
    print(f"  {e:.6f}   {r:.3e}   {q:5.2f}")
x = lim["extrapolated"]
print(f"Richardson limit {x:.10f}, rel err {abs(x - lim['target']) / abs(lim['target']):.1e}")

# the error halves with eps: the limit is reached at first order only
print("\nMellin kernel (1 - 1/x for x > 1, 0 below):")
for xv in (0.5, 0.99, 1.01, 2.0, math.e):
    print(f"  x = {xv:.4f}   {mellin_kernel(xv): .12f}")
rep, errs = mellin_roundtrip()
print(f"Mellin roundtrip at 20 points: max abs err {errs.max():.1e}")
print(f"Mellin Plancherel: rel err {mellin_plancherel().rel_err:.1e}")
