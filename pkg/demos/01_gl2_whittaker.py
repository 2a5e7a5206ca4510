"""GL(2) Whittaker function: the Bessel closed form against a direct
evaluation of the unipotent integral, and the size of the Plancherel density.
"""

import numpy as np

from lwtransform import SpectralPoint, jacquet_oracle, plancherel_density, whittaker_gl2

# W(y) = 2 sqrt(y) K_{it}(2 pi y); compare with the oracle on a small grid
print("   t      y        closed form          oracle        rel diff")
for t in (0.0, 1.5, 3.0):
    for y in (0.3, 1.0, 3.0):
        w = whittaker_gl2(t, y)
        o = jacquet_oracle(2, t, y).real
        print(f"{t:4.1f} {y:6.2f}  {w: .12e}  {o: .12e}  {abs(w - o) / abs(w):.1e}")

# the spectral measure grows like t sinh(pi t); the transform decays much faster
ts = np.array([1.0, 5.0, 10.0, 20.0])
rho = [plancherel_density(SpectralPoint(2, (t,))) for t in ts]
print("\nPlancherel density t sinh(pi t)/pi:")
for t, r in zip(ts, rho):
    print(f"  t = {t:5.1f}   rho = {r:.4e}")
