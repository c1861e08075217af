"""
Exact moments of tr sqrt(rho)
=============================

Closed-form first and second moments of the sum of square-rooted
eigenvalues, for Hilbert-Schmidt (HS) and Bures-Hall (BH) states.
"""

import numpy as np

from qhellinger import moments, EnsembleParams
from qhellinger.oracles import simplex2_expectation

# A qubit with a qubit ancilla: the HS first moment is the rational 44/35.
print("HS (2,2) first moment:", moments(EnsembleParams("hs", 2, 2)).first, "vs 44/35 =", 44 / 35)

# The same number by direct quadrature of the joint eigenvalue density.
q = simplex2_expectation(EnsembleParams("hs", 2, 2), lambda lam: np.sqrt(lam).sum())
print("quadrature:           ", q)

# How the moments grow with the ancilla dimension m at n = 5.
print("\n m   HS first  HS second   BH first  BH second")
for m in range(5, 16):
    hs = moments(EnsembleParams("hs", 5, m))
    bh = moments(EnsembleParams("bh", 5, m))
    print(f"{m:2d}  {hs.first:9.6f} {hs.second:9.6f}  {bh.first:9.6f} {bh.second:9.6f}")

# Both creep toward sqrt(n) = 2.236..., the maximally mixed value. The BH
# column stays below the HS column at every m.
