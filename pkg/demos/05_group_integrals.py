"""
Haar group integrals
====================

Monte Carlo checks of the second- and fourth-order unitary moment formulas
that the exact results are built on.
"""

import numpy as np

from qhellinger import weingarten_constants
from qhellinger.harness import verify_group_integral_fixed, verify_haar_moment2, verify_haar_moment4

rng = np.random.default_rng(5)

w = weingarten_constants(3)
print(f"Weingarten n=3: Wg(1)={w.wg1:.6f}  Wg(1,1)={w.wg11:.6f}  Wg(2)={w.wg2:.6f}")

for n in (2, 3, 4):
    r = verify_haar_moment2(n, 50_000, rng)
    print(f"second order, n={n}: max dev {r['max_deviation']:.4f} (threshold {r['threshold']:.4f})")

for n in (2, 3):
    r = verify_haar_moment4(n, 50_000, rng)
    print(f"fourth order, n={n}: {r['tuples']} tuples, max dev {r['max_deviation']:.4f}")

sigma = (0.07, 0.16, 0.17, 0.23, 0.37)
lam = rng.dirichlet(np.ones(5))
r = verify_group_integral_fixed(sigma, lam, 50_000, rng)
print(f"E[tr(U sqrt(L) U* sqrt(sigma))^2]: MC {r['estimate']:.6f} +/- {r['stderr']:.6f}, exact {r['exact']:.6f}")
