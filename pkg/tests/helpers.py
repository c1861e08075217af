"""Test-only oracles: 2-d simplex quadrature for n = 3."""

import math

import numpy as np
from scipy.integrate import dblquad


def simplex3_integral(f, tol=1e-11):
    """Integrate f(lam) over the 2-simplex with lam_i = x_i^2 on the unit sphere.

    The substitution absorbs lam^(-1/2) endpoint behaviour: the measure
    d lam_1 d lam_2 becomes 4 prod(x_i) sin(theta) d theta d phi / prod(x_i).
    """

    def g(ph, th):
        st, ct = math.sin(th), math.cos(th)
        sp, cp = math.sin(ph), math.cos(ph)
        x = np.array([st * cp, st * sp, ct])
        lam = x * x
        if np.any(lam <= 0):
            return 0.0
        return f(lam) * 4.0 * st * np.prod(x)

    return dblquad(g, 0, math.pi / 2, 0, math.pi / 2, epsabs=tol, epsrel=tol)[0]


def mc_mean_within(samples, expected, k=3.0, tau=1.0):
    samples = np.asarray(samples, dtype=float)
    se = samples.std(ddof=1) / math.sqrt(samples.size) * math.sqrt(max(tau, 1.0))
    return abs(samples.mean() - expected) <= k * se, (samples.mean() - expected) / se
