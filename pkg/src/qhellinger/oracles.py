"""Independent numerical oracles for the closed forms.

Nothing here calls the moment formulas: n = 2 expectations come from 1-D
adaptive quadrature over the simplex, and xi_jk from its explicit double
sum.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

from .ensembles import Ensemble, EnsembleParams, log_jpdf_bh, log_jpdf_hs
from .specialfn import binom_half

__all__ = ["simplex2_expectation", "xi_sum_form"]


def simplex2_expectation(params: EnsembleParams, f=lambda lam: 1.0, tol: float = 1e-13) -> float:
    """``E[f(lambda)]`` under the n = 2 joint density, by quadrature.

    Uses ``lambda_1 = sin(t)^2`` so that the ``lambda^(alpha - 1/2)`` endpoint
    behaviour of the BH density becomes smooth. The density is evaluated
    through ``log_jpdf_*`` so its normalisation is under test too.
    """
    if params.n != 2:
        raise ValueError("simplex2_expectation handles n = 2 only")
    logpdf = log_jpdf_hs if params.kind is Ensemble.HS else log_jpdf_bh

    def integrand(t):
        s, c = math.sin(t), math.cos(t)
        lam = np.array([s * s, c * c])
        if lam[0] <= 0 or lam[1] <= 0:
            return 0.0
        p = math.exp(logpdf(lam, params))
        return p * f(lam) * 2.0 * s * c

    # split at the repulsion zero lambda_1 = 1/2
    parts = [
        quad(integrand, lo, hi, epsabs=tol, epsrel=tol, limit=200)[0]
        for lo, hi in ((0.0, math.pi / 4), (math.pi / 4, math.pi / 2))
    ]
    return math.fsum(parts)


def xi_sum_form(j: int, k: int, alpha: int) -> float:
    """xi_jk from its explicit sum over l with binomial weights."""
    pref = math.exp(
        math.lgamma(j + 1) - math.lgamma(j + alpha + 1) - math.lgamma(alpha + 1.5)
    ) * binom_half(j) / binom_half(k)
    terms = [
        binom_half(j - l)
        * binom_half(k - l)
        * math.exp(math.lgamma(l + alpha + 1.5) - math.lgamma(l + 1))
        for l in range(0, min(j, k) + 1)
    ]
    return pref * math.fsum(terms)
