"""Closed-form first and second moments of ``tr sqrt(rho)``.

Both ensembles are covered, together with the low-order unitary
Weingarten constants.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .ensembles import Ensemble, EnsembleParams
from .specialfn import (
    DomainError,
    binom_half,
    hyp3f2_terminating,
    pochhammer,
    pochhammer_int,
)

__all__ = [
    "MomentPair",
    "BhTermTable",
    "WeingartenConstants",
    "mean_sqrt_trace_hs",
    "second_moment_sqrt_trace_hs",
    "mean_sqrt_trace_bh",
    "second_moment_sqrt_trace_bh",
    "xi_matrix",
    "xi_entry",
    "bh_term_table",
    "moments",
    "weingarten_constants",
]


def _validate(n: int, m: int) -> None:
    if int(n) != n or int(m) != m or not 1 <= n <= m:
        raise ValueError(f"need integers 1 <= n <= m, got n={n!r}, m={m!r}")


@dataclass(frozen=True)
class MomentPair:
    first: float
    second: float
    params: EnsembleParams

    @property
    def variance(self) -> float:
        return self.second - self.first**2


# -- Hilbert-Schmidt ---------------------------------------------------------


def _mean_sqrt_trace_hs_sum(n: int, m: int) -> float:
    terms = []
    for j in range(1, n + 1):
        num = binom_half(j) * binom_half(j - 1) * pochhammer(m, 1.5 - j)
        terms.append(num / pochhammer_int(n + 1, -j))
    return 2.0 / pochhammer(m * n, 0.5) * math.fsum(terms)


def mean_sqrt_trace_hs(n: int, m: int) -> float:
    """``<tr sqrt(rho)>`` for the HS ensemble."""
    _validate(n, m)
    if n == 1:
        return 1.0
    return _mean_sqrt_trace_hs_sum(n, m)


def xi_entry(j: int, k: int, alpha: int) -> float:
    """One entry of the xi table, built from the terminating 3F2."""
    pref = math.exp(math.lgamma(j + 1) - math.lgamma(j + alpha + 1)) * binom_half(j) ** 2
    return pref * hyp3f2_terminating(alpha + 1.5, j, k, 1.5 - j, 1.5 - k)


@functools.lru_cache(maxsize=256)
def _xi_cached(n: int, alpha: int) -> np.ndarray:
    xi = np.array([[xi_entry(j, k, alpha) for k in range(n)] for j in range(n)])
    xi.setflags(write=False)
    return xi


def xi_matrix(n: int, alpha: int) -> np.ndarray:
    """``n x n`` table of xi_jk for ``0 <= j, k <= n-1`` (read-only, cached)."""
    if n < 1 or alpha < 0:
        raise ValueError(f"need n >= 1 and alpha >= 0, got n={n}, alpha={alpha}")
    return _xi_cached(int(n), int(alpha))


def _second_moment_hs_sum(n: int, m: int) -> float:
    a = m - n
    xi = xi_matrix(n, a)
    terms = [
        xi[j, j] * xi[k, k] - xi[j, k] * xi[k, j]
        for j in range(n)
        for k in range(j + 1, n)
    ]
    pref = 2.0 * math.exp(2.0 * math.lgamma(a + 1.5)) / (n * m)
    return 1.0 + pref * math.fsum(terms)


def second_moment_sqrt_trace_hs(n: int, m: int) -> float:
    """``<(tr sqrt(rho))^2>`` for the HS ensemble."""
    _validate(n, m)
    if n == 1:
        return 1.0
    return _second_moment_hs_sum(n, m)


# -- Bures-Hall --------------------------------------------------------------


@dataclass(frozen=True)
class BhTermTable:
    d: float
    L: np.ndarray


@functools.lru_cache(maxsize=256)
def _bh_table_cached(n: int, alpha: int) -> BhTermTable:
    a = alpha
    L = np.empty(n)
    for i in range(n):
        logv = (
            math.lgamma(i + 1.5) - math.lgamma(i + 1)
            + math.lgamma(i + a + 1) - math.lgamma(i + a + 0.5)
            + math.lgamma(i + 2 * a + 1.5) - math.lgamma(i + 2 * a + 1)
            - (math.lgamma(n + 2 * a + i + 1.5) - math.lgamma(n + 2 * a + i + 1))
            - (math.lgamma(n - i) - math.lgamma(n - i - 0.5))
        )
        L[i] = math.exp(logv)
    L.setflags(write=False)
    return BhTermTable(d=n * (n + 2 * a) / 2, L=L)


def bh_term_table(n: int, alpha: int) -> BhTermTable:
    """``d`` and ``L_i`` shared by the BH moment sums."""
    if n < 1 or alpha < 0:
        raise ValueError(f"need n >= 1 and alpha >= 0, got n={n}, alpha={alpha}")
    return _bh_table_cached(int(n), int(alpha))


def _mean_sqrt_trace_bh_sum(n: int, m: int) -> float:
    a = m - n
    tab = bh_term_table(n, a)
    terms = []
    for i in range(n):
        # (i+a+3/2)_{1/2} / (i+a+1/2)_{1/2} = (i+a+1)/(i+a+1/2) relates to L_i
        logv = (
            math.lgamma(i + 1.5) - math.lgamma(i + 1)
            + math.lgamma(i + 2 * a + 1.5) - math.lgamma(i + 2 * a + 1)
            + math.lgamma(i + a + 2) - math.lgamma(i + a + 1.5)
            - (math.lgamma(n - i) - math.lgamma(n - i - 0.5))
            - (math.lgamma(i + 2 * a + n + 1.5) - math.lgamma(i + 2 * a + n + 1))
        )
        terms.append(math.exp(logv) * (1.0 + (i + a + 0.5) / (i + a + 1)))
    return math.fsum(terms) / (math.pi * pochhammer(tab.d, 0.5))


def mean_sqrt_trace_bh(n: int, m: int) -> float:
    """``<tr sqrt(rho)>`` for the BH ensemble."""
    _validate(n, m)
    if n == 1:
        return 1.0
    return _mean_sqrt_trace_bh_sum(n, m)


def _second_moment_bh_sum(n: int, m: int) -> float:
    a = m - n
    tab = bh_term_table(n, a)
    L = tab.L
    terms = []
    for i in range(n):
        ci = i + a + 0.5
        for j in range(n):
            cj = j + a + 0.5
            t1 = (2.0 + 1.0 / (2.0 * ci)) * (2.0 + 1.0 / (2.0 * cj))
            t2 = (1.0 / (2.0 * (i - j - 0.5) * (j - i - 0.5))) * (
                1.0 + (i + a + 1) * (j + a + 1) / (ci * cj)
            )
            t3 = (j + a + 1) / ((i + j + 2 * a + 1) * (i + j + 2 * a + 2) * cj)
            terms.append(L[i] * L[j] * (t1 - t2 + t3))
    return 1.0 + math.fsum(terms) / (math.pi**2 * tab.d)


def second_moment_sqrt_trace_bh(n: int, m: int) -> float:
    """``<(tr sqrt(rho))^2>`` for the BH ensemble."""
    _validate(n, m)
    if n == 1:
        return 1.0
    return _second_moment_bh_sum(n, m)


def moments(params: EnsembleParams) -> MomentPair:
    if params.kind is Ensemble.HS:
        return MomentPair(
            mean_sqrt_trace_hs(params.n, params.m),
            second_moment_sqrt_trace_hs(params.n, params.m),
            params,
        )
    return MomentPair(
        mean_sqrt_trace_bh(params.n, params.m),
        second_moment_sqrt_trace_bh(params.n, params.m),
        params,
    )


# -- Weingarten --------------------------------------------------------------


@dataclass(frozen=True)
class WeingartenConstants:
    """``Wg(1, n)``, ``Wg(1^2, n)`` and ``Wg(2, n)``."""

    n: int

    @property
    def wg1(self) -> float:
        return 1.0 / self.n

    @property
    def wg11(self) -> float:
        if self.n < 2:
            raise DomainError("Wg(1^2, n) is undefined for n = 1")
        return 1.0 / (self.n**2 - 1)

    @property
    def wg2(self) -> float:
        if self.n < 2:
            raise DomainError("Wg(2, n) is undefined for n = 1")
        return -1.0 / (self.n * (self.n**2 - 1))


def weingarten_constants(n: int) -> WeingartenConstants:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return WeingartenConstants(int(n))
