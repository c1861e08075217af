"""Exact statistics of the affinity and squared Hellinger distance.

Two scenario families are covered: a fixed state against a random one, and
two independent random states (possibly from different ensembles).
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np

from .ensembles import EnsembleParams, check_spectrum
from .exactmoments import moments, weingarten_constants
from .specialfn import hyp2f1

__all__ = [
    "InternalConsistencyError",
    "ScenarioKind",
    "Scenario",
    "HellingerSummary",
    "mean_affinity_fixed",
    "mean_sq_affinity_fixed",
    "mean_affinity_two_random",
    "mean_sq_affinity_two_random",
    "hellinger_summary",
    "gamma_pdf",
    "gamma_cdf",
    "asymptotic_mean_sq_affinity_hs",
]

NEG_VAR_ATOL = 1e-12


class InternalConsistencyError(ArithmeticError):
    """An exact result violated a bound it must satisfy."""


class ScenarioKind(str, enum.Enum):
    FIXED_VS_RANDOM = "fixed_vs_random"
    RANDOM_VS_RANDOM = "random_vs_random"


@dataclass(frozen=True)
class Scenario:
    kind: ScenarioKind
    ensemble_1: EnsembleParams
    fixed_spectrum: tuple[float, ...] | None = None
    ensemble_2: EnsembleParams | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ScenarioKind(self.kind))
        n = self.ensemble_1.n
        if self.kind is ScenarioKind.FIXED_VS_RANDOM:
            if self.fixed_spectrum is None or self.ensemble_2 is not None:
                raise ValueError("fixed-vs-random needs fixed_spectrum and no ensemble_2")
            spec = tuple(float(x) for x in check_spectrum(self.fixed_spectrum))
            if len(spec) != n:
                raise ValueError(f"fixed spectrum has length {len(spec)}, expected n={n}")
            object.__setattr__(self, "fixed_spectrum", spec)
        else:
            if self.ensemble_2 is None or self.fixed_spectrum is not None:
                raise ValueError("random-vs-random needs ensemble_2 and no fixed_spectrum")
            if self.ensemble_2.n != n:
                raise ValueError(
                    f"ensembles must share n, got {n} and {self.ensemble_2.n}"
                )

    @classmethod
    def fixed(cls, spectrum, params: EnsembleParams) -> "Scenario":
        return cls(ScenarioKind.FIXED_VS_RANDOM, params, fixed_spectrum=tuple(spectrum))

    @classmethod
    def two_random(cls, p1: EnsembleParams, p2: EnsembleParams) -> "Scenario":
        return cls(ScenarioKind.RANDOM_VS_RANDOM, p1, ensemble_2=p2)

    @property
    def n(self) -> int:
        return self.ensemble_1.n

    def label(self) -> str:
        e1 = self.ensemble_1
        if self.kind is ScenarioKind.FIXED_VS_RANDOM:
            return f"fixed-{e1.kind.value.upper()}(n={e1.n},m={e1.m})"
        e2 = self.ensemble_2
        return (
            f"{e1.kind.value.upper()}-{e2.kind.value.upper()}"
            f"(n={e1.n},m1={e1.m},m2={e2.m})"
        )

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "label": self.label(),
            "fixed_spectrum": list(self.fixed_spectrum) if self.fixed_spectrum else None,
            "ensemble_1": self.ensemble_1.to_dict(),
            "ensemble_2": self.ensemble_2.to_dict() if self.ensemble_2 else None,
        }


@dataclass(frozen=True)
class HellingerSummary:
    mean_affinity: float
    mean_sq_affinity: float
    mean_dh: float
    var_dh: float
    gamma_shape: float | None
    gamma_rate: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def _sqrt_trace(spectrum) -> float:
    return math.fsum(np.sqrt(np.asarray(spectrum, dtype=float)))


def _check_sigma(sigma, params: EnsembleParams) -> np.ndarray:
    s = check_spectrum(sigma)
    if s.size != params.n:
        raise ValueError(f"sigma has dimension {s.size}, ensemble has n={params.n}")
    return s


def mean_affinity_fixed(sigma, params: EnsembleParams) -> float:
    """``<A(rho, sigma)>`` for fixed spectrum ``sigma`` and random ``rho``."""
    s = _check_sigma(sigma, params)
    n = params.n
    if n == 1:
        return 1.0
    return weingarten_constants(n).wg1 * _sqrt_trace(s) * moments(params).first


def mean_sq_affinity_fixed(sigma, params: EnsembleParams) -> float:
    """``<A(rho, sigma)^2>`` for fixed spectrum ``sigma`` and random ``rho``."""
    s = _check_sigma(sigma, params)
    n = params.n
    if n == 1:
        return 1.0
    t2 = _sqrt_trace(s) ** 2
    second = moments(params).second
    c = weingarten_constants(n).wg11
    return c * (1.0 - t2 / n) + c * (t2 - 1.0 / n) * second


def _same_n(p1: EnsembleParams, p2: EnsembleParams) -> int:
    if p1.n != p2.n:
        raise ValueError(f"dimension mismatch: n={p1.n} vs n={p2.n}")
    return p1.n


def mean_affinity_two_random(p1: EnsembleParams, p2: EnsembleParams) -> float:
    """``<A(rho1, rho2)>`` for independent random states."""
    n = _same_n(p1, p2)
    if n == 1:
        return 1.0
    a, b = sorted((moments(p1).first, moments(p2).first))
    return a * b / n


def mean_sq_affinity_two_random(p1: EnsembleParams, p2: EnsembleParams) -> float:
    """``<A(rho1, rho2)^2>`` for independent random states."""
    n = _same_n(p1, p2)
    if n == 1:
        return 1.0
    s1, s2 = sorted((moments(p1).second, moments(p2).second))
    return (s1 * s2 - s1 / n - s2 / n + 1.0) / (n * n - 1)


def _summarise(mean_a: float, mean_a2: float) -> HellingerSummary:
    mean_dh = 2.0 - 2.0 * mean_a
    var_dh = 4.0 * (mean_a2 - mean_a * mean_a)
    if var_dh < -NEG_VAR_ATOL:
        raise InternalConsistencyError(f"negative variance {var_dh!r}")
    var_dh = max(var_dh, 0.0)
    if not -NEG_VAR_ATOL <= mean_dh <= 2.0 + NEG_VAR_ATOL:
        raise InternalConsistencyError(f"mean D_H {mean_dh!r} outside [0, 2]")
    if var_dh > 0 and mean_dh > 0:
        shape, rate = mean_dh**2 / var_dh, mean_dh / var_dh
    else:
        shape = rate = None
    return HellingerSummary(mean_a, mean_a2, mean_dh, var_dh, shape, rate)


def hellinger_summary(scenario: Scenario) -> HellingerSummary:
    """Mean and variance of ``D_H`` with its cumulant-matched gamma parameters."""
    if scenario.n == 1:
        return HellingerSummary(1.0, 1.0, 0.0, 0.0, None, None)
    if scenario.kind is ScenarioKind.FIXED_VS_RANDOM:
        s = scenario.fixed_spectrum
        p = scenario.ensemble_1
        return _summarise(mean_affinity_fixed(s, p), mean_sq_affinity_fixed(s, p))
    p1, p2 = scenario.ensemble_1, scenario.ensemble_2
    return _summarise(
        mean_affinity_two_random(p1, p2), mean_sq_affinity_two_random(p1, p2)
    )


def _check_gamma_params(shape: float, rate: float) -> None:
    if not (shape > 0 and rate > 0):
        raise ValueError(f"gamma parameters must be positive, got shape={shape}, rate={rate}")


def gamma_pdf(x, shape: float, rate: float):
    """Gamma density ``rate^shape x^(shape-1) e^(-rate x) / Gamma(shape)``.

    Vectorised over ``x``. At ``x = 0`` with ``shape < 1`` the value is
    ``+inf``.
    """
    _check_gamma_params(shape, rate)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("gamma_pdf is defined for x >= 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = (
            shape * math.log(rate)
            - math.lgamma(shape)
            + (shape - 1.0) * np.log(x)
            - rate * x
        )
        out = np.exp(logp)
    zero = x == 0
    if np.any(zero):
        out = np.where(zero, np.inf if shape < 1 else (rate if shape == 1 else 0.0), out)
    return float(out) if out.ndim == 0 else out


def gamma_cdf(x, shape: float, rate: float):
    """Gamma distribution function (regularised lower incomplete gamma)."""
    from scipy.special import gammainc

    _check_gamma_params(shape, rate)
    return gammainc(shape, rate * np.clip(np.asarray(x, dtype=float), 0.0, None))


def asymptotic_mean_sq_affinity_hs(n: int, m: int) -> float:
    """Large-``n`` mean square affinity of two HS states with equal ``m``."""
    if not 1 <= n <= m:
        raise ValueError(f"need 1 <= n <= m, got n={n}, m={m}")
    return hyp2f1(0.5, -0.5, 2.0, n / m) ** 4
