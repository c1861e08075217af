"""Hilbert-Schmidt and Bures-Hall random density matrices.

Joint eigenvalue densities are densities on the simplex with respect to
``d lambda_1 ... d lambda_{n-1}``, with ``lambda_n = 1 - sum`` of the rest.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .numlinalg import sample_ginibre, sample_haar_unitary

__all__ = [
    "Ensemble",
    "EnsembleParams",
    "McmcConfig",
    "ChainDiagnostics",
    "UnsupportedParametersError",
    "check_spectrum",
    "log_norm_hs",
    "log_norm_bh",
    "log_jpdf_hs",
    "log_jpdf_bh",
    "sample_hs_density",
    "sample_hs_batch",
    "sample_bh_spectrum_mcmc",
    "assemble_density_from_spectrum",
    "sample_bh_density_square",
    "sample_bh_square_batch",
    "integrated_autocorr_time",
]


class Ensemble(str, enum.Enum):
    HS = "hs"
    BH = "bh"


class UnsupportedParametersError(ValueError):
    """Parameters outside what a sampler can realise."""


@dataclass(frozen=True)
class EnsembleParams:
    kind: Ensemble
    n: int
    m: int

    def __post_init__(self):
        object.__setattr__(self, "kind", Ensemble(self.kind))
        if int(self.n) != self.n or int(self.m) != self.m:
            raise ValueError(f"n and m must be integers, got n={self.n!r}, m={self.m!r}")
        if not 1 <= self.n <= self.m:
            raise ValueError(f"need 1 <= n <= m, got n={self.n}, m={self.m}")

    @property
    def alpha(self) -> int:
        return self.m - self.n

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "n": self.n, "m": self.m, "alpha": self.alpha}


@dataclass(frozen=True)
class McmcConfig:
    burn_in_sweeps: int = 5000
    thinning_sweeps: int = 10
    proposal_width: float | None = None  # None -> 1/(2n)
    target_acceptance: float = 0.3
    adapt_window: int = 50

    def __post_init__(self):
        if self.burn_in_sweeps < 1 or self.thinning_sweeps < 1:
            raise ValueError("burn_in_sweeps and thinning_sweeps must be >= 1")
        if self.proposal_width is not None and self.proposal_width <= 0:
            raise ValueError("proposal_width must be positive")
        if not 0.0 < self.target_acceptance < 1.0:
            raise ValueError("target_acceptance must lie in (0, 1)")
        if self.adapt_window < 1:
            raise ValueError("adapt_window must be >= 1")


@dataclass
class ChainDiagnostics:
    """Plain record describing one or more sampling runs of the BH chain."""

    chains: int = 0
    samples: int = 0
    burn_in_acceptance: float = float("nan")
    acceptance: float = float("nan")
    proposal_width: float = float("nan")
    autocorr_time: float = float("nan")
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def merge(cls, parts: list["ChainDiagnostics"]) -> "ChainDiagnostics":
        parts = [p for p in parts if p.chains > 0]
        if not parts:
            return cls()
        w = np.array([p.samples for p in parts], dtype=float)

        def avg(name):
            return float(np.average([getattr(p, name) for p in parts], weights=w))

        warns: list[str] = []
        for p in parts:
            warns.extend(x for x in p.warnings if x not in warns)
        return cls(
            chains=sum(p.chains for p in parts),
            samples=int(w.sum()),
            burn_in_acceptance=avg("burn_in_acceptance"),
            acceptance=avg("acceptance"),
            proposal_width=avg("proposal_width"),
            autocorr_time=avg("autocorr_time"),
            warnings=warns,
        )


def check_spectrum(values: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    """Validate a spectrum on the unit simplex and return it as a float array."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"spectrum must be a non-empty vector, got shape {v.shape}")
    if np.any(v < 0) or np.any(v > 1):
        raise ValueError("spectrum values must lie in [0, 1]")
    if abs(math.fsum(v) - 1.0) > atol:
        raise ValueError(f"spectrum must sum to 1, sums to {math.fsum(v)!r}")
    return v


# -- joint densities ---------------------------------------------------------


def log_norm_hs(n: int, m: int) -> float:
    """log of the HS simplex normalisation constant."""
    return math.lgamma(n * m) - math.fsum(
        math.lgamma(m - j + 1) + math.lgamma(j + 1) for j in range(1, n + 1)
    )


def log_norm_bh(n: int, m: int) -> float:
    """log of the BH simplex normalisation constant."""
    a = m - n
    if n == 1:
        return 0.0
    return math.fsum(
        [
            n * (n + 2 * a - 1) * math.log(2.0),
            math.lgamma(n * (n + 2 * a) / 2),
            -0.5 * n * math.log(math.pi),
        ]
        + [
            -(math.lgamma(i + 1) + math.lgamma(i + 2 * a) - math.lgamma(i + a))
            for i in range(1, n + 1)
        ]
    )


def _spectrum_logs(spectrum: np.ndarray, n: int):
    lam = np.asarray(spectrum, dtype=float)
    if lam.shape != (n,):
        raise ValueError(f"spectrum has shape {lam.shape}, expected ({n},)")
    if np.any(lam <= 0):
        raise ValueError("joint density needs strictly positive eigenvalues")
    iu = np.triu_indices(n, 1)
    diff = np.abs(lam[:, None] - lam[None, :])[iu]
    return lam, iu, diff


def log_jpdf_hs(spectrum: np.ndarray, params: EnsembleParams) -> float:
    """Log HS joint eigenvalue density; ``-inf`` for degenerate spectra."""
    n = params.n
    lam, _, diff = _spectrum_logs(spectrum, n)
    if n == 1:
        return 0.0
    if np.any(diff == 0):
        return -math.inf
    return (
        log_norm_hs(n, params.m)
        + 2.0 * float(np.sum(np.log(diff)))
        + params.alpha * float(np.sum(np.log(lam)))
    )


def log_jpdf_bh(spectrum: np.ndarray, params: EnsembleParams) -> float:
    """Log BH joint eigenvalue density; ``-inf`` for degenerate spectra."""
    n = params.n
    lam, iu, diff = _spectrum_logs(spectrum, n)
    if n == 1:
        return 0.0
    if np.any(diff == 0):
        return -math.inf
    sums = (lam[:, None] + lam[None, :])[iu]
    return (
        log_norm_bh(n, params.m)
        + 2.0 * float(np.sum(np.log(diff)))
        - float(np.sum(np.log(sums)))
        + (params.alpha - 0.5) * float(np.sum(np.log(lam)))
    )


# -- Hilbert-Schmidt ---------------------------------------------------------


def sample_hs_batch(n: int, m: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """Stack of ``size`` HS density matrices ``G G^dagger / tr(G G^dagger)``."""
    g = sample_ginibre(n, m, rng, size=size)
    w = g @ np.swapaxes(g.conj(), -1, -2)
    w = 0.5 * (w + np.swapaxes(w.conj(), -1, -2))
    if n == 1:
        # a 1x1 state is exactly 1; dividing can be off by an ulp
        return np.ones_like(w)
    tr = np.trace(w, axis1=-2, axis2=-1).real
    return w / tr[:, None, None]


def sample_hs_density(params: EnsembleParams, rng: np.random.Generator) -> np.ndarray:
    if params.kind is not Ensemble.HS:
        raise ValueError(f"sample_hs_density needs an HS ensemble, got {params.kind}")
    return sample_hs_batch(params.n, params.m, rng, 1)[0]


# -- Bures-Hall --------------------------------------------------------------


def _initial_lattice(n: int) -> np.ndarray:
    w = np.arange(1, n + 1, dtype=float)
    k = np.floor(w / w.sum() * _kernels.LATTICE).astype(np.int64)
    k[-1] += _kernels.LATTICE - k.sum()
    return k


def integrated_autocorr_time(x: np.ndarray, c: float = 5.0) -> float:
    """Integrated autocorrelation time with a self-consistent window."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 4:
        return 1.0
    y = x - x.mean()
    var = float(np.dot(y, y)) / n
    if var == 0.0:
        return 1.0
    size = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(y, size)
    acf = np.fft.irfft(f * np.conj(f), size)[:n] / (n * var)
    tau = 1.0
    for w in range(1, n):
        tau += 2.0 * acf[w]
        if w >= c * tau:
            break
    return max(float(tau), 1.0 / n)


def sample_bh_spectrum_mcmc(
    params: EnsembleParams,
    cfg: McmcConfig,
    count: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, ChainDiagnostics]:
    """Draw ``count`` BH spectra with a Metropolis log-gas chain.

    Moves transfer a uniform amount between two eigenvalues, so the
    spectrum sum is conserved exactly. The proposal width adapts during
    burn-in only. Returns an array ``(count, n)`` and chain diagnostics.
    """
    if params.kind is not Ensemble.BH:
        raise ValueError(f"MCMC sampler needs a BH ensemble, got {params.kind}")
    if count < 1:
        raise ValueError("count must be >= 1")
    n = params.n
    if n == 1:
        return np.ones((count, 1)), ChainDiagnostics(chains=1, samples=count)
    delta0 = cfg.proposal_width if cfg.proposal_width is not None else 1.0 / (2 * n)
    k = _initial_lattice(n)
    out, delta, burn_rate, prod_rate = _kernels.bh_chain(
        k,
        float(params.alpha),
        float(delta0),
        int(cfg.burn_in_sweeps),
        int(cfg.thinning_sweeps),
        int(count),
        float(cfg.target_acceptance),
        int(cfg.adapt_window),
        rng,
    )
    spectra = out * _kernels.LATTICE_STEP
    diag = ChainDiagnostics(
        chains=1,
        samples=count,
        burn_in_acceptance=float(burn_rate),
        acceptance=float(prod_rate),
        proposal_width=float(delta),
        autocorr_time=integrated_autocorr_time(np.sqrt(spectra).sum(axis=1)),
    )
    if not 0.05 <= prod_rate <= 0.95:
        msg = f"acceptance rate {prod_rate:.3f} outside [0.05, 0.95]"
        diag.warnings.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return spectra, diag


def assemble_density_from_spectrum(spectrum: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """``U diag(spectrum) U^dagger`` with ``U`` Haar-distributed."""
    lam = check_spectrum(spectrum)
    u = sample_haar_unitary(lam.size, rng)
    rho = (u * lam[None, :]) @ u.conj().T
    return 0.5 * (rho + rho.conj().T)


def sample_bh_square_batch(n: int, rng: np.random.Generator, size: int) -> np.ndarray:
    """Stack of BH density matrices from the matrix model at ``m = n``."""
    g = sample_ginibre(n, n, rng, size=size)
    u = sample_haar_unitary(n, rng, size=size)
    a = (np.eye(n) + u) @ g
    w = a @ np.swapaxes(a.conj(), -1, -2)
    w = 0.5 * (w + np.swapaxes(w.conj(), -1, -2))
    if n == 1:
        # a 1x1 state is exactly 1; dividing can be off by an ulp
        return np.ones_like(w)
    tr = np.trace(w, axis1=-2, axis2=-1).real
    return w / tr[:, None, None]


def sample_bh_density_square(n: int, rng: np.random.Generator, m: int | None = None) -> np.ndarray:
    """BH density matrix via ``(1+U) G G^dagger (1+U^dagger)`` normalised.

    Only ``m = n`` is supported: for ``m != n`` the unitary would have to be
    drawn from a non-Haar measure weighted by ``|det(1+U)|^(2(m-n))``.
    """
    if m is not None and m != n:
        raise UnsupportedParametersError(
            f"the square matrix model needs m = n (got n={n}, m={m}); for m != n "
            "its unitary factor is not Haar distributed, use the MCMC sampler"
        )
    return sample_bh_square_batch(n, rng, 1)[0]
