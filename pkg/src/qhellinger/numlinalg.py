"""Random matrices, Hermitian eigendecomposition and PSD square roots.

Every function accepts a single matrix; the ``*_batch`` variants take a
stack of shape ``(N, n, n)`` and are what the Monte Carlo code uses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

__all__ = [
    "NotPSDError",
    "ConvergenceError",
    "EigenDecomposition",
    "sample_ginibre",
    "sample_haar_unitary",
    "hermitian_eigh",
    "eigh_batch",
    "matrix_sqrt_psd",
    "sqrt_psd_batch",
    "affinity",
    "affinity_batch",
    "squared_hellinger",
    "check_density_matrix",
]

JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
HERMITIAN_ATOL = 1e-10
NEG_EIG_CLAMP = 1e-10
IMAG_ATOL = 1e-10


class NotPSDError(ValueError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""


class ConvergenceError(ArithmeticError):
    """The Jacobi iteration did not reach its tolerance within the sweep cap."""


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    basis: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.basis
        return (u * self.eigenvalues[..., None, :]) @ np.swapaxes(u.conj(), -1, -2)


def _check_dims(*dims: int) -> None:
    for d in dims:
        if int(d) != d or d < 1:
            raise ValueError(f"matrix dimensions must be positive integers, got {d!r}")


def sample_ginibre(n: int, m: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Complex Ginibre matrix with unit-variance entries (re, im each variance 1/2).

    With ``size`` given, returns a stack of shape ``(size, n, m)``.
    """
    _check_dims(n, m)
    shape = (n, m) if size is None else (size, n, m)
    scale = np.sqrt(0.5)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def sample_haar_unitary(n: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix with phase fix."""
    _check_dims(n)
    z = sample_ginibre(n, n, rng, size=size)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    ph = d / np.abs(d)
    return q * ph[..., None, :]


def _as_stack(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim < 2 or h.shape[-1] != h.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {h.shape}")
    return h


def eigh_batch(h: np.ndarray, check_hermitian: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigendecomposition of a stack ``(N, n, n)``.

    Returns ascending eigenvalues ``(N, n)`` and unitary bases ``(N, n, n)``.
    """
    h = _as_stack(h)
    if h.ndim != 3:
        raise ValueError(f"eigh_batch expects a 3-d stack, got shape {h.shape}")
    if check_hermitian:
        asym = np.max(np.abs(h - np.swapaxes(h.conj(), -1, -2)), initial=0.0)
        if asym > HERMITIAN_ATOL:
            raise ValueError(f"input is not Hermitian (max asymmetry {asym:.3g})")
    vals, vecs, info = _kernels.jacobi_eigh_batch(
        np.ascontiguousarray(h), JACOBI_TOL, JACOBI_MAX_SWEEPS
    )
    bad = info[:, 1] > info[:, 2]
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise ConvergenceError(
            f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps "
            f"(matrix {idx}: off-diagonal residual {info[idx, 1]:.3g})"
        )
    return vals, vecs


def hermitian_eigh(h: np.ndarray) -> EigenDecomposition:
    """Full spectral decomposition of one Hermitian matrix, eigenvalues ascending."""
    h = _as_stack(h)
    if h.ndim != 2:
        raise ValueError(f"expected a single matrix, got shape {h.shape}")
    vals, vecs = eigh_batch(h[None])
    return EigenDecomposition(vals[0], vecs[0])


def _clamp_spectrum(vals: np.ndarray) -> np.ndarray:
    low = vals.min(initial=np.inf)
    if low < -NEG_EIG_CLAMP:
        raise NotPSDError(f"matrix has eigenvalue {low:.3g} below -{NEG_EIG_CLAMP:g}")
    return np.clip(vals, 0.0, None)


def sqrt_psd_batch(rho: np.ndarray) -> np.ndarray:
    """Principal square roots of a stack of PSD matrices."""
    vals, vecs = eigh_batch(rho)
    root = np.sqrt(_clamp_spectrum(vals))
    return (vecs * root[:, None, :]) @ np.swapaxes(vecs.conj(), -1, -2)


def matrix_sqrt_psd(rho: np.ndarray) -> np.ndarray:
    """Hermitian PSD square root ``U sqrt(L) U^dagger``.

    Eigenvalues in ``[-1e-10, 0)`` are treated as zero; anything more
    negative raises :class:`NotPSDError`.
    """
    rho = _as_stack(rho)
    if rho.ndim != 2:
        raise ValueError(f"expected a single matrix, got shape {rho.shape}")
    return sqrt_psd_batch(rho[None])[0]


def _trace_product_real(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # tr(AB) = sum_ij A_ij B_ji
    t = np.einsum("...ij,...ji->...", a, b)
    imag = np.max(np.abs(t.imag), initial=0.0)
    if imag > IMAG_ATOL:
        raise ValueError(f"trace has imaginary residue {imag:.3g}")
    return t.real


def affinity(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """``tr(sqrt(rho1) sqrt(rho2))`` for two density matrices."""
    rho1 = _as_stack(rho1)
    rho2 = _as_stack(rho2)
    if rho1.shape != rho2.shape or rho1.ndim != 2:
        raise ValueError(f"dimension mismatch: {rho1.shape} vs {rho2.shape}")
    roots = sqrt_psd_batch(np.stack([rho1, rho2]))
    return float(_trace_product_real(roots[0], roots[1]))


def affinity_batch(sqrt1: np.ndarray, sqrt2: np.ndarray) -> np.ndarray:
    """Affinities from precomputed square roots, broadcasting over the stack."""
    return _trace_product_real(sqrt1, sqrt2)


def squared_hellinger(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """Squared Hellinger distance ``2 - 2 A(rho1, rho2)``."""
    return 2.0 - 2.0 * affinity(rho1, rho2)


def check_density_matrix(rho: np.ndarray, atol: float = 1e-12) -> None:
    """Raise ``ValueError`` unless ``rho`` (or each matrix of a stack) is a state."""
    rho = _as_stack(rho)
    asym = np.max(np.abs(rho - np.swapaxes(rho.conj(), -1, -2)), initial=0.0)
    if asym > atol:
        raise ValueError(f"not Hermitian (max asymmetry {asym:.3g})")
    tr = np.trace(rho, axis1=-2, axis2=-1).real
    err = np.max(np.abs(tr - 1.0), initial=0.0)
    if err > atol:
        raise ValueError(f"trace deviates from 1 by {err:.3g}")
    low = np.linalg.eigvalsh(rho).min(initial=np.inf)
    if low < -NEG_EIG_CLAMP:
        raise NotPSDError(f"eigenvalue {low:.3g} below -{NEG_EIG_CLAMP:g}")
