"""
Sampling random density matrices
================================

HS states come from a Ginibre matrix. BH spectra come from a Metropolis
chain over the eigenvalue simplex and are rotated by a Haar unitary.
"""

import numpy as np

from qhellinger import EnsembleParams, McmcConfig, moments
from qhellinger.ensembles import assemble_density_from_spectrum, sample_bh_spectrum_mcmc, sample_hs_batch

rng = np.random.default_rng(1)

# 50 000 HS states with n = 3, m = 5.
rho = sample_hs_batch(3, 5, rng, 50_000)
t = np.sqrt(np.linalg.eigvalsh(rho).clip(0, None)).sum(axis=1)
ex = moments(EnsembleParams("hs", 3, 5))
print(f"HS  <tr sqrt rho> MC {t.mean():.5f} +/- {t.std() / np.sqrt(t.size):.5f}  exact {ex.first:.5f}")

# BH spectra from the chain. The lattice keeps every spectrum summing to 1 exactly.
params = EnsembleParams("bh", 3, 5)
spectra, diag = sample_bh_spectrum_mcmc(params, McmcConfig(), 50_000, rng)
print("every spectrum sums to 1:", bool(np.all(spectra.sum(axis=1) == 1.0)))
print("chain diagnostics:", diag.to_dict())

t = np.sqrt(spectra).sum(axis=1)
se = t.std() / np.sqrt(t.size) * np.sqrt(diag.autocorr_time)
print(f"BH  <tr sqrt rho> MC {t.mean():.5f} +/- {se:.5f}  exact {moments(params).first:.5f}")

# A full BH density matrix: spectrum plus Haar eigenvectors.
state = assemble_density_from_spectrum(spectra[0], rng)
print("\none BH state:\n", np.round(state, 4))
