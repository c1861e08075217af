"""Compiled inner loops: cyclic Jacobi eigensolver and the log-gas chain."""

import math

import numba
import numpy as np

# Spectra on the chain live on an integer lattice of this many units so
# transfer moves conserve the total exactly.
LATTICE = 1 << 52
LATTICE_STEP = 1.0 / LATTICE


@numba.njit(cache=True)
def _offdiag_sq(h):
    n = h.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                s += h[i, j].real ** 2 + h[i, j].imag ** 2
    return s


@numba.njit(cache=True)
def _jacobi_one(h, v, tol, max_sweeps):
    """Diagonalise ``h`` in place; ``v`` accumulates the rotations.

    Returns (sweeps used, final off-diagonal Frobenius norm).
    """
    n = h.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(n):
            total += h[i, j].real ** 2 + h[i, j].imag ** 2
    thresh = tol * math.sqrt(total)
    off = math.sqrt(_offdiag_sq(h))
    sweeps = 0
    while off > thresh and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                hpq = h[p, q]
                mag = abs(hpq)
                if mag == 0.0:
                    continue
                a = h[p, p].real
                b = h[q, q].real
                ph = hpq / mag
                theta = (b - a) / (2.0 * mag)
                t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # Q = diag(1, conj(ph)) @ [[c, s], [-s, c]]
                q00 = c + 0j
                q01 = s + 0j
                q10 = -s * ph.conjugate()
                q11 = c * ph.conjugate()
                for k in range(n):
                    hkp = h[k, p]
                    hkq = h[k, q]
                    h[k, p] = hkp * q00 + hkq * q10
                    h[k, q] = hkp * q01 + hkq * q11
                for k in range(n):
                    hpk = h[p, k]
                    hqk = h[q, k]
                    h[p, k] = q00.conjugate() * hpk + q10.conjugate() * hqk
                    h[q, k] = q01.conjugate() * hpk + q11.conjugate() * hqk
                h[p, q] = 0.0
                h[q, p] = 0.0
                h[p, p] = h[p, p].real
                h[q, q] = h[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * q00 + vkq * q10
                    v[k, q] = vkp * q01 + vkq * q11
        sweeps += 1
        off = math.sqrt(_offdiag_sq(h))
    return sweeps, off, thresh


@numba.njit(cache=True)
def jacobi_eigh_batch(mats, tol, max_sweeps):
    """Eigen-decompose a stack of Hermitian matrices.

    Returns ascending eigenvalues, eigenvector columns, and per-matrix
    (sweeps, residual, threshold) so the caller can flag non-convergence.
    """
    nb, n, _ = mats.shape
    vals = np.empty((nb, n))
    vecs = np.empty((nb, n, n), dtype=np.complex128)
    info = np.empty((nb, 3))
    h = np.empty((n, n), dtype=np.complex128)
    v = np.empty((n, n), dtype=np.complex128)
    for b in range(nb):
        for i in range(n):
            for j in range(n):
                h[i, j] = mats[b, i, j]
                v[i, j] = 1.0 if i == j else 0.0
        sweeps, off, thresh = _jacobi_one(h, v, tol, max_sweeps)
        info[b, 0] = sweeps
        info[b, 1] = off
        info[b, 2] = thresh
        d = np.empty(n)
        for i in range(n):
            d[i] = h[i, i].real
        order = np.argsort(d, kind="mergesort")
        for i in range(n):
            vals[b, i] = d[order[i]]
            for k in range(n):
                vecs[b, k, i] = v[k, order[i]]
    return vals, vecs, info


@numba.njit(cache=True)
def _local_logp(k, i, j, alpha):
    """Terms of the BH log-density that involve coordinates i or j.

    The (i, j) sum term is omitted because transfer moves between i and j
    leave lambda_i + lambda_j unchanged.
    """
    n = k.shape[0]
    li = k[i] * LATTICE_STEP
    lj = k[j] * LATTICE_STEP
    if k[i] == k[j]:
        return -np.inf
    out = (alpha - 0.5) * (math.log(li) + math.log(lj))
    out += 2.0 * math.log(abs(li - lj))
    for r in range(n):
        if r == i or r == j:
            continue
        if k[r] == k[i] or k[r] == k[j]:
            return -np.inf
        lr = k[r] * LATTICE_STEP
        out += 2.0 * math.log(abs(li - lr)) - math.log(li + lr)
        out += 2.0 * math.log(abs(lj - lr)) - math.log(lj + lr)
    return out


@numba.njit(cache=True)
def _sweep(k, alpha, delta, props, gen):
    n = k.shape[0]
    accepted = 0
    for _ in range(props):
        i = gen.integers(0, n)
        j = gen.integers(0, n - 1)
        if j >= i:
            j += 1
        eps = int(round((2.0 * gen.random() - 1.0) * delta * LATTICE))
        u = gen.random()
        if eps == 0:
            accepted += 1
            continue
        ki = k[i]
        kj = k[j]
        if ki - eps <= 0 or kj + eps <= 0:
            continue
        old = _local_logp(k, i, j, alpha)
        k[i] = ki - eps
        k[j] = kj + eps
        new = _local_logp(k, i, j, alpha)
        if new == -np.inf or (new < old and u >= math.exp(new - old)):
            k[i] = ki
            k[j] = kj
        else:
            accepted += 1
    return accepted


@numba.njit(cache=True)
def bh_chain(k, alpha, delta, burn_in, thin, count, target, adapt_window, gen):
    """Run one Metropolis chain on the lattice simplex.

    ``k`` holds the integer lattice state and is updated in place.
    Returns (samples as lattice integers, final delta, burn-in acceptance,
    production acceptance).
    """
    n = k.shape[0]
    props = n * (n - 1) // 2
    acc_window = 0
    acc_burn = 0
    for s in range(burn_in):
        a = _sweep(k, alpha, delta, props, gen)
        acc_window += a
        acc_burn += a
        if (s + 1) % adapt_window == 0:
            rate = acc_window / (adapt_window * props)
            delta *= math.exp(rate - target)
            if delta > 1.0:
                delta = 1.0
            if delta < 1e-12:
                delta = 1e-12
            acc_window = 0
    out = np.empty((count, n), dtype=np.int64)
    acc_prod = 0
    for c in range(count):
        for _ in range(thin):
            acc_prod += _sweep(k, alpha, delta, props, gen)
        for r in range(n):
            out[c, r] = k[r]
    burn_rate = acc_burn / max(burn_in * props, 1)
    prod_rate = acc_prod / max(count * thin * props, 1)
    return out, delta, burn_rate, prod_rate
