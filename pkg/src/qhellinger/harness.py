"""Monte Carlo experiments, Haar-moment checks and report serialisation."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .ensembles import (
    ChainDiagnostics,
    Ensemble,
    EnsembleParams,
    McmcConfig,
    integrated_autocorr_time,
    sample_bh_spectrum_mcmc,
    sample_hs_batch,
)
from .exactmoments import weingarten_constants
from .hellinger import (
    HellingerSummary,
    Scenario,
    ScenarioKind,
    gamma_cdf,
    gamma_pdf,
    hellinger_summary,
)
from .numlinalg import affinity_batch, sample_haar_unitary, sqrt_psd_batch

__all__ = [
    "ExperimentConfig",
    "StatsReport",
    "Histogram",
    "run_experiment",
    "simulate_dh",
    "sample_sqrt_states",
    "verify_haar_moment2",
    "verify_haar_moment4",
    "verify_group_integral_fixed",
    "emit_report",
    "report_to_dict",
]

DEFAULT_BLOCK = 1 << 16


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: Scenario
    trials: int
    seed: int = 0
    mcmc: McmcConfig = field(default_factory=McmcConfig)
    histogram_bins: int = 50
    block_size: int = DEFAULT_BLOCK
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.histogram_bins < 2:
            raise ValueError("histogram_bins must be >= 2")
        if self.block_size < 1 or self.workers < 1:
            raise ValueError("block_size and workers must be >= 1")


@dataclass
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray
    gamma_density: np.ndarray | None = None
    tv_distance: float | None = None

    @classmethod
    def build(cls, samples: np.ndarray, bins: int, summary: HellingerSummary | None = None):
        lo, hi = float(samples.min()), float(samples.max())
        if hi <= lo:
            lo, hi = lo - 0.5, lo + 0.5
        counts, edges = np.histogram(samples, bins=bins, range=(lo, hi))
        width = np.diff(edges)
        density = counts / (samples.size * width)
        hist = cls(edges, counts, density)
        if summary is not None and summary.gamma_shape is not None:
            k, r = summary.gamma_shape, summary.gamma_rate
            mids = 0.5 * (edges[:-1] + edges[1:])
            hist.gamma_density = gamma_pdf(np.clip(mids, 0.0, None), k, r)
            cdf = gamma_cdf(edges, k, r)
            mass = np.diff(cdf)
            outside = cdf[0] + (1.0 - cdf[-1])
            emp = counts / samples.size
            hist.tv_distance = float(0.5 * (np.abs(emp - mass).sum() + outside))
        return hist

    def total_mass(self) -> float:
        return float(np.sum(self.density * np.diff(self.edges)))


@dataclass
class StatsReport:
    scenario: Scenario
    exact: HellingerSummary
    mc_mean_dh: float
    mc_var_dh: float
    mc_stderr_mean: float
    mc_stderr_var: float
    trials: int
    seed: int
    z_scores: tuple[float, float]
    autocorr_time: float
    config: ExperimentConfig
    diagnostics: ChainDiagnostics | None = None


# -- sampling ----------------------------------------------------------------


def sample_sqrt_states(
    params: EnsembleParams,
    size: int,
    rng: np.random.Generator,
    mcmc: McmcConfig,
) -> tuple[np.ndarray, ChainDiagnostics | None]:
    """Square roots of ``size`` random states from ``params``.

    HS states come from the Ginibre matrix model. BH states take their
    spectra from one MCMC chain and their eigenvectors from Haar unitaries.
    """
    n = params.n
    if n == 1:
        return np.ones((size, 1, 1), dtype=np.complex128), None
    if params.kind is Ensemble.HS:
        return sqrt_psd_batch(sample_hs_batch(n, params.m, rng, size)), None
    spectra, diag = sample_bh_spectrum_mcmc(params, mcmc, size, rng)
    u = sample_haar_unitary(n, rng, size=size)
    root = np.sqrt(spectra)
    return (u * root[:, None, :]) @ np.swapaxes(u.conj(), -1, -2), diag


def _simulate_block(args):
    scenario, mcmc, size, seed_seq = args
    rng = np.random.default_rng(seed_seq)
    diags = []
    s1, d1 = sample_sqrt_states(scenario.ensemble_1, size, rng, mcmc)
    diags.append(d1)
    if scenario.kind is ScenarioKind.FIXED_VS_RANDOM:
        w = np.sqrt(np.asarray(scenario.fixed_spectrum))
        diag_entries = np.diagonal(s1, axis1=-2, axis2=-1).real
        aff = diag_entries @ w
    else:
        s2, d2 = sample_sqrt_states(scenario.ensemble_2, size, rng, mcmc)
        diags.append(d2)
        aff = affinity_batch(s1, s2)
    dh = 2.0 - 2.0 * aff
    if scenario.n == 1:
        dh = np.zeros(size)
    return dh, [d for d in diags if d is not None]


def _uses_chain(scenario: Scenario) -> bool:
    es = [scenario.ensemble_1, scenario.ensemble_2]
    return any(e is not None and e.kind is Ensemble.BH and e.n > 1 for e in es)


def simulate_dh(cfg: ExperimentConfig) -> tuple[np.ndarray, list[np.ndarray], ChainDiagnostics | None]:
    """Draw ``cfg.trials`` samples of D_H.

    Trials are split into fixed-size blocks, each with its own child seed,
    so output does not depend on ``cfg.workers``. Returns the concatenated
    samples, the per-block arrays and merged chain diagnostics.
    """
    sizes = [cfg.block_size] * (cfg.trials // cfg.block_size)
    if cfg.trials % cfg.block_size:
        sizes.append(cfg.trials % cfg.block_size)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(sizes))
    jobs = [(cfg.scenario, cfg.mcmc, s, ss) for s, ss in zip(sizes, seeds)]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            results = list(ex.map(_simulate_block, jobs))
    else:
        results = [_simulate_block(j) for j in jobs]
    blocks = [r[0] for r in results]
    diag_parts = [d for r in results for d in r[1]]
    diag = ChainDiagnostics.merge(diag_parts) if diag_parts else None
    return np.concatenate(blocks), blocks, diag


def _zscore(diff: float, err: float) -> float:
    if err > 0:
        return diff / err
    return 0.0 if abs(diff) < 1e-12 else math.copysign(math.inf, diff)


def run_experiment(cfg: ExperimentConfig) -> tuple[StatsReport, Histogram]:
    """Simulate D_H for a scenario and compare with the exact moments.

    ``mc_stderr_mean`` and ``mc_stderr_var`` are the plain iid standard
    errors. When an MCMC chain is involved, z-scores divide by these
    errors inflated by the square root of the block-averaged
    autocorrelation time.
    """
    exact = hellinger_summary(cfg.scenario)
    dh, blocks, diag = simulate_dh(cfg)
    n = dh.size
    mean = float(np.mean(dh))
    centred = dh - mean
    var = float(np.dot(centred, centred) / (n - 1)) if n > 1 else 0.0
    m4 = float(np.mean(centred**4))
    se_mean = math.sqrt(var / n)
    se_var = math.sqrt(max(m4 - var * var, 0.0) / n)

    tau = 1.0
    if _uses_chain(cfg.scenario):
        taus = [
            max(integrated_autocorr_time(b), integrated_autocorr_time((b - mean) ** 2))
            for b in blocks
        ]
        tau = max(float(np.average(taus, weights=[b.size for b in blocks])), 1.0)
    inflate = math.sqrt(tau)
    z = (
        _zscore(mean - exact.mean_dh, se_mean * inflate),
        _zscore(var - exact.var_dh, se_var * inflate),
    )
    report = StatsReport(
        scenario=cfg.scenario,
        exact=exact,
        mc_mean_dh=mean,
        mc_var_dh=var,
        mc_stderr_mean=se_mean,
        mc_stderr_var=se_var,
        trials=n,
        seed=cfg.seed,
        z_scores=z,
        autocorr_time=tau,
        config=cfg,
        diagnostics=diag,
    )
    return report, Histogram.build(dh, cfg.histogram_bins, exact)


# -- Haar moment checks ------------------------------------------------------


def _haar_stack(n: int, trials: int, rng: np.random.Generator, chunk: int = 1 << 15):
    done = 0
    while done < trials:
        size = min(chunk, trials - done)
        yield sample_haar_unitary(n, rng, size=size)
        done += size


def verify_haar_moment2(n: int, trials: int, rng: np.random.Generator) -> dict:
    """Monte Carlo check of ``E[U_ij conj(U_kl)] = Wg(1,n) d_ik d_jl``.

    All index tuples are covered for ``n <= 4``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > 4:
        raise ValueError("verify_haar_moment2 enumerates all tuples; use n <= 4")
    acc = np.zeros((n, n, n, n), dtype=np.complex128)
    for u in _haar_stack(n, trials, rng):
        acc += np.einsum("bij,bkl->ijkl", u, u.conj())
    est = acc / trials
    eye = np.eye(n)
    exact = weingarten_constants(n).wg1 * np.einsum("ik,jl->ijkl", eye, eye)
    dev = float(np.max(np.abs(est - exact)))
    threshold = 3.0 / math.sqrt(trials)
    return {
        "check": "haar_moment2",
        "n": n,
        "trials": trials,
        "tuples": n**4,
        "max_deviation": dev,
        "threshold": threshold,
        "passed": dev < threshold,
    }


def haar_moment4_exact(n: int, idx: tuple[int, ...]) -> float:
    """Weingarten value of ``E[U_ij U_kl conj(U_pq) conj(U_rs)]``."""
    i, j, k, l, p, q, r, s = idx
    w = weingarten_constants(n)
    d = lambda a, b: 1.0 if a == b else 0.0
    direct = d(i, p) * d(j, q) * d(k, r) * d(l, s) + d(i, r) * d(j, s) * d(k, p) * d(l, q)
    crossed = d(i, p) * d(j, s) * d(k, r) * d(l, q) + d(i, r) * d(j, q) * d(k, p) * d(l, s)
    return w.wg11 * direct + w.wg2 * crossed


def verify_haar_moment4(
    n: int, trials: int, rng: np.random.Generator, n_tuples: int = 50
) -> dict:
    """Monte Carlo check of the fourth-order Weingarten formula.

    Exhaustive over all 8-index tuples at ``n = 2``; otherwise ``n_tuples``
    tuples, half of them built to satisfy a delta pattern so that non-zero
    values are exercised too.
    """
    if n < 2:
        raise ValueError("fourth-order check needs n >= 2")
    if n == 2:
        tuples = list(itertools.product(range(n), repeat=8))
    else:
        tuples = []
        for t in range(n_tuples):
            i, j, k, l = (int(x) for x in rng.integers(0, n, 4))
            if t % 2 == 0:
                # (p,q,r,s) a permutation of the row/column pairs
                if rng.random() < 0.5:
                    tuples.append((i, j, k, l, i, j, k, l))
                else:
                    tuples.append((i, j, k, l, k, j, i, l))
            else:
                tuples.append((i, j, k, l) + tuple(int(x) for x in rng.integers(0, n, 4)))
    idx = np.array(tuples)
    acc = np.zeros(len(tuples), dtype=np.complex128)
    for u in _haar_stack(n, trials, rng):
        uc = u.conj()
        acc += np.sum(
            u[:, idx[:, 0], idx[:, 1]]
            * u[:, idx[:, 2], idx[:, 3]]
            * uc[:, idx[:, 4], idx[:, 5]]
            * uc[:, idx[:, 6], idx[:, 7]],
            axis=0,
        )
    est = acc / trials
    exact = np.array([haar_moment4_exact(n, t) for t in tuples])
    dev = np.abs(est - exact)
    threshold = 3.0 / math.sqrt(trials)
    return {
        "check": "haar_moment4",
        "n": n,
        "trials": trials,
        "tuples": len(tuples),
        "nonzero_tuples": int(np.count_nonzero(exact)),
        "max_deviation": float(dev.max()),
        "threshold": threshold,
        "passed": bool(dev.max() < threshold),
    }


def group_integral_fixed_exact(sigma, spectrum) -> float:
    """Closed form of the Haar average of ``tr(U sqrt(L) U^dag sqrt(sigma))^2``."""
    n = len(sigma)
    w = weingarten_constants(n)
    ts = math.fsum(np.sqrt(sigma)) ** 2
    tl = math.fsum(np.sqrt(spectrum)) ** 2
    return w.wg11 * (tl * ts + 1.0) + w.wg2 * (ts + tl)


def verify_group_integral_fixed(sigma, spectrum, trials: int, rng: np.random.Generator) -> dict:
    """Monte Carlo check of the second-order group integral for fixed spectra."""
    sigma = np.asarray(sigma, dtype=float)
    lam = np.asarray(spectrum, dtype=float)
    if sigma.shape != lam.shape:
        raise ValueError(f"dimension mismatch: {sigma.shape} vs {lam.shape}")
    n = sigma.size
    ss = np.sqrt(sigma)
    sl = np.sqrt(lam)
    vals = []
    for u in _haar_stack(n, trials, rng):
        # tr(U sqrt(L) U^dag sqrt(sigma)) = sum_ij |U_ij|^2 sqrt(l_j) sqrt(s_i)
        t = np.einsum("bij,j,i->b", np.abs(u) ** 2, sl, ss)
        vals.append(t * t)
    v = np.concatenate(vals)
    est = float(v.mean())
    se = float(v.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    exact = group_integral_fixed_exact(sigma, lam)
    dev = abs(est - exact)
    return {
        "check": "group_integral_fixed",
        "n": n,
        "trials": trials,
        "estimate": est,
        "exact": exact,
        "stderr": se,
        "deviation": dev,
        "passed": dev <= 3.0 * se + 1e-12,
    }


# -- serialisation -----------------------------------------------------------


def _clean(x):
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_clean(v) for v in x.tolist()]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def report_to_dict(report: StatsReport, hist: Histogram | None = None) -> dict:
    cfg = report.config
    out = {
        "scenario": report.scenario.to_dict(),
        "params": {
            "trials": report.trials,
            "seed": report.seed,
            "bins": cfg.histogram_bins,
            "block_size": cfg.block_size,
            "workers": cfg.workers,
            "mcmc": asdict(cfg.mcmc) if _uses_chain(report.scenario) else None,
        },
        "exact": report.exact.to_dict(),
        "monte_carlo": {
            "mean_dh": report.mc_mean_dh,
            "var_dh": report.mc_var_dh,
            "stderr_mean": report.mc_stderr_mean,
            "stderr_var": report.mc_stderr_var,
            "autocorr_time": report.autocorr_time,
            "z_mean": report.z_scores[0],
            "z_var": report.z_scores[1],
        },
        "diagnostics": report.diagnostics.to_dict() if report.diagnostics else None,
        "histogram": None,
    }
    if hist is not None:
        out["histogram"] = {
            "edges": hist.edges,
            "counts": hist.counts,
            "density": hist.density,
            "gamma_density": hist.gamma_density,
            "tv_distance": hist.tv_distance,
        }
    return _clean(out)


def _num(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def _to_json(x, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if x is None or isinstance(x, bool):
        return json.dumps(x)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return _num(x)
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_to_json(v, indent + 1)}" for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(x, list):
        if all(not isinstance(v, (dict, list)) for v in x):
            return "[" + ", ".join(_to_json(v, indent + 1) for v in x) + "]"
        items = [pad + _to_json(v, indent + 1) for v in x]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(x).__name__}")


def dumps_json(obj) -> str:
    """JSON with fixed key order and 17 significant digits for floats."""
    return _to_json(_clean(obj)) + "\n"


def histogram_csv(hist: Histogram) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bin_left", "bin_right", "count", "density", "gamma_density"])
    gd = hist.gamma_density
    for b in range(hist.counts.size):
        w.writerow(
            [
                _num(float(hist.edges[b])),
                _num(float(hist.edges[b + 1])),
                int(hist.counts[b]),
                _num(float(hist.density[b])),
                _num(float(gd[b])) if gd is not None else "",
            ]
        )
    return buf.getvalue()


def emit_report(report: StatsReport, hist: Histogram | None = None, fmt: str = "json") -> bytes:
    """Serialise a report: full JSON, or the histogram table as CSV."""
    if fmt == "json":
        return dumps_json(report_to_dict(report, hist)).encode()
    if fmt == "csv":
        if hist is None:
            raise ValueError("csv output needs a histogram")
        return histogram_csv(hist).encode()
    raise ValueError(f"unknown format {fmt!r}")
