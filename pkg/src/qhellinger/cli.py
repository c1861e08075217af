"""Command line entry point: ``qhellinger {exact,simulate,verify,sweep}``."""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys

import numpy as np

from .ensembles import EnsembleParams, McmcConfig
from .exactmoments import (
    mean_sqrt_trace_bh,
    mean_sqrt_trace_hs,
    second_moment_sqrt_trace_bh,
    second_moment_sqrt_trace_hs,
    xi_entry,
)
from .harness import (
    ExperimentConfig,
    dumps_json,
    emit_report,
    run_experiment,
    verify_group_integral_fixed,
    verify_haar_moment2,
    verify_haar_moment4,
)
from .hellinger import InternalConsistencyError, Scenario, hellinger_summary
from .oracles import simplex2_expectation, xi_sum_form

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INTERNAL = 3

REFERENCE_SPECTRUM = (0.07, 0.16, 0.17, 0.23, 0.37)


class UsageError(ValueError):
    pass


def parse_spectrum(text: str) -> tuple[float, ...]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise UsageError(f"bad --fixed-spectrum {text!r}: {e}") from None
    if not vals or any(v < 0 for v in vals):
        raise UsageError("--fixed-spectrum needs non-negative comma-separated values")
    total = math.fsum(vals)
    if abs(total - 1.0) > 1e-9:
        raise UsageError(f"--fixed-spectrum must sum to 1 (sums to {total!r})")
    return tuple(v / total for v in vals)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _add_scenario_args(p: argparse.ArgumentParser, m_required: bool = True) -> None:
    p.add_argument("--ensemble", choices=["hs", "bh"], required=True)
    p.add_argument("--ensemble2", choices=["hs", "bh"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=m_required)
    p.add_argument("--m2", type=int, help="ancilla dimension of the second state (default: --m)")
    p.add_argument("--fixed-spectrum", help="eigenvalues of the fixed state, e.g. 0.3,0.7")


def _add_mc_args(p: argparse.ArgumentParser, trials: int) -> None:
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--burn-in", type=int, default=McmcConfig.burn_in_sweeps)
    p.add_argument("--thin", type=int, default=McmcConfig.thinning_sweeps)
    p.add_argument("--workers", type=int, default=1)


def _add_output_args(p: argparse.ArgumentParser, default_fmt: str) -> None:
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"], default=default_fmt)


def build_scenario(args, m: int | None = None, m2: int | None = None) -> Scenario:
    m = args.m if m is None else m
    if m2 is None:
        m2 = args.m2 if args.m2 is not None else m
    p1 = EnsembleParams(args.ensemble, args.n, m)
    if args.fixed_spectrum is not None:
        if args.ensemble2 is not None:
            raise UsageError("--fixed-spectrum and --ensemble2 are mutually exclusive")
        return Scenario.fixed(parse_spectrum(args.fixed_spectrum), p1)
    if args.ensemble2 is None:
        raise UsageError("give either --fixed-spectrum or --ensemble2")
    return Scenario.two_random(p1, EnsembleParams(args.ensemble2, args.n, m2))


def _experiment(args, scenario: Scenario) -> ExperimentConfig:
    return ExperimentConfig(
        scenario=scenario,
        trials=args.trials,
        seed=args.seed,
        mcmc=McmcConfig(burn_in_sweeps=args.burn_in, thinning_sweeps=args.thin),
        histogram_bins=args.bins,
        workers=args.workers,
    )


def _write(args, data: bytes) -> None:
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def cmd_exact(args) -> int:
    scenario = build_scenario(args)
    summary = hellinger_summary(scenario)
    payload = {"scenario": scenario.to_dict(), "exact": summary.to_dict()}
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        d = summary.to_dict()
        w.writerow(["scenario"] + list(d))
        w.writerow([scenario.label()] + ["" if v is None else format(v, ".17g") for v in d.values()])
        _write(args, buf.getvalue().encode())
    else:
        _write(args, dumps_json(payload).encode())
    return EXIT_OK


def cmd_simulate(args) -> int:
    report, hist = run_experiment(_experiment(args, build_scenario(args)))
    _write(args, emit_report(report, hist, args.format))
    return EXIT_OK


SWEEP_COLUMNS = [
    "label", "m1", "m2", "exact_mean_dh", "exact_var_dh",
    "mc_mean_dh", "mc_var_dh", "stderr_mean", "stderr_var", "z_mean", "z_var",
]


def sweep_rows(args) -> list[dict]:
    ms = _int_list(args.m_values)
    m2s = _int_list(args.m2_values) if args.m2_values else [None] * len(ms)
    if len(m2s) != len(ms):
        raise UsageError("--m2-values must have as many entries as --m-values")
    rows = []
    for m, m2 in zip(ms, m2s):
        scenario = build_scenario(args, m=m, m2=m2)
        exact = hellinger_summary(scenario)
        row = {
            "label": scenario.label(),
            "m1": m,
            "m2": scenario.ensemble_2.m if scenario.ensemble_2 else "",
            "exact_mean_dh": exact.mean_dh,
            "exact_var_dh": exact.var_dh,
        }
        if args.trials > 0:
            rep, _ = run_experiment(_experiment(args, scenario))
            row.update(
                mc_mean_dh=rep.mc_mean_dh,
                mc_var_dh=rep.mc_var_dh,
                stderr_mean=rep.mc_stderr_mean,
                stderr_var=rep.mc_stderr_var,
                z_mean=rep.z_scores[0],
                z_var=rep.z_scores[1],
            )
        rows.append(row)
    return rows


def cmd_sweep(args) -> int:
    rows = sweep_rows(args)
    if args.format == "json":
        _write(args, dumps_json(rows).encode())
        return EXIT_OK
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for r in rows:
        w.writerow(
            [format(r[c], ".17g") if isinstance(r.get(c), float) else r.get(c, "") for c in SWEEP_COLUMNS]
        )
    _write(args, buf.getvalue().encode())
    return EXIT_OK


def run_verification(trials: int, seed: int) -> list[dict]:
    """Haar group-integral checks plus the quadrature and dual-form oracles."""
    rng = np.random.default_rng(seed)
    checks: list[dict] = []

    for kind, m, tol in (("hs", 2, 1e-10), ("hs", 3, 1e-10), ("bh", 2, 1e-8), ("bh", 3, 1e-8)):
        p = EnsembleParams(kind, 2, m)
        norm = simplex2_expectation(p)
        q1 = simplex2_expectation(p, lambda l: float(np.sqrt(l).sum()))
        q2 = simplex2_expectation(p, lambda l: float(np.sqrt(l).sum()) ** 2)
        f1, f2 = (
            (mean_sqrt_trace_hs(2, m), second_moment_sqrt_trace_hs(2, m))
            if kind == "hs"
            else (mean_sqrt_trace_bh(2, m), second_moment_sqrt_trace_bh(2, m))
        )
        dev = max(abs(f1 - q1), abs(f2 - q2))
        checks.append(
            {"check": f"quadrature_{kind}", "n": 2, "m": m, "normalisation": norm,
             "max_deviation": dev, "threshold": tol,
             "passed": dev < tol and abs(norm - 1.0) < 1e-6}
        )

    worst = 0.0
    for a in (0, 1, 2, 5):
        for j in range(11):
            for k in range(11):
                x, y = xi_entry(j, k, a), xi_sum_form(j, k, a)
                worst = max(worst, abs(x - y) / abs(y))
    checks.append({"check": "xi_dual_form", "max_relative_deviation": worst,
                   "threshold": 1e-12, "passed": worst < 1e-12})

    for n in range(1, 5):
        checks.append(verify_haar_moment2(n, trials, rng))
    for n in (2, 3, 4):
        checks.append(verify_haar_moment4(n, trials, rng))
    lam = rng.dirichlet(np.ones(5))
    for sigma, spec in (
        ((0.5, 0.5), (0.5, 0.5)),
        ((1.0, 0.0), (1.0, 0.0)),
        (REFERENCE_SPECTRUM, tuple(lam)),
    ):
        checks.append(verify_group_integral_fixed(sigma, spec, trials, rng))
    return checks


def cmd_verify(args) -> int:
    checks = run_verification(args.trials, args.seed)
    _write(args, dumps_json({"checks": checks, "all_passed": all(c["passed"] for c in checks)}).encode())
    return EXIT_OK if all(c["passed"] for c in checks) else EXIT_INTERNAL


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qhellinger",
        description="Moments of the squared Hellinger distance between random density matrices.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="print the exact summary for a scenario")
    _add_scenario_args(p)
    _add_output_args(p, "json")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("simulate", help="Monte Carlo experiment against the exact result")
    _add_scenario_args(p)
    _add_mc_args(p, trials=100_000)
    _add_output_args(p, "json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="tabulate mean/variance over a range of ancilla dimensions")
    _add_scenario_args(p, m_required=False)
    p.add_argument("--m-values", required=True, help="comma-separated m (or m1) values")
    p.add_argument("--m2-values", help="comma-separated m2 values, paired with --m-values")
    _add_mc_args(p, trials=0)
    _add_output_args(p, "csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="group-integral identities and quadrature oracles")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InternalConsistencyError as e:
        print(f"internal consistency failure: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
