import csv
import io
import json
import math

import numpy as np
import pytest

from qhellinger.ensembles import EnsembleParams, McmcConfig
from qhellinger.harness import (
    ExperimentConfig,
    Histogram,
    emit_report,
    group_integral_fixed_exact,
    haar_moment4_exact,
    report_to_dict,
    run_experiment,
    verify_group_integral_fixed,
    verify_haar_moment2,
    verify_haar_moment4,
)
from qhellinger.hellinger import Scenario

P = EnsembleParams
SIGMA5 = (0.07, 0.16, 0.17, 0.23, 0.37)
FAST_MCMC = McmcConfig(burn_in_sweeps=200)


def cfg(scenario, trials=2000, **kw):
    kw.setdefault("mcmc", FAST_MCMC)
    return ExperimentConfig(scenario=scenario, trials=trials, **kw)


class TestConfig:
    @pytest.mark.parametrize("kw", [{"trials": 0}, {"histogram_bins": 1}, {"workers": 0}])
    def test_invalid(self, kw):
        args = {"scenario": Scenario.fixed((0.5, 0.5), P("hs", 2, 2)), "trials": 10, **kw}
        with pytest.raises(ValueError):
            ExperimentConfig(**args)


class TestRunExperiment:
    @pytest.mark.parametrize("kind", ["hs", "bh"])
    def test_scalar_all_zero(self, kind):
        rep, hist = run_experiment(cfg(Scenario.two_random(P(kind, 1, 3), P("hs", 1, 1)), 100))
        assert rep.mc_mean_dh == 0.0 and rep.mc_var_dh == 0.0
        assert rep.z_scores == (0.0, 0.0)
        assert hist.counts.sum() == 100 and hist.tv_distance is None

    def test_stderr_invariant(self):
        rep, _ = run_experiment(cfg(Scenario.fixed(SIGMA5, P("hs", 5, 10)), 5000))
        assert rep.mc_stderr_mean == pytest.approx(math.sqrt(rep.mc_var_dh / rep.trials), rel=1e-14)
        assert rep.z_scores[0] == pytest.approx(
            (rep.mc_mean_dh - rep.exact.mean_dh) / rep.mc_stderr_mean, rel=1e-12
        )

    def test_histogram_mass(self):
        _, hist = run_experiment(cfg(Scenario.two_random(P("hs", 3, 4), P("bh", 3, 6)), 3000))
        assert abs(hist.total_mass() - 1.0) < 1e-12
        assert hist.counts.sum() == 3000
        assert 0 <= hist.tv_distance <= 1

    def test_hs_hs_z(self):
        rep, _ = run_experiment(cfg(Scenario.two_random(P("hs", 3, 4), P("hs", 3, 6)), 100_000, seed=5))
        assert all(abs(z) < 3 for z in rep.z_scores), rep.z_scores

    def test_bh_diagnostics_attached(self):
        rep, _ = run_experiment(cfg(Scenario.fixed(SIGMA5, P("bh", 5, 8)), 2000))
        d = report_to_dict(rep)
        assert d["diagnostics"] is not None
        assert 0.05 < d["diagnostics"]["acceptance"] < 0.95
        assert rep.autocorr_time >= 1.0

    def test_deterministic(self):
        c = cfg(Scenario.two_random(P("bh", 2, 3), P("hs", 2, 2)), 3000, seed=11, block_size=1000)
        assert emit_report(*run_experiment(c)) == emit_report(*run_experiment(c))

    def test_workers_do_not_change_results(self):
        s = Scenario.two_random(P("bh", 3, 3), P("hs", 3, 5))
        one = report_to_dict(*run_experiment(cfg(s, 3000, seed=2, block_size=1000, workers=1)))
        two = report_to_dict(*run_experiment(cfg(s, 3000, seed=2, block_size=1000, workers=2)))
        assert one["monte_carlo"] == two["monte_carlo"]
        assert one["histogram"] == two["histogram"]

    def test_seed_matters(self):
        s = Scenario.fixed(SIGMA5, P("hs", 5, 5))
        a, _ = run_experiment(cfg(s, 500, seed=1))
        b, _ = run_experiment(cfg(s, 500, seed=2))
        assert a.mc_mean_dh != b.mc_mean_dh


class TestHistogram:
    def test_constant_samples(self):
        h = Histogram.build(np.zeros(10), 4)
        assert abs(h.total_mass() - 1.0) < 1e-12


class TestHaar:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_moment2(self, n, rng):
        r = verify_haar_moment2(n, 20_000, rng)
        assert r["passed"], r
        assert r["tuples"] == n**4

    def test_moment2_scalar_exact(self, rng):
        assert verify_haar_moment2(1, 10, rng)["max_deviation"] < 1e-14

    def test_moment2_limits(self, rng):
        with pytest.raises(ValueError):
            verify_haar_moment2(5, 10, rng)

    def test_moment4_spot_values(self):
        assert haar_moment4_exact(2, (0,) * 8) == pytest.approx(1 / 3, abs=1e-15)
        assert haar_moment4_exact(2, (0, 0, 0, 0, 1, 1, 1, 1)) == 0.0
        # E |U_11|^2 |U_22|^2 = Wg11 at n = 2
        assert haar_moment4_exact(2, (0, 0, 1, 1, 0, 0, 1, 1)) == pytest.approx(1 / 3)

    def test_moment4_n2_exhaustive(self, rng):
        r = verify_haar_moment4(2, 20_000, rng)
        assert r["passed"], r
        assert r["tuples"] == 256

    def test_moment4_sampled(self, rng):
        r = verify_haar_moment4(3, 20_000, rng)
        assert r["passed"], r
        assert r["nonzero_tuples"] > 0

    def test_group_integral_spot_values(self):
        assert group_integral_fixed_exact((0.5, 0.5), (0.5, 0.5)) == pytest.approx(1.0, abs=1e-15)
        assert group_integral_fixed_exact((1.0, 0.0), (1.0, 0.0)) == pytest.approx(1 / 3, abs=1e-15)

    def test_group_integral_mc(self, rng):
        lam = rng.dirichlet(np.ones(5))
        r = verify_group_integral_fixed(SIGMA5, lam, 20_000, rng)
        assert r["passed"], r
        assert verify_group_integral_fixed((0.5, 0.5), (0.5, 0.5), 100, rng)["passed"]


@pytest.fixture(scope="module")
def result():
    return run_experiment(cfg(Scenario.fixed(SIGMA5, P("hs", 5, 10)), 2000, seed=3))


class TestSerialisation:
    def test_json_schema_and_round_trip(self, result):
        rep, hist = result
        d = json.loads(emit_report(rep, hist, "json"))
        assert list(d) == ["scenario", "params", "exact", "monte_carlo", "diagnostics", "histogram"]
        assert d["monte_carlo"]["mean_dh"] == rep.mc_mean_dh
        assert d["exact"]["var_dh"] == rep.exact.var_dh
        assert d["histogram"]["counts"] == hist.counts.tolist()
        assert d == report_to_dict(rep, hist)

    def test_scalar_json(self):
        rep, hist = run_experiment(cfg(Scenario.fixed([1.0], P("hs", 1, 2)), 10))
        d = json.loads(emit_report(rep, hist))
        assert d["exact"]["mean_dh"] == 0.0
        assert d["exact"]["gamma_shape"] is None

    def test_csv(self, result):
        rep, hist = result
        rows = list(csv.reader(io.StringIO(emit_report(rep, hist, "csv").decode())))
        assert rows[0] == ["bin_left", "bin_right", "count", "density", "gamma_density"]
        assert len(rows) == 51
        assert sum(int(r[2]) for r in rows[1:]) == 2000
        assert float(rows[1][0]) == hist.edges[0]

    def test_bad_format(self, result):
        with pytest.raises(ValueError):
            emit_report(*result, fmt="xml")
