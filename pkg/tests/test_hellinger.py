import math

import numpy as np
import pytest
from scipy.integrate import quad

from helpers import mc_mean_within
from qhellinger import numlinalg as nl
from qhellinger.ensembles import EnsembleParams, sample_hs_batch
from qhellinger.exactmoments import moments
from qhellinger.hellinger import (
    HellingerSummary,
    InternalConsistencyError,
    Scenario,
    ScenarioKind,
    _summarise,
    asymptotic_mean_sq_affinity_hs,
    gamma_cdf,
    gamma_pdf,
    hellinger_summary,
    mean_affinity_fixed,
    mean_affinity_two_random,
    mean_sq_affinity_fixed,
    mean_sq_affinity_two_random,
)

SIGMA5 = (0.07, 0.16, 0.17, 0.23, 0.37)
P = EnsembleParams


def hs_roots(n, m, rng, size):
    return nl.sqrt_psd_batch(sample_hs_batch(n, m, rng, size))


class TestScenario:
    def test_fixed(self):
        s = Scenario.fixed(SIGMA5, P("hs", 5, 10))
        assert s.kind is ScenarioKind.FIXED_VS_RANDOM and s.n == 5
        assert s.label() == "fixed-HS(n=5,m=10)"

    def test_invalid(self):
        with pytest.raises(ValueError):
            Scenario.fixed((0.5, 0.5), P("hs", 3, 3))
        with pytest.raises(ValueError):
            Scenario.two_random(P("hs", 2, 2), P("bh", 3, 3))
        with pytest.raises(ValueError):
            Scenario(ScenarioKind.FIXED_VS_RANDOM, P("hs", 2, 2), None, P("hs", 2, 2))
        with pytest.raises(ValueError):
            Scenario.fixed((0.6, 0.6), P("hs", 2, 2))

    def test_sigma_dimension(self):
        with pytest.raises(ValueError, match="dimension"):
            mean_affinity_fixed((0.5, 0.5), P("hs", 3, 3))


class TestScalarCase:
    def test_all_trivial(self):
        for k1 in ("hs", "bh"):
            assert mean_affinity_fixed([1.0], P(k1, 1, 4)) == 1.0
            assert mean_sq_affinity_fixed([1.0], P(k1, 1, 4)) == 1.0
            for k2 in ("hs", "bh"):
                assert mean_affinity_two_random(P(k1, 1, 2), P(k2, 1, 5)) == 1.0
                assert mean_sq_affinity_two_random(P(k1, 1, 2), P(k2, 1, 5)) == 1.0
                s = hellinger_summary(Scenario.two_random(P(k1, 1, 2), P(k2, 1, 3)))
                assert s == HellingerSummary(1.0, 1.0, 0.0, 0.0, None, None)


class TestFixedState:
    def test_maximally_mixed(self):
        p = P("hs", 4, 6)
        assert mean_affinity_fixed(np.full(4, 0.25), p) == pytest.approx(
            moments(p).first / 2, rel=1e-15
        )

    def test_bounded(self):
        r = np.random.default_rng(0)
        for kind in ("hs", "bh"):
            for n in (2, 3, 5):
                for m in (n, n + 3):
                    for _ in range(5):
                        sig = r.dirichlet(np.ones(n) * 0.3)
                        a2 = mean_sq_affinity_fixed(sig, P(kind, n, m))
                        a1 = mean_affinity_fixed(sig, P(kind, n, m))
                        assert 0 <= a1 * a1 <= a2 <= 1.0

    def test_fig1_hs_mc(self, rng):
        p = P("hs", 5, 10)
        roots = hs_roots(5, 10, rng, 200_000)
        aff = np.diagonal(roots, axis1=1, axis2=2).real @ np.sqrt(SIGMA5)
        ok, z = mc_mean_within(aff, mean_affinity_fixed(SIGMA5, p))
        assert ok, z
        ok, z = mc_mean_within(aff**2, mean_sq_affinity_fixed(SIGMA5, p))
        assert ok, z

    def test_pure_sigma_mc(self, rng):
        p = P("hs", 2, 2)
        roots = hs_roots(2, 2, rng, 200_000)
        aff = roots[:, 0, 0].real
        ok, z = mc_mean_within(aff**2, mean_sq_affinity_fixed((1.0, 0.0), p))
        assert ok, z

    def test_fixed_average_matches_two_random(self, rng):
        p = P("hs", 3, 4)
        rho = sample_hs_batch(3, 4, rng, 10_000)
        sig = np.linalg.eigvalsh(rho).clip(0, None)
        sig /= sig.sum(axis=1, keepdims=True)
        vals = np.array([mean_affinity_fixed(s, p) for s in sig])
        ok, z = mc_mean_within(vals, mean_affinity_two_random(p, p))
        assert ok, z


class TestTwoRandom:
    @pytest.mark.parametrize("k1,k2", [("hs", "bh"), ("bh", "hs"), ("hs", "hs")])
    def test_bitwise_symmetric(self, k1, k2):
        a, b = P(k1, 3, 4), P(k2, 3, 6)
        assert mean_affinity_two_random(a, b) == mean_affinity_two_random(b, a)
        assert mean_sq_affinity_two_random(a, b) == mean_sq_affinity_two_random(b, a)

    def test_hs_hs_mc(self, rng):
        a, b = P("hs", 3, 4), P("hs", 3, 6)
        aff = nl.affinity_batch(hs_roots(3, 4, rng, 200_000), hs_roots(3, 6, rng, 200_000))
        ok, z = mc_mean_within(aff, mean_affinity_two_random(a, b))
        assert ok, z
        ok, z = mc_mean_within(aff**2, mean_sq_affinity_two_random(a, b))
        assert ok, z

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            mean_sq_affinity_two_random(P("hs", 2, 3), P("hs", 3, 3))


class TestSummary:
    @pytest.mark.parametrize(
        "scenario",
        [
            Scenario.fixed(SIGMA5, P("hs", 5, 10)),
            Scenario.fixed(SIGMA5, P("bh", 5, 12)),
            Scenario.two_random(P("hs", 3, 4), P("bh", 3, 6)),
            Scenario.two_random(P("bh", 2, 2), P("bh", 2, 5)),
        ],
    )
    def test_identities(self, scenario):
        s = hellinger_summary(scenario)
        assert s.mean_dh == 2 - 2 * s.mean_affinity
        assert s.var_dh == 4 * (s.mean_sq_affinity - s.mean_affinity**2)
        assert 0 <= s.mean_dh <= 2 and s.var_dh > 0
        assert s.gamma_shape / s.gamma_rate == pytest.approx(s.mean_dh, rel=1e-14)
        assert s.gamma_shape / s.gamma_rate**2 == pytest.approx(s.var_dh, rel=1e-14)

    def test_ordering_346(self):
        hh = hellinger_summary(Scenario.two_random(P("hs", 3, 4), P("hs", 3, 6))).mean_dh
        hb = hellinger_summary(Scenario.two_random(P("hs", 3, 4), P("bh", 3, 6))).mean_dh
        bb = hellinger_summary(Scenario.two_random(P("bh", 3, 4), P("bh", 3, 6))).mean_dh
        assert hh < hb < bb

    def test_negative_variance_raises(self):
        with pytest.raises(InternalConsistencyError):
            _summarise(0.5, 0.2)

    def test_tiny_negative_clamped(self):
        s = _summarise(0.5, 0.25 - 1e-14)
        assert s.var_dh == 0.0 and s.gamma_shape is None


class TestGamma:
    def test_exponential(self):
        x = np.linspace(0, 3, 7)
        assert np.allclose(gamma_pdf(x, 1.0, 2.5), 2.5 * np.exp(-2.5 * x), rtol=1e-14)

    def test_integrates_to_one(self):
        assert quad(lambda x: gamma_pdf(x, 2.5, 3.0), 0, np.inf)[0] == pytest.approx(1.0, abs=1e-8)

    def test_zero(self):
        assert gamma_pdf(0.0, 0.5, 1.0) == math.inf
        assert gamma_pdf(0.0, 1.0, 2.0) == 2.0
        assert gamma_pdf(0.0, 3.0, 2.0) == 0.0

    def test_cdf(self):
        assert gamma_cdf(1.0, 1.0, 2.0) == pytest.approx(1 - math.exp(-2.0), rel=1e-14)

    @pytest.mark.parametrize("shape,rate", [(0, 1), (1, -1), (-1, 1)])
    def test_bad_params(self, shape, rate):
        with pytest.raises(ValueError):
            gamma_pdf(1.0, shape, rate)

    def test_negative_x(self):
        with pytest.raises(ValueError):
            gamma_pdf(-0.1, 2.0, 1.0)


class TestAsymptotic:
    def test_limits(self):
        assert asymptotic_mean_sq_affinity_hs(1, 10**9) == pytest.approx(1.0, abs=1e-8)
        assert asymptotic_mean_sq_affinity_hs(7, 7) == pytest.approx((8 / (3 * math.pi)) ** 4, rel=1e-14)

    def test_10_20(self):
        exact = mean_sq_affinity_two_random(P("hs", 10, 20), P("hs", 10, 20))
        asym = asymptotic_mean_sq_affinity_hs(10, 20)
        assert abs(exact - asym) / asym < 0.01

    def test_invalid(self):
        with pytest.raises(ValueError):
            asymptotic_mean_sq_affinity_hs(5, 4)
