"""Fading law, sampling determinism, and two-user SINR bookkeeping."""

import math

import numpy as np
import pytest
from scipy import stats

from fbcnoma.channel import (
    DecodingOrder,
    FadingSpec,
    SicScenario,
    expect_snr,
    fading_pair,
    nakagami_pdf,
    sample_snr,
    sinr_pair,
    snr_quantile,
)
from fbcnoma.errors import DomainError
from fbcnoma.numerics import QuadratureSpec


class TestFadingSpec:
    def test_validation(self):
        with pytest.raises(DomainError):
            FadingSpec(m=0.4, mean_snr=1.0)
        with pytest.raises(DomainError):
            FadingSpec(m=1.0, mean_snr=0.0)
        with pytest.raises(DomainError):
            FadingSpec(m=math.inf, mean_snr=1.0)

    def test_frozen(self):
        spec = FadingSpec(m=1.0, mean_snr=2.0)
        with pytest.raises(Exception):
            spec.m = 2.0


class TestNakagamiPdf:
    @pytest.mark.parametrize("m", [0.5, 1.0, 2.0, 4.0, 8.0])
    def test_matches_gamma_density(self, m):
        spec = FadingSpec(m=m, mean_snr=3.0)
        g = np.geomspace(1e-4, 40.0, 200)
        ours = nakagami_pdf(g, spec)
        ref = stats.gamma.pdf(g, a=m, scale=spec.mean_snr / m)
        np.testing.assert_allclose(ours, ref, rtol=1e-12)

    @pytest.mark.parametrize("m", [0.5, 1.0, 2.0, 4.0, 8.0])
    def test_normalization_and_mean(self, m):
        spec = FadingSpec(m=m, mean_snr=7.5)
        quad = QuadratureSpec(upper_cutoff_multiplier=150.0)
        mass = expect_snr(lambda g: np.ones_like(g), spec, quad)
        mean = expect_snr(lambda g: g, spec, quad)
        assert mass == pytest.approx(1.0, rel=1e-9)
        assert mean == pytest.approx(spec.mean_snr, rel=1e-9)

    def test_zero_below_support(self):
        spec = FadingSpec(m=2.0, mean_snr=1.0)
        assert nakagami_pdf(0.0, spec) == 0.0
        assert nakagami_pdf(-1.0, spec) == 0.0
        out = nakagami_pdf(np.array([-1.0, 0.0, 1.0]), spec)
        assert out[0] == out[1] == 0.0 and out[2] > 0.0

    def test_large_m_concentrates(self):
        """High shape approaches a point mass at the mean (no overflow)."""
        spec = FadingSpec(m=1e8, mean_snr=5.0)
        assert nakagami_pdf(5.0, spec) > 100.0
        assert nakagami_pdf(4.0, spec) == 0.0 or nakagami_pdf(4.0, spec) < 1e-250

    def test_quantile_roundtrip(self):
        spec = FadingSpec(m=1.5, mean_snr=2.0)
        p = np.array([0.01, 0.3, 0.9, 0.999])
        g = snr_quantile(spec, p)
        back = stats.gamma.cdf(g, a=spec.m, scale=spec.mean_snr / spec.m)
        np.testing.assert_allclose(back, p, rtol=1e-10)


class TestSampleSnr:
    def test_deterministic_per_seed(self):
        spec = FadingSpec(m=1.0, mean_snr=10.0)
        a = sample_snr(spec, seed=123, count=1000)
        b = sample_snr(spec, seed=123, count=1000)
        c = sample_snr(spec, seed=124, count=1000)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    @pytest.mark.parametrize("m", [0.5, 1.0, 4.0])
    def test_distribution(self, m):
        """KS test against the target gamma law at the 0.1% level."""
        spec = FadingSpec(m=m, mean_snr=2.0)
        draws = sample_snr(spec, seed=7, count=100_000)
        stat, pvalue = stats.kstest(
            draws, stats.gamma(a=m, scale=spec.mean_snr / m).cdf
        )
        assert pvalue > 1e-3, f"KS stat {stat:.4f}, p={pvalue:.2e}"

    def test_count_validation(self):
        with pytest.raises(DomainError):
            sample_snr(FadingSpec(m=1.0, mean_snr=1.0), seed=0, count=0)


class TestSinrPair:
    scenario = SicScenario(p1=0.2, p2=0.5, g1=0.8, g2=1.6, noise=0.05)

    def test_first_decoded_user_sees_interference(self):
        s = self.scenario
        g1, g2 = sinr_pair(s, DecodingOrder.USER1_FIRST)
        assert g1 == pytest.approx(s.p1 * s.g1 / (s.p2 * s.g2 + s.noise))
        assert g2 == pytest.approx(s.p2 * s.g2 / s.noise)

    def test_cancellation_always_helps_the_later_user(self):
        s = self.scenario
        _, g2_clean = sinr_pair(s, DecodingOrder.USER1_FIRST)
        _, g2_interf = sinr_pair(s, DecodingOrder.USER2_FIRST)
        assert g2_clean > g2_interf
        g1_clean, _ = sinr_pair(s, DecodingOrder.USER2_FIRST)
        g1_interf, _ = sinr_pair(s, DecodingOrder.USER1_FIRST)
        assert g1_clean > g1_interf

    def test_residual_mode_only_affects_user1_after_cancellation(self):
        s = self.scenario
        post = sinr_pair(s, DecodingOrder.USER2_FIRST, residual_mode="post_sic")
        literal = sinr_pair(s, DecodingOrder.USER2_FIRST, residual_mode="literal")
        assert post[1] == literal[1]
        assert post[0] == pytest.approx(s.p1 * s.g1 / s.noise)
        assert literal[0] == pytest.approx(s.p1 * s.g1 / (s.p1 * s.g1 + s.noise))
        assert literal[0] < 1.0  # self-referential form saturates below 0 dB
        # Under the other order the mode is irrelevant.
        assert sinr_pair(s, DecodingOrder.USER1_FIRST) == sinr_pair(
            s, DecodingOrder.USER1_FIRST, residual_mode="literal"
        )

    def test_unknown_mode(self):
        with pytest.raises(DomainError):
            sinr_pair(self.scenario, DecodingOrder.USER1_FIRST, residual_mode="x")

    def test_scenario_validation(self):
        with pytest.raises(DomainError):
            SicScenario(p1=0.0, p2=1.0, g1=1.0, g2=1.0, noise=1.0)
        with pytest.raises(DomainError):
            SicScenario(p1=1.0, p2=1.0, g1=1.0, g2=1.0, noise=-0.1)

    def test_fading_pair_carries_means(self):
        s = self.scenario
        f1, f2 = fading_pair(s, 1.0, 2.0, DecodingOrder.USER1_FIRST)
        g1, g2 = sinr_pair(s, DecodingOrder.USER1_FIRST)
        assert (f1.m, f2.m) == (1.0, 2.0)
        assert f1.mean_snr == pytest.approx(g1)
        assert f2.mean_snr == pytest.approx(g2)
