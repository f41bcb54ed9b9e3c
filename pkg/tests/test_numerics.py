"""Special functions, quadrature, and scalar solvers against independent oracles.

The incomplete-gamma and normal-quantile implementations carry the analytic
load of the closed forms upstream, so they are checked against mpmath and
scipy rather than against themselves.
"""

import math

import mpmath
import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from fbcnoma.errors import BracketError, DomainError, NonConvergenceError
from fbcnoma.numerics import (
    QuadratureSpec,
    RootBracket,
    bisect,
    expect_over_pdf,
    golden_section_max,
    inv_q,
    q_function,
    upper_incomplete_gamma,
)

mpmath.mp.dps = 40


class TestQFunction:
    def test_known_values(self):
        assert q_function(0.0) == pytest.approx(0.5, abs=0.0)
        # Classic two-sided 5% point.
        assert q_function(1.959963984540054) == pytest.approx(0.025, rel=1e-12)

    def test_symmetry(self):
        x = np.linspace(-8.0, 8.0, 401)
        np.testing.assert_allclose(q_function(x) + q_function(-x), 1.0, atol=1e-14)

    def test_array_and_scalar_forms(self):
        xs = np.array([0.3, 1.7])
        vec = q_function(xs)
        assert vec.shape == (2,)
        assert q_function(0.3) == vec[0]
        assert isinstance(q_function(0.3), float)

    def test_against_mpmath_tail(self):
        for x in (0.5, 3.0, 6.0, 8.5):
            exact = float(mpmath.ncdf(-x))
            assert q_function(x) == pytest.approx(exact, rel=1e-13)


class TestInvQ:
    def test_against_scipy_quantile(self):
        p = np.concatenate(
            (np.geomspace(1e-12, 0.4, 60), 1.0 - np.geomspace(1e-12, 0.4, 60))
        )
        ours = np.array([inv_q(v) for v in p])
        reference = -sp.ndtri(p)  # Q^{-1}(p) = -Phi^{-1}(p)
        np.testing.assert_allclose(ours, reference, rtol=1e-12, atol=1e-12)

    def test_median_and_antisymmetry(self):
        assert inv_q(0.5) == pytest.approx(0.0, abs=1e-15)
        # Dyadic p keeps 1 - p (and 1 - (1 - p)) exactly representable, so
        # the identity is not polluted by rounding of the argument itself.
        for p in (0.25, 0.125, 2.0**-10, 2.0**-30):
            assert inv_q(1.0 - p) == -inv_q(p)

    @given(st.floats(min_value=1e-12, max_value=1.0 - 1e-12))
    @settings(max_examples=200, deadline=None)
    def test_roundtrip(self, p):
        assert q_function(inv_q(p)) == pytest.approx(p, rel=1e-11)

    def test_domain(self):
        for bad in (0.0, 1.0, -0.1, 1.2, math.nan):
            with pytest.raises(DomainError):
                inv_q(bad)


class TestUpperIncompleteGamma:
    """Generalized Gamma(s, x) including s <= 0, where scipy has no coverage."""

    def test_against_mpmath_randomized(self):
        rng = np.random.default_rng(7)
        worst = 0.0
        for _ in range(200):
            s = float(rng.uniform(-5.0, 5.0))
            x = float(rng.uniform(1e-3, 50.0))
            ours = upper_incomplete_gamma(s, x)
            exact = float(mpmath.gammainc(s, a=x, b=mpmath.inf))
            rel = abs(ours - exact) / max(abs(exact), 1e-300)
            worst = max(worst, rel)
        assert worst < 1e-10, f"worst relative error {worst:.3e}"

    def test_exponential_integral_order_zero(self):
        for x in (0.1, 1.0, 7.5):
            assert upper_incomplete_gamma(0.0, x) == pytest.approx(
                float(sp.exp1(x)), rel=1e-13
            )

    def test_positive_order_is_plain_gamma(self):
        assert upper_incomplete_gamma(3.0, 1e-12) == pytest.approx(
            2.0, rel=1e-9
        )  # Gamma(3) = 2

    @given(
        st.floats(min_value=-4.5, max_value=4.5),
        st.floats(min_value=0.05, max_value=30.0),
    )
    @settings(max_examples=150, deadline=None)
    def test_recurrence(self, s, x):
        """Gamma(s+1, x) = s*Gamma(s, x) + x^s e^{-x} for every real s."""
        lhs = upper_incomplete_gamma(s + 1.0, x)
        rhs = s * upper_incomplete_gamma(s, x) + x**s * math.exp(-x)
        assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-280)

    def test_deep_negative_order(self):
        # Far below anything the recurrence ladder was tuned on.
        s, x = -20.5, 2.0
        exact = float(mpmath.gammainc(s, a=x, b=mpmath.inf))
        assert upper_incomplete_gamma(s, x) == pytest.approx(exact, rel=1e-8)

    def test_domain(self):
        with pytest.raises(DomainError):
            upper_incomplete_gamma(-1.0, 0.0)
        with pytest.raises(DomainError):
            upper_incomplete_gamma(1.0, -2.0)
        with pytest.raises(DomainError):
            upper_incomplete_gamma(math.inf, 1.0)


def _gamma_pdf(m: float, mean: float):
    scale = mean / m
    log_norm = m * math.log(scale) + math.lgamma(m)

    def pdf(g):
        g = np.asarray(g, dtype=float)
        out = np.zeros_like(g)
        pos = g > 0.0
        out[pos] = np.exp((m - 1.0) * np.log(g[pos]) - g[pos] / scale - log_norm)
        return out

    return pdf


class TestExpectOverPdf:
    """Semi-infinite expectations against closed-form Gamma moments."""

    @pytest.mark.parametrize("m", [0.5, 1.0, 2.0, 4.0, 8.0])
    @pytest.mark.parametrize("mean", [0.5, 10.0, 100.0])
    def test_moments(self, m, mean):
        from scipy.stats import gamma as gamma_dist

        # Polynomially growing integrands weight the far tail, so give the
        # truncation more headroom than the bounded-integrand default.
        spec = QuadratureSpec(upper_cutoff_multiplier=150.0)
        pdf = _gamma_pdf(m, mean)
        quantile = lambda p: gamma_dist.ppf(p, a=m, scale=mean / m)
        for k, exact in (
            (0, 1.0),
            (1, mean),
            (2, mean**2 * (m + 1.0) / m),
        ):
            got = expect_over_pdf(
                lambda g, k=k: g**k, pdf, spec, mean=mean, quantile=quantile
            )
            assert got == pytest.approx(exact, rel=5e-9)

    def test_default_truncation_bounds_error_for_bounded_integrands(self):
        """The default 40x-mean cutoff leaves ~3e-10 mass even at m = 0.5."""
        from scipy.stats import gamma as gamma_dist

        m, mean = 0.5, 1.0
        got = expect_over_pdf(
            lambda g: np.ones_like(g),
            _gamma_pdf(m, mean),
            QuadratureSpec(),
            mean=mean,
            quantile=lambda p: gamma_dist.ppf(p, a=m, scale=mean / m),
        )
        assert abs(got - 1.0) < 3e-10

    def test_laplace_transform(self):
        from scipy.stats import gamma as gamma_dist

        spec = QuadratureSpec()
        m, mean, t = 2.0, 3.0, 0.7
        got = expect_over_pdf(
            lambda g: np.exp(-t * g),
            _gamma_pdf(m, mean),
            spec,
            mean=mean,
            quantile=lambda p: gamma_dist.ppf(p, a=m, scale=mean / m),
        )
        exact = (1.0 + t * mean / m) ** (-m)
        assert got == pytest.approx(exact, rel=1e-9)

    def test_kinked_integrand_needs_breakpoint(self):
        """A ramp kink lands exactly on a panel edge when declared."""
        from scipy.stats import gamma as gamma_dist

        spec = QuadratureSpec()
        m, mean, knee = 1.0, 1.0, 1.2345
        pdf = _gamma_pdf(m, mean)
        quantile = lambda p: gamma_dist.ppf(p, a=m, scale=mean / m)
        f = lambda g: np.maximum(g - knee, 0.0)
        got = expect_over_pdf(
            f, pdf, spec, mean=mean, quantile=quantile, breakpoints=(knee,)
        )
        exact = math.exp(-knee)  # integral_k^inf (g-k) e^{-g} dg
        assert got == pytest.approx(exact, rel=1e-10)

    def test_invalid_mean(self):
        with pytest.raises(DomainError):
            expect_over_pdf(lambda g: g, lambda g: g, QuadratureSpec(), mean=0.0)

    def test_quadrature_spec_validation(self):
        with pytest.raises(DomainError):
            QuadratureSpec(node_count=8)
        with pytest.raises(DomainError):
            QuadratureSpec(relative_tolerance=0.0)
        with pytest.raises(DomainError):
            QuadratureSpec(relative_tolerance=1e-2)
        with pytest.raises(DomainError):
            QuadratureSpec(upper_cutoff_multiplier=1.0)


class TestBisect:
    def test_finds_root(self):
        root = bisect(math.cos, RootBracket(0.0, 2.0))
        assert root == pytest.approx(math.pi / 2.0, rel=1e-12)

    def test_endpoint_root_short_circuits(self):
        assert bisect(lambda x: x, RootBracket(0.0, 1.0)) == 0.0

    def test_same_sign_raises(self):
        with pytest.raises(BracketError):
            bisect(lambda x: 1.0 + x * x, RootBracket(-1.0, 1.0))

    def test_budget_exhaustion(self):
        with pytest.raises(NonConvergenceError):
            bisect(
                lambda x: x - 0.123456,
                RootBracket(0.0, 1.0, tolerance=1e-14, max_iterations=3),
            )

    def test_bracket_validation(self):
        with pytest.raises(DomainError):
            RootBracket(1.0, 1.0)
        with pytest.raises(DomainError):
            RootBracket(0.0, 1.0, tolerance=0.0)
        with pytest.raises(DomainError):
            RootBracket(0.0, math.inf)


class TestGoldenSectionMax:
    def test_quadratic_peak(self):
        for c in (-2.0, 0.3, 4.7):
            x, fx = golden_section_max(lambda x: -((x - c) ** 2), c - 5.0, c + 5.0)
            assert x == pytest.approx(c, abs=1e-8)
            assert fx == pytest.approx(0.0, abs=1e-15)

    def test_skewed_unimodal(self):
        # Gamma-shaped bump: argmax of x*e^{-x} is exactly 1.
        x, _ = golden_section_max(lambda x: x * math.exp(-x), 1e-9, 50.0)
        assert x == pytest.approx(1.0, rel=1e-7)

    def test_validation(self):
        with pytest.raises(DomainError):
            golden_section_max(lambda x: x, 1.0, 1.0)
        with pytest.raises(DomainError):
            golden_section_max(lambda x: x, 0.0, 1.0, tol=0.0)
