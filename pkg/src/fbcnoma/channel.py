"""Nakagami-m fading statistics and two-user superposition-coding SINRs."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import stats as _stats

from .errors import DomainError
from .numerics import QuadratureSpec, expect_over_pdf

__all__ = [
    "FadingSpec",
    "SicScenario",
    "DecodingOrder",
    "nakagami_pdf",
    "snr_quantile",
    "sample_snr",
    "expect_snr",
    "sinr_pair",
    "fading_pair",
]


@dataclass(frozen=True)
class FadingSpec:
    """Nakagami-m fading of the instantaneous SNR.

    The received power of a Nakagami-m envelope is gamma distributed, so the
    SNR has density ``(m/mean)^m g^(m-1) exp(-m g / mean) / Gamma(m)``.

    Attributes:
        m: shape parameter, >= 0.5 (0.5 is the one-sided Gaussian worst case,
            1 is Rayleigh, large m approaches a point mass at ``mean_snr``).
        mean_snr: average SNR, linear scale, > 0.
    """

    m: float
    mean_snr: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.m) and self.m >= 0.5):
            raise DomainError(f"Nakagami shape must be >= 0.5, got {self.m}")
        if not (math.isfinite(self.mean_snr) and self.mean_snr > 0.0):
            raise DomainError(f"mean_snr must be positive, got {self.mean_snr}")


class DecodingOrder(enum.Enum):
    """Which user the receiver decodes first (and thus under interference)."""

    USER1_FIRST = "user1_first"
    USER2_FIRST = "user2_first"


@dataclass(frozen=True)
class SicScenario:
    """Mean link budget of a two-user uplink pair at a common receiver.

    Attributes:
        p1, p2: average transmit powers (linear watts), > 0.
        g1, g2: average channel power gains (dimensionless), > 0.
        noise: receiver noise power (linear watts), > 0.
    """

    p1: float
    p2: float
    g1: float
    g2: float
    noise: float

    def __post_init__(self) -> None:
        for name in ("p1", "p2", "g1", "g2", "noise"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise DomainError(f"{name} must be positive and finite, got {value}")


def nakagami_pdf(snr, spec: FadingSpec):
    """SNR density under ``spec``, evaluated in log space for large-m stability.

    Vectorized.  Returns 0 at non-positive abscissae; for m < 1 the true
    density diverges at the origin, but the quadrature layer integrates in
    u = sqrt(snr) and never evaluates at exactly 0.
    """
    g = np.asarray(snr, dtype=float)
    scalar = np.ndim(snr) == 0
    g = np.atleast_1d(g)
    m, mean = spec.m, spec.mean_snr
    out = np.zeros_like(g)
    pos = g > 0.0
    log_pdf = (
        m * math.log(m / mean)
        + (m - 1.0) * np.log(g[pos])
        - m * g[pos] / mean
        - math.lgamma(m)
    )
    out[pos] = np.exp(log_pdf)
    return float(out[0]) if scalar else out


def snr_quantile(spec: FadingSpec, p):
    """Inverse CDF of the SNR law (gamma with shape m, scale mean_snr/m)."""
    return _stats.gamma.ppf(p, a=spec.m, scale=spec.mean_snr / spec.m)


def sample_snr(spec: FadingSpec, seed: int, count: int) -> np.ndarray:
    """Draw ``count`` i.i.d. SNRs, deterministic for a fixed ``seed``."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(int(seed))
    return rng.gamma(shape=spec.m, scale=spec.mean_snr / spec.m, size=count)


def expect_snr(
    f: Callable[[np.ndarray], np.ndarray],
    spec: FadingSpec,
    quad: QuadratureSpec,
    breakpoints: Sequence[float] = (),
) -> float:
    """``E[f(SNR)]`` under ``spec`` via the shared panel quadrature."""
    return expect_over_pdf(
        f,
        lambda g: nakagami_pdf(g, spec),
        quad,
        mean=spec.mean_snr,
        quantile=lambda p: snr_quantile(spec, p),
        breakpoints=breakpoints,
    )


def sinr_pair(
    s: SicScenario,
    order: DecodingOrder,
    *,
    residual_mode: str = "post_sic",
) -> tuple[float, float]:
    """Mean SINRs ``(user1, user2)`` under successive interference cancellation.

    The first-decoded user sees the other signal as interference; after
    cancellation the second user decodes over noise alone.  ``residual_mode``
    only matters when user 2 is decoded first: ``"post_sic"`` (default) gives
    user 1 the clean ``p1*g1/noise``, while ``"literal"`` keeps the
    self-referential ``p1*g1/(p1*g1 + noise)`` form some treatments print for
    that branch (dimensionally suspect, exposed for comparison only).
    """
    if residual_mode not in ("post_sic", "literal"):
        raise DomainError(f"unknown residual_mode {residual_mode!r}")
    s1 = s.p1 * s.g1
    s2 = s.p2 * s.g2
    if order is DecodingOrder.USER1_FIRST:
        return s1 / (s2 + s.noise), s2 / s.noise
    if order is DecodingOrder.USER2_FIRST:
        if residual_mode == "literal":
            return s1 / (s1 + s.noise), s2 / (s1 + s.noise)
        return s1 / s.noise, s2 / (s1 + s.noise)
    raise DomainError(f"unknown decoding order {order!r}")


def fading_pair(
    s: SicScenario,
    m1: float,
    m2: float,
    order: DecodingOrder,
    *,
    residual_mode: str = "post_sic",
) -> tuple[FadingSpec, FadingSpec]:
    """Per-user fading specs whose means are the scenario's SINRs under ``order``."""
    snr1, snr2 = sinr_pair(s, order, residual_mode=residual_mode)
    return FadingSpec(m=m1, mean_snr=snr1), FadingSpec(m=m2, mean_snr=snr2)
