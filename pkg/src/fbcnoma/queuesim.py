"""Direct queue simulation validating the effective-capacity tail exponents.

A block queue fed by a constant arrival stream ``a`` bits/block and drained by
the random service ``S_t = n * max(R_t, 0) * Bernoulli(1 - eps)`` (a decoding
failure delivers nothing) satisfies the Lindley recursion
``Q_t = max(Q_{t-1} + a - S_t, 0)``.  When ``a`` equals the block-normalized
effective capacity at exponent ``theta`` (per bit), large-deviations theory
predicts ``P(Q > x) ~ exp(-theta x)``; the simulator estimates that decay rate
from threshold exceedance frequencies so it can be compared against the
requested ``theta``.

The recursion is evaluated in vectorized chunks through the random-walk
identity ``Q_t = W_t - min(-Q_0, min_{j <= t} W_j)`` with ``W`` the cumulative
sum of ``a - S``; only the running sum and running minimum cross chunk
boundaries, so the result is independent of the chunking (the fixed chunk
size still pins the RNG stream, keeping runs bit-reproducible for a seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .channel import FadingSpec
from .effcap import Normalization, effective_capacity
from .errors import DomainError, InstabilityError, InsufficientEventsError
from .fbc import QosSpec, achievable_rate
from .numerics import QuadratureSpec

__all__ = [
    "QueueSimConfig",
    "TailEstimate",
    "TailSweepEntry",
    "simulate_queue",
    "tail_slope_sweep",
]

_CHUNK = 1 << 21
_MIN_EVENTS = 50


@dataclass(frozen=True)
class QueueSimConfig:
    """Arrival rate (bits/block), run length, seed, and probe thresholds."""

    arrival_rate: float
    blocks: int
    seed: int
    thresholds: tuple[float, ...]
    warmup_blocks: int = 0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.arrival_rate) and self.arrival_rate >= 0.0):
            raise DomainError(f"arrival_rate must be >= 0, got {self.arrival_rate}")
        if self.blocks < 100_000:
            raise DomainError(
                f"blocks must be >= 100000 for tail estimation, got {self.blocks}"
            )
        th = tuple(float(t) for t in self.thresholds)
        if not th:
            raise DomainError("at least one threshold is required")
        if any(t <= 0.0 for t in th):
            raise DomainError("thresholds must be positive")
        if any(b <= a for a, b in zip(th, th[1:])):
            raise DomainError("thresholds must be strictly ascending")
        object.__setattr__(self, "thresholds", th)
        if not 0 <= self.warmup_blocks < self.blocks:
            raise DomainError(
                f"warmup_blocks must lie in [0, blocks), got {self.warmup_blocks}"
            )


@dataclass(frozen=True)
class TailEstimate:
    """Fitted exponential tail ``P(Q > x) ~ exp(intercept - slope * x)``.

    ``per_threshold_probs`` pairs each probe threshold (bits) with its
    empirical exceedance probability.  ``slope`` is NaN when the queue never
    exceeded any threshold (an empty tail is not an error: it just carries no
    rate information).
    """

    slope: float
    intercept: float
    per_threshold_probs: tuple[tuple[float, float], ...]
    fit_r2: float


@dataclass(frozen=True)
class TailSweepEntry:
    theta: float
    arrival_rate: float
    estimate: TailEstimate
    relative_error: float


def simulate_queue(
    q: QosSpec,
    fading: FadingSpec,
    policy: Callable | None,
    cfg: QueueSimConfig,
) -> TailEstimate:
    """Run the Lindley recursion and fit the exceedance tail.

    Raises:
        InstabilityError: the empirical mean service fell below the arrival
            rate, so the queue has no stationary tail to estimate.
        InsufficientEventsError: fewer than two thresholds collected the
            minimum event count (but at least one exceedance happened, so the
            thresholds are merely miscalibrated, not unreachable).
    """
    rng = np.random.default_rng(cfg.seed)
    n = q.blocklength
    thresholds = np.asarray(cfg.thresholds)
    counts = np.zeros(thresholds.size, dtype=np.int64)
    offset = 0.0  # running W_t
    running_min = 0.0  # min(-Q_0, min_j W_j) with Q_0 = 0
    total_service = 0.0
    done = 0
    while done < cfg.blocks:
        size = min(_CHUNK, cfg.blocks - done)
        snr = rng.gamma(shape=fading.m, scale=fading.mean_snr / fading.m, size=size)
        erased = rng.random(size) < q.epsilon
        s = snr if policy is None else np.asarray(policy(snr), dtype=float) * snr
        rate = np.maximum(achievable_rate(s, q), 0.0)
        service = n * rate
        service[erased] = 0.0
        total_service += float(np.sum(service))
        walk = offset + np.cumsum(cfg.arrival_rate - service)
        prefix_min = np.minimum(np.minimum.accumulate(walk), running_min)
        queue = walk - prefix_min
        lo = max(cfg.warmup_blocks - done, 0)
        if lo < size:
            counts += np.count_nonzero(
                queue[lo:, None] > thresholds[None, :], axis=0
            )
        running_min = float(prefix_min[-1])
        offset = float(walk[-1])
        done += size
    mean_service = total_service / cfg.blocks
    if mean_service < cfg.arrival_rate * (1.0 - 1e-12) - 1e-12:
        raise InstabilityError(
            f"mean service {mean_service} bits/block is below the arrival rate "
            f"{cfg.arrival_rate} bits/block: the queue is unstable"
        )
    measured = cfg.blocks - cfg.warmup_blocks
    probs = counts / measured
    usable = counts >= _MIN_EVENTS
    if int(np.count_nonzero(usable)) < 2:
        if int(counts.sum()) == 0:
            return TailEstimate(
                slope=math.nan,
                intercept=math.nan,
                per_threshold_probs=tuple(zip(cfg.thresholds, probs.tolist())),
                fit_r2=math.nan,
            )
        raise InsufficientEventsError(
            f"only {int(np.count_nonzero(usable))} thresholds reached "
            f"{_MIN_EVENTS} exceedances (counts: {counts.tolist()}); lower the "
            "thresholds or lengthen the run"
        )
    x = thresholds[usable]
    y = np.log(probs[usable])
    coef, intercept = np.polyfit(x, y, deg=1)
    fitted = coef * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 1.0
    return TailEstimate(
        slope=-float(coef),
        intercept=float(intercept),
        per_threshold_probs=tuple(zip(cfg.thresholds, probs.tolist())),
        fit_r2=r2,
    )


def tail_slope_sweep(
    thetas: Sequence[float],
    fading: FadingSpec,
    cfg: QueueSimConfig,
    *,
    blocklength: int,
    epsilon: float,
    policy: Callable | None = None,
    quad: QuadratureSpec = QuadratureSpec(),
) -> tuple[TailSweepEntry, ...]:
    """For each per-bit exponent, feed the queue at its effective capacity.

    The arrival is set to ``blocklength * EC`` (block-normalized EC at that
    ``theta``), the canonical operating point at which the queue tail should
    decay at exactly ``theta`` per bit; thresholds are placed at
    ``linspace(2.5, 9, 8) / theta`` so the probed decades match the predicted
    decay. ``cfg.arrival_rate`` and ``cfg.thresholds`` are overridden.
    """
    entries = []
    for theta in thetas:
        q = QosSpec(theta=float(theta), epsilon=epsilon, blocklength=blocklength)
        ec = effective_capacity(
            q, fading, policy, quad, normalization=Normalization.DEF_ONE
        ).value
        arrival = blocklength * ec
        run_cfg = replace(
            cfg,
            arrival_rate=arrival,
            thresholds=tuple(np.linspace(2.5, 9.0, 8) / theta),
        )
        estimate = simulate_queue(q, fading, policy, run_cfg)
        rel = (
            abs(estimate.slope - theta) / theta
            if math.isfinite(estimate.slope)
            else math.nan
        )
        entries.append(
            TailSweepEntry(
                theta=float(theta),
                arrival_rate=arrival,
                estimate=estimate,
                relative_error=rel,
            )
        )
    return tuple(entries)
