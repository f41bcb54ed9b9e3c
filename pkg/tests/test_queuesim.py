"""Lindley-recursion queue simulator and tail-exponent estimation."""

import math

import numpy as np
import pytest

from fbcnoma.channel import FadingSpec
from fbcnoma.effcap import Normalization, effective_capacity
from fbcnoma.errors import DomainError, InstabilityError, InsufficientEventsError
from fbcnoma.fbc import QosSpec, achievable_rate
from fbcnoma.queuesim import QueueSimConfig, simulate_queue, tail_slope_sweep

FADING = FadingSpec(m=1.0, mean_snr=100.0)
Q_STD = QosSpec(theta=1e-3, epsilon=1e-3, blocklength=1000)


def _arrival_at_ec(theta: float) -> float:
    q = QosSpec(theta=theta, epsilon=1e-3, blocklength=1000)
    ec = effective_capacity(
        q, FADING, None, normalization=Normalization.DEF_ONE
    ).value
    return 1000 * ec


class TestQueueSimConfig:
    def test_validation(self):
        ok = dict(arrival_rate=1.0, blocks=100_000, seed=0, thresholds=(1.0, 2.0))
        QueueSimConfig(**ok)
        with pytest.raises(DomainError):
            QueueSimConfig(**{**ok, "arrival_rate": -1.0})
        with pytest.raises(DomainError):
            QueueSimConfig(**{**ok, "blocks": 99_999})
        with pytest.raises(DomainError):
            QueueSimConfig(**{**ok, "thresholds": ()})
        with pytest.raises(DomainError):
            QueueSimConfig(**{**ok, "thresholds": (2.0, 1.0)})
        with pytest.raises(DomainError):
            QueueSimConfig(**{**ok, "thresholds": (0.0, 1.0)})
        with pytest.raises(DomainError):
            QueueSimConfig(**{**ok, "warmup_blocks": 100_000})


class TestSimulateQueue:
    def test_zero_arrivals_leave_queue_empty(self):
        cfg = QueueSimConfig(
            arrival_rate=0.0, blocks=100_000, seed=1, thresholds=(1.0, 10.0)
        )
        est = simulate_queue(Q_STD, FADING, None, cfg)
        assert est.per_threshold_probs == ((1.0, 0.0), (10.0, 0.0))
        assert math.isnan(est.slope) and math.isnan(est.fit_r2)

    def test_deterministic_balance_stays_at_zero(self):
        """Inverting the fading with the policy makes the service constant;
        arrivals at exactly that service never back the queue up."""
        q = QosSpec(theta=1e-3, epsilon=1e-12, blocklength=1000)
        service_rate = achievable_rate(5.0, q)
        cfg = QueueSimConfig(
            arrival_rate=1000 * service_rate,
            blocks=150_000,
            seed=5,
            thresholds=(1.0, 10.0),
        )
        est = simulate_queue(q, FADING, lambda g: 5.0 / g, cfg)
        assert est.per_threshold_probs == ((1.0, 0.0), (10.0, 0.0))
        assert math.isnan(est.slope)

    def test_bit_reproducible(self):
        cfg = QueueSimConfig(
            arrival_rate=_arrival_at_ec(1e-3),
            blocks=200_000,
            seed=42,
            thresholds=tuple(np.linspace(2.5, 9.0, 8) / 1e-3),
            warmup_blocks=10_000,
        )
        a = simulate_queue(Q_STD, FADING, None, cfg)
        b = simulate_queue(Q_STD, FADING, None, cfg)
        assert a == b

    def test_unstable_queue_raises(self):
        cfg = QueueSimConfig(
            arrival_rate=2.0 * 1000 * 6.65,  # ~2x the ergodic service
            blocks=100_000,
            seed=2,
            thresholds=(1.0,),
        )
        with pytest.raises(InstabilityError):
            simulate_queue(Q_STD, FADING, None, cfg)

    def test_miscalibrated_thresholds_raise(self):
        """One reachable threshold plus one astronomically high one: events
        exist, but not enough levels to fit a line."""
        cfg = QueueSimConfig(
            arrival_rate=_arrival_at_ec(1e-3),
            blocks=200_000,
            seed=3,
            thresholds=(100.0, 1e9),
            warmup_blocks=10_000,
        )
        with pytest.raises(InsufficientEventsError):
            simulate_queue(Q_STD, FADING, None, cfg)

    def test_stable_run_tail_shape(self):
        cfg = QueueSimConfig(
            arrival_rate=_arrival_at_ec(1e-3),
            blocks=500_000,
            seed=7,
            thresholds=tuple(np.linspace(2.5, 9.0, 8) / 1e-3),
            warmup_blocks=10_000,
        )
        est = simulate_queue(Q_STD, FADING, None, cfg)
        pairs = np.asarray(est.per_threshold_probs)
        np.testing.assert_array_equal(pairs[:, 0], cfg.thresholds)
        assert np.all(np.diff(pairs[:, 1]) <= 0.0)
        assert est.slope > 0.0
        assert est.fit_r2 > 0.99


class TestTailSlopeSweep:
    def test_slope_tracks_exponent(self):
        cfg = QueueSimConfig(
            arrival_rate=1.0,
            blocks=500_000,
            seed=7,
            thresholds=(1.0,),
            warmup_blocks=10_000,
        )
        entries = tail_slope_sweep(
            (1e-4, 1e-3, 1e-2), FADING, cfg, blocklength=1000, epsilon=1e-3
        )
        slopes = [e.estimate.slope for e in entries]
        assert slopes[0] < slopes[1] < slopes[2]
        # The asymptotic regime needs thresholds well above one block's
        # service; that holds for the two smaller exponents.
        assert entries[0].relative_error < 0.15
        assert entries[1].relative_error < 0.15
        for e in entries:
            assert e.arrival_rate == pytest.approx(
                _arrival_at_ec(e.theta), rel=1e-12
            )

    def test_slack_arrivals_decay_faster(self):
        """Feeding at half the effective capacity leaves QoS slack, so the
        fitted decay is strictly steeper than the design exponent."""
        theta = 1e-3
        cfg = QueueSimConfig(
            arrival_rate=0.5 * _arrival_at_ec(theta),
            blocks=500_000,
            seed=7,
            thresholds=tuple(np.linspace(0.4, 1.6, 6) / theta),
            warmup_blocks=10_000,
        )
        q = QosSpec(theta=theta, epsilon=1e-3, blocklength=1000)
        est = simulate_queue(q, FADING, None, cfg)
        assert est.slope > theta

    def test_doubling_blocks_is_within_noise(self):
        """Self-consistency: the 1M->2M slope shift stays inside a standard
        error estimated from independent quarter-length replicates."""
        theta = 1e-3
        arrival = _arrival_at_ec(theta)
        thresholds = tuple(np.linspace(2.5, 9.0, 8) / theta)
        q = QosSpec(theta=theta, epsilon=1e-3, blocklength=1000)

        def slope_at(blocks, seed):
            cfg = QueueSimConfig(
                arrival_rate=arrival,
                blocks=blocks,
                seed=seed,
                thresholds=thresholds,
                warmup_blocks=10_000,
            )
            return simulate_queue(q, FADING, None, cfg).slope

        replicates = [slope_at(250_000, seed) for seed in range(100, 108)]
        se_1m = float(np.std(replicates, ddof=1)) / 2.0  # 1M ~ 4 replicates
        assert abs(slope_at(1_000_000, 11) - slope_at(2_000_000, 11)) < se_1m
