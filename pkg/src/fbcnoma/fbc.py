"""Finite-blocklength achievable rates: normal approximation and its curvature.

The rate model is

    R(n, gamma, eps) = log2(1 + gamma) - sqrt(V / n) * Qinv(eps) / ln 2,
    V = 1 - (1 + gamma)^(-2),

in bits per channel use, with the dispersion back-off measured in nats and
converted by the single ``1/ln 2`` factor.  ``R`` is returned unclamped here;
layers that feed it into exponential averages clamp at zero themselves, so the
raw approximation stays inspectable.

``f_function`` / ``hessian_F`` / ``n_rt`` study the curvature of the block
throughput ``F(n, nu) = n * R(n, nu * gamma, eps)`` in the joint variables
(blocklength, power-allocation weight).  ``F_nn`` is strictly positive
everywhere, so the definiteness of the Hessian is decided entirely by its
determinant, which (after clearing positive factors) is the downward parabola
``-4 n + B sqrt(n) + C`` in ``sqrt(n)``: positive-definite curvature holds for
blocklengths *below* the squared root returned by ``n_rt`` and a saddle
beyond it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .numerics import RootBracket, bisect, inv_q

__all__ = [
    "QosSpec",
    "RatePoint",
    "capacity_dispersion",
    "achievable_rate",
    "rate_point",
    "f_function",
    "hessian_F",
    "n_rt",
    "n_rt_residual",
    "convexity_quadratic",
    "rate_zero_snr",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class QosSpec:
    """Delay-QoS and coding-length parameters of one user.

    Attributes:
        theta: queue decay exponent per bit, > 0.  The per-channel-use exponent
            applied to a rate in bits/use is ``theta * blocklength`` under the
            block-normalized convention and ``theta`` directly under the
            per-use convention; see the effective-capacity layer.
        epsilon: decoding error probability, restricted to ``(0, 0.5)``: the
            monotonicity and concavity guarantees this package validates are
            proved on that interval (beyond 1/2 the dispersion back-off changes
            sign and they fail).
        blocklength: channel uses per block, integer >= n_threshold.
        n_threshold: smallest blocklength at which the normal approximation is
            trusted, default 100.
    """

    theta: float
    epsilon: float
    blocklength: int
    n_threshold: int = 100

    def __post_init__(self) -> None:
        if not (math.isfinite(self.theta) and self.theta > 0.0):
            raise DomainError(f"theta must be positive and finite, got {self.theta}")
        if not (0.0 < self.epsilon < 0.5):
            raise DomainError(
                f"epsilon must lie in (0, 0.5), got {self.epsilon}"
            )
        if int(self.n_threshold) != self.n_threshold or self.n_threshold < 1:
            raise DomainError(
                f"n_threshold must be a positive integer, got {self.n_threshold}"
            )
        if int(self.blocklength) != self.blocklength:
            raise DomainError(f"blocklength must be an integer, got {self.blocklength}")
        if self.blocklength < self.n_threshold:
            raise DomainError(
                f"blocklength {self.blocklength} below threshold {self.n_threshold}"
            )

    @property
    def beta(self) -> float:
        """``theta / ln 2`` -- the QoS exponent expressed per nat."""
        return self.theta / _LN2


@dataclass(frozen=True)
class RatePoint:
    """One evaluated rate: Shannon term, dispersion, and their combination."""

    capacity: float
    dispersion: float
    rate: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.dispersion < 1.0):
            raise DomainError(f"dispersion must lie in [0, 1), got {self.dispersion}")
        if self.rate > self.capacity + 1e-12 * max(1.0, abs(self.capacity)):
            raise DomainError(
                f"rate {self.rate} exceeds capacity {self.capacity}"
            )


def capacity_dispersion(snr):
    """``(log2(1 + g), 1 - (1 + g)^-2)`` for ``g >= 0``; vectorized.

    The dispersion is computed as ``x * (2 + x) / (1 + x)^2`` with ``x = g``
    written via ``g * (g + 2)`` to avoid the catastrophic cancellation of
    ``1 - (1+g)^-2`` at small ``g``.
    """
    g = np.asarray(snr, dtype=float)
    if np.any(g < 0.0) or not np.all(np.isfinite(g)):
        raise DomainError("snr must be finite and non-negative")
    one_plus = 1.0 + g
    capacity = np.log1p(g) / _LN2
    dispersion = g * (g + 2.0) / (one_plus * one_plus)
    if np.ndim(snr) == 0:
        return float(capacity), float(dispersion)
    return capacity, dispersion


def achievable_rate(snr, q: QosSpec):
    """Normal-approximation rate in bits per channel use; vectorized over snr.

    Not clamped at zero: small SNRs legitimately produce negative values,
    meaning the back-off exceeds capacity at this blocklength.
    """
    capacity, dispersion = capacity_dispersion(snr)
    backoff = np.sqrt(dispersion / q.blocklength) * inv_q(q.epsilon) / _LN2
    out = capacity - backoff
    return float(out) if np.ndim(snr) == 0 else out


def rate_point(snr: float, q: QosSpec) -> RatePoint:
    capacity, dispersion = capacity_dispersion(float(snr))
    rate = capacity - math.sqrt(dispersion / q.blocklength) * inv_q(q.epsilon) / _LN2
    return RatePoint(capacity=capacity, dispersion=dispersion, rate=rate)


def _check_point(n: float, nu: float, snr: float, epsilon: float) -> None:
    if not (math.isfinite(n) and n > 0.0):
        raise DomainError(f"n must be positive, got {n}")
    if not (math.isfinite(nu) and nu > 0.0):
        raise DomainError(f"nu must be positive, got {nu}")
    if not (math.isfinite(snr) and snr > 0.0):
        raise DomainError(f"snr must be positive, got {snr}")
    if not (0.0 < epsilon < 0.5):
        raise DomainError(f"epsilon must lie in (0, 0.5), got {epsilon}")


def f_function(n: float, nu: float, snr: float, epsilon: float) -> float:
    """Block throughput ``F(n, nu) = n * R(n, nu * snr, epsilon)`` in bits.

    The two-variable surface whose curvature decides when the joint
    power/blocklength optimization is well posed; ``F / n`` is exactly
    :func:`achievable_rate` at SINR ``nu * snr``.
    """
    if not (math.isfinite(n) and n > 0.0):
        raise DomainError(f"n must be positive, got {n}")
    if not (math.isfinite(nu) and nu >= 0.0):
        raise DomainError(f"nu must be non-negative, got {nu}")
    if not (math.isfinite(snr) and snr >= 0.0):
        raise DomainError(f"snr must be non-negative, got {snr}")
    if not (0.0 < epsilon < 0.5):
        raise DomainError(f"epsilon must lie in (0, 0.5), got {epsilon}")
    s = nu * snr
    capacity = math.log1p(s) / _LN2
    dispersion = s * (s + 2.0) / ((1.0 + s) * (1.0 + s))
    return n * capacity - math.sqrt(dispersion * n) * inv_q(epsilon) / _LN2


def hessian_F(n: float, nu: float, snr: float, epsilon: float) -> np.ndarray:
    """Closed-form Hessian of :func:`f_function` w.r.t. ``(n, nu)``.

    With ``s = nu * snr``, ``abar = 1 + s`` and ``bbar = sqrt(s * (s + 2))``
    (so ``sqrt(V) = bbar / abar``), the entries are::

        F_nn = sqrt(V) * Qinv(eps) / (4 * ln2) * n^(-3/2)
        F_nnu = snr / (abar * ln2)
                - Qinv(eps) * snr / (2 * sqrt(n) * ln2 * abar^2 * bbar)
        F_nunu = -n * snr^2 / (abar^2 * ln2)
                 + sqrt(n) * Qinv(eps) * snr^2 * (3 s^2 + 6 s + 1)
                   / (ln2 * abar^3 * bbar^3)

    Deliberately *not* computed via finite differences; tests cross-check it
    against central differences instead.
    """
    _check_point(n, nu, snr, epsilon)
    s = nu * snr
    qi = inv_q(epsilon)
    abar = 1.0 + s
    bbar = math.sqrt(s * (s + 2.0))
    sqrt_v = bbar / abar
    root_n = math.sqrt(n)
    f_nn = sqrt_v * qi / (4.0 * _LN2) * n ** -1.5
    f_nnu = snr / (abar * _LN2) - qi * snr / (
        2.0 * root_n * _LN2 * abar * abar * bbar
    )
    f_nunu = -n * snr * snr / (abar * abar * _LN2) + (
        root_n * qi * snr * snr * (3.0 * s * s + 6.0 * s + 1.0)
        / (_LN2 * abar ** 3 * bbar ** 3)
    )
    return np.array([[f_nn, f_nnu], [f_nnu, f_nunu]])


def _quadratic_coefficients(nu: float, snr: float, epsilon: float) -> tuple[float, float]:
    """Coefficients ``(B, C)`` of the determinant quadratic in ``x = sqrt(n)``.

    ``det(hessian_F) * (4 * n * ln2^2 * abar^2 / snr^2)`` equals
    ``-4 n + B sqrt(n) + C`` with::

        B = Qinv(eps) * (4 / (abar * bbar) - bbar / abar)
        C = 3 * Qinv(eps)^2 / abar^2
    """
    s = nu * snr
    qi = inv_q(epsilon)
    abar = 1.0 + s
    bbar = math.sqrt(s * (s + 2.0))
    coef_b = qi * (4.0 / (abar * bbar) - bbar / abar)
    coef_c = 3.0 * qi * qi / (abar * abar)
    return coef_b, coef_c


def convexity_quadratic(x: float, nu: float, snr: float, epsilon: float) -> float:
    """The scaled determinant ``-4 x^2 + B x + C`` at ``x = sqrt(n)``.

    Positive exactly where ``hessian_F`` has positive determinant, so its
    positive root squared is the blocklength where the curvature regime flips.
    """
    _check_point(1.0, nu, snr, epsilon)
    coef_b, coef_c = _quadratic_coefficients(nu, snr, epsilon)
    return -4.0 * x * x + coef_b * x + coef_c


def n_rt(nu: float, snr: float, epsilon: float) -> float:
    """Positive root (in ``sqrt(n)``) of the Hessian-determinant quadratic.

    ``n_rt(...)**2`` is the blocklength at which ``det(hessian_F)`` changes
    sign at the given operating point: the determinant is positive for
    ``n < n_rt**2`` and negative beyond it.  Computed from the stable
    quadratic-root form ``(B + sqrt(B^2 + 16 C)) / 8``.
    """
    _check_point(1.0, nu, snr, epsilon)
    coef_b, coef_c = _quadratic_coefficients(nu, snr, epsilon)
    disc = math.sqrt(coef_b * coef_b + 16.0 * coef_c)
    return (coef_b + disc) / 8.0


def n_rt_residual(nu: float, snr: float, epsilon: float) -> float:
    """Relative residual of the quadratic at its computed root.

    The quadratic value at ``n_rt`` is normalized by the sum of its three
    term magnitudes there; a correctly computed root leaves only roundoff
    (well below 1e-8).
    """
    x = n_rt(nu, snr, epsilon)
    coef_b, coef_c = _quadratic_coefficients(nu, snr, epsilon)
    scale = 4.0 * x * x + abs(coef_b) * x + coef_c
    return abs(convexity_quadratic(x, nu, snr, epsilon)) / scale


def rate_zero_snr(q: QosSpec) -> float:
    """The positive SNR where the unclamped rate crosses zero.

    Below this point (but above zero) the dispersion back-off exceeds
    capacity, so clamped-rate integrands kink here: useful as a quadrature
    breakpoint.  Scales like ``2 * Qinv(eps)^2 / n`` for small values.
    """
    qi = inv_q(q.epsilon)
    guess = 2.0 * qi * qi / q.blocklength

    def f(log_g: float) -> float:
        return achievable_rate(math.exp(log_g), q)

    bracket = RootBracket(
        lo=math.log(guess) - 12.0,
        hi=math.log(guess) + 12.0,
        tolerance=1e-13,
        max_iterations=300,
    )
    return math.exp(bisect(f, bracket))
