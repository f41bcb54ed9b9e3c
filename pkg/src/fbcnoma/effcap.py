"""Effective capacity under decoding errors, and the power policy maximizing it.

Conventions
-----------
All effective capacities are reported in bits per channel use.  Two exponent
normalizations are offered:

* ``PER_USE`` -- the QoS exponent ``theta`` is applied directly to the rate in
  bits/use: ``EC = -(1/theta) * ln E[eps + (1-eps) * exp(-theta * R+)]``.
* ``DEF_ONE`` -- ``theta`` is per *bit* and a block carries ``n * R`` bits, so
  the working exponent is ``theta * n`` and the result is normalized back to
  one channel use.  Numerically ``DEF_ONE(theta, n) == PER_USE(theta * n)``.

The mixture ``eps + (1-eps) * exp(-theta' * max(R, 0))`` is evaluated as
``1 + (1-eps) * expm1(-theta' * R+)`` and the outer log as ``log1p`` of the
expectation of that difference: at ``theta' ~ 1e-9`` the naive form loses all
significant digits, this form keeps ~1e-12 relative accuracy (the vanishing-
exponent limit ``(1-eps) * E[R+]`` is an acceptance check).

The optimal allocation against Nakagami fading has the water-filling-like form
``nu(g) = K * g^(-beta/(beta+1))`` above an outage cutoff and 0 below it, with
``K`` fixed by the unit-mean power constraint ``E[nu] = 1`` through a scalar
multiplier ``lam`` (solved by bisection in ``ln lam``).  Note ``nu`` jumps to a
*positive* value at the cutoff, so the cutoff is always registered as a
quadrature breakpoint.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .channel import DecodingOrder, FadingSpec, SicScenario, expect_snr, fading_pair, sample_snr
from .errors import DomainError, InfeasibleError, NonConvergenceError, SeriesDivergenceWarning
from .fbc import QosSpec, achievable_rate, rate_zero_snr
from .numerics import QuadratureSpec, RootBracket, bisect, inv_q, upper_incomplete_gamma

__all__ = [
    "Normalization",
    "EcMethod",
    "SicMode",
    "EcResult",
    "PowerPolicy",
    "OrderSelection",
    "effective_capacity",
    "effective_capacity_mc",
    "mean_allocation",
    "solve_policy_user2",
    "solve_policy_user1",
    "select_order",
    "ec_max_exact",
    "ec_max_approx",
    "blocklength_monotonicity_check",
    "MonotonicityReport",
]

_LN2 = math.log(2.0)


class Normalization(enum.Enum):
    PER_USE = "PerUse"
    DEF_ONE = "DefOne"


class EcMethod(enum.Enum):
    QUADRATURE = "Quadrature"
    MONTE_CARLO = "MonteCarlo"
    CLOSED_FORM = "ClosedForm"
    CLOSED_FORM_APPROX = "ClosedFormApprox"


class SicMode(enum.Enum):
    PERFECT = "perfect"
    IMPERFECT = "imperfect"


@dataclass(frozen=True)
class EcResult:
    """An evaluated effective capacity.

    ``inner_expectation`` is the mixture expectation
    ``E[eps + (1-eps) * exp(-theta' R+)]`` the log was taken of; it always lies
    in ``[eps, 1]`` (up to roundoff), which is a cheap integration sanity
    check exposed to callers.
    """

    value: float
    normalization: Normalization
    inner_expectation: float
    method: EcMethod

    def __post_init__(self) -> None:
        if not (0.0 < self.inner_expectation <= 1.0 + 1e-6):
            raise DomainError(
                f"inner expectation {self.inner_expectation} outside (0, 1]"
            )
        if not math.isfinite(self.value):
            raise DomainError(f"effective capacity is not finite: {self.value}")


@dataclass(frozen=True)
class PowerPolicy:
    """Closed-form EC-optimal allocation ``nu(g)``, normalized to ``E[nu] = 1``.

    Attributes:
        lam: the power-constraint multiplier (solved, not chosen).
        beta: QoS exponent per nat, ``theta / ln 2``.
        cutoff: outage threshold ``lam / beta``; no power below it.
        epsilon: decoding error probability entering the ``(1 - eps)`` mixture
            weight.
        blocklength: channel uses per block.
        mean_power: average transmit power budget (watts).  The allocation is
            scale-free (``E[nu] = 1``), so this is bookkeeping for energy
            accounting, not part of ``nu``.
        rate_epsilon: error probability inside the dispersion back-off.  Equal
            to ``epsilon`` except under imperfect interference cancellation,
            where the residual-interference analysis puts the *other* user's
            error probability there.
    """

    lam: float
    beta: float
    cutoff: float
    epsilon: float
    blocklength: int
    mean_power: float
    rate_epsilon: float

    def __post_init__(self) -> None:
        for name in ("lam", "beta", "cutoff", "mean_power"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise DomainError(f"{name} must be positive and finite, got {v}")
        for name in ("epsilon", "rate_epsilon"):
            v = getattr(self, name)
            if not (0.0 < v < 0.5):
                raise DomainError(f"{name} must lie in (0, 0.5), got {v}")
        if self.blocklength < 1:
            raise DomainError(f"blocklength must be >= 1, got {self.blocklength}")

    @property
    def exponent_b(self) -> float:
        """``theta * Qinv(rate_eps) / (sqrt(n) * ln 2) = beta * Qinv / sqrt(n)``."""
        return self.beta * inv_q(self.rate_epsilon) / math.sqrt(self.blocklength)

    @property
    def a_tilde(self) -> float:
        """``(1 - eps) * exp(exponent_b) / lam`` -- the effective-SINR scale."""
        return (1.0 - self.epsilon) * math.exp(self.exponent_b) / self.lam

    def effective_sinr(self, snr):
        """``nu(g) * g = (a_tilde * beta * g)^(1/(beta+1))`` above the cutoff."""
        g = np.atleast_1d(np.asarray(snr, dtype=float))
        out = np.zeros_like(g)
        on = g >= self.cutoff
        out[on] = np.power(self.a_tilde * self.beta * g[on], 1.0 / (self.beta + 1.0))
        return float(out[0]) if np.ndim(snr) == 0 else out

    def __call__(self, snr):
        g = np.atleast_1d(np.asarray(snr, dtype=float))
        out = np.zeros_like(g)
        on = g >= self.cutoff
        out[on] = np.power(
            self.a_tilde * self.beta * g[on], 1.0 / (self.beta + 1.0)
        ) / g[on]
        out_scalar = np.ndim(snr) == 0
        return float(out[0]) if out_scalar else out


@dataclass(frozen=True)
class OrderSelection:
    """Sum effective capacity of each decoding order and the winner."""

    chosen: DecodingOrder
    ec_order1: float
    ec_order2: float


def _exponent(q: QosSpec, normalization: Normalization) -> float:
    if normalization is Normalization.PER_USE:
        return q.theta
    if normalization is Normalization.DEF_ONE:
        return q.theta * q.blocklength
    raise DomainError(f"unknown normalization {normalization!r}")


def _mixture_value(theta_exp: float, inner_m1: float) -> float:
    # inner = 1 + E[(1-eps) * expm1(-theta' R+)]; EC = -log(inner)/theta'.
    return -math.log1p(inner_m1) / theta_exp


def _ec_quadrature(
    theta_exp: float,
    mix_eps: float,
    rate_q: QosSpec,
    fading: FadingSpec,
    policy: Callable | None,
    quad: QuadratureSpec,
    breakpoints: Sequence[float],
) -> tuple[float, float]:
    """Returns ``(value, inner_expectation)`` for the general mixture average.

    ``mix_eps`` may exceed ``rate_q.epsilon``'s domain: the mixture weight is
    well defined on ``(0, 1]`` even where the policy theory is not, and the
    degenerate-limit checks drive it there on purpose.
    """
    if not (0.0 < mix_eps <= 1.0):
        raise DomainError(f"mixture epsilon must lie in (0, 1], got {mix_eps}")

    def integrand(g: np.ndarray) -> np.ndarray:
        s = g if policy is None else np.asarray(policy(g), dtype=float) * g
        rate = np.maximum(achievable_rate(np.maximum(s, 0.0), rate_q), 0.0)
        return (1.0 - mix_eps) * np.expm1(-theta_exp * rate)

    inner_m1 = expect_snr(integrand, fading, quad, breakpoints=breakpoints)
    inner_m1 = min(inner_m1, 0.0)  # roundoff guard: the integrand is <= 0
    return _mixture_value(theta_exp, inner_m1), 1.0 + inner_m1


def _auto_breakpoints(q: QosSpec, policy) -> tuple[float, ...]:
    if isinstance(policy, PowerPolicy):
        return _policy_breakpoints(policy, q)
    if policy is None:
        return (rate_zero_snr(q),)
    return ()


def _policy_breakpoints(policy: PowerPolicy, q: QosSpec) -> tuple[float, ...]:
    """Cutoff, unit-effective-SINR point, and clamped-rate kink of a policy."""
    scale = policy.a_tilde * policy.beta
    pts = [policy.cutoff, 1.0 / scale]
    s_zero = _rate_zero_effective_sinr(q.blocklength, policy.rate_epsilon)
    pts.append(s_zero ** (policy.beta + 1.0) / scale)
    return tuple(pts)


def _rate_zero_effective_sinr(blocklength: int, epsilon: float) -> float:
    """The ``s > 1`` root of ``log2 s = sqrt((1 - s^-2)/n) * Qinv(eps)/ln2``."""
    qi = inv_q(epsilon)
    root_n = math.sqrt(blocklength)

    def f(s: float) -> float:
        return math.log(s) - math.sqrt(max(1.0 - 1.0 / (s * s), 0.0)) * qi / root_n

    return bisect(f, RootBracket(1.0 + 1e-9, 64.0, tolerance=1e-13))


def effective_capacity(
    q: QosSpec,
    fading: FadingSpec,
    policy: Callable | PowerPolicy | None,
    quad: QuadratureSpec = QuadratureSpec(),
    *,
    normalization: Normalization = Normalization.PER_USE,
    breakpoints: Sequence[float] | None = None,
) -> EcResult:
    """Effective capacity of the faded finite-blocklength link under ``policy``.

    ``policy`` maps SNR to the allocation weight ``nu`` (vectorized); ``None``
    means constant full power (``nu = 1``).  ``breakpoints`` override the
    automatically derived integrand kink locations.
    """
    theta_exp = _exponent(q, normalization)
    bp = _auto_breakpoints(q, policy) if breakpoints is None else tuple(breakpoints)
    value, inner = _ec_quadrature(theta_exp, q.epsilon, q, fading, policy, quad, bp)
    return EcResult(
        value=value,
        normalization=normalization,
        inner_expectation=inner,
        method=EcMethod.QUADRATURE,
    )


def effective_capacity_mc(
    q: QosSpec,
    fading: FadingSpec,
    policy: Callable | PowerPolicy | None,
    *,
    seed: int,
    count: int = 200_000,
    normalization: Normalization = Normalization.PER_USE,
) -> EcResult:
    """Monte Carlo counterpart of :func:`effective_capacity` (for cross-checks)."""
    theta_exp = _exponent(q, normalization)
    g = sample_snr(fading, seed, count)
    s = g if policy is None else np.asarray(policy(g), dtype=float) * g
    rate = np.maximum(achievable_rate(np.maximum(s, 0.0), q), 0.0)
    inner_m1 = float(np.mean((1.0 - q.epsilon) * np.expm1(-theta_exp * rate)))
    return EcResult(
        value=_mixture_value(theta_exp, inner_m1),
        normalization=normalization,
        inner_expectation=1.0 + inner_m1,
        method=EcMethod.MONTE_CARLO,
    )


def mean_allocation(
    policy: PowerPolicy,
    fading: FadingSpec,
    quad: QuadratureSpec = QuadratureSpec(),
) -> float:
    """``E[nu(G)]`` -- equals 1 for a correctly normalized policy."""
    return expect_snr(policy, fading, quad, breakpoints=(policy.cutoff,))


def _solve_policy(
    *,
    beta: float,
    blocklength: int,
    mix_eps: float,
    rate_eps: float,
    fading: FadingSpec,
    mean_power: float,
    quad: QuadratureSpec,
) -> PowerPolicy:
    """Find ``lam`` such that ``E[nu] = 1`` by bisection in ``ln lam``.

    ``E[nu]`` is strictly decreasing in ``lam`` (the scale shrinks and the
    cutoff grows), so a sign change brackets the unique root.  The initial
    bracket ``[1e-9, 1e6] * beta`` is widened by factors of 10 when the
    residual does not change sign across it.
    """

    def build(lam: float) -> PowerPolicy:
        return PowerPolicy(
            lam=lam,
            beta=beta,
            cutoff=lam / beta,
            epsilon=mix_eps,
            blocklength=blocklength,
            mean_power=mean_power,
            rate_epsilon=rate_eps,
        )

    def residual(log_lam: float) -> float:
        return mean_allocation(build(math.exp(log_lam)), fading, quad) - 1.0

    lo = math.log(1e-9 * beta)
    hi = math.log(1e6 * beta)
    grow = math.log(10.0)
    f_lo = residual(lo)
    f_hi = residual(hi)
    expansions = 0
    while f_lo < 0.0 or f_hi > 0.0:
        # f_lo < 0: even the smallest lam under-spends; push the bracket down.
        if f_lo < 0.0:
            lo -= grow
            f_lo = residual(lo)
        if f_hi > 0.0:
            hi += grow
            f_hi = residual(hi)
        expansions += 1
        if expansions > 60:
            raise InfeasibleError(
                "no power-constraint multiplier balances E[nu] = 1 for "
                f"beta={beta}, fading={fading}"
            )
    log_lam = bisect(residual, RootBracket(lo, hi, tolerance=1e-9, max_iterations=200))
    policy = build(math.exp(log_lam))
    resid = mean_allocation(policy, fading, quad) - 1.0
    if abs(resid) > 1e-6:
        raise NonConvergenceError(
            f"power-constraint residual {resid} exceeds 1e-6 after solving",
            iterates=[policy.lam],
        )
    return policy


def solve_policy_user2(
    q: QosSpec,
    fading: FadingSpec,
    mean_power: float,
    quad: QuadratureSpec = QuadratureSpec(),
) -> PowerPolicy:
    """EC-optimal allocation for the interference-free (second-decoded) user."""
    if not (math.isfinite(mean_power) and mean_power > 0.0):
        raise DomainError(f"mean_power must be positive, got {mean_power}")
    return _solve_policy(
        beta=q.beta,
        blocklength=q.blocklength,
        mix_eps=q.epsilon,
        rate_eps=q.epsilon,
        fading=fading,
        mean_power=mean_power,
        quad=quad,
    )


def solve_policy_user1(
    q: QosSpec,
    fading: FadingSpec,
    mean_power: float,
    mode: SicMode,
    *,
    interferer_epsilon: float | None = None,
    quad: QuadratureSpec = QuadratureSpec(),
) -> PowerPolicy:
    """EC-optimal allocation for the first-decoded user.

    Under ``SicMode.PERFECT`` the problem is identical in form to the
    interference-free user (only the SINR statistics differ, which the caller
    encodes in ``fading``).  Under ``SicMode.IMPERFECT`` the dispersion term
    carries the *interferer's* decoding error probability
    (``interferer_epsilon``, required), because the residual-interference
    event is the other user's failed cancellation; ``fading`` should then be
    the statistics of the channel the residual analysis averages over.
    """
    if not (math.isfinite(mean_power) and mean_power > 0.0):
        raise DomainError(f"mean_power must be positive, got {mean_power}")
    if mode is SicMode.PERFECT:
        rate_eps = q.epsilon
    elif mode is SicMode.IMPERFECT:
        if interferer_epsilon is None:
            raise DomainError("imperfect cancellation requires interferer_epsilon")
        rate_eps = float(interferer_epsilon)
    else:
        raise DomainError(f"unknown SIC mode {mode!r}")
    return _solve_policy(
        beta=q.beta,
        blocklength=q.blocklength,
        mix_eps=q.epsilon,
        rate_eps=rate_eps,
        fading=fading,
        mean_power=mean_power,
        quad=quad,
    )


def select_order(
    scenario: SicScenario,
    m1: float,
    m2: float,
    q1: QosSpec,
    q2: QosSpec,
    quad: QuadratureSpec = QuadratureSpec(),
    *,
    mode: SicMode = SicMode.PERFECT,
    residual_mode: str = "post_sic",
) -> OrderSelection:
    """Pick the decoding order maximizing the sum of the users' EC.

    Both orders are evaluated with each user's own optimal policy; the
    objective is the unweighted sum.  Ties resolve to decoding user 1 first.
    """

    def sum_ec(order: DecodingOrder) -> float:
        f1, f2 = fading_pair(scenario, m1, m2, order, residual_mode=residual_mode)
        pol2 = solve_policy_user2(q2, f2, scenario.p2, quad)
        ec2 = effective_capacity(q2, f2, pol2, quad).value
        if mode is SicMode.PERFECT:
            pol1 = solve_policy_user1(q1, f1, scenario.p1, mode, quad=quad)
            ec1 = effective_capacity(q1, f1, pol1, quad).value
        else:
            # Residual-interference analysis: both the policy and the average
            # run over the interferer's channel statistics.
            pol1 = solve_policy_user1(
                q1, f2, scenario.p1, mode, interferer_epsilon=q2.epsilon, quad=quad
            )
            rate_q = QosSpec(
                theta=q1.theta,
                epsilon=q2.epsilon,
                blocklength=q1.blocklength,
                n_threshold=q1.n_threshold,
            )
            value, _ = _ec_quadrature(
                q1.theta,
                q1.epsilon,
                rate_q,
                f2,
                pol1,
                quad,
                _policy_breakpoints(pol1, rate_q),
            )
            ec1 = value
        return ec1 + ec2

    obj1 = sum_ec(DecodingOrder.USER1_FIRST)
    obj2 = sum_ec(DecodingOrder.USER2_FIRST)
    chosen = DecodingOrder.USER1_FIRST if obj1 >= obj2 else DecodingOrder.USER2_FIRST
    return OrderSelection(chosen=chosen, ec_order1=obj1, ec_order2=obj2)


def ec_max_exact(
    q: QosSpec,
    fading: FadingSpec,
    policy: PowerPolicy,
    quad: QuadratureSpec = QuadratureSpec(),
) -> EcResult:
    """Maximum effective capacity by integrating the optimal-policy rate law.

    Uses the high-SNR effective-SINR form ``R = log2 s - sqrt((1 - s^-2)/n)
    * Qinv / ln2`` with ``s = (a_tilde * beta * g)^(1/(beta+1))``, clamped at
    zero (the unclamped expression goes imaginary for ``s < 1``, i.e. exactly
    where the clamp binds anyway).  Blocks below the policy cutoff transmit
    nothing and contribute the full mixture weight 1.
    """
    if policy.blocklength != q.blocklength:
        raise DomainError(
            f"policy blocklength {policy.blocklength} != qos blocklength "
            f"{q.blocklength}"
        )
    theta = q.theta
    eps = q.epsilon
    qi = inv_q(policy.rate_epsilon)
    root_n = math.sqrt(q.blocklength)
    scale = policy.a_tilde * policy.beta

    def integrand(g: np.ndarray) -> np.ndarray:
        out = np.zeros_like(g)
        on = g >= policy.cutoff
        s = np.power(scale * g[on], 1.0 / (policy.beta + 1.0))
        v = np.maximum(1.0 - 1.0 / (s * s), 0.0)
        rate = np.log2(s) - np.sqrt(v) * qi / (root_n * _LN2)
        out[on] = (1.0 - eps) * np.expm1(-theta * np.maximum(rate, 0.0))
        return out

    bp = _policy_breakpoints(policy, q)
    inner_m1 = min(expect_snr(integrand, fading, quad, breakpoints=bp), 0.0)
    return EcResult(
        value=-math.log1p(inner_m1) / theta,
        normalization=Normalization.PER_USE,
        inner_expectation=1.0 + inner_m1,
        method=EcMethod.CLOSED_FORM,
    )


# Binomial coefficients of sqrt(1 - y) = 1 - sum_l COEF(l) y^l.
def _sqrt_series_coef(ell: int) -> float:
    if ell == 1:
        return 0.5
    return (
        math.factorial(2 * ell - 3)
        / (math.factorial(ell) * math.factorial(ell - 2) * 2.0 ** (2 * ell - 2))
    )


def ec_max_approx(
    q: QosSpec,
    fading: FadingSpec,
    policy: PowerPolicy,
    series_terms: int = 12,
) -> EcResult:
    """Series approximation (lower bound in practice) of :func:`ec_max_exact`.

    Only valid for Rayleigh fading (shape 1), where the conditional moments of
    the effective SINR are upper incomplete gamma functions:
    ``E[s^-k; G >= cutoff] = z^(-k/(beta+1)) * Gamma(1 - k/(beta+1), x0)`` with
    ``z = a_tilde * beta * mean_snr`` and ``x0 = cutoff / mean_snr``.  The
    dispersion root is expanded as ``sqrt(1 - s^-2) = 1 - sum_l c_l s^-2l``;
    the expansion is asymptotic, so summation stops early at the smallest term
    (with a :class:`SeriesDivergenceWarning`) when terms stop shrinking.
    """
    if fading.m != 1.0:
        raise DomainError(
            f"series approximation requires Rayleigh fading (m=1), got m={fading.m}"
        )
    if series_terms < 3:
        raise DomainError(f"series_terms must be >= 3, got {series_terms}")
    if policy.blocklength != q.blocklength:
        raise DomainError("policy and qos blocklengths differ")

    theta = q.theta
    eps = q.epsilon
    beta = policy.beta
    bp1 = beta + 1.0
    mean = fading.mean_snr
    x0 = policy.cutoff / mean
    if x0 > 700.0:
        # The transmit region has no mass: everything is outage.
        return EcResult(
            value=0.0,
            normalization=Normalization.PER_USE,
            inner_expectation=1.0,
            method=EcMethod.CLOSED_FORM_APPROX,
        )
    z = policy.a_tilde * beta * mean
    mass = math.exp(-x0)
    a_term = z ** (-beta / bp1) * upper_incomplete_gamma(1.0 / bp1, x0)
    b_exp = policy.exponent_b

    series = upper_incomplete_gamma(1.0, x0)  # = mass
    prev_mag = math.inf
    for ell in range(1, series_terms + 1):
        term = (
            _sqrt_series_coef(ell)
            * z ** (-2.0 * ell / bp1)
            * upper_incomplete_gamma((bp1 - 2.0 * ell) / bp1, x0)
        )
        if abs(term) >= prev_mag:
            warnings.warn(
                f"dispersion series stopped at term {ell}: asymptotic terms "
                "began growing",
                SeriesDivergenceWarning,
                stacklevel=2,
            )
            break
        series -= term
        prev_mag = abs(term)

    inner = (1.0 - mass) + eps * mass + (1.0 - eps) * a_term * math.exp(
        b_exp * series / mass
    )
    inner = min(inner, 1.0 + 1e-9)
    return EcResult(
        value=-math.log(inner) / theta,
        normalization=Normalization.PER_USE,
        inner_expectation=inner,
        method=EcMethod.CLOSED_FORM_APPROX,
    )


@dataclass(frozen=True)
class MonotonicityReport:
    """Outcome of a family of ordered-sequence checks."""

    total_sequences: int
    total_pairs: int
    violations: tuple
    sequences: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def blocklength_monotonicity_check(
    triples: Sequence[tuple[float, float, float]],
    *,
    blocklengths: Sequence[int] = tuple(range(100, 2001, 100)),
    m: float = 1.0,
    quad: QuadratureSpec = QuadratureSpec(),
    tolerance: float = 1e-10,
) -> MonotonicityReport:
    """Verify EC(n) is nondecreasing in blocklength at constant full power.

    ``triples`` are ``(theta, epsilon, mean_snr)`` operating points.  Each is
    swept over ``blocklengths`` under the per-use normalization; any adjacent
    decrease beyond ``tolerance`` (relative) is recorded as a violation.
    """
    violations = []
    sequences = []
    pairs = 0
    for idx, (theta, epsilon, mean_snr) in enumerate(triples):
        fading = FadingSpec(m=m, mean_snr=mean_snr)
        values = []
        for n in blocklengths:
            spec = QosSpec(theta=theta, epsilon=epsilon, blocklength=int(n))
            values.append(effective_capacity(spec, fading, None, quad).value)
        seq = np.asarray(values)
        sequences.append(seq)
        for k in range(1, len(seq)):
            pairs += 1
            drop = seq[k - 1] - seq[k]
            if drop > tolerance * max(1.0, abs(seq[k - 1])):
                violations.append(
                    (idx, int(blocklengths[k - 1]), int(blocklengths[k]),
                     float(seq[k - 1]), float(seq[k]))
                )
    return MonotonicityReport(
        total_sequences=len(sequences),
        total_pairs=pairs,
        violations=tuple(violations),
        sequences=tuple(sequences),
    )
