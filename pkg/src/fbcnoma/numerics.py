"""Scalar special functions, quadrature, and 1-D solvers used everywhere else.

Design notes
------------
* ``inv_q`` is a rational initial guess polished by Newton iterations on our
  own ``q_function``; the two are therefore consistent to ~1e-15 relative by
  construction, which matters because rate formulas difference them against
  quantities of similar size.
* ``upper_incomplete_gamma`` extends scipy (which only covers ``s > 0``) to
  every real order via the downward recurrence
  ``gamma(s, x) = (gamma(s+1, x) - x**s * exp(-x)) / s``.
  The recurrence loses roughly a factor ``x/|s|`` of precision per step, so it
  is intended for the moderate-``x`` regime (``x <= ~50``) it is used in here.
* ``expect_over_pdf`` integrates expectations over densities supported on
  ``[0, inf)`` after the substitution ``g = u**2``, which removes the
  integrable singularity that shape parameters in ``[0.5, 1)`` put at the
  origin.  Panels are placed from distribution quantiles so that extremely
  concentrated densities (near point masses) are still resolved.  Every
  integral is evaluated twice (``N`` and ``2N`` nodes per panel) and the pair
  must agree before a value is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import special as _sp

from .errors import BracketError, DomainError, NonConvergenceError

__all__ = [
    "QuadratureSpec",
    "RootBracket",
    "q_function",
    "inv_q",
    "upper_incomplete_gamma",
    "expect_over_pdf",
    "bisect",
    "golden_section_max",
]

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy knobs for :func:`expect_over_pdf`.

    Attributes:
        node_count: Gauss-Legendre nodes per panel (the convergence check
            re-evaluates with twice as many).  At least 16.
        relative_tolerance: target relative accuracy; the N vs 2N node
            disagreement may not exceed ten times this value.  Must lie in
            ``(0, 1e-3]`` -- looser tolerances make the dual-evaluation check
            meaningless.
        upper_cutoff_multiplier: integration is truncated at this multiple of
            the distribution mean.  The heaviest admissible gamma tail (shape
            0.5) sets the floor: at 40 mean multiples the discarded tail is
            ~3e-10 in mass, ~1e-8 in the mean and ~1.5e-7 in the second
            moment; from shape 1 upward the entire tail is below 1e-15.
            Raise the multiplier when sub-1e-8 moment accuracy matters for
            shapes below 1.
    """

    node_count: int = 64
    relative_tolerance: float = 1e-9
    upper_cutoff_multiplier: float = 40.0

    def __post_init__(self) -> None:
        if self.node_count < 16:
            raise DomainError(f"node_count must be >= 16, got {self.node_count}")
        if not (0.0 < self.relative_tolerance <= 1e-3):
            raise DomainError(
                "relative_tolerance must lie in (0, 1e-3], got "
                f"{self.relative_tolerance}"
            )
        if self.upper_cutoff_multiplier <= 1.0:
            raise DomainError(
                "upper_cutoff_multiplier must exceed 1, got "
                f"{self.upper_cutoff_multiplier}"
            )


@dataclass(frozen=True)
class RootBracket:
    """Interval plus stopping rules for :func:`bisect`."""

    lo: float
    hi: float
    tolerance: float = 1e-12
    max_iterations: int = 200

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DomainError("bracket endpoints must be finite")
        if not self.lo < self.hi:
            raise DomainError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")
        if self.tolerance <= 0.0:
            raise DomainError("tolerance must be positive")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be >= 1")


def q_function(x):
    """Gaussian tail probability ``Q(x) = P(N(0,1) > x)``.

    Accepts scalars or arrays; scalar input returns a float.
    """
    out = 0.5 * _sp.erfc(np.asarray(x, dtype=float) / _SQRT2)
    return float(out) if np.isscalar(x) or np.ndim(x) == 0 else out


# Rational approximation coefficients for the standard normal quantile
# (Acklam).  Relative error ~1.15e-9 everywhere, which the Newton polish
# below drives to machine precision.
_ACK_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
          1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_ACK_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
          6.680131188771972e+01, -1.328068155288572e+01)
_ACK_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
          -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_ACK_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
          3.754408661907416e+00)


def _norm_quantile_estimate(p: float) -> float:
    a, b, c, d = _ACK_A, _ACK_B, _ACK_C, _ACK_D
    if p < 0.02425:
        q = math.sqrt(-2.0 * math.log(p))
        return ((((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
                / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0))
    if p > 1.0 - 0.02425:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        return -((((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
                 / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0))
    q = p - 0.5
    r = q * q
    return ((((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
            / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0))


def inv_q(p: float) -> float:
    """Inverse of :func:`q_function` on ``(0, 1)``.

    Satisfies ``q_function(inv_q(p)) == p`` to within 1e-12 relative (typically
    a few ulp): the rational estimate is refined with Newton steps computed
    against ``q_function`` itself.
    """
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"inv_q requires p in (0, 1), got {p}")
    if p > 0.5:
        # Reflect so the Newton residual q(x) - p is formed between two small
        # numbers (well-conditioned); 1 - p is exact for p >= 0.5.
        return -inv_q(1.0 - p)
    # Q^{-1}(p) = -Phi^{-1}(p)
    x = -_norm_quantile_estimate(p)
    for _ in range(4):
        err = q_function(x) - p
        if err == 0.0:
            break
        pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        if pdf <= 0.0 or not math.isfinite(pdf):
            break  # deep tail: the estimate is already as good as floats allow
        step = err / pdf
        x += step
        if abs(step) <= 1e-16 * max(1.0, abs(x)):
            break
    return x


def _lentz_upper_gamma(s: float, x: float) -> float:
    """Continued fraction for Gamma(s, x), modified Lentz iteration.

    Converges for x >= ~1 at any real order; this is the numerically stable
    route when the order is negative but |s| is smaller than x, where the
    downward recurrence would subtract nearly equal quantities at every rung
    near order ~ -x.
    """
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return math.exp(s * math.log(x) - x) * h
    raise NonConvergenceError(
        f"incomplete-gamma continued fraction stalled at s={s}, x={x}"
    )


def upper_incomplete_gamma(s: float, x: float) -> float:
    """Upper incomplete gamma ``integral_x^inf t**(s-1) e**(-t) dt`` for real ``s``.

    ``x`` must be strictly positive.  For ``s > 0`` this delegates to scipy's
    regularized routine.  For ``s <= 0`` (where the ordinary gamma integral
    still converges for ``x > 0``) the continued-fraction evaluation is used
    at ``x >= 1``; below that the fraction converges slowly, and the downward
    recurrence from an anchor order in ``[0, 1)`` is stable instead (its rungs
    only cancel near order ~ -x, impossible for x < 1), with the
    ``x**s * exp(-x)`` term evaluated in log space so large negative orders do
    not overflow prematurely.
    """
    s = float(s)
    x = float(x)
    if not (math.isfinite(s) and math.isfinite(x)):
        raise DomainError("upper_incomplete_gamma requires finite arguments")
    if x <= 0.0:
        raise DomainError(f"upper_incomplete_gamma requires x > 0, got {x}")
    if abs(s) < 1e-280:
        # s -> 0 limit; also keeps Gamma(s) (which overflows below ~5.6e-309)
        # out of the product form.
        return float(_sp.exp1(x))
    if s > 0.0:
        return float(_sp.gammaincc(s, x) * _sp.gamma(s))
    if x >= 1.0:
        return _lentz_upper_gamma(s, x)
    steps = int(math.ceil(-s))
    anchor = s + steps  # lies in [0, 1) ...
    if anchor >= 1.0:  # ... unless |s| is below float resolution of the sum
        anchor -= 1.0
        steps -= 1
    if anchor == 0.0:
        value = float(_sp.exp1(x))
    else:
        value = float(_sp.gammaincc(anchor, x) * _sp.gamma(anchor))
    log_x = math.log(x)
    order = anchor
    for _ in range(steps):
        order -= 1.0
        value = (value - math.exp(order * log_x - x)) / order
    return value


@lru_cache(maxsize=32)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return nodes, weights


# Probabilities whose quantiles seed the panel boundaries: dense in the bulk,
# with explicit deep-tail anchors on both sides.
_PANEL_PROBS = np.concatenate((
    [1e-8, 1e-6, 1e-5, 1e-4, 1e-3, 3e-3],
    np.linspace(0.01, 0.99, 33),
    [0.997, 0.999, 0.9999, 0.99999],
))


def _panel_boundaries(
    mean: float,
    upper: float,
    quantile: Callable[[np.ndarray], np.ndarray] | None,
    breakpoints: Iterable[float],
) -> np.ndarray:
    cuts = [np.array([0.0, upper])]
    if quantile is not None:
        bulk = np.asarray(quantile(_PANEL_PROBS), dtype=float)
        cuts.append(bulk)
        tail_start = max(float(bulk[-1]), 1e-12 * upper)
    else:
        # No distribution knowledge: uniform in u = sqrt(g) across the bulk.
        cuts.append(np.linspace(0.0, math.sqrt(upper), 33)[1:-1] ** 2)
        tail_start = mean
    if tail_start < upper:
        cuts.append(np.geomspace(max(tail_start, 1e-300), upper, 10)[1:-1])
    bp = np.asarray(list(breakpoints), dtype=float)
    if bp.size:
        cuts.append(bp)
    bounds = np.concatenate(cuts)
    bounds = bounds[(bounds >= 0.0) & (bounds <= upper)]
    bounds = np.unique(bounds)
    # Merge panels too thin to matter; they only add roundoff.
    keep = np.concatenate(([True], np.diff(bounds) > 1e-13 * upper))
    bounds = bounds[keep]
    if bounds[0] != 0.0:
        bounds = np.concatenate(([0.0], bounds))
    if bounds[-1] != upper:
        bounds = np.concatenate((bounds, [upper]))
    return bounds


def _panel_sum(
    f: Callable[[np.ndarray], np.ndarray],
    pdf: Callable[[np.ndarray], np.ndarray],
    u_bounds: np.ndarray,
    node_count: int,
) -> float:
    nodes, weights = _leggauss(node_count)
    lo = u_bounds[:-1][:, None]
    hi = u_bounds[1:][:, None]
    half = 0.5 * (hi - lo)
    u = half * nodes[None, :] + 0.5 * (hi + lo)
    g = u * u
    flat = g.reshape(-1)
    vals = np.asarray(f(flat), dtype=float) * np.asarray(pdf(flat), dtype=float)
    # d(gamma) = 2 u du
    integrand = vals.reshape(u.shape) * 2.0 * u
    return float(np.sum(np.sum(integrand * weights[None, :], axis=1) * half[:, 0]))


def expect_over_pdf(
    f: Callable[[np.ndarray], np.ndarray],
    pdf: Callable[[np.ndarray], np.ndarray],
    spec: QuadratureSpec,
    *,
    mean: float,
    quantile: Callable[[np.ndarray], np.ndarray] | None = None,
    breakpoints: Sequence[float] = (),
) -> float:
    """Compute ``E[f(G)] = integral_0^upper f(g) pdf(g) dg`` for ``G >= 0``.

    ``f`` and ``pdf`` must accept numpy arrays.  ``mean`` is the distribution
    mean (sets the truncation point ``upper_cutoff_multiplier * mean``);
    ``quantile``, when given, maps probabilities to quantiles and is used to
    concentrate panels where the mass is.  ``breakpoints`` are abscissae where
    the integrand is allowed to kink (e.g. a policy cutoff): they become panel
    edges so Gauss-Legendre only ever sees smooth pieces.

    Raises:
        NonConvergenceError: if the N-node and 2N-node evaluations disagree by
            more than ``10 * relative_tolerance``.
    """
    if not (math.isfinite(mean) and mean > 0.0):
        raise DomainError(f"mean must be positive and finite, got {mean}")
    upper = spec.upper_cutoff_multiplier * mean
    bounds = _panel_boundaries(mean, upper, quantile, breakpoints)
    u_bounds = np.sqrt(bounds)
    coarse = _panel_sum(f, pdf, u_bounds, spec.node_count)
    fine = _panel_sum(f, pdf, u_bounds, 2 * spec.node_count)
    scale = max(abs(coarse), abs(fine))
    if scale > 0.0 and abs(fine - coarse) > 10.0 * spec.relative_tolerance * scale:
        raise NonConvergenceError(
            "quadrature failed to converge: "
            f"{spec.node_count} nodes -> {coarse!r}, "
            f"{2 * spec.node_count} nodes -> {fine!r}"
        )
    return fine


def bisect(fn: Callable[[float], float], bracket: RootBracket) -> float:
    """Plain bisection for a sign change of ``fn`` inside ``bracket``.

    Stops when the interval width falls below ``tolerance * max(1, |mid|)``.

    Raises:
        BracketError: ``fn`` has the same sign at both endpoints.
        NonConvergenceError: iteration budget exhausted first.
    """
    lo, hi = bracket.lo, bracket.hi
    flo = fn(lo)
    if flo == 0.0:
        return lo
    fhi = fn(hi)
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise BracketError(
            f"no sign change on [{lo}, {hi}]: f(lo)={flo!r}, f(hi)={fhi!r}"
        )
    for _ in range(bracket.max_iterations):
        mid = 0.5 * (lo + hi)
        if (hi - lo) <= bracket.tolerance * max(1.0, abs(mid)):
            return mid
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if math.copysign(1.0, fm) == math.copysign(1.0, flo):
            lo, flo = mid, fm
        else:
            hi = mid
    raise NonConvergenceError(
        f"bisection did not reach tolerance {bracket.tolerance} in "
        f"{bracket.max_iterations} iterations"
    )


_INV_GOLD = (math.sqrt(5.0) - 1.0) / 2.0  # 0.618...


def golden_section_max(
    fn: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    *,
    max_iterations: int = 500,
) -> tuple[float, float]:
    """Golden-section maximization of a unimodal ``fn`` on ``[lo, hi]``.

    Deterministic: no randomness, fixed evaluation order.  Stops once the
    interval shrinks below ``tol * max(1, |lo|, |hi|)`` and returns the best
    abscissa with its value.  On a non-unimodal function this still terminates
    but only guarantees a local maximum.
    """
    if not lo < hi:
        raise DomainError(f"golden_section_max requires lo < hi, got [{lo}, {hi}]")
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    a, b = float(lo), float(hi)
    x1 = b - _INV_GOLD * (b - a)
    x2 = a + _INV_GOLD * (b - a)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(max_iterations):
        if (b - a) <= tol * max(1.0, abs(a), abs(b)):
            break
        if f1 < f2:
            a = x1
            x1, f1 = x2, f2
            x2 = a + _INV_GOLD * (b - a)
            f2 = fn(x2)
        else:
            b = x2
            x2, f2 = x1, f1
            x1 = b - _INV_GOLD * (b - a)
            f1 = fn(x1)
    if f1 >= f2:
        return x1, f1
    return x2, f2
