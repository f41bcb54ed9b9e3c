"""Command-line front end: point rate evaluation, figure sweeps, queue checks.

Subcommands
-----------
``rate``            one finite-blocklength rate point from flags alone.
``sweep``           named parameter sweeps written as CSV (see ``_SWEEPS``).
``queue-validate``  simulate the block queue at the effective-capacity arrival
                    rate and compare the measured tail decay to ``theta``.
``selftest``        curated in-process invariant suites (no network, no files).

Scenario files
--------------
Sweeps and queue validation read an INI scenario; every key below is required
except ``numerics.seed``.  Unknown sections or keys are rejected by name.

    [users]
    theta1 = 1e-3            ; per-bit QoS exponents
    theta2 = 1e-3
    epsilon1 = 1e-3          ; decoding error probabilities, in (0, 0.5)
    epsilon2 = 1e-3
    mean_power_dbm1 = 20
    mean_power_dbm2 = 20

    [channel]
    m1 = 1                   ; Nakagami shapes, >= 0.5
    m2 = 1
    mean_snr_db1 = 20        ; mean SNR of each decoupled link
    mean_snr_db2 = 20
    noise_dbm = -90

    [fbc]
    blocklength = 1000
    n_threshold = 100

    [power_model]
    eta = 1.4                ; amplifier slope
    circuit_power_dbm = 40
    cap_dbm = 60             ; radiated-power cap

    [numerics]
    quad_nodes = 64
    quad_rel_tol = 1e-9
    seed = 1234              ; optional

Individual keys can be overridden per run with ``--set section.key=value``.
Decibel conversions happen only here: ``x_lin = 10**(dB/10)`` and
``watts = 10**((dBm - 30)/10)``.

CSV output is RFC-4180-style (CRLF, header row), numbers formatted with
``%.12g``, followed by provenance footer lines prefixed ``#`` (scenario
digest, seed, tool version -- never timestamps, so identical runs produce
byte-identical files).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import math
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .channel import FadingSpec, expect_snr
from .effcap import (
    Normalization,
    ec_max_approx,
    ec_max_exact,
    effective_capacity,
    effective_capacity_mc,
    solve_policy_user2,
)
from .energyeff import PowerModel, ee_value, maximize_ee_fixed_point, maximize_ee_golden
from .errors import DomainError, FbcNomaError, ScenarioError
from .fbc import (
    QosSpec,
    achievable_rate,
    capacity_dispersion,
    convexity_quadratic,
    f_function,
    hessian_F,
    n_rt,
    n_rt_residual,
    rate_point,
)
from .numerics import QuadratureSpec, inv_q, q_function, upper_incomplete_gamma
from .queuesim import QueueSimConfig, tail_slope_sweep

_SCHEMA: dict[str, dict[str, type]] = {
    "users": {
        "theta1": float,
        "theta2": float,
        "epsilon1": float,
        "epsilon2": float,
        "mean_power_dbm1": float,
        "mean_power_dbm2": float,
    },
    "channel": {
        "m1": float,
        "m2": float,
        "mean_snr_db1": float,
        "mean_snr_db2": float,
        "noise_dbm": float,
    },
    "fbc": {
        "blocklength": int,
        "n_threshold": int,
    },
    "power_model": {
        "eta": float,
        "circuit_power_dbm": float,
        "cap_dbm": float,
    },
    "numerics": {
        "quad_nodes": int,
        "quad_rel_tol": float,
        "seed": int,
    },
}
_OPTIONAL_KEYS = {("numerics", "seed")}


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    return 10.0 * math.log10(watts) + 30.0


@dataclass(frozen=True)
class Scenario:
    """Parsed and unit-converted scenario, plus its provenance digest."""

    theta1: float
    theta2: float
    epsilon1: float
    epsilon2: float
    power1_w: float
    power2_w: float
    m1: float
    m2: float
    snr1: float
    snr2: float
    noise_w: float
    blocklength: int
    n_threshold: int
    eta: float
    circuit_w: float
    cap_w: float
    quad_nodes: int
    quad_rel_tol: float
    seed: int | None
    sha256: str

    def qos2(self, *, theta: float | None = None, epsilon: float | None = None,
             blocklength: int | None = None) -> QosSpec:
        return QosSpec(
            theta=self.theta2 if theta is None else theta,
            epsilon=self.epsilon2 if epsilon is None else epsilon,
            blocklength=self.blocklength if blocklength is None else blocklength,
            n_threshold=self.n_threshold,
        )

    def fading2(self, *, mean_snr: float | None = None) -> FadingSpec:
        return FadingSpec(m=self.m2, mean_snr=self.snr2 if mean_snr is None else mean_snr)

    def quad(self) -> QuadratureSpec:
        return QuadratureSpec(
            node_count=self.quad_nodes, relative_tolerance=self.quad_rel_tol
        )

    def power_model(self) -> PowerModel:
        return PowerModel(
            eta=self.eta, circuit_power=self.circuit_w, mean_power_cap=self.cap_w
        )

    @property
    def snr2_per_watt(self) -> float:
        return self.snr2 / self.power2_w


def parse_scenario(path: str, overrides: list[str] | None = None) -> Scenario:
    """Read, override, validate, and unit-convert a scenario file."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path!r}: {exc}") from exc
    digest = hashlib.sha256(raw)
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(raw.decode("utf-8"))
    except (UnicodeDecodeError, configparser.Error) as exc:
        raise ScenarioError(f"malformed scenario file {path!r}: {exc}") from exc
    for token in overrides or ():
        digest.update(b"\x00" + token.encode("utf-8"))
        head, eq, value = token.partition("=")
        section, dot, key = head.partition(".")
        if not eq or not dot or not section or not key:
            raise ScenarioError(
                f"override {token!r} must have the form section.key=value"
            )
        if section not in _SCHEMA or key not in _SCHEMA[section]:
            raise ScenarioError(f"unknown override target [{section}] {key!r}")
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, key, value)
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ScenarioError(f"unknown section [{section}] in {path!r}")
        for key in cp[section]:
            if key not in _SCHEMA[section]:
                raise ScenarioError(f"unknown key {key!r} in section [{section}]")
    values: dict[tuple[str, str], float | int] = {}
    for section, keys in _SCHEMA.items():
        if not cp.has_section(section):
            raise ScenarioError(f"missing section [{section}]")
        for key, typ in keys.items():
            if not cp.has_option(section, key):
                if (section, key) in _OPTIONAL_KEYS:
                    continue
                raise ScenarioError(f"missing key {key!r} in section [{section}]")
            text = cp.get(section, key)
            try:
                values[(section, key)] = typ(text)
            except ValueError as exc:
                raise ScenarioError(
                    f"key {key!r} in section [{section}] is not a valid "
                    f"{typ.__name__}: {text!r}"
                ) from exc

    def v(section: str, key: str):
        return values[(section, key)]

    return Scenario(
        theta1=v("users", "theta1"),
        theta2=v("users", "theta2"),
        epsilon1=v("users", "epsilon1"),
        epsilon2=v("users", "epsilon2"),
        power1_w=dbm_to_watts(v("users", "mean_power_dbm1")),
        power2_w=dbm_to_watts(v("users", "mean_power_dbm2")),
        m1=v("channel", "m1"),
        m2=v("channel", "m2"),
        snr1=db_to_linear(v("channel", "mean_snr_db1")),
        snr2=db_to_linear(v("channel", "mean_snr_db2")),
        noise_w=dbm_to_watts(v("channel", "noise_dbm")),
        blocklength=v("fbc", "blocklength"),
        n_threshold=v("fbc", "n_threshold"),
        eta=v("power_model", "eta"),
        circuit_w=dbm_to_watts(v("power_model", "circuit_power_dbm")),
        cap_w=dbm_to_watts(v("power_model", "cap_dbm")),
        quad_nodes=v("numerics", "quad_nodes"),
        quad_rel_tol=v("numerics", "quad_rel_tol"),
        seed=values.get(("numerics", "seed")),
        sha256=digest.hexdigest(),
    )


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def _write_csv(path: str, header: list[str], rows: list[list], scenario: Scenario,
               seed: int | None) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(cell) for cell in row])
        fh.write(f"# scenario_sha256={scenario.sha256}\r\n")
        fh.write(f"# seed={'none' if seed is None else seed}\r\n")
        fh.write(f"# tool_version={__version__}\r\n")


def _tag(x: float) -> str:
    return format(x, "g")


def _float_list(text: str) -> list[float]:
    try:
        items = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ScenarioError(f"bad numeric list {text!r}") from exc
    if not items:
        raise ScenarioError(f"empty numeric list {text!r}")
    return items


def _int_list(text: str) -> list[int]:
    return [int(round(x)) for x in _float_list(text)]


def _blocklength_grid(points: int) -> np.ndarray:
    return np.unique(np.round(np.linspace(200, 2000, points)).astype(int))


# ---------------------------------------------------------------------------
# sweeps


def _sweep_fig2_nrt(sc: Scenario, args) -> tuple[list[str], list[list]]:
    """Curvature-regime boundary vs SNR at constant allocation.

    Columns: gamma_db, gamma, n_rt_root (the sqrt-blocklength root),
    n_rt_blocklength (its square), residual_rel (quadratic residual at the
    root).  The boundary blocklength decreases with SNR.
    """
    eps = sc.epsilon2
    header = ["gamma_db", "gamma", "n_rt_root", "n_rt_blocklength", "residual_rel"]
    rows = []
    for gamma_db in np.linspace(0.0, 20.0, args.points):
        g = db_to_linear(float(gamma_db))
        root = n_rt(1.0, g, eps)
        rows.append([float(gamma_db), g, root, root * root,
                     n_rt_residual(1.0, g, eps)])
    return header, rows


def _sweep_fig3_power(sc: Scenario, args) -> tuple[list[str], list[list]]:
    """Efficiency-optimal average transmit power vs blocklength.

    Columns: blocklength, then ``opt_power_dbm_eps<e>`` per error probability
    (default curves 1e-6, 1e-4, 1e-3).  Uses the scenario's user-2 link,
    QoS exponent, and amplifier model.
    """
    eps_list = _float_list(args.eps_list or "1e-6,1e-4,1e-3")
    quad = sc.quad()
    pm = sc.power_model()
    fading = FadingSpec(m=sc.m2, mean_snr=sc.snr2_per_watt)
    header = ["blocklength"] + [f"opt_power_dbm_eps{_tag(e)}" for e in eps_list]
    rows = []
    for n in _blocklength_grid(args.points):
        row: list = [int(n)]
        for eps in eps_list:
            q = sc.qos2(epsilon=eps, blocklength=int(n))
            res = maximize_ee_golden(q, fading, pm, sc.power2_w, quad)
            row.append(watts_to_dbm(res.power))
        rows.append(row)
    return header, rows


def _sweep_fig4_ec(sc: Scenario, args) -> tuple[list[str], list[list]]:
    """Maximum effective capacity vs blocklength across QoS exponents.

    Columns: blocklength, then ``ec_theta<t>_eps<e>`` for each exponent in
    ``--theta-list`` (default 1e-6, 1e-3) and error probability in
    ``--eps-list`` (default 1e-3, 1e-4), each under its own optimal policy.
    """
    thetas = _float_list(args.theta_list or "1e-6,1e-3")
    eps_list = _float_list(args.eps_list or "1e-3,1e-4")
    quad = sc.quad()
    fading = sc.fading2()
    header = ["blocklength"] + [
        f"ec_theta{_tag(t)}_eps{_tag(e)}" for t in thetas for e in eps_list
    ]
    rows = []
    for n in _blocklength_grid(args.points):
        row: list = [int(n)]
        for theta in thetas:
            for eps in eps_list:
                q = sc.qos2(theta=theta, epsilon=eps, blocklength=int(n))
                policy = solve_policy_user2(q, fading, sc.power2_w, quad)
                row.append(ec_max_exact(q, fading, policy, quad).value)
        rows.append(row)
    return header, rows


def _sweep_fig5_exact_approx(sc: Scenario, args) -> tuple[list[str], list[list]]:
    """Exact vs series-approximated maximum EC vs blocklength (Rayleigh only).

    Columns: blocklength, then per exponent in ``--theta-list`` (default
    1e-6, 1e-3): ``ec_exact_theta<t>`` and ``ec_approx_theta<t>``.  The
    approximation is a lower bound in practice.
    """
    thetas = _float_list(args.theta_list or "1e-6,1e-3")
    quad = sc.quad()
    fading = sc.fading2()
    header = ["blocklength"]
    for t in thetas:
        header += [f"ec_exact_theta{_tag(t)}", f"ec_approx_theta{_tag(t)}"]
    rows = []
    for n in _blocklength_grid(args.points):
        row: list = [int(n)]
        for theta in thetas:
            q = sc.qos2(theta=theta, blocklength=int(n))
            policy = solve_policy_user2(q, fading, sc.power2_w, quad)
            row.append(ec_max_exact(q, fading, policy, quad).value)
            row.append(ec_max_approx(q, fading, policy).value)
        rows.append(row)
    return header, rows


def _sweep_fig6_eps(sc: Scenario, args) -> tuple[list[str], list[list]]:
    """Maximum EC vs decoding error probability at extreme QoS exponents.

    Columns: eps, then ``ec_theta<t>`` for each exponent in ``--theta-list``
    (default 1e-9 for the loose-QoS limit and 10 for the stringent one).
    The policy domain ends just below 1/2, so the grid spans [1e-6, 0.4999].
    """
    thetas = _float_list(args.theta_list or "1e-9,10")
    quad = sc.quad()
    fading = sc.fading2()
    header = ["eps"] + [f"ec_theta{_tag(t)}" for t in thetas]
    rows = []
    for eps in np.geomspace(1e-6, 0.4999, args.points):
        row: list = [float(eps)]
        for theta in thetas:
            q = sc.qos2(theta=theta, epsilon=float(eps))
            policy = solve_policy_user2(q, fading, sc.power2_w, quad)
            row.append(ec_max_exact(q, fading, policy, quad).value)
        rows.append(row)
    return header, rows


def _sweep_fig7_ee_power(sc: Scenario, args) -> tuple[list[str], list[list]]:
    """Energy efficiency vs average transmit power for several blocklengths.

    Columns: power_dbm, then ``ee_n<blocklength>`` per entry of ``--n-list``
    (default 800, 1000, 1200) at the exponent ``--theta`` (default 1e-6).
    The scenario cap must cover the swept range (raise ``power_model.cap_dbm``
    if not).
    """
    n_list = _int_list(args.n_list or "800,1000,1200")
    theta = args.theta if args.theta is not None else 1e-6
    quad = sc.quad()
    pm = sc.power_model()
    fading = FadingSpec(m=sc.m2, mean_snr=sc.snr2_per_watt)
    grid_dbm = np.linspace(0.0, 60.0, args.points + 1)[1:]
    if dbm_to_watts(float(grid_dbm[-1])) > sc.cap_w * (1.0 + 1e-12):
        raise ScenarioError(
            "power_model.cap_dbm is below the swept 60 dBm range; raise it "
            "for this sweep"
        )
    header = ["power_dbm"] + [f"ee_n{n}" for n in n_list]
    rows = []
    for p_dbm in grid_dbm:
        w = dbm_to_watts(float(p_dbm))
        row: list = [float(p_dbm)]
        for n in n_list:
            q = sc.qos2(theta=theta, blocklength=int(n))
            row.append(ee_value(w / sc.power2_w, q, fading, pm, sc.power2_w, quad).value)
        rows.append(row)
    return header, rows


def _sweep_fig8_ee_n(sc: Scenario, args) -> tuple[list[str], list[list]]:
    """Peak energy efficiency vs blocklength across exponents and error rates.

    Columns: blocklength, then ``max_ee_theta<t>_eps<e>`` for the grid of
    ``--theta-list`` (default 1e-6, 0.1) and ``--eps-list`` (default
    1e-3, 1e-4), maximized over the radiated power by golden section.
    """
    thetas = _float_list(args.theta_list or "1e-6,0.1")
    eps_list = _float_list(args.eps_list or "1e-3,1e-4")
    quad = sc.quad()
    pm = sc.power_model()
    fading = FadingSpec(m=sc.m2, mean_snr=sc.snr2_per_watt)
    header = ["blocklength"] + [
        f"max_ee_theta{_tag(t)}_eps{_tag(e)}" for t in thetas for e in eps_list
    ]
    rows = []
    for n in _blocklength_grid(args.points):
        row: list = [int(n)]
        for theta in thetas:
            for eps in eps_list:
                q = sc.qos2(theta=theta, epsilon=eps, blocklength=int(n))
                res = maximize_ee_golden(q, fading, pm, sc.power2_w, quad)
                row.append(res.value)
        rows.append(row)
    return header, rows


_SWEEPS = {
    "fig2_nrt": _sweep_fig2_nrt,
    "fig3_power_vs_n": _sweep_fig3_power,
    "fig4_ec_vs_n_theta": _sweep_fig4_ec,
    "fig5_ec_exact_vs_approx": _sweep_fig5_exact_approx,
    "fig6_ec_vs_eps": _sweep_fig6_eps,
    "fig7_ee_vs_power": _sweep_fig7_ee_power,
    "fig8_ee_vs_n": _sweep_fig8_ee_n,
}


# ---------------------------------------------------------------------------
# commands


def cmd_rate(args) -> int:
    if not 0.0 < args.epsilon < 1.0:
        raise ScenarioError(f"epsilon must lie in (0, 1), got {args.epsilon}")
    gamma = db_to_linear(args.gamma_db)
    q = QosSpec(
        theta=1.0,
        epsilon=args.epsilon,
        blocklength=args.blocklength,
        n_threshold=args.n_threshold,
    )
    point = rate_point(gamma, q)
    print(f"gamma_db = {_fmt(args.gamma_db)}")
    print(f"gamma = {_fmt(gamma)}")
    print(f"blocklength = {args.blocklength}")
    print(f"epsilon = {_fmt(args.epsilon)}")
    print(f"capacity_bits_per_use = {_fmt(point.capacity)}")
    print(f"dispersion = {_fmt(point.dispersion)}")
    print(f"rate_bits_per_use = {_fmt(point.rate)}")
    return 0


def cmd_sweep(args) -> int:
    scenario = parse_scenario(args.scenario, args.set)
    header, rows = _SWEEPS[args.name](scenario, args)
    _write_csv(args.out, header, rows, scenario, scenario.seed)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def cmd_queue_validate(args) -> int:
    scenario = parse_scenario(args.scenario, args.set)
    if args.theta <= 0.0:
        raise ScenarioError(f"theta must be positive, got {args.theta}")
    cfg = QueueSimConfig(
        arrival_rate=0.0,  # overridden per theta by the sweep
        blocks=args.blocks,
        seed=args.seed,
        thresholds=(1.0,),
        warmup_blocks=args.warmup_blocks,
    )
    (entry,) = tail_slope_sweep(
        [args.theta],
        scenario.fading2(),
        cfg,
        blocklength=scenario.blocklength,
        epsilon=scenario.epsilon2,
        quad=scenario.quad(),
    )
    est = entry.estimate
    print(f"theta = {_fmt(entry.theta)}")
    print(f"arrival_bits_per_block = {_fmt(entry.arrival_rate)}")
    if math.isnan(est.slope):
        print("tail_slope = nan (no threshold exceedances observed)")
    else:
        print(f"tail_slope = {_fmt(est.slope)}")
        print(f"relative_error = {_fmt(entry.relative_error)}")
        print(f"fit_r2 = {_fmt(est.fit_r2)}")
    if args.out:
        header = ["threshold_bits", "exceedance_prob"]
        rows = [[t, p] for t, p in est.per_threshold_probs]
        _write_csv(args.out, header, rows, scenario, args.seed)
    return 0


# ---------------------------------------------------------------------------
# selftest suites (each returns a failure description or None)


def _suite_special_functions() -> str | None:
    for p in (1e-9, 1e-6, 1e-3, 0.1, 0.25, 0.5, 0.75, 0.9, 1 - 1e-6):
        x = inv_q(p)
        if abs(q_function(x) - p) > 1e-12 * p:
            return f"inv_q roundtrip failed at p={p}"
    if abs(inv_q(1e-3) - 3.090232306167813) > 1e-12:
        return "inv_q(1e-3) off"
    ref = math.sqrt(math.pi) * math.erfc(1.0)
    if abs(upper_incomplete_gamma(0.5, 1.0) - ref) > 1e-13:
        return "upper_incomplete_gamma(0.5, 1) off"
    rng = np.random.default_rng(7)
    for _ in range(60):
        s = float(rng.uniform(-5.0, 5.0))
        x = float(rng.uniform(0.05, 40.0))
        lhs = upper_incomplete_gamma(s + 1.0, x)
        rhs = s * upper_incomplete_gamma(s, x) + x**s * math.exp(-x)
        if abs(lhs - rhs) > 1e-10 * max(abs(lhs), abs(rhs), 1e-280):
            return f"gamma recurrence failed at s={s}, x={x}"
    return None


def _suite_quadrature() -> str | None:
    # Moment tolerances sit just above the analytic truncation floor of the
    # default 40-mean-multiple cutoff at shape 0.5 (the heaviest admissible
    # tail: ~1.1e-8 of the mean, ~1.5e-7 of the second moment survive past
    # the cutoff there).  A genuine panel or substitution regression misses
    # by orders of magnitude, not by a factor of two.
    quad = QuadratureSpec()
    for m in (0.5, 1.0, 2.0, 4.0, 8.0):
        fading = FadingSpec(m=m, mean_snr=3.7)
        one = expect_snr(lambda g: np.ones_like(g), fading, quad)
        mean = expect_snr(lambda g: g, fading, quad)
        second = expect_snr(lambda g: g * g, fading, quad)
        if abs(one - 1.0) > 1e-8:
            return f"mass not 1 at m={m}: {one}"
        if abs(mean - 3.7) > 5e-8 * 3.7:
            return f"mean wrong at m={m}: {mean}"
        want = 3.7**2 * (1.0 + 1.0 / m)
        if abs(second - want) > 5e-7 * want:
            return f"second moment wrong at m={m}: {second} vs {want}"
    return None


def _suite_rate_law() -> str | None:
    c, v = capacity_dispersion(100.0)
    if abs(c - math.log2(101.0)) > 1e-14:
        return "capacity at snr 100 off"
    if abs(v - (1.0 - 101.0**-2)) > 1e-14:
        return "dispersion at snr 100 off"
    q = QosSpec(theta=1.0, epsilon=1e-3, blocklength=100)
    want = 1.0 - math.sqrt(0.75 / 100.0) * inv_q(1e-3) / math.log(2.0)
    if abs(achievable_rate(1.0, q) - want) > 1e-14:
        return "rate at (n=100, snr=1, eps=1e-3) off"
    grid = achievable_rate(np.linspace(0.5, 50.0, 40), q)
    if np.any(np.diff(grid) <= 0.0):
        return "rate not increasing in snr"
    return None


def _suite_curvature() -> str | None:
    for nu, g, eps in ((1.0, 1.0, 1e-6), (0.7, 5.0, 1e-3), (2.0, 30.0, 1e-2)):
        root = n_rt(nu, g, eps)
        if n_rt_residual(nu, g, eps) > 1e-10:
            return f"n_rt residual too large at ({nu}, {g}, {eps})"
        lo = convexity_quadratic(root * 0.9, nu, g, eps)
        hi = convexity_quadratic(root * 1.1, nu, g, eps)
        if not (lo > 0.0 > hi):
            return f"determinant sign pattern wrong around root at ({nu}, {g}, {eps})"
        hess = hessian_F(400.0, nu, g, eps)
        step_n = 400.0 * 1e-4
        fd_nn = (
            f_function(400.0 + step_n, nu, g, eps)
            - 2.0 * f_function(400.0, nu, g, eps)
            + f_function(400.0 - step_n, nu, g, eps)
        ) / step_n**2
        if abs(fd_nn - hess[0, 0]) > 1e-4 * abs(hess[0, 0]):
            return "F_nn disagrees with finite differences"
    return None


def _suite_policy() -> str | None:
    from .effcap import mean_allocation

    quad = QuadratureSpec()
    q = QosSpec(theta=1e-3, epsilon=1e-3, blocklength=1000)
    fading = FadingSpec(m=1.0, mean_snr=100.0)
    policy = solve_policy_user2(q, fading, 0.1, quad)
    resid = abs(mean_allocation(policy, fading, quad) - 1.0)
    if resid > 1e-6:
        return f"power constraint residual {resid}"
    ec_opt = effective_capacity(q, fading, policy, quad).value
    ec_const = effective_capacity(q, fading, None, quad).value
    if ec_opt < ec_const - 1e-9:
        return f"optimal policy below constant power: {ec_opt} < {ec_const}"
    return None


def _suite_ec_limits() -> str | None:
    quad = QuadratureSpec()
    fading = FadingSpec(m=1.0, mean_snr=100.0)
    q = QosSpec(theta=1e-9, epsilon=1e-3, blocklength=1000)
    ec = effective_capacity(q, fading, None, quad).value
    mean_rate = expect_snr(
        lambda g: np.maximum(achievable_rate(g, q), 0.0), fading, quad
    )
    want = (1.0 - q.epsilon) * mean_rate
    if abs(ec - want) > 1e-4 * want:
        return f"vanishing-theta limit off: {ec} vs {want}"
    q2 = QosSpec(theta=1e-3, epsilon=1e-3, blocklength=1000)
    def_one = effective_capacity(q2, fading, None, quad, normalization=Normalization.DEF_ONE)
    per_use = effective_capacity(
        QosSpec(theta=1.0, epsilon=1e-3, blocklength=1000), fading, None, quad
    )
    if abs(def_one.value - per_use.value) > 1e-12 * per_use.value:
        return "normalization identity violated"
    mc = effective_capacity_mc(
        q2, fading, None, seed=11, count=400_000,
        normalization=Normalization.DEF_ONE,
    )
    if abs(mc.value - def_one.value) > 0.05 * def_one.value:
        return f"Monte Carlo far from quadrature: {mc.value} vs {def_one.value}"
    return None


def _suite_energyeff() -> str | None:
    quad = QuadratureSpec()
    q = QosSpec(theta=1e-3, epsilon=1e-3, blocklength=1000)
    fading = FadingSpec(m=1.0, mean_snr=1000.0)  # per watt
    pm = PowerModel(eta=1.4, circuit_power=10.0, mean_power_cap=100.0)
    base = 0.1
    values = [
        ee_value(w / base, q, fading, pm, base, quad).value
        for w in np.geomspace(1e-3, 100.0, 80)
    ]
    d = np.diff(values)
    tol = 1e-12 * max(abs(v) for v in values)
    ups = np.nonzero(d > tol)[0]
    downs = np.nonzero(d < -tol)[0]
    if ups.size and downs.size and ups.max() > downs.min():
        return "efficiency not unimodal on the scan grid"
    golden = maximize_ee_golden(q, fading, pm, base, quad)
    fixed = maximize_ee_fixed_point(q, fading, pm, base, quad)
    if abs(golden.value - fixed.value) > 1e-4 * golden.value:
        return f"optimizers disagree: {golden.value} vs {fixed.value}"
    scaled = ee_value(golden.argmax_nu / 7.0, q, fading, pm, base * 7.0, quad)
    if abs(scaled.value - golden.value) > 1e-9 * golden.value:
        return "rescaling invariance broken"
    return None


def _suite_queue() -> str | None:
    from .queuesim import simulate_queue

    theta = 2e-3
    n = 500
    fading = FadingSpec(m=1.0, mean_snr=100.0)
    q = QosSpec(theta=theta, epsilon=1e-3, blocklength=n)
    quad = QuadratureSpec()
    ec = effective_capacity(q, fading, None, quad, normalization=Normalization.DEF_ONE).value
    cfg = QueueSimConfig(
        arrival_rate=n * ec,
        blocks=400_000,
        seed=2024,
        thresholds=tuple(np.linspace(2.5, 7.0, 6) / theta),
        warmup_blocks=5_000,
    )
    est = simulate_queue(q, fading, None, cfg)
    if math.isnan(est.slope):
        return "no exceedances in the calibrated run"
    rel = abs(est.slope - theta) / theta
    if rel > 0.35:
        return f"tail slope {est.slope} too far from theta {theta} (rel {rel:.3f})"
    idle = QueueSimConfig(
        arrival_rate=0.0,
        blocks=100_000,
        seed=5,
        thresholds=(10.0, 100.0),
    )
    est0 = simulate_queue(q, fading, None, idle)
    if any(p != 0.0 for _, p in est0.per_threshold_probs):
        return "zero-arrival queue produced exceedances"
    return None


_SELFTEST_SUITES = [
    ("special_functions", _suite_special_functions),
    ("quadrature", _suite_quadrature),
    ("rate_law", _suite_rate_law),
    ("curvature", _suite_curvature),
    ("policy", _suite_policy),
    ("ec_limits", _suite_ec_limits),
    ("energyeff", _suite_energyeff),
    ("queue", _suite_queue),
]


def cmd_selftest(args) -> int:
    failures = []
    for name, suite in _SELFTEST_SUITES:
        start = time.perf_counter()
        try:
            problem = suite()
        except FbcNomaError as exc:
            problem = f"raised {type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - start
        status = "PASS" if problem is None else "FAIL"
        print(f"{name}: {status} ({elapsed:.2f}s)")
        if problem is not None:
            print(f"  {problem}")
            failures.append(name)
    if failures:
        print(f"selftest failed: {', '.join(failures)}")
        return 1
    print("selftest passed")
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fbcnoma",
        description=(
            "Finite-blocklength rates, effective capacity, and energy "
            "efficiency for a two-user uplink pair"
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_rate = sub.add_parser("rate", help="one finite-blocklength rate point")
    p_rate.add_argument("--gamma-db", type=float, required=True,
                        help="SNR in dB")
    p_rate.add_argument("--blocklength", type=int, required=True)
    p_rate.add_argument("--epsilon", type=float, required=True,
                        help="decoding error probability in (0, 1)")
    p_rate.add_argument("--n-threshold", type=int, default=100)
    p_rate.set_defaults(func=cmd_rate)

    p_sweep = sub.add_parser("sweep", help="write a named parameter sweep as CSV")
    p_sweep.add_argument("name", choices=sorted(_SWEEPS))
    p_sweep.add_argument("--scenario", required=True)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--points", type=int, default=50)
    p_sweep.add_argument("--set", action="append", default=[],
                         metavar="SECTION.KEY=VALUE",
                         help="override one scenario value (repeatable)")
    p_sweep.add_argument("--theta", type=float, default=None,
                         help="single QoS exponent (fig7)")
    p_sweep.add_argument("--theta-list", default=None,
                         help="comma-separated QoS exponents (fig4/5/6/8)")
    p_sweep.add_argument("--eps-list", default=None,
                         help="comma-separated error probabilities (fig3/4/8)")
    p_sweep.add_argument("--n-list", default=None,
                         help="comma-separated blocklengths (fig7)")
    p_sweep.set_defaults(func=cmd_sweep)

    p_queue = sub.add_parser(
        "queue-validate",
        help="simulate the queue at the EC arrival rate and fit the tail",
    )
    p_queue.add_argument("--scenario", required=True)
    p_queue.add_argument("--theta", type=float, required=True,
                         help="per-bit QoS exponent to validate")
    p_queue.add_argument("--blocks", type=int, default=1_000_000)
    p_queue.add_argument("--warmup-blocks", type=int, default=10_000)
    p_queue.add_argument("--seed", type=int, required=True,
                         help="RNG seed (runs are reproducible bit-for-bit)")
    p_queue.add_argument("--out", default=None,
                         help="optional CSV of per-threshold probabilities")
    p_queue.add_argument("--set", action="append", default=[],
                         metavar="SECTION.KEY=VALUE")
    p_queue.set_defaults(func=cmd_queue_validate)

    p_self = sub.add_parser("selftest", help="run the curated invariant suites")
    p_self.set_defaults(func=cmd_selftest)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FbcNomaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
