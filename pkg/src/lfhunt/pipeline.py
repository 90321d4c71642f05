"""End-to-end hunt pipeline: plan, resonate, align, evaluate, report.

A hunt fixes sigma0 in (1/2, 1), a base height T, and target angles theta_j
for k catalog L-functions.  The pipeline distributes its work as:

1. plan:      window center rho = log(T)/(2*M*c) (or an explicit override at
              desk scale), window half-width tau, phase targets xi_j.
2. resonate:  solve the phase system at the xi_j and round to unit phases
              theta_p per window prime.
3. align:     search [T, 2T] for t0 where t*log(p)/2pi sits near theta_p
              for all window primes at once (weighted nearest-integer
              objective with its infimum certificate).
4. evaluate:  branch-tracked log L_j on [t0 - tau, t0 + tau]; t_j maximizes
              Re e^(-i*theta_j) log L_j (grid argmax plus golden polish).
5. baseline:  the same statistic at uniformly random heights in [T, 2T],
              giving the percentile the achieved values sit at.

All randomness flows from the config seed; identical configs produce
byte-identical canonical JSON reports.  HUNT_THREADS caps evaluation
parallelism (grid and baseline values are independent; branch assembly is
sequential).
"""

from __future__ import annotations

import cmath
import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, asdict

import numpy as np

from .catalog import LFunctionSpec, builtin_dirichlet, builtin_zeta, chi3, chi4, \
    ingest_coefficients
from .diophantine import DiophantineInstance, chen_bound, lambda_exact, \
    lambda_lower_bound, objective, search_t
from .errors import ZeroCrossingError
from .evaluators import grid_heights, log_l_branch, log_l_point, value_at, \
    values_on_grid
from .primes import PrimeWindow, build_window
from .resonator import build_system, good_rounding, resonator_sum, \
    solve_denseness

__all__ = [
    "HuntConfig", "PlanResult", "SpecResult", "ChenSummary", "HuntReport",
    "SmoothingRow", "plan", "run_hunt", "verify_smoothing_bound",
    "emit_report", "report_to_json", "report_to_csv", "parse_report",
    "parse_config", "spec_from_token", "CSV_COLUMNS",
]

_SINH2 = 2.0 * math.sinh(1.0)


def _threads() -> int:
    env = os.environ.get("HUNT_THREADS")
    if env is not None:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(eq=False)
class HuntConfig:
    """Hunt parameters; ``specs`` are catalog L-function objects.

    The asymptotic coupling c*mu > 2*sinh(1) is reported (``plan`` warns when
    violated) but not enforced, so low parameter regimes remain runnable for
    arithmetic checks.
    """

    sigma0: float
    T: float
    specs: tuple
    theta_targets: tuple = ()
    M: int = 2
    c: float = 3.0
    mu: float = 0.9
    c0: float | None = None
    baseline_samples: int = 10_000
    grid_points: int = 4096
    rho_override: float | None = None
    seed: int = 0

    def __post_init__(self):
        self.specs = tuple(self.specs)
        if not self.specs:
            raise ValueError("need at least one spec")
        if not 0.5 < self.sigma0 < 1.0:
            raise ValueError("sigma0 must lie in (1/2, 1)")
        if self.T < 100.0:
            raise ValueError("base height T must be >= 100")
        if not self.theta_targets:
            self.theta_targets = tuple(0.0 for _ in self.specs)
        else:
            self.theta_targets = tuple(float(t) for t in self.theta_targets)
        if len(self.theta_targets) != len(self.specs):
            raise ValueError("need one theta target per spec")
        if self.M < 1:
            raise ValueError("box size M must be >= 1")
        if self.c <= 0:
            raise ValueError("c must be positive")
        if not 0.0 < self.mu < 1.0:
            raise ValueError("mu must lie in (0, 1)")
        if self.baseline_samples < 0:
            raise ValueError("baseline_samples must be >= 0")
        if self.grid_points < 16:
            raise ValueError("grid_points must be >= 16")
        if self.rho_override is not None and self.rho_override < 3:
            raise ValueError("rho_override must be >= 3")

    @property
    def k(self) -> int:
        return len(self.specs)

    @property
    def rho_coupled(self) -> float:
        return math.log(self.T) / (2.0 * self.M * self.c)

    @property
    def rho_effective(self) -> float:
        return self.rho_override if self.rho_override is not None else self.rho_coupled

    @property
    def tau(self) -> float:
        lt = math.log(self.T)
        return lt ** ((1.0 + self.sigma0) / 2.0) * math.sqrt(math.log(lt))

    @property
    def asymptotic_regime_ok(self) -> bool:
        return self.c * self.mu > _SINH2


@dataclass(eq=False)
class PlanResult:
    window: PrimeWindow
    system: object
    rho_coupled: float
    rho_effective: float
    tau: float
    target_magnitude: float
    xi: tuple


def plan(config: HuntConfig) -> PlanResult:
    """Derive window, phase targets, and scale parameters from the config.

    Rejects configurations whose effective window center falls below 3
    ("T too small for chosen M, c"); warns when the asymptotic regime
    coupling c*mu > 2*sinh(1) does not hold.
    """
    rho = config.rho_effective
    if rho < 3.0:
        raise ValueError(
            f"T too small for chosen M, c: window center {rho:.4g} < 3 "
            f"(raise T, lower M*c, or set rho_override)")
    if not config.asymptotic_regime_ok:
        warnings.warn(
            f"c*mu = {config.c * config.mu:.4g} <= 2*sinh(1) = {_SINH2:.4g}: "
            "outside the asymptotic regime; results remain valid as a desk-"
            "scale demonstration", stacklevel=2)
    window = build_window(rho, config.sigma0)
    if config.k > len(window):
        raise ValueError(
            f"more specs ({config.k}) than window primes ({len(window)})")
    system = build_system(config.specs, window, c0=config.c0,
                          theta_targets=config.theta_targets)
    lt = math.log(config.T)
    target_magnitude = lt ** (1.0 - config.sigma0) / math.log(lt)
    return PlanResult(window=window, system=system,
                      rho_coupled=config.rho_coupled, rho_effective=rho,
                      tau=config.tau, target_magnitude=target_magnitude,
                      xi=tuple(complex(x) for x in system.xi))


# -- evaluation helpers ---------------------------------------------------------

_BASELINE_TOL = 1e-6   # plenty for percentile statistics; each value still
                       # carries its true truncation bound


def _parallel_values(spec, sigma0, ts, tol=1e-9):
    """dict t -> (value, bound); independent points evaluated across threads."""
    ts = list(ts)
    workers = min(_threads(), max(1, len(ts) // 16))
    if workers <= 1:
        return {t: value_at(spec, complex(sigma0, t), tol) for t in ts}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        vals = list(pool.map(lambda t: value_at(spec, complex(sigma0, t), tol),
                             ts))
    return dict(zip(ts, vals))


def _baseline_statistic(spec, sigma0, theta, ts,
                        tol=_BASELINE_TOL) -> np.ndarray:
    """Re e^(-i*theta) log L(sigma0 + i*t) at each sample height.

    For theta = 0 or pi (mod 2pi) only log |L| enters, so single-point
    evaluations suffice; otherwise each sample needs its own anchored branch
    descent, which is markedly slower.
    """
    if abs(math.sin(theta)) < 1e-12:
        sign = math.cos(theta)
        values = _parallel_values(spec, sigma0, ts, tol)
        return np.array([sign * math.log(abs(values[t][0])) for t in ts])
    rot = cmath.exp(-1j * theta)
    out = np.empty(len(ts))
    for i, t in enumerate(ts):
        pt = log_l_point(spec, sigma0, t, tol)
        out[i] = (rot * pt.log_value).real
    return out


def _golden_max(f, lo, hi, iters=32):
    g = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - g * (b - a)
    x2 = a + g * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - g * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + g * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def _evaluate_spec_window(spec, sigma0, theta, t_start, dt, count, tol=1e-9):
    """Grid maximum of the aligned statistic with one golden polish.

    Returns (t_best, achieved, abs_value_at_best, grid_points_list).
    """
    values = values_on_grid(spec, sigma0, t_start, dt, count, tol)
    t_grid = grid_heights(t_start, dt, count)
    points = log_l_branch(spec, sigma0, t_grid, tol=tol, precomputed=values)
    rot = cmath.exp(-1j * theta)
    aligned = np.array([(rot * pt.log_value).real for pt in points])
    i_best = int(np.argmax(aligned))
    t_best = points[i_best].t
    achieved = float(aligned[i_best])
    abs_best = abs(points[i_best].value)

    # polish inside the surrounding grid cell, stitching the branch locally
    lo = points[max(0, i_best - 1)]
    hi = points[min(len(points) - 1, i_best + 1)]
    anchor = points[i_best]

    def aligned_at(t: float) -> float:
        v, _ = value_at(spec, complex(sigma0, t), tol)
        logv = anchor.log_value + cmath.log(v / anchor.value)
        return (rot * logv).real

    if hi.t > lo.t:
        t_ref, val_ref = _golden_max(aligned_at, lo.t, hi.t)
        if val_ref > achieved:
            t_best, achieved = float(t_ref), float(val_ref)
            abs_best = abs(value_at(spec, complex(sigma0, t_best), tol)[0])
    return t_best, achieved, abs_best, points


# -- report structures ------------------------------------------------------------

@dataclass
class SpecResult:
    name: str
    theta: float
    t_best: float
    achieved: float
    abs_value: float
    resonator_re: float
    resonator_im: float
    percentile: float | None       # None when baseline_samples = 0
    baseline_count: int
    certified: bool


@dataclass
class ChenSummary:
    delta_total: float
    lambda_lower: float | None    # None when the product bound underflows
    bound: float | None           # None = vacuous (no usable spectral gap)
    achieved: float
    argmin_t: float


@dataclass
class HuntReport:
    sigma0: float
    T: float
    M: int
    c: float
    mu: float
    c0: float
    seed: int
    baseline_samples: int
    grid_points: int
    spec_names: tuple
    theta_targets: tuple
    rho_coupled: float
    rho_effective: float
    rho_overridden: bool
    tau: float
    capacity: float
    xi: tuple                      # (re, im) pairs
    target_magnitude: float
    asymptotic_regime_ok: bool
    window_primes: int
    t0: float
    diophantine_objective: float
    chen: ChenSummary
    results: tuple                 # SpecResult
    window_ok: bool
    max_pairwise_dt: float
    retried: bool


def _spectral_gap_lower(window, box_size: int) -> float | None:
    """Best available positive lower bound for the gap of log(p)/2pi, or None."""
    if (2 * box_size + 1) ** len(window) <= 300_000:
        exact = lambda_exact(window.primes, box_size)
        if math.isfinite(exact):
            return exact / (2.0 * math.pi)
    try:
        return lambda_lower_bound(window.primes, box_size) / (2.0 * math.pi)
    except OverflowError:
        return None


def run_hunt(config: HuntConfig) -> HuntReport:
    """Execute the full pipeline and assemble the report.

    A zero-crossing suspicion during branch tracking shifts the window up by
    tau and retries once before aborting.
    """
    planned = plan(config)
    window, system = planned.window, planned.system
    tau = planned.tau

    assignment = solve_denseness(system)
    rounded = good_rounding(system, assignment)
    thetas = rounded.thetas
    alphas = [thetas[p] for p in window.primes]

    inst = DiophantineInstance.from_primes(
        window.primes, alphas, config.sigma0, (config.T, 2.0 * config.T),
        config.M)
    gap = _spectral_gap_lower(window, config.M)
    if gap is not None:
        cert = chen_bound(inst, gap)
        chen = ChenSummary(delta_total=cert.delta_total,
                           lambda_lower=cert.lambda_lower,
                           bound=cert.bound if math.isfinite(cert.bound) else None,
                           achieved=cert.achieved, argmin_t=cert.argmin_t)
    else:
        max_lam = float(np.max(np.abs(inst.lambdas)))
        t_best, val_best = search_t(inst, grid_step=0.05 / max_lam)
        chen = ChenSummary(delta_total=inst.delta_total, lambda_lower=None,
                           bound=None, achieved=val_best, argmin_t=t_best)

    rng = np.random.default_rng(config.seed)
    t0 = chen.argmin_t
    retried = False
    for attempt in (0, 1):
        try:
            report = _evaluate_and_report(config, planned, chen, inst, t0,
                                          retried, rng)
            return report
        except ZeroCrossingError:
            if attempt == 1:
                raise
            t0 = t0 + tau
            retried = True
    raise AssertionError("unreachable")


def _evaluate_and_report(config, planned, chen, inst, t0, retried, rng):
    window, system = planned.window, planned.system
    tau = planned.tau
    dt = 2.0 * tau / (config.grid_points - 1)
    t_start = t0 - tau

    results = []
    t_bests = []
    for spec, theta in zip(config.specs, config.theta_targets):
        t_best, achieved, abs_best, _ = _evaluate_spec_window(
            spec, config.sigma0, theta, t_start, dt, config.grid_points)
        pred = resonator_sum(spec, window, config.sigma0, t0)
        if config.baseline_samples > 0:
            ts = list(config.T * (1.0 + rng.random(config.baseline_samples)))
            stats = _baseline_statistic(spec, config.sigma0, theta, ts)
            percentile = float(100.0 * np.mean(stats < achieved))
        else:
            percentile = None
        results.append(SpecResult(
            name=spec.name, theta=float(theta), t_best=float(t_best),
            achieved=float(achieved), abs_value=float(abs_best),
            resonator_re=float(pred.real), resonator_im=float(pred.imag),
            percentile=percentile, baseline_count=config.baseline_samples,
            certified=spec.certified_backend))
        t_bests.append(t_best)

    max_dt = max(abs(a - b) for a in t_bests for b in t_bests)
    return HuntReport(
        sigma0=config.sigma0, T=config.T, M=config.M, c=config.c, mu=config.mu,
        c0=float(system.c0), seed=config.seed,
        baseline_samples=config.baseline_samples,
        grid_points=config.grid_points,
        spec_names=tuple(s.name for s in config.specs),
        theta_targets=tuple(config.theta_targets),
        rho_coupled=planned.rho_coupled, rho_effective=planned.rho_effective,
        rho_overridden=config.rho_override is not None,
        tau=tau, capacity=float(system.capacity),
        xi=tuple((x.real, x.imag) for x in planned.xi),
        target_magnitude=planned.target_magnitude,
        asymptotic_regime_ok=config.asymptotic_regime_ok,
        window_primes=len(window),
        t0=float(t0),
        diophantine_objective=float(objective(inst, t0)),
        chen=chen,
        results=tuple(results),
        window_ok=max_dt <= 2.0 * tau + 1e-9,
        max_pairwise_dt=float(max_dt),
        retried=retried)


def verify_smoothing_bound(spec: LFunctionSpec, config: HuntConfig,
                           t0: float):
    """Window maximum of the aligned log against half the resonator sum.

    Reports max over t in [t0-tau, t0+tau] of Re e^(-i*theta) log L, half the
    aligned resonator sum at t0, the error magnitude rho*(tau+log t0)/tau^2,
    and the slack factor by which the error term must be scaled for
    max >= half_resonator - slack * error to hold.
    """
    planned = plan(config)
    theta = 0.0
    for s, th in zip(config.specs, config.theta_targets):
        if s.name == spec.name:
            theta = float(th)
            break
    tau = planned.tau
    count = min(config.grid_points, 1024)
    dt = 2.0 * tau / (count - 1)
    t_best, achieved, _, _ = _evaluate_spec_window(spec, config.sigma0, theta,
                                                   t0 - tau, dt, count)
    pred = resonator_sum(spec, planned.window, config.sigma0, t0)
    half_res = 0.5 * (cmath.exp(-1j * theta) * pred).real
    err_mag = planned.rho_effective * (tau + math.log(max(t0, math.e))) / tau ** 2
    slack = max(0.0, (half_res - achieved)) / err_mag
    return SmoothingRow(name=spec.name, theta=theta, t0=float(t0), tau=tau,
                        rho=planned.rho_effective, max_aligned=achieved,
                        half_resonator=half_res, error_magnitude=err_mag,
                        slack=slack, t_best=t_best)


@dataclass
class SmoothingRow:
    name: str
    theta: float
    t0: float
    tau: float
    rho: float
    max_aligned: float
    half_resonator: float
    error_magnitude: float
    slack: float
    t_best: float


# -- serialization ---------------------------------------------------------------

CSV_COLUMNS = (
    "name", "theta", "t0", "t_best", "achieved", "abs_value", "resonator_re",
    "resonator_im", "percentile", "baseline_count", "window_ok", "sigma0",
    "T", "rho_effective",
)


def _canonical(obj) -> str:
    """Deterministic JSON: sorted keys, floats at 17 significant digits."""
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError("non-finite float in report; use None instead")
        return format(obj, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_canonical(v) for v in obj) + "]"
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ",".join(f"{json.dumps(k)}:{_canonical(v)}"
                              for k, v in items) + "}"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def report_to_json(report: HuntReport) -> str:
    return _canonical(asdict(report)) + "\n"


def report_to_csv(report: HuntReport) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in report.results:
        row = (r.name, r.theta, report.t0, r.t_best, r.achieved, r.abs_value,
               r.resonator_re, r.resonator_im, r.percentile, r.baseline_count,
               report.window_ok, report.sigma0, report.T,
               report.rho_effective)
        cells = []
        for v in row:
            if isinstance(v, bool):
                cells.append("true" if v else "false")
            elif v is None:
                cells.append("")
            elif isinstance(v, float):
                cells.append(format(v, ".17g"))
            else:
                cells.append(str(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def emit_report(report: HuntReport, fmt: str, path):
    """Write the report to path as canonical JSON or fixed-schema CSV."""
    if fmt == "json":
        text = report_to_json(report)
    elif fmt == "csv":
        text = report_to_csv(report)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path


def parse_report(text: str) -> HuntReport:
    """Inverse of report_to_json (floats round-trip exactly at 17 digits)."""
    raw = json.loads(text)
    raw["chen"] = ChenSummary(**raw["chen"])
    raw["results"] = tuple(SpecResult(**r) for r in raw["results"])
    raw["spec_names"] = tuple(raw["spec_names"])
    raw["theta_targets"] = tuple(raw["theta_targets"])
    raw["xi"] = tuple(tuple(pair) for pair in raw["xi"])
    return HuntReport(**raw)


# -- config files -----------------------------------------------------------------

_SPEC_TOKENS = {
    "zeta": lambda: builtin_zeta(),
    "chi4": lambda: builtin_dirichlet(chi4(), name="L_chi4"),
    "chi3": lambda: builtin_dirichlet(chi3(), name="L_chi3"),
}


def spec_from_token(token: str) -> LFunctionSpec:
    """Resolve a config token: zeta | chi3 | chi4 | file:<path>."""
    token = token.strip()
    if token in _SPEC_TOKENS:
        return _SPEC_TOKENS[token]()
    if token.startswith("file:"):
        return ingest_coefficients(token[5:])
    raise ValueError(f"unknown spec token {token!r}")


_CONFIG_FIELDS = {
    "sigma0": float,
    "T": float,
    "specs": str,
    "theta_targets": str,
    "M": int,
    "c": float,
    "mu": float,
    "c0": float,
    "baseline_samples": int,
    "grid_points": int,
    "rho_override": float,
    "seed": int,
}


def parse_config(text: str) -> HuntConfig:
    """Line-oriented ``key = value`` config; unknown keys are rejected."""
    data: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line {lineno}: {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_FIELDS:
            raise ValueError(f"unknown config key {key!r} (line {lineno})")
        if key in data:
            raise ValueError(f"duplicate config key {key!r} (line {lineno})")
        data[key] = _CONFIG_FIELDS[key](value)
    for req in ("sigma0", "T", "specs"):
        if req not in data:
            raise ValueError(f"config missing required key {req!r}")
    specs = tuple(spec_from_token(tok) for tok in data.pop("specs").split(","))
    thetas = ()
    if "theta_targets" in data:
        thetas = tuple(float(v) for v in data.pop("theta_targets").split(","))
    return HuntConfig(specs=specs, theta_targets=thetas, **data)
