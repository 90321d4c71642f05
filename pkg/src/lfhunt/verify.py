"""Certificate suites behind ``hunt verify`` and the acceptance tests.

Each suite returns a ``VerifyResult`` whose ``cases`` list one dict per
checked instance and whose ``ok`` is the conjunction of every per-case
check.  All randomness is seeded, so suites are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .catalog import builtin_dirichlet, builtin_zeta, chi4
from .diophantine import DiophantineInstance, chen_bound, lambda_exact, objective
from .primes import build_window
from .resonator import build_system, capacity_asymptotics_check, \
    capacity_constant, fejer_smoothing_check, good_rounding, solve_denseness

__all__ = ["VerifyResult", "verify_chen", "verify_denseness",
           "verify_smoothing", "verify_asymptotics"]

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


@dataclass
class VerifyResult:
    name: str
    ok: bool
    cases: list

    def summary(self) -> str:
        n_ok = sum(1 for c in self.cases if c.get("ok", False))
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: {n_ok}/{len(self.cases)} cases"


def verify_chen(trials: int = 100, seed: int = 0) -> VerifyResult:
    """Random small instances: fine-grid measured infimum <= certificate bound.

    Instances use prime-log frequencies (n <= 6 primes, M <= 3), random
    phases and weights, and ranges of length >= 1e3; the oracle grid step is
    1e-3 / max lambda.
    """
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(trials):
        n = int(rng.integers(1, 7))
        primes = sorted(rng.choice(_SMALL_PRIMES, size=n, replace=False))
        box = int(rng.integers(1, 4))
        alphas = rng.random(n)
        deltas = 10.0 ** rng.uniform(-1.0, 0.3, size=n)
        t1 = float(rng.uniform(0.0, 1e4))
        length = float(rng.uniform(1e3, 2e3))
        inst = DiophantineInstance(
            lambdas=np.array([math.log(p) / (2 * math.pi) for p in primes]),
            alphas=alphas, deltas=deltas, t_range=(t1, t1 + length),
            box_size=box)
        gap = lambda_exact(primes, box) / (2 * math.pi)
        cert = chen_bound(inst, gap, search=False)
        max_lam = float(np.max(inst.lambdas))
        step = 1e-3 / max_lam
        ts = np.arange(t1, t1 + length, step)
        measured = math.inf
        chunk = 1 << 19
        for lo in range(0, len(ts), chunk):
            vals = objective(inst, ts[lo:lo + chunk])
            measured = min(measured, float(np.min(vals)))
        ok = measured <= cert.bound + 1e-9 * cert.delta_total
        cases.append({"n": n, "M": box, "primes": [int(p) for p in primes],
                      "range": length, "bound": cert.bound,
                      "measured": measured, "ok": bool(ok)})
    return VerifyResult("chen", all(c["ok"] for c in cases), cases)


def verify_denseness(rhos=(50.0, 100.0, 200.0), sigma0: float = 0.75,
                     tol_factor: float = 1e-8) -> VerifyResult:
    """Solver and rounding certificates for the (zeta, chi4) pair.

    Targets sit at half capacity with c0 = 0.5 * C(sigma0).  Checks, with
    exactly-rounded recomputation of the functionals: solver residual at most
    tol_factor * capacity with all |z_p| <= 1 + 1e-12; after rounding, at
    most k+1 coordinates were snapped from the interior and the residual
    stays within the explicit (k+1) * max-coefficient envelope.
    """
    specs = (builtin_zeta(), builtin_dirichlet(chi4(), name="L_chi4"))
    k = len(specs)
    cases = []
    for rho in rhos:
        window = build_window(rho, sigma0)
        system = build_system(specs, window,
                              c0=0.5 * capacity_constant(sigma0))
        sol = solve_denseness(system, tol_factor=tol_factor)
        resid = float(np.max(np.abs(system.brute_evaluate(sol.z) - system.xi)))
        box_ok = bool(np.max(np.abs(sol.z)) <= 1.0 + 1e-12)
        solve_ok = resid <= tol_factor * system.capacity and box_ok

        rounded = good_rounding(system, sol)
        n_snapped = len(rounded.snapped)
        all_unit = bool(np.min(np.abs(rounded.z)) >= 1.0 - 1e-9)
        round_resid = float(np.max(np.abs(
            system.brute_evaluate(rounded.z) - system.xi)))
        envelope = (k + 1) * float(np.max(np.abs(system.coeff))) \
            + tol_factor * system.capacity
        round_ok = n_snapped <= k + 1 and all_unit and round_resid <= envelope
        cases.append({
            "rho": rho, "primes": len(window), "capacity": system.capacity,
            "solver_residual": resid, "box_ok": box_ok,
            "snapped": n_snapped, "rounding_residual": round_resid,
            "envelope": envelope, "all_unit": all_unit,
            "ok": bool(solve_ok and round_ok)})
    return VerifyResult("denseness", all(c["ok"] for c in cases), cases)


def verify_smoothing(trials: int = 100, seed: int = 0) -> VerifyResult:
    """Smoothing-kernel bound: truncated integral <= pi/2 (+1e-6) and the
    large-window limit reaches pi/2 within 1e-3.

    Samples tau in [0.3, 30], theta in [0, 2pi), rho log-uniform in [3, 1e4]
    (window centers below e would break the bound and never occur in runs).
    """
    rng = np.random.default_rng(seed)
    limit = math.pi / 2.0
    cases = []
    for _ in range(trials):
        tau = float(rng.uniform(0.3, 30.0))
        theta = float(rng.uniform(0.0, 2.0 * math.pi))
        rho = float(np.exp(rng.uniform(math.log(3.0), math.log(1e4))))
        val = fejer_smoothing_check(tau, theta, rho)
        cases.append({"tau": tau, "theta": theta, "rho": rho, "value": val,
                      "ok": bool(val <= limit + 1e-6)})
    big = fejer_smoothing_check(5000.0, 0.7, 100.0)
    cases.append({"tau": 5000.0, "theta": 0.7, "rho": 100.0, "value": big,
                  "ok": bool(abs(big - limit) <= 1e-3)})
    return VerifyResult("smoothing", all(c["ok"] for c in cases), cases)


def verify_asymptotics(rhos=(1e4, 1e5, 1e6), sigma0: float = 0.75,
                       rel_tol: float = 0.10) -> VerifyResult:
    """Weighted window sums approach C(sigma0): within 10% at the largest rho
    and with non-increasing deviation along the sequence."""
    spec = builtin_zeta()
    c_limit = capacity_constant(sigma0)
    rows = capacity_asymptotics_check(spec, sigma0, rhos)
    cases = []
    for row in rows:
        cases.append({"rho": row.rho, "ratio": row.ratio,
                      "deviation": row.deviation,
                      "ok": True})
    cases[-1]["ok"] = bool(rows[-1].deviation <= rel_tol * c_limit)
    monotone = all(a.deviation >= b.deviation - 1e-12
                   for a, b in zip(rows, rows[1:]))
    cases.append({"check": "deviation non-increasing", "ok": bool(monotone)})
    return VerifyResult("asymptotics", all(c["ok"] for c in cases), cases)
