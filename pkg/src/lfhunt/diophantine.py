"""Nearest-integer alignment: objective, spectral-gap bounds, height search.

The objective sum_j delta_j * ||lambda_j * t - alpha_j||^2 (|| || = distance
to the nearest integer) measures how well the phases of p^(-it) match target
phases.  Its infimum over a height range [T1, T2] is bounded above by

    (Delta/4) * sin^2(pi / (2(M+1)))  +  Delta * M^n / (4*pi*(T2-T1)*Lambda),

where Delta = sum delta_j and Lambda is the smallest nonzero |sum u_j
lambda_j| over integer boxes |u_j| <= M.  For lambda_j built from prime
logarithms the hypothesis behind the bound (integrality of sum u_j alpha_j
on the lattice kernel) is vacuous, since prime logs are linearly independent
over the rationals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DiophantineInstance", "ChenCertificate", "nearest_int_dist", "objective",
    "lambda_lower_bound", "lambda_exact", "chen_bound", "search_t",
]

_REFINE_SEEDS = 32
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_SCAN_CHUNK = 1 << 20


def nearest_int_dist(x: float) -> float:
    """Distance from x to the nearest integer, in [0, 1/2]."""
    return abs(x - round(x))


@dataclass(frozen=True, eq=False)
class DiophantineInstance:
    """Weighted simultaneous-approximation instance over a height range."""

    lambdas: np.ndarray      # frequencies (for primes: log(p) / 2*pi)
    alphas: np.ndarray       # target phases in [0, 1)
    deltas: np.ndarray       # positive weights
    t_range: tuple           # (T1, T2), T1 < T2
    box_size: int            # M

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=np.float64)
        alp = np.asarray(self.alphas, dtype=np.float64)
        wts = np.asarray(self.deltas, dtype=np.float64)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "alphas", alp)
        object.__setattr__(self, "deltas", wts)
        if not len(lam) or len(alp) != len(lam) or len(wts) != len(lam):
            raise ValueError("need n >= 1 aligned lambdas, alphas, deltas")
        if np.any(wts <= 0):
            raise ValueError("weights must be positive")
        t1, t2 = self.t_range
        if not t1 < t2:
            raise ValueError("empty range: need T1 < T2")
        if self.box_size < 0:
            raise ValueError("box size M must be >= 0")
        for arr in (lam, alp, wts):
            arr.flags.writeable = False

    @property
    def n(self) -> int:
        return len(self.lambdas)

    @property
    def delta_total(self) -> float:
        return float(np.sum(self.deltas))

    @classmethod
    def from_primes(cls, primes, alphas, sigma0: float, t_range,
                    box_size: int) -> "DiophantineInstance":
        """Standard construction: lambda = log(p)/2pi, delta = p^(-sigma0)."""
        primes = [int(p) for p in primes]
        lam = np.array([math.log(p) / (2.0 * math.pi) for p in primes])
        del_ = np.array([p ** (-sigma0) for p in primes])
        return cls(lambdas=lam, alphas=np.asarray(alphas, float), deltas=del_,
                   t_range=(float(t_range[0]), float(t_range[1])),
                   box_size=int(box_size))


def objective(inst: DiophantineInstance, t) -> float | np.ndarray:
    """sum_j delta_j * ||lambda_j * t - alpha_j||^2, vectorized over t."""
    t_arr = np.asarray(t, dtype=np.float64)
    x = np.multiply.outer(t_arr, inst.lambdas) - inst.alphas
    frac = np.abs(x - np.round(x))
    vals = (frac * frac) @ inst.deltas
    return float(vals) if t_arr.ndim == 0 else vals


_EXACT_BOX_LIMIT = 2_000_000


def lambda_exact(primes, box_size: int) -> float:
    """Exact spectral gap min |sum u_j log(p_j)| over |u_j| <= M, or inf.

    Every nonzero combination equals log(A/B) with exact integers
    A = prod p^(u+), B = prod p^(u-), so |log1p((A-B)/B)| evaluates it to
    full relative precision even when the gap is ~1e-20.  Enumerates half
    the box (u and -u agree in absolute value); refuses boxes larger than
    2e6 vectors.  Raw-log units, as in ``lambda_lower_bound``.
    """
    primes = [int(p) for p in primes]
    if any(p < 2 for p in primes):
        raise ValueError("primes must be >= 2")
    n = len(primes)
    if box_size == 0 or n == 0:
        return math.inf
    if (2 * box_size + 1) ** n > _EXACT_BOX_LIMIT:
        raise ValueError("integer box too large for exact enumeration")

    best = math.inf
    radix = 2 * box_size + 1
    total = radix ** n
    for code in range(total):
        u = []
        c = code
        for _ in range(n):
            u.append(c % radix - box_size)
            c //= radix
        # u and -u give the same absolute sum; keep first nonzero positive
        lead = next((v for v in u if v != 0), 0)
        if lead <= 0:
            continue
        num = den = 1
        for p, uj in zip(primes, u):
            if uj > 0:
                num *= p ** uj
            elif uj < 0:
                den *= p ** (-uj)
        if num == den:
            continue
        hi, lo = (num, den) if num > den else (den, num)
        try:
            val = math.log1p((hi - lo) / lo)
        except OverflowError:
            val = math.inf
        if val < best:
            best = val
    return best


def lambda_lower_bound(primes, box_size: int) -> float:
    """Constructive lower bound for min nonzero |sum u_j log(p_j)|, |u_j| <= M.

    Any nonzero combination is log of a rational whose numerator and
    denominator differ by at least 1 and are at most prod(p^M), giving
    log(1 + 1/prod(p^M)) = log1p(exp(-M * sum log p)), computed in the log
    domain so the product never overflows.  Returns inf for M = 0 (no
    nonzero combination exists).

    Note: the bound is in raw-logarithm units; divide by 2*pi when the
    instance frequencies are log(p)/2pi.
    """
    primes = [int(p) for p in primes]
    if any(p < 2 for p in primes):
        raise ValueError("primes must be >= 2")
    if box_size == 0 or not primes:
        return math.inf
    exponent = box_size * math.fsum(math.log(p) for p in primes)
    if exponent > 700.0:
        raise OverflowError(
            "Lambda lower bound underflows double precision for this window; "
            "reduce M or the window size")
    return math.log1p(math.exp(-exponent))


@dataclass(frozen=True)
class ChenCertificate:
    """The infimum bound together with a searched witness.

    ``achieved`` is the best objective value found by the default search;
    the bound holds for the true infimum, so achieved <= bound certifies the
    search found a point at least as good as the guarantee.
    """

    delta_total: float
    lambda_lower: float
    bound: float
    achieved: float
    argmin_t: float


def chen_bound(inst: DiophantineInstance, lambda_lower: float,
               *, search: bool = True) -> ChenCertificate:
    """Evaluate the infimum bound, optionally searching for a witness.

    ``lambda_lower`` must be a positive lower bound for the spectral gap in
    the same units as the instance frequencies (the bound is decreasing in
    Lambda, so any lower bound is valid).
    """
    if not lambda_lower > 0:
        raise ValueError("Lambda lower bound must be positive")
    m = inst.box_size
    if m < 1:
        raise ValueError("box size M must be >= 1 for the bound")
    delta = inst.delta_total
    t1, t2 = inst.t_range
    first = (delta / 4.0) * math.sin(math.pi / (2.0 * (m + 1))) ** 2
    if math.isinf(lambda_lower):
        second = 0.0
    else:
        log_second = (math.log(delta) + inst.n * math.log(m)
                      - math.log(4.0 * math.pi * (t2 - t1) * lambda_lower))
        second = math.exp(log_second) if log_second < 700 else math.inf
    bound = first + second
    if search:
        max_lam = float(np.max(np.abs(inst.lambdas)))
        step = 0.05 / max_lam if max_lam > 0 else (t2 - t1) / 1000.0
        t_best, val_best = search_t(inst, grid_step=step, refine_iters=40)
    else:
        t_best, val_best = math.nan, math.nan
    return ChenCertificate(delta_total=delta, lambda_lower=lambda_lower,
                           bound=bound, achieved=val_best, argmin_t=t_best)


def _golden_min(f, lo: float, hi: float, iters: int):
    """Golden-section minimization on [lo, hi]; returns (x, f(x))."""
    a, b = lo, hi
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(iters):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def search_t(inst: DiophantineInstance, grid_step: float,
             refine_iters: int = 40) -> tuple:
    """Best alignment height: coarse grid scan plus multi-start refinement.

    Scans the range at ``grid_step`` (must be at most 1/(4*max lambda) so no
    minimum slips between grid points unseen), keeps the best 32 spaced
    candidates, golden-sections each bracket, and returns the global best.
    Never worse than the best coarse grid point; deterministic, ties broken
    toward smaller t.
    """
    t1, t2 = inst.t_range
    max_lam = float(np.max(np.abs(inst.lambdas)))
    if max_lam > 0 and grid_step > 1.0 / (4.0 * max_lam) + 1e-15:
        raise ValueError("grid_step too coarse: must be <= 1/(4 max lambda)")
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")

    n_points = int(math.floor((t2 - t1) / grid_step)) + 1
    best_vals: list = []
    best_ts: list = []
    for lo in range(0, n_points, _SCAN_CHUNK):
        hi = min(lo + _SCAN_CHUNK, n_points)
        ts = t1 + grid_step * np.arange(lo, hi, dtype=np.float64)
        vals = objective(inst, ts)
        take = min(_REFINE_SEEDS, len(vals))
        idx = np.argpartition(vals, take - 1)[:take]
        best_vals.extend(float(v) for v in vals[idx])
        best_ts.extend(float(t) for t in ts[idx])

    order = sorted(range(len(best_ts)), key=lambda i: (best_vals[i], best_ts[i]))
    seeds = []
    for i in order:
        if len(seeds) >= _REFINE_SEEDS:
            break
        if all(abs(best_ts[i] - s) > 1.5 * grid_step for s, _ in seeds):
            seeds.append((best_ts[i], best_vals[i]))

    t_best, val_best = seeds[0]
    for t_seed, v_seed in seeds:
        lo = max(t1, t_seed - grid_step)
        hi = min(t2, t_seed + grid_step)
        t_ref, v_ref = _golden_min(lambda t: objective(inst, t), lo, hi,
                                   refine_iters)
        for t_cand, v_cand in ((t_ref, v_ref), (t_seed, v_seed)):
            if v_cand < val_best - 1e-18 or (
                    abs(v_cand - val_best) <= 1e-18 and t_cand < t_best):
                t_best, val_best = t_cand, v_cand
    return t_best, val_best
