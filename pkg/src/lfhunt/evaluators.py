"""Numerical evaluation of L(s) and a continuous branch of log L.

Backends
--------
* zeta / Hurwitz zeta: Euler-Maclaurin with Bernoulli corrections through
  B_20 and the classical remainder bound, computed in log domain and
  attached to every value.  The direct-sum length N is probed geometrically
  against that bound before any summation, starting just above the
  |t| / (2*pi) floor where the corrections begin to shrink.
* Dirichlet L for primitive non-principal chi mod q:
  q^(-s) * sum_a chi(a) * zeta(s, a/q), using the pole-regularized Hurwitz
  values so the 1/(s-1) poles cancel exactly and s = 1 is admissible.
* Truncated Euler products for ingested specs: estimate only, no error bound
  (abs_err_bound = inf), flagged non-certified downstream.

The branch of log L is anchored at Re s = 3, where the Euler-product series
converges absolutely, and continued stepwise with |delta log L| < pi/2 per
step (adaptive bisection otherwise).  Reported abs_err_bound covers backend
truncation; float roundoff in the oscillatory sums adds roughly
|t| * 1e-15 * sum(n^-sigma), negligible below |t| ~ 1e7.
"""

from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass

import numpy as np

try:
    # Level-1 BLAS calls here are short; OpenBLAS's spin-waiting worker pool
    # costs more than it contributes and serializes concurrent callers.  The
    # limiter object must stay alive for the limit to persist.
    from threadpoolctl import threadpool_limits as _threadpool_limits
    _BLAS_SINGLE_THREAD = _threadpool_limits(limits=1, user_api="blas")
except ImportError:                                    # pragma: no cover
    _BLAS_SINGLE_THREAD = None

from .catalog import DirichletCharacter, LFunctionSpec
from .errors import ZeroCrossingError
from .primes import sieve_primes

__all__ = ["EvalPoint", "zeta", "hurwitz_zeta", "dirichlet_l", "value_at",
           "euler_product_log", "log_l_branch", "log_l_point",
           "values_on_grid", "grid_heights"]

# B_2k / (2k)! for k = 1..10, and |B_22| / 22! for the remainder bound.
_BERN_OVER_FACT = (
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
    43867.0 / 798.0 / 6402373705728000.0,
    -174611.0 / 330.0 / 2432902008176640000.0,
)
_B22_OVER_FACT = (854513.0 / 138.0) / 1.1240007277776077e21
_EM_ORDER = 10
_POLE_GUARD = 1e-6
_ZERO_FLOOR = 1e-12
_MAX_LOG_STEP = math.pi / 2

class _PowerCache:
    """Grow-only caches of log(n + a) and (n + a)^(-sigma) arrays.

    Growth replaces arrays instead of mutating them, so concurrent readers
    (thread-parallel grid/baseline evaluation) stay consistent without locks;
    a duplicated extension under a race merely wastes one computation.
    """

    _GRANULE = 1 << 16
    _MAX_MAGS = 16

    def __init__(self):
        self._logs: dict = {}
        self._mags: dict = {}

    def logs(self, a: float, n: int) -> np.ndarray:
        tab = self._logs.get(a)
        if tab is None or len(tab) < n:
            size = ((max(n, 1024) - 1) // self._GRANULE + 1) * self._GRANULE
            tab = np.log(np.arange(size, dtype=np.float64) + a)
            self._logs[a] = tab
        return self._logs[a][:n]

    def mags(self, a: float, sigma: float, n: int) -> np.ndarray:
        key = (a, sigma)
        tab = self._mags.get(key)
        if tab is None or len(tab) < n:
            logs = self.logs(a, max(n, 1024))
            tab = np.exp(-sigma * logs)
            if len(self._mags) >= self._MAX_MAGS and key not in self._mags:
                self._mags.pop(next(iter(self._mags)))
            self._mags[key] = tab
        return self._mags[key][:n]


_POWERS = _PowerCache()


class _ScratchBuffers(threading.local):
    """Per-thread reusable float64 work arrays (large numpy temporaries are
    mmap-backed and expensive to re-fault every call)."""

    _GRANULE = 1 << 16

    def __init__(self):
        self._bufs = {}

    def take(self, tag: str, n: int) -> np.ndarray:
        size = ((n - 1) // self._GRANULE + 1) * self._GRANULE
        buf = self._bufs.get(tag)
        if buf is None or len(buf) < size:
            buf = np.empty(size, dtype=np.float64)
            self._bufs[tag] = buf
        return buf[:n]


_SCRATCH = _ScratchBuffers()


def _phased_dot(mag: np.ndarray, logs: np.ndarray, t: float) -> complex:
    if t == 0.0:
        return complex(float(np.sum(mag)), 0.0)
    n = len(logs)
    w = _SCRATCH.take("w", n)
    c = _SCRATCH.take("c", n)
    np.multiply(logs, -t, out=w)
    np.cos(w, out=c)
    np.sin(w, out=w)
    return complex(np.dot(mag, c), np.dot(mag, w))


def _em_tail_bound(s: complex, big_n: float) -> float:
    """Classical Euler-Maclaurin remainder bound after _EM_ORDER corrections."""
    sigma = s.real
    lb = math.log(_B22_OVER_FACT)
    for j in range(2 * _EM_ORDER + 1):
        lb += math.log(abs(s + j))
    lb -= (sigma + 2 * _EM_ORDER + 1) * math.log(big_n)
    lb += math.log(abs(s + 2 * _EM_ORDER + 1) / (sigma + 2 * _EM_ORDER + 1))
    return math.exp(lb) if lb < 700 else math.inf


def _choose_n(sigma: float, t_abs: float, a: float, tol: float) -> int:
    """Smallest direct-sum length (probed geometrically) meeting the bound.

    The remainder terms only start shrinking once N exceeds |t|/(2*pi), so
    the probe starts just above that floor; the bound itself is exact either
    way, this is purely a cost choice.
    """
    n = max(20, int(1.05 * t_abs / (2.0 * math.pi)) + 1)
    probe = complex(sigma, t_abs)
    for _ in range(400):
        if _em_tail_bound(probe, n + a) <= tol:
            return n
        n = int(n * 1.12) + 1
    raise ArithmeticError("Euler-Maclaurin failed to meet tolerance")


def _em_corrections(s: complex, a: float, n: int, regularized: bool) -> complex:
    """Boundary, pole, and Bernoulli terms added to the direct sum."""
    big_n = n + a
    log_big = math.log(big_n)
    # pole term (N+a)^(1-s) / (s-1); regularized variant subtracts 1/(s-1)
    w = (1.0 - s) * log_big
    if regularized:
        if abs(w) < 1e-4:
            ratio = 1.0 + w / 2.0 + w * w / 6.0 + w ** 3 / 24.0
        else:
            ratio = (cmath.exp(w) - 1.0) / w
        value = -log_big * ratio
    else:
        value = cmath.exp(w) / (s - 1.0)
    na_minus_s = cmath.exp(-s * log_big)
    value += 0.5 * na_minus_s
    u = s / big_n
    value += _BERN_OVER_FACT[0] * u * na_minus_s
    for k in range(2, _EM_ORDER + 1):
        u *= (s + 2 * k - 3) * (s + 2 * k - 2) / (big_n * big_n)
        value += _BERN_OVER_FACT[k - 1] * u * na_minus_s
    return value


def _em_hurwitz(s: complex, a: float, tol: float, regularized: bool):
    """Euler-Maclaurin Hurwitz zeta; returns (value, truncation bound).

    With ``regularized`` the simple pole is removed: the return value is
    zeta(s, a) - 1/(s-1), which is entire in s and safe at s = 1.
    """
    sigma, t = s.real, s.imag
    n = _choose_n(sigma, abs(t), a, tol)
    logs = _POWERS.logs(a, n)
    mag = _POWERS.mags(a, sigma, n)
    value = _phased_dot(mag, logs, t)
    value += _em_corrections(s, a, n, regularized)
    return value, _em_tail_bound(s, n + a)


def zeta(s, tol: float = 1e-9):
    """Riemann zeta at s with Re s >= 0.4, away from the pole at s = 1.

    Returns the value; the certified truncation bound is below tol by
    construction (see ``value_at`` for the bound itself).
    """
    return _zeta_with_bound(complex(s), tol)[0]


def _zeta_with_bound(s: complex, tol: float):
    if s.real < 0.4:
        raise ValueError("Re s must be >= 0.4")
    if abs(s - 1.0) < _POLE_GUARD:
        raise ValueError("near pole s=1")
    return _em_hurwitz(s, 1.0, tol, regularized=False)


def hurwitz_zeta(s, a: float, tol: float = 1e-9):
    """Hurwitz zeta sum over (n+a)^(-s), n >= 0, for a in (0, 1], Re s >= 0.4."""
    return _hurwitz_with_bound(complex(s), a, tol)[0]


def _hurwitz_with_bound(s: complex, a: float, tol: float):
    if not 0.0 < a <= 1.0:
        raise ValueError("offset a must lie in (0, 1]")
    if s.real < 0.4:
        raise ValueError("Re s must be >= 0.4")
    if abs(s - 1.0) < _POLE_GUARD:
        raise ValueError("near pole s=1")
    return _em_hurwitz(s, float(a), tol, regularized=False)


def dirichlet_l(s, chi: DirichletCharacter, tol: float = 1e-9):
    """L(s, chi) for primitive non-principal chi, valid including s = 1."""
    return _dirichlet_with_bound(complex(s), chi, tol)[0]


def _dirichlet_with_bound(s: complex, chi: DirichletCharacter, tol: float):
    if s.real < 0.4:
        raise ValueError("Re s must be >= 0.4")
    q = chi.modulus
    if q < 3 or not chi.primitive:
        raise ValueError("imprimitive character: need a primitive chi mod q >= 3")
    if abs(sum(chi.values)) > 1e-9:
        raise ValueError("character values must sum to zero")
    total = 0.0 + 0.0j
    bound = 0.0
    for a in range(1, q + 1):
        coef = chi(a)
        if coef == 0:
            continue
        val, b = _em_hurwitz(s, a / q, tol, regularized=True)
        total += coef * val
        bound += abs(coef) * b
    scale = cmath.exp(-s * math.log(q))
    return scale * total, abs(scale) * bound


def euler_product_log(spec: LFunctionSpec, s, prime_limit: float = 1e5,
                      term_floor: float = 1e-18) -> complex:
    """log L(s) from the Euler product truncated at prime_limit.

    Absolutely convergent (tail ~ P^(1-2*Re s)) only for Re s > 1; at smaller
    sigma this is an estimate.  Power sums of the inverse Euler roots supply
    the higher prime-power terms.
    """
    s = complex(s)
    sigma = s.real
    spec.require_coverage(prime_limit)
    total = 0.0 + 0.0j
    for p in sieve_primes(int(prime_limit)):
        p = int(p)
        roots = [complex(r) for r in spec.roots(p)]
        if all(r == 0 for r in roots):
            continue
        logp = math.log(p)
        k = 1
        powers = list(roots)
        while True:
            ps = sum(powers)
            term = ps * cmath.exp(-k * s * logp) / k
            total += term
            k += 1
            if math.exp(-k * sigma * logp) * len(roots) < term_floor or k > 120:
                break
            powers = [w * r for w, r in zip(powers, roots)]
    return total


def value_at(spec: LFunctionSpec, s, tol: float = 1e-9):
    """Evaluate L(s) for a catalog spec; returns (value, abs_err_bound).

    Certified backends return a true truncation bound; the truncated
    Euler-product backend returns inf (estimate only).
    """
    s = complex(s)
    if spec.eval_backend == "zeta":
        return _zeta_with_bound(s, tol)
    if spec.eval_backend == "dirichlet":
        return _dirichlet_with_bound(s, spec.character, tol)
    limit = min(spec.prime_limit or 1e5, 1e5)
    logv = euler_product_log(spec, s, prime_limit=limit)
    return cmath.exp(logv), math.inf


def grid_heights(t_start: float, dt: float, count: int) -> list:
    """The exact float heights values_on_grid evaluates (t_start + m*dt)."""
    return [t_start + m * dt for m in range(count)]


def _grid_core(sigma: float, a: float, t_start: float, dt: float, count: int,
               tol: float, regularized: bool):
    """Hurwitz zeta on an equispaced height grid via phase recurrence.

    One phase array exp(-i*t*log(n+a)) is advanced by a fixed unit rotation
    per grid step, so each point costs a complex multiply and two dot
    products.  The recurrence drift (m rounding errors on a unit-modulus
    factor) is added to each point's error bound.
    """
    t_end = t_start + (count - 1) * dt
    n = _choose_n(sigma, max(abs(t_start), abs(t_end)), a, tol)
    logs = _POWERS.logs(a, n)
    mag = _POWERS.mags(a, sigma, n)
    w = _SCRATCH.take("w", n)
    np.multiply(logs, -t_start, out=w)
    phase = np.empty(n, dtype=np.complex128)
    np.cos(w, out=phase.real)
    np.sin(w, out=phase.imag)
    np.multiply(logs, -dt, out=w)
    rot = np.empty(n, dtype=np.complex128)
    np.cos(w, out=rot.real)
    np.sin(w, out=rot.imag)
    mag_total = float(np.sum(mag))
    eps = float(np.finfo(np.float64).eps)
    values = np.empty(count, dtype=np.complex128)
    bounds = np.empty(count, dtype=np.float64)
    for m in range(count):
        s = complex(sigma, t_start + m * dt)
        tail = complex(np.dot(mag, phase.real), np.dot(mag, phase.imag))
        values[m] = tail + _em_corrections(s, a, n, regularized)
        bounds[m] = _em_tail_bound(s, n + a) + 4.0 * m * eps * mag_total
        if m + 1 < count:
            np.multiply(phase, rot, out=phase)
    return values, bounds


def values_on_grid(spec: LFunctionSpec, sigma0: float, t_start: float,
                   dt: float, count: int, tol: float = 1e-9) -> dict:
    """L(sigma0 + i*t) over the equispaced grid t = t_start + m*dt.

    Returns {t: (value, abs_err_bound)} keyed by the exact floats from
    ``grid_heights``, ready to feed log_l_branch's ``precomputed``.  For the
    certified backends the shared-phase recurrence makes this an order of
    magnitude cheaper than independent evaluations; the estimate-only
    Euler-product backend falls back to pointwise sums.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if dt <= 0:
        raise ValueError("dt must be positive")
    heights = grid_heights(t_start, dt, count)
    if spec.eval_backend == "zeta":
        if any(abs(complex(sigma0, t) - 1.0) < _POLE_GUARD for t in heights):
            raise ValueError("near pole s=1")
        vals, bounds = _grid_core(sigma0, 1.0, t_start, dt, count, tol,
                                  regularized=False)
        return {t: (complex(v), float(b))
                for t, v, b in zip(heights, vals, bounds)}
    if spec.eval_backend == "dirichlet":
        chi = spec.character
        q = chi.modulus
        total = np.zeros(count, dtype=np.complex128)
        bound = np.zeros(count, dtype=np.float64)
        for a in range(1, q + 1):
            coef = chi(a)
            if coef == 0:
                continue
            vals, bnds = _grid_core(sigma0, a / q, t_start, dt, count, tol,
                                    regularized=True)
            total += coef * vals
            bound += abs(coef) * bnds
        logq = math.log(q)
        scale = np.array([cmath.exp(complex(sigma0, t) * -logq)
                          for t in heights])
        total *= scale
        bound *= np.abs(scale)
        return {t: (complex(v), float(b))
                for t, v, b in zip(heights, total, bound)}
    return {t: value_at(spec, complex(sigma0, t), tol) for t in heights}


@dataclass(frozen=True)
class EvalPoint:
    """One evaluated point with its branch-tracked logarithm."""

    sigma: float
    t: float
    value: complex
    log_value: complex
    abs_err_bound: float


def _make_lookup(spec, tol, precomputed, sigma0):
    """Value source for branch continuation: precomputed grid values first."""
    def lookup(s: complex):
        if precomputed is not None and s.real == sigma0:
            hit = precomputed.get(s.imag)
            if hit is not None:
                return hit
        return value_at(spec, s, tol)
    return lookup


def _extend(lookup, s_from, v_from, log_from, s_to, depth):
    """Continue the branch from s_from to s_to, bisecting while the principal
    log of the value ratio is too large to be trusted."""
    v_to, b = lookup(s_to)
    if abs(v_to) < _ZERO_FLOOR:
        raise ZeroCrossingError(
            f"zero crossing suspected — refine or abort window (|L| < 1e-12 "
            f"at s={s_to:.6g})")
    step = cmath.log(v_to / v_from)
    if abs(step) < _MAX_LOG_STEP:
        return v_to, log_from + step, b
    if depth <= 0:
        raise ZeroCrossingError(
            f"zero crossing suspected — unresolvable winding between "
            f"s={s_from:.6g} and s={s_to:.6g}")
    mid = 0.5 * (s_from + s_to)
    v_mid, log_mid, _ = _extend(lookup, s_from, v_from, log_from, mid, depth - 1)
    return _extend(lookup, mid, v_mid, log_mid, s_to, depth - 1)


def _anchored_start(spec, t_anchor: float, tol: float):
    """Branch seed at Re s = 3: Euler-product log reconciled with the backend value."""
    s_anchor = complex(3.0, t_anchor)
    v, b = value_at(spec, s_anchor, tol)
    if abs(v) < _ZERO_FLOOR:
        raise ZeroCrossingError("zero crossing suspected at the branch anchor")
    log_ep = euler_product_log(spec, s_anchor, prime_limit=1e5)
    # snap to the backend value while keeping the Euler-product branch choice
    log_anchor = log_ep + cmath.log(v * cmath.exp(-log_ep))
    return s_anchor, v, log_anchor


def log_l_branch(spec: LFunctionSpec, sigma0: float, t_grid, tol: float = 1e-9,
                 precomputed: dict | None = None,
                 max_sigma_step: float = 0.25) -> list:
    """Continuous branch of log L along the vertical segment sigma0 + i*t_grid.

    Anchored at Re s = 3 over the first grid height (detouring to |t| = 1
    when the anchor column would pass near a pole of the spec), descended to
    sigma0, then continued along the ascending grid.  Each returned point
    carries the value, the branch-tracked log, and the backend's truncation
    bound.  ``precomputed`` may map grid t values to (value, bound) pairs
    computed in parallel; branch assembly itself is sequential.
    """
    t_grid = [float(t) for t in t_grid]
    if not t_grid:
        raise ValueError("empty evaluation grid")
    if any(b <= a for a, b in zip(t_grid, t_grid[1:])):
        raise ValueError("t_grid must be strictly ascending")

    if spec.eval_backend == "euler_product":
        limit = min(spec.prime_limit or 1e5, 1e5)
        out = []
        for t in t_grid:
            logv = euler_product_log(spec, complex(sigma0, t), prime_limit=limit)
            out.append(EvalPoint(sigma0, t, cmath.exp(logv), logv, math.inf))
        return out

    t0 = t_grid[0]
    if spec.pole_order > 0 and abs(t0) < 1.0:
        t_det = 1.0 if t0 >= 0.0 else -1.0
    else:
        t_det = t0
    lookup = _make_lookup(spec, tol, precomputed, sigma0)

    s_cur, v_cur, log_cur = _anchored_start(spec, t_det, tol)
    n_desc = max(2, int(math.ceil((3.0 - sigma0) / max_sigma_step)))
    b_cur = math.nan
    for i in range(1, n_desc + 1):
        sig = 3.0 + (sigma0 - 3.0) * i / n_desc
        s_next = complex(sig, t_det)
        v_cur, log_cur, b_cur = _extend(lookup, s_cur, v_cur, log_cur, s_next, 48)
        s_cur = s_next
    if t_det != t0:
        n_walk = max(2, int(math.ceil(abs(t_det - t0) / 0.25)))
        for i in range(1, n_walk + 1):
            s_next = complex(sigma0, t_det + (t0 - t_det) * i / n_walk)
            v_cur, log_cur, b_cur = _extend(lookup, s_cur, v_cur, log_cur,
                                            s_next, 48)
            s_cur = s_next

    # the descent's final step already evaluated the first grid point
    points = [EvalPoint(sigma0, t0, v_cur, log_cur, b_cur)]
    for t in t_grid[1:]:
        s_next = complex(sigma0, t)
        v_cur, log_cur, b = _extend(lookup, s_cur, v_cur, log_cur, s_next, 48)
        s_cur = s_next
        points.append(EvalPoint(sigma0, t, v_cur, log_cur, b))
    return points


def log_l_point(spec: LFunctionSpec, sigma0: float, t: float,
                tol: float = 1e-9) -> EvalPoint:
    """Branch-tracked log L at a single height (full anchored descent)."""
    return log_l_branch(spec, sigma0, [t], tol=tol)[0]
