"""Prime sieves, the smoothed prime window, and the offset logarithmic integral.

The window around a center rho collects every prime p with |log(p/rho)| <= 1,
i.e. rho/e <= p <= e*rho, together with the triangular weight
w_p = 1 - |log(p/rho)| and the powers p**(-sigma0).  These are the raw
materials for the resonating polynomial and for the orthonormality
diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

__all__ = ["PrimeWindow", "sieve_primes", "build_window", "log_integral"]

# Above this limit a flat boolean sieve would need too much memory in one piece.
_FLAT_SIEVE_CUTOFF = 10_000_000
_SEGMENT_SIZE = 1 << 22


def _flat_sieve(limit: int) -> np.ndarray:
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.nonzero(mask)[0].astype(np.int64)


def _segmented_sieve(limit: int) -> np.ndarray:
    base = _flat_sieve(math.isqrt(limit))
    chunks = [base]
    lo = math.isqrt(limit) + 1
    while lo <= limit:
        hi = min(lo + _SEGMENT_SIZE, limit + 1)
        mask = np.ones(hi - lo, dtype=bool)
        for p in base:
            p = int(p)
            start = ((lo + p - 1) // p) * p
            if start < hi:
                mask[start - lo :: p] = False
        chunks.append(np.nonzero(mask)[0].astype(np.int64) + lo)
        lo = hi
    return np.concatenate(chunks)


def sieve_primes(limit) -> np.ndarray:
    """All primes <= limit, ascending (int64 array).

    A limit below 2 yields an empty array.  Deterministic; segmented above
    1e7 to bound memory.
    """
    limit = int(limit)
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    if limit <= _FLAT_SIEVE_CUTOFF:
        return _flat_sieve(limit)
    return _segmented_sieve(limit)


@dataclass(frozen=True, eq=False)
class PrimeWindow:
    """Primes in [rho/e, e*rho] with triangular weights and p**(-sigma0).

    Weight roundoff is at most a few ulp of 1 (absolute ~3e-16), so relative
    accuracy 1e-14 holds away from the window boundary where w_p -> 0.
    ``build_window`` is the validated constructor (cross-checked against a
    full sieve); direct construction is allowed for partial windows in tests
    and only light per-prime checks run.
    """

    rho: float
    sigma0: float
    primes: tuple
    weights: np.ndarray
    inv_powers: np.ndarray

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("window center rho must be positive")
        if not 0.5 < self.sigma0 < 1.0:
            raise ValueError("sigma0 must lie in (1/2, 1)")
        n = len(self.primes)
        if len(self.weights) != n or len(self.inv_powers) != n:
            raise ValueError("primes, weights and inv_powers must have equal length")
        for p, w, q in zip(self.primes, self.weights, self.inv_powers):
            lg = math.log(p / self.rho)
            if abs(lg) > 1.0 + 1e-9:
                raise ValueError(f"prime {p} outside window of rho={self.rho}")
            if abs(w - max(0.0, 1.0 - abs(lg))) > 1e-12:
                raise ValueError(f"weight mismatch at p={p}")
            if abs(q - p ** (-self.sigma0)) > 1e-12 * q:
                raise ValueError(f"inv_power mismatch at p={p}")
        self.weights.flags.writeable = False
        self.inv_powers.flags.writeable = False

    def __len__(self) -> int:
        return len(self.primes)

    @property
    def delta(self) -> float:
        """Sum of p**(-sigma0) over the window."""
        return float(np.sum(self.inv_powers))


def build_window(rho: float, sigma0: float) -> PrimeWindow:
    """Prime window centered at rho, complete against a full sieve.

    Requires rho >= 3 (smaller centers may trap fewer than one prime) and
    sigma0 in (1/2, 1).  Endpoints are inclusive; a boundary prime carries
    weight 0, so inclusion is value-neutral.
    """
    if rho < 3:
        raise ValueError("window too small: rho must be >= 3")
    if not 0.5 < sigma0 < 1.0:
        raise ValueError("sigma0 must lie in (1/2, 1)")
    rho = float(rho)
    hi = int(math.ceil(rho * math.e)) + 1
    candidates = sieve_primes(hi)
    logs = np.log(candidates.astype(np.float64) / rho)
    keep = np.abs(logs) <= 1.0 + 1e-12
    primes = tuple(int(p) for p in candidates[keep])
    weights = np.maximum(0.0, 1.0 - np.abs(logs[keep]))
    inv_powers = candidates[keep].astype(np.float64) ** (-sigma0)
    return PrimeWindow(rho=rho, sigma0=float(sigma0), primes=primes,
                       weights=weights, inv_powers=inv_powers)


def log_integral(x: float) -> float:
    """Offset logarithmic integral: integral of dt/log(t) from 2 to x.

    Adaptive quadrature, absolute error <= 1e-9.  The lower limit 2 matches
    the prime-counting convention (no principal value needed).
    """
    x = float(x)
    if x < 2.0:
        raise ValueError("below lower limit: x must be >= 2")
    if x == 2.0:
        return 0.0
    val, err = quad(lambda t: 1.0 / math.log(t), 2.0, x, epsabs=1e-12,
                    epsrel=1e-13, limit=300)
    if err > 1e-9:
        val, err = quad(lambda t: 1.0 / math.log(t), 2.0, x, epsabs=1e-12,
                        epsrel=1e-13, limit=2000)
    return val
