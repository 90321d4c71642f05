"""Resonating Dirichlet polynomials and the phase-target system.

Given specs L_1..L_k and a prime window, the k linear functionals

    g_j(z) = sum_p a_j(p) * w_p * p^(-sigma0) * z_p,     |z_p| <= 1,

can hit any targets xi_j up to the window capacity

    (c0/k) * (min_j kappa_j / max_j r_j) * rho^(1-sigma0) / log(rho),

with c0 below the capacity constant C(sigma0) = (2*sinh((1-sigma0)/2)/(1-sigma0))^2.
``solve_denseness`` produces such a z constructively (minimum-norm least
squares, then alternating projections between the affine constraint set and
the product of unit disks), and ``good_rounding`` pivots the solution along
constraint null-space directions until at most k+1 coordinates remain off
the unit circle, then snaps those, yielding pure phases e^(-2*pi*i*theta_p)
with a certified residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .catalog import LFunctionSpec
from .errors import DegenerateSystemError, InfeasibleTargetsError
from .primes import PrimeWindow, sieve_primes

__all__ = [
    "ResonanceSystem", "PhaseAssignment", "capacity_constant", "window_capacity",
    "build_system", "resonator_sum", "solve_denseness", "good_rounding",
    "fejer_smoothing_check", "prime_power_tail", "capacity_asymptotics_check",
    "CapacityRow",
]

_BOUNDARY_TOL = 1e-9     # |z| >= 1 - this counts as on the circle
_BOX_TOL = 1e-12         # allowed overshoot of |z| beyond 1


def capacity_constant(sigma0: float) -> float:
    """C(sigma0) = (2*sinh((1-sigma0)/2) / (1-sigma0))^2, the sharp window constant."""
    if not 0.0 < sigma0 < 1.0:
        raise ValueError("sigma0 must lie in (0, 1)")
    h = (1.0 - sigma0) / 2.0
    return (2.0 * math.sinh(h) / (1.0 - sigma0)) ** 2


def window_capacity(window: PrimeWindow, specs, c0: float) -> float:
    """Largest guaranteed-feasible |xi_j| for k specs on this window."""
    k = len(specs)
    min_kappa = min(s.kappa for s in specs)
    max_r = max(s.degree_bound for s in specs)
    rho = window.rho
    return (c0 / k) * (min_kappa / max_r) * rho ** (1.0 - window.sigma0) / math.log(rho)


@dataclass(frozen=True, eq=False)
class ResonanceSystem:
    """The phase-target system: coefficient matrix, targets, and capacity."""

    window: PrimeWindow
    specs: tuple
    coeff: np.ndarray        # k x n complex, a_j(p) * w_p * p^(-sigma0)
    xi: np.ndarray           # k complex targets
    capacity: float
    c0: float

    def __post_init__(self):
        k, n = self.coeff.shape
        if k != len(self.specs) or n != len(self.window):
            raise ValueError("coefficient matrix shape mismatch")
        if len(self.xi) != k:
            raise ValueError("need one target per spec")
        if np.any(np.abs(self.xi) > self.capacity * (1.0 + 1e-12)):
            raise ValueError("targets exceed the window capacity")
        self.coeff.flags.writeable = False
        self.xi.flags.writeable = False

    @property
    def k(self) -> int:
        return len(self.specs)

    def evaluate(self, z: np.ndarray) -> np.ndarray:
        """g_j(z) for all j (plain matrix product; see brute_evaluate for fsum)."""
        return self.coeff @ z

    def brute_evaluate(self, z: np.ndarray) -> np.ndarray:
        """g_j(z) by exactly-rounded summation, for residual certificates."""
        out = np.empty(self.k, dtype=np.complex128)
        for j in range(self.k):
            terms = self.coeff[j] * z
            out[j] = complex(math.fsum(terms.real), math.fsum(terms.imag))
        return out


def build_system(specs, window: PrimeWindow, *, c0: float | None = None,
                 theta_targets=None, xi=None,
                 target_scale: float = 0.5) -> ResonanceSystem:
    """Assemble the system for the given specs on a window.

    Default targets are xi_j = exp(i*theta_j) * target_scale * capacity: a
    real-positive magnitude rotated to the requested extreme-value direction.
    c0 defaults to half the capacity constant, safely inside the strict
    inequality the capacity bound requires.
    """
    specs = tuple(specs)
    if not specs:
        raise ValueError("need at least one spec")
    if len(specs) > len(window):
        raise ValueError("more specs than window primes")
    if c0 is None:
        c0 = 0.5 * capacity_constant(window.sigma0)
    elif not 0.0 < c0 < capacity_constant(window.sigma0):
        raise ValueError("c0 must lie in (0, C(sigma0))")
    cap = window_capacity(window, specs, c0)
    k, n = len(specs), len(window)
    coeff = np.empty((k, n), dtype=np.complex128)
    for j, spec in enumerate(specs):
        spec.require_coverage(window.primes[-1])
        coeff[j] = spec.coeffs(window.primes) * window.weights * window.inv_powers
    if xi is None:
        thetas = np.zeros(k) if theta_targets is None else np.asarray(theta_targets, float)
        if len(thetas) != k:
            raise ValueError("need one theta target per spec")
        xi = np.exp(1j * thetas) * (target_scale * cap)
    xi = np.asarray(xi, dtype=np.complex128).copy()
    return ResonanceSystem(window=window, specs=specs, coeff=coeff, xi=xi,
                           capacity=cap, c0=c0)


@dataclass(frozen=True, eq=False)
class PhaseAssignment:
    """Unit-disk values z_p per window prime, with rounding bookkeeping.

    ``thetas`` holds theta_p in [0, 1) with z_p = e^(-2*pi*i*theta_p) for
    every coordinate on the unit circle; ``snapped`` records the coordinates
    the rounding stage forced onto the circle from the interior.
    """

    primes: tuple
    z: np.ndarray
    snapped: tuple = ()

    def __post_init__(self):
        if len(self.z) != len(self.primes):
            raise ValueError("one z per prime required")
        if np.any(np.abs(self.z) > 1.0 + _BOX_TOL):
            raise ValueError("assignment leaves the unit disk")
        self.z.flags.writeable = False

    @property
    def interior(self) -> tuple:
        """Primes whose coordinate is strictly inside the unit disk."""
        inside = np.abs(self.z) < 1.0 - _BOUNDARY_TOL
        return tuple(p for p, flag in zip(self.primes, inside) if flag)

    @property
    def thetas(self) -> dict:
        """theta_p for unimodular coordinates: z_p = e^(-2*pi*i*theta_p)."""
        out = {}
        for p, zp in zip(self.primes, self.z):
            if abs(zp) >= 1.0 - _BOUNDARY_TOL:
                out[p] = (-np.angle(zp) / (2.0 * math.pi)) % 1.0
        return out


def _unit_phase(x: float) -> complex:
    """e^(i*x)."""
    return complex(math.cos(x), math.sin(x))


def resonator_sum(spec: LFunctionSpec, window: PrimeWindow, sigma0: float,
                  t: float) -> complex:
    """S(t) = sum over window primes of a(p) * w_p * p^(-sigma0 - i*t).

    Ascending-p order with exactly-rounded (fsum) accumulation.
    """
    if len(window) == 0:
        return 0.0 + 0.0j
    spec.require_coverage(window.primes[-1])
    re_parts, im_parts = [], []
    for p, w in zip(window.primes, window.weights):
        term = spec.coeff(p) * w * p ** (-sigma0) * _unit_phase(-t * math.log(p))
        re_parts.append(term.real)
        im_parts.append(term.imag)
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def _min_norm_solution(coeff: np.ndarray, xi: np.ndarray) -> np.ndarray:
    sol, *_ = np.linalg.lstsq(coeff, xi, rcond=None)
    return sol


def _box_project(z: np.ndarray) -> np.ndarray:
    mags = np.abs(z)
    over = mags > 1.0
    if np.any(over):
        z = z.copy()
        z[over] /= mags[over]
    return z


def solve_denseness(system: ResonanceSystem, *, tol_factor: float = 1e-8,
                    max_iter: int = 100_000,
                    start: np.ndarray | None = None) -> PhaseAssignment:
    """Solve g_j(z) = xi_j over the product of unit disks.

    Minimum-norm least squares seeds the iteration; if it already sits in
    the disk product it is exact.  Otherwise alternate projections between
    the affine solution set and the disk product (both convex) until the
    residual after the disk projection is at most tol_factor * capacity.
    """
    A = system.coeff
    xi = system.xi
    tol = tol_factor * system.capacity
    z = _min_norm_solution(A, xi) if start is None else np.asarray(
        start, dtype=np.complex128).copy()
    gram = A @ A.conj().T
    # affine projection: z -> z - A^H (A A^H)^(-1) (A z - xi), via pinv for
    # rank-deficient rows
    try:
        gram_inv = np.linalg.inv(gram)
        def affine_project(v):
            return v - A.conj().T @ (gram_inv @ (A @ v - xi))
    except np.linalg.LinAlgError:
        pinv = np.linalg.pinv(A)
        def affine_project(v):
            return v - pinv @ (A @ v - xi)

    residual = math.inf
    for _ in range(max_iter):
        z = _box_project(z)
        residual = np.max(np.abs(A @ z - xi))
        if residual <= tol:
            return PhaseAssignment(primes=system.window.primes, z=z)
        z = affine_project(z)
    raise InfeasibleTargetsError(
        f"targets infeasible at this rho: residual {residual:.3e} > {tol:.3e} "
        f"after {max_iter} iterations")


def _real_constraint_matrix(coeff_interior: np.ndarray) -> np.ndarray:
    """2k x 2m real matrix of the k complex constraints on m interior coords."""
    re, im = coeff_interior.real, coeff_interior.imag
    top = np.hstack([re, -im])
    bot = np.hstack([im, re])
    return np.vstack([top, bot])


def _null_directions(mat: np.ndarray):
    """Orthonormal null-space basis (rows) and a condition estimate."""
    u, s, vt = np.linalg.svd(mat)
    rank_tol = max(mat.shape) * np.finfo(float).eps * (s[0] if len(s) else 1.0)
    rank = int(np.sum(s > rank_tol))
    cond = float(s[0] / s[rank - 1]) if rank else math.inf
    return vt[rank:], cond


def _step_to_boundary(z_int: np.ndarray, d: np.ndarray) -> float:
    """Largest step along direction d keeping every |z_p + step*d_p| <= 1."""
    best = math.inf
    for zp, dp in zip(z_int, d):
        ad2 = (dp * dp.conjugate()).real
        if ad2 < 1e-30:
            continue
        b = (zp.conjugate() * dp).real
        c = (zp * zp.conjugate()).real - 1.0
        disc = b * b - ad2 * c
        if disc < 0.0:
            disc = 0.0
        root = (-b + math.sqrt(disc)) / ad2
        if root < best:
            best = root
    return best


def good_rounding(system: ResonanceSystem, assignment: PhaseAssignment,
                  *, residual_guard: float | None = None) -> PhaseAssignment:
    """Round a feasible z to pure phases, pivoting through extreme points.

    While more than k+1 coordinates are interior, move along a real
    null-space direction of the active constraint matrix (the move leaves
    every g_j unchanged) until some coordinate reaches the unit circle; the
    direction chosen maximizes the minimum step-to-boundary, which empties
    the interior fastest.  The surviving <= k+1 interior coordinates are then
    snapped outward to their own phase (0 snaps to +1), each perturbing g_j
    by at most |coeff_{j,p}|, so the total extra residual is bounded by
    (k+1) * max_p |coeff_{j,p}|.
    """
    k = system.k
    z = assignment.z.astype(np.complex128).copy()
    g_before = system.evaluate(z)
    interior = [i for i, zp in enumerate(z) if abs(zp) < 1.0 - _BOUNDARY_TOL]

    while len(interior) > k + 1:
        sub = system.coeff[:, interior]
        directions, cond = _null_directions(_real_constraint_matrix(sub))
        if len(directions) == 0:
            raise DegenerateSystemError(
                f"degenerate constraint matrix: no null direction with "
                f"{len(interior)} interior coordinates (cond ~ {cond:.3e})")
        m = len(interior)
        z_int = z[interior]
        best_step, best_move = -1.0, None
        for row in directions:
            d = row[:m] + 1j * row[m:]
            norm = np.linalg.norm(d)
            if norm < 1e-14:
                continue
            d = d / norm
            for cand in (d, -d):
                step = _step_to_boundary(z_int, cand)
                if math.isfinite(step) and step > best_step:
                    best_step, best_move = step, cand
        if best_move is None or not math.isfinite(best_step):
            raise DegenerateSystemError(
                f"degenerate constraint matrix: unbounded pivot with "
                f"{len(interior)} interior coordinates (cond ~ {cond:.3e})")
        z_new = z_int + best_step * best_move
        # clamp landing roundoff, then drop newly-boundary coordinates
        mags = np.abs(z_new)
        z_new[mags > 1.0] /= mags[mags > 1.0]
        for idx, zi in zip(interior, z_new):
            z[idx] = zi
        interior = [i for i in interior if abs(z[i]) < 1.0 - _BOUNDARY_TOL]

    drift = np.max(np.abs(system.evaluate(z) - g_before))
    guard = residual_guard if residual_guard is not None \
        else 1e-6 * max(1.0, float(np.max(np.abs(system.coeff))))
    if drift > guard:
        raise DegenerateSystemError(
            f"degenerate constraint matrix: pivot drift {drift:.3e} exceeds "
            f"guard {guard:.3e}")

    snapped = tuple(system.window.primes[i] for i in interior)
    for i in interior:
        z[i] = 1.0 + 0.0j if abs(z[i]) < 1e-14 else z[i] / abs(z[i])
    return PhaseAssignment(primes=assignment.primes, z=z, snapped=snapped)


def fejer_smoothing_check(tau: float, theta: float, rho: float) -> float:
    """Integral over [-tau, tau] of (sin(t/2)/t)^2 * (1 + cos(theta + t*log rho)).

    For rho >= e the infinite integral is at most pi/2 (the smoothing
    kernel's triangular spectrum vanishes at frequency log rho >= 1), and
    truncation only lowers it; callers assert <= pi/2 + 1e-6 on that domain.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    logr = math.log(rho)

    def integrand(t: float) -> float:
        if abs(t) < 1e-8:
            kernel = 0.25 - t * t / 48.0
        else:
            kernel = (math.sin(0.5 * t) / t) ** 2
        return kernel * (1.0 + math.cos(theta + t * logr))

    subdivisions = int(min(300_000, max(200, 4 * tau * (1.0 + abs(logr)) / math.pi)))
    val, _ = quad(integrand, -tau, tau, epsabs=1e-10, epsrel=1e-10,
                  limit=subdivisions)
    return val


def prime_power_tail(spec: LFunctionSpec, rho: float, sigma0: float) -> float:
    """Contribution of prime powers p^k, k >= 2, landing in the window.

    Returns sum over k >= 2 and primes with rho/e <= p^k <= e*rho of
    sum_j |nu_j(p)|^k / (k * p^(k*sigma0)).  Scales like rho^(1/2 - sigma0).
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    lo, hi = rho / math.e, rho * math.e
    if hi < 4.0:
        return 0.0
    spec.require_coverage(math.sqrt(hi) + 1)
    total = []
    kmax = int(math.floor(math.log(hi) / math.log(2.0)))
    for k in range(2, kmax + 1):
        p_lo = lo ** (1.0 / k)
        p_hi = hi ** (1.0 / k)
        for p in sieve_primes(int(math.floor(p_hi + 1e-9))):
            p = int(p)
            if p ** k < lo - 1e-9:
                continue
            contrib = sum(abs(nu) ** k for nu in spec.roots(p))
            total.append(contrib / (k * p ** (k * sigma0)))
    return math.fsum(total)


@dataclass(frozen=True)
class CapacityRow:
    """One center's window sum against its predicted asymptotic size."""

    rho: float
    window_sum: float        # sum of |a(p)|^2 * w_p * p^(-sigma0)
    ratio: float             # window_sum * log(rho) / (kappa * rho^(1-sigma0))
    deviation: float         # |ratio - C(sigma0)|


def capacity_asymptotics_check(spec: LFunctionSpec, sigma0: float,
                               rho_list) -> list:
    """Measure how fast the weighted window sums approach their limit.

    For each rho the ratio should converge to C(sigma0) like 1/log(rho).
    """
    rows = []
    c_limit = capacity_constant(sigma0)
    rho_list = [float(r) for r in rho_list]
    top = max(rho_list) * math.e
    spec.require_coverage(top)
    primes = sieve_primes(int(math.ceil(top)) + 1)
    logs = np.log(primes.astype(np.float64))
    coeff_sq = np.abs(spec.coeffs(primes)) ** 2 if len(primes) < 300_000 else None
    for rho in rho_list:
        sel = np.abs(logs - math.log(rho)) <= 1.0 + 1e-12
        p_sel = primes[sel].astype(np.float64)
        w = np.maximum(0.0, 1.0 - np.abs(np.log(p_sel / rho)))
        if coeff_sq is not None:
            asq = coeff_sq[sel]
        else:
            asq = np.abs(spec.coeffs(primes[sel])) ** 2
        window_sum = float(np.sum(asq * w * p_sel ** (-sigma0)))
        ratio = window_sum * math.log(rho) / (spec.kappa * rho ** (1.0 - sigma0))
        rows.append(CapacityRow(rho=rho, window_sum=window_sum, ratio=ratio,
                                deviation=abs(ratio - c_limit)))
    return rows
