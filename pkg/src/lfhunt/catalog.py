"""Catalog of L-functions with polynomial Euler product.

An ``LFunctionSpec`` stores per-prime inverse Euler roots nu_1(p)..nu_r(p)
(each of modulus <= 1), the derived prime coefficients a(p) = sum_j nu_j(p)
with |a(p)| <= r, the orthonormality constant kappa, and an evaluation
backend tag.  Built-in members: the zeta function and Dirichlet L-functions
of primitive characters to small moduli.  External L-functions enter through
a line-oriented coefficient file.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .errors import CoverageError
from .primes import log_integral, sieve_primes

__all__ = [
    "DirichletCharacter", "FunctionalData", "LFunctionSpec", "SsocRow",
    "builtin_zeta", "builtin_dirichlet", "chi3", "chi4",
    "ingest_coefficients", "write_coefficients", "ssoc_diagnostic", "ssoc_csv",
]

_ROOT_TOL = 1e-9       # slack on |nu| <= 1
_DERIVE_TOL = 1e-12    # a(p) must equal the root sum this closely


@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character mod q given by its value table on residues 0..q-1.

    Validates complete multiplicativity, unit modulus on residues coprime to
    q, and zero elsewhere.  Primitivity is decided by checking whether the
    character is induced from a proper divisor of q.
    """

    modulus: int
    values: tuple
    primitive: bool = field(init=False)

    def __post_init__(self):
        q = self.modulus
        if q < 1 or len(self.values) != q:
            raise ValueError("value table length must equal the modulus")
        vals = tuple(complex(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        for a in range(q):
            if gcd(a, q) > 1:
                if vals[a] != 0:
                    raise ValueError(f"chi({a}) must vanish when gcd(a,q)>1")
            elif abs(abs(vals[a]) - 1.0) > 1e-12:
                raise ValueError(f"|chi({a})| must be 1 on units")
        if q > 1 and vals[1 % q] != 1:
            raise ValueError("chi(1) must equal 1")
        for a in range(q):
            for b in range(a, q):
                if abs(vals[(a * b) % q] - vals[a] * vals[b]) > 1e-10:
                    raise ValueError("character is not completely multiplicative")
        object.__setattr__(self, "primitive", self._is_primitive())

    def _is_primitive(self) -> bool:
        q = self.modulus
        if q == 1:
            return True
        for d in range(1, q):
            if q % d != 0:
                continue
            induced = all(
                self.values[a] == 1
                for a in range(q)
                if gcd(a, q) == 1 and a % d == 1 % d
            )
            if induced:
                return False
        return True

    def __call__(self, n: int) -> complex:
        return self.values[n % self.modulus]

    @property
    def is_real(self) -> bool:
        return all(abs(v.imag) < 1e-12 for v in self.values)


def chi4() -> DirichletCharacter:
    """The nontrivial (primitive, real) character mod 4."""
    return DirichletCharacter(4, (0, 1, 0, -1))


def chi3() -> DirichletCharacter:
    """The nontrivial (primitive, real) character mod 3."""
    return DirichletCharacter(3, (0, 1, -1))


@dataclass(frozen=True)
class FunctionalData:
    """Stored-only functional-equation data; never used computationally."""

    q_factor: float
    gamma_shifts: tuple          # (lambda_j, mu_j) pairs
    root_number: complex


@dataclass(eq=False)
class LFunctionSpec:
    """Identity of one L-function: Euler roots, coefficients, degree, kappa.

    ``prime_limit`` is None for unlimited (rule-backed) coverage; ingested
    specs carry the file's stated limit and raise ``CoverageError`` beyond it.
    """

    name: str
    degree_bound: int
    kappa: float
    eval_backend: str                       # "zeta" | "dirichlet" | "euler_product"
    character: DirichletCharacter | None = None
    prime_limit: float | None = None
    pole_order: int = 0
    functional_data: FunctionalData | None = None
    _roots_table: dict | None = None        # p -> tuple of roots (ingested specs)
    _coeffs_table: dict | None = None       # p -> a(p) when only coefficients were given

    def __post_init__(self):
        if self.degree_bound < 1:
            raise ValueError("degree bound must be a positive integer")
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.eval_backend not in ("zeta", "dirichlet", "euler_product"):
            raise ValueError(f"unknown eval backend {self.eval_backend!r}")
        if self.eval_backend == "dirichlet" and self.character is None:
            raise ValueError("dirichlet backend requires a character")

    # -- coverage ------------------------------------------------------------

    def covers(self, x: float) -> bool:
        return self.prime_limit is None or x <= self.prime_limit + 1e-9

    def require_coverage(self, x: float):
        if not self.covers(x):
            raise CoverageError(
                f"coefficient coverage insufficient: {self.name} covers primes "
                f"<= {self.prime_limit}, requested {x}")

    # -- per-prime data --------------------------------------------------------

    def roots(self, p: int) -> tuple:
        """Inverse Euler roots at p (tuple of complex, length degree_bound)."""
        if self._roots_table is not None:
            try:
                return self._roots_table[p]
            except KeyError:
                raise CoverageError(
                    f"coefficient coverage insufficient: no roots stored for p={p}")
        if self._coeffs_table is not None:
            raise CoverageError(
                f"coefficient coverage insufficient: {self.name} stores only a(p), "
                "no Euler roots")
        if self.eval_backend == "zeta":
            return (1.0 + 0.0j,)
        return (self.character(p),)

    def coeff(self, p: int) -> complex:
        """Prime coefficient a(p) = sum of the inverse Euler roots at p."""
        if self._coeffs_table is not None:
            try:
                return self._coeffs_table[p]
            except KeyError:
                raise CoverageError(
                    f"coefficient coverage insufficient: no coefficient for p={p}")
        return complex(sum(self.roots(p)))

    def coeffs(self, primes) -> np.ndarray:
        """Vector of a(p) over an iterable of primes (coverage-checked)."""
        out = np.empty(len(primes), dtype=np.complex128)
        for i, p in enumerate(primes):
            out[i] = self.coeff(int(p))
        return out

    @property
    def certified_backend(self) -> bool:
        """True when the evaluation backend carries a truncation-error bound."""
        return self.eval_backend in ("zeta", "dirichlet")


def builtin_zeta() -> LFunctionSpec:
    """The Riemann zeta function: a(p) = 1, degree 1, kappa = 1."""
    return LFunctionSpec(
        name="zeta", degree_bound=1, kappa=1.0, eval_backend="zeta",
        pole_order=1,
        functional_data=FunctionalData(q_factor=math.pi ** -0.5,
                                       gamma_shifts=((0.5, 0.0),),
                                       root_number=1.0 + 0.0j))


def builtin_dirichlet(chi: DirichletCharacter, name: str | None = None) -> LFunctionSpec:
    """L(s, chi) for a primitive character mod q >= 3: a(p) = chi(p), kappa = 1."""
    if chi.modulus < 3 or not chi.primitive:
        raise ValueError("imprimitive character: need a primitive chi mod q >= 3")
    return LFunctionSpec(
        name=name or f"L_chi{chi.modulus}", degree_bound=1, kappa=1.0,
        eval_backend="dirichlet", character=chi,
        functional_data=FunctionalData(q_factor=(chi.modulus / math.pi) ** 0.5,
                                       gamma_shifts=((0.5, 0.0),),
                                       root_number=complex("nan")))


# -- coefficient files ---------------------------------------------------------
#
# Plain text, line oriented.  '#' starts a comment.  Header lines are
# "key = value" with keys name, degree, kappa, prime_limit and optional
# mode (= roots | coeffs, default roots).  After the header, one record per
# prime:  p  re1 im1 [re2 im2 ...]   (roots mode, degree pairs)
#         p  re im                   (coeffs mode)
# Every prime <= prime_limit must be present.

_HEADER_KEYS = {"name", "degree", "kappa", "prime_limit", "mode"}


def ingest_coefficients(path) -> LFunctionSpec:
    """Read a coefficient file and build a validated spec.

    Rejects any root with |nu| > 1 + 1e-9 ("Ramanujan bound violated") and
    files with gaps in their declared prime range.  The returned spec uses
    the truncated-Euler-product backend, which is estimate-only (flagged
    non-certified in reports).
    """
    header: dict = {}
    records: list = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line and not line[0].isdigit():
                key, _, value = line.partition("=")
                key = key.strip()
                if key not in _HEADER_KEYS:
                    raise ValueError(f"unknown header key {key!r} (line {lineno})")
                header[key] = value.strip()
            else:
                records.append((lineno, line.split()))
    for req in ("name", "degree", "kappa", "prime_limit"):
        if req not in header:
            raise ValueError(f"coefficient file missing header key {req!r}")
    name = header["name"]
    degree = int(header["degree"])
    kappa = float(header["kappa"])
    prime_limit = float(header["prime_limit"])
    mode = header.get("mode", "roots")
    if mode not in ("roots", "coeffs"):
        raise ValueError(f"unknown mode {header['mode']!r}")

    roots_table: dict = {}
    coeffs_table: dict = {}
    for lineno, parts in records:
        p = int(parts[0])
        vals = [float(v) for v in parts[1:]]
        if mode == "roots":
            if len(vals) != 2 * degree:
                raise ValueError(f"expected {degree} root pairs at line {lineno}")
            roots = tuple(complex(vals[2 * i], vals[2 * i + 1]) for i in range(degree))
            for nu in roots:
                if abs(nu) > 1.0 + _ROOT_TOL:
                    raise ValueError(
                        f"Ramanujan bound violated: |nu|={abs(nu):.6g} at p={p}")
            roots_table[p] = roots
            coeffs_table[p] = complex(sum(roots))
        else:
            if len(vals) != 2:
                raise ValueError(f"expected one coefficient pair at line {lineno}")
            a = complex(vals[0], vals[1])
            if degree == 1 and abs(a) > 1.0 + _ROOT_TOL:
                raise ValueError(
                    f"Ramanujan bound violated: |a|={abs(a):.6g} at p={p}")
            if abs(a) > degree + _ROOT_TOL:
                raise ValueError(
                    f"Ramanujan bound violated: |a|={abs(a):.6g} > degree at p={p}")
            if degree == 1:
                roots_table[p] = (a,)
            coeffs_table[p] = a

    expected = set(int(p) for p in sieve_primes(int(prime_limit)))
    present = set(coeffs_table)
    missing = expected - present
    if missing:
        raise CoverageError(
            f"coefficient coverage insufficient: {len(missing)} primes <= "
            f"{prime_limit:g} absent (first: {min(missing)})")
    extra = present - expected
    if extra:
        raise ValueError(f"non-prime or out-of-range entries: {sorted(extra)[:5]}")

    spec = LFunctionSpec(
        name=name, degree_bound=degree, kappa=kappa, eval_backend="euler_product",
        prime_limit=prime_limit,
        _roots_table=roots_table or None,
        _coeffs_table=coeffs_table)
    for p, a in coeffs_table.items():
        if abs(a) > degree + _ROOT_TOL:
            raise ValueError(f"Ramanujan bound violated: |a(p)| > degree at p={p}")
        if p in roots_table and abs(a - sum(roots_table[p])) > _DERIVE_TOL:
            raise ValueError(f"a(p) does not match root sum at p={p}")
    _kappa_crosscheck(spec, prime_limit)
    return spec


def _kappa_crosscheck(spec: LFunctionSpec, x_max: float):
    """Warn when the declared kappa is >20% off the empirical diagonal slope."""
    if x_max < 100:
        return
    rows = ssoc_diagnostic(spec, spec, x_max, [x_max])
    empirical = rows[0].s_value.real / log_integral(x_max)
    if abs(empirical - spec.kappa) > 0.2 * spec.kappa:
        warnings.warn(
            f"declared kappa={spec.kappa:g} for {spec.name!r} differs from the "
            f"empirical diagonal slope {empirical:.4g} by more than 20%",
            stacklevel=3)


def write_coefficients(spec: LFunctionSpec, path, prime_limit: float):
    """Export a spec's Euler roots up to prime_limit in the ingestion format."""
    spec.require_coverage(prime_limit)
    primes = sieve_primes(int(prime_limit))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"name = {spec.name}\n")
        fh.write(f"degree = {spec.degree_bound}\n")
        fh.write(f"kappa = {spec.kappa!r}\n")
        fh.write(f"prime_limit = {prime_limit:g}\n")
        fh.write("mode = roots\n")
        for p in primes:
            roots = spec.roots(int(p))
            cells = " ".join(f"{nu.real!r} {nu.imag!r}" for nu in map(complex, roots))
            fh.write(f"{int(p)} {cells}\n")


# -- orthonormality diagnostics -------------------------------------------------

@dataclass(frozen=True)
class SsocRow:
    """One checkpoint of the pairwise prime-sum diagnostic."""

    x: float
    s_value: complex              # sum over p <= x of a_i(p) * conj(a_j(p))
    predicted: float              # kappa_j * Li(x) on the diagonal, else 0
    residual: float               # |s_value - predicted|
    normalized_residual: float    # residual / (x / log^2 x)


def ssoc_diagnostic(spec_i: LFunctionSpec, spec_j: LFunctionSpec, x_max: float,
                    checkpoints) -> list:
    """Empirical orthonormality sums S_ij(x) against their predicted growth.

    Diagonal pairs (matched by name) are compared with kappa_j * Li(x);
    distinct pairs with 0.  The normalized residual divides by x / log^2 x.
    """
    checkpoints = sorted(float(x) for x in checkpoints)
    if not checkpoints:
        return []
    if checkpoints[-1] > x_max + 1e-9:
        raise ValueError("checkpoint beyond x_max")
    spec_i.require_coverage(x_max)
    spec_j.require_coverage(x_max)
    primes = sieve_primes(int(min(x_max, checkpoints[-1])))
    diagonal = spec_i.name == spec_j.name
    rows = []
    acc = 0.0 + 0.0j
    idx = 0
    for x in checkpoints:
        while idx < len(primes) and primes[idx] <= x:
            p = int(primes[idx])
            acc += spec_i.coeff(p) * spec_j.coeff(p).conjugate()
            idx += 1
        predicted = spec_j.kappa * log_integral(x) if diagonal else 0.0
        residual = abs(acc - predicted)
        scale = x / math.log(x) ** 2
        rows.append(SsocRow(x=x, s_value=acc, predicted=predicted,
                            residual=residual,
                            normalized_residual=residual / scale))
    return rows


def ssoc_csv(rows) -> str:
    """CSV table (x, S_re, S_im, predicted, residual, normalized_residual)."""
    lines = ["x,S_re,S_im,predicted,residual,normalized_residual"]
    for r in rows:
        lines.append(
            f"{r.x:.17g},{r.s_value.real:.17g},{r.s_value.imag:.17g},"
            f"{r.predicted:.17g},{r.residual:.17g},{r.normalized_residual:.17g}")
    return "\n".join(lines) + "\n"
