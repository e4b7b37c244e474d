"""Main-term constants, real-argument zeta, series factorization checks, and
residual analysis of secondary terms.

All real arithmetic runs at WORK_PREC bits through mpmath: residuals subtract
two quantities of size x, so double precision would eat most of the signal.
Euler products are truncated at a finite prime with the tail repaired through
the matching tail factors of zeta (the dominant part of every local factor
beyond the truncation point), and every result carries a rigorous
tail_estimate for what remains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from mpmath import mp, mpf

from .arith import primes_upto, tau_k
from .errors import (
    DegenerateDataError,
    DivergenceError,
    PrecisionError,
)
from .expfn import ExponentFn, TheoremProfile, derive_v, evaluate
from .summatory import (
    DEFAULT_BLOCK,
    enumerate_full,
    pointwise_values,
    summatory_sieve_at,
)

WORK_PREC = 120  # bits


@dataclass(frozen=True)
class EulerProductResult:
    """A truncated Euler product with a rigorous bound on the truncation error.

    tail_estimate bounds |value - true| in absolute terms and is constructed
    so that recomputing with p_max doubled moves the value by less than it.
    """

    value: object  # mpf
    p_max: int
    a_max: int
    tail_estimate: float

    def __float__(self) -> float:
        return float(self.value)


def _inner_tail(bound_c, bound_m, a_cut, ps):
    """Upper bound on sum over a > a_cut of bound_c * a^m * ps^-a  (ps > 1)."""
    q = (1.0 + 1.0 / a_cut) ** bound_m
    if q >= 0.99 * ps:
        raise PrecisionError(
            f"cannot bound inner tail: growth ratio {q:.3f} vs p^sigma {ps:.3f}"
        )
    return bound_c * float(a_cut) ** bound_m * ps ** (-a_cut) * (q / ps) / (1 - q / ps)


def _accelerated_product(delta, a0, sigma, p_max, a_max,
                         bound_c, bound_m, zero_from):
    """prod over p of (1 + sum_{a >= a0} delta(a) * p^(-sigma*a)), with tail.

    Local factors are computed exactly for p <= p_max (inner sums cut where
    terms drop below working precision); the product over p > p_max is
    approximated by the matching tail of zeta(sigma*a0)^delta(a0), which is
    the leading part of every remaining local factor. Returns
    (value, log_tail, ops): |log true - log value| <= log_tail.

    delta(a) must satisfy |delta(a)| <= bound_c * a^bound_m; zero_from, when
    given, promises delta(a) = 0 for a >= zero_from and makes the
    corresponding tails exactly zero.
    """
    dl = delta(a0)
    one = mpf(1)
    prod = one
    inner_log = 0.0
    ops = 0
    for p in primes_upto(p_max):
        p = int(p)
        ps = float(p) ** sigma
        # terms below 2^-(WORK_PREC+16) cannot move the local factor
        a_cut = min(a_max, a0 + int((WORK_PREC + 16) * math.log(2) /
                                    (sigma * math.log(p))) + 1)
        if zero_from is not None:
            a_cut = min(a_cut, zero_from - 1)
        inv = one / mpf(p) ** mpf(sigma) if sigma != 1 else one / p
        u0 = inv**a0
        local = one
        pw = u0
        for a in range(a0, a_cut + 1):
            d = delta(a)
            if d:
                local += d * pw
                ops += 2
            pw *= inv
            ops += 1
        if local <= 0:
            raise DivergenceError(f"local factor at p={p} is {local}")
        if zero_from is None or zero_from > a_cut + 1:
            t = _inner_tail(bound_c, bound_m, a_cut, ps)
            lf = float(local)
            if t >= 0.5 * lf:
                raise PrecisionError(f"inner tail at p={p} dominates local factor")
            inner_log += t / (lf - t)
        if dl:
            local *= (one - u0) ** dl
            ops += 2
        prod *= local
        ops += 1
    if dl:
        prod *= zeta_real(a0 * sigma) ** dl
        ops += 2

    # primes beyond p_max: local * (1-u)^dl = 1 + eps with |eps| <= c2 * p^(-s1)
    s1 = (a0 + 1) * sigma
    pf = float(p_max)
    if zero_from is not None:
        c1 = sum(abs(delta(a)) for a in range(a0 + 1, zero_from))
    else:
        q = (1.0 + 1.0 / (a0 + 1)) ** bound_m
        if q >= 0.5 * pf**sigma:
            raise PrecisionError("p_max too small to bound the prime tail")
        c1 = bound_c * float(a0 + 1) ** bound_m / (1 - q / pf**sigma)
    dl_abs = abs(dl)
    if dl_abs == 0 and c1 == 0:
        prime_log = 0.0
    else:
        u_max = pf ** (-sigma * a0)
        w_max = dl_abs * u_max + c1 * pf ** (-s1)
        if w_max >= 0.5:
            raise PrecisionError("p_max too small to bound the prime tail")
        c2 = c1 + pf ** (-sigma * (a0 - 1)) * (
            (dl_abs + c1 * pf**-sigma) ** 2 / (2 * (1 - w_max))
            + dl_abs / (2 * (1 - u_max))
        )
        prime_log = c2 * pf ** (1 - s1) / (s1 - 1)

    rounding = ops * 2.0 ** (2 - WORK_PREC)
    return prod, inner_log + prime_log + rounding, ops


def _delta_bounds(f: ExponentFn, a0: int):
    """(bound_c, bound_m, zero_from) for the difference sequence of f."""
    zero_from = None if f.constant_from is None else f.constant_from + 1
    if f.growth is not None:
        c, m = f.growth
        return 2.0 * c, m, zero_from
    if zero_from is None:
        raise ValueError(
            f"{f.name}: growth metadata (or constant_from) required for tails"
        )
    worst = max(
        (abs(f.value_at(a) - f.value_at(a - 1)) for a in range(a0, zero_from)),
        default=0,
    )
    return float(worst), 0.0, zero_from


def euler_constant(f: ExponentFn, ell: int, p_max: int = 10**6,
                   a_max: int = 120) -> EulerProductResult:
    """Main-term constant of f: prod over p of
    (1 + sum_{a >= ell} (f(p^a) - f(p^(a-1))) / p^a), with tail bound.

    Defaults (p_max = 1e6, a_max = 120) keep tail_estimate below 1e-9 for
    every function family in this package.
    """
    if ell < 2:
        raise ValueError(f"euler_constant needs ell >= 2, got {ell}")
    if p_max < 2:
        raise ValueError(f"euler_constant needs p_max >= 2, got {p_max}")
    if a_max < ell + 2:
        raise ValueError(f"euler_constant needs a_max >= ell+2, got {a_max}")
    g = f.value_at

    def delta(a: int) -> int:
        return g(a) - g(a - 1)

    bound_c, bound_m, zero_from = _delta_bounds(f, ell)
    with mp.workprec(WORK_PREC):
        value, log_tail, _ = _accelerated_product(
            delta, ell, 1.0, p_max, a_max, bound_c, bound_m, zero_from
        )
        tail = 2.0 * abs(float(value)) * math.expm1(log_tail) if log_tail else 0.0
        return EulerProductResult(value=value, p_max=p_max, a_max=a_max,
                                  tail_estimate=tail)


def secondary_constant_wu(p_max: int = 10**5, a_max: int = 120) -> EulerProductResult:
    """Secondary-term constant of the exponential divisor count: prod over p of
    (1 + sum_{a >= 5} (tau(a) - tau(a-1) - tau(a-2) + tau(a-3)) / p^(a/2)).

    Note the half-integer exponents: the inner series still converges for
    every p >= 2, and the same truncation discipline applies.
    """
    if p_max < 2 or a_max < 7:
        raise ValueError("secondary_constant_wu needs p_max >= 2, a_max >= 7")

    def tau(a: int) -> int:
        return tau_k(a, 2)

    def w(a: int) -> int:
        return tau(a) - tau(a - 1) - tau(a - 2) + tau(a - 3)

    with mp.workprec(WORK_PREC):
        value, log_tail, _ = _accelerated_product(
            w, 5, 0.5, p_max, a_max, bound_c=4.0, bound_m=1.0, zero_from=None
        )
        tail = 2.0 * abs(float(value)) * math.expm1(log_tail) if log_tail else 0.0
        return EulerProductResult(value=value, p_max=p_max, a_max=a_max,
                                  tail_estimate=tail)


# ---------------------------------------------------------------------------
# zeta at real arguments

_zeta_cache: dict = {}
_MAX_ZETA_TERMS = 5_000_000


def zeta_real(s) -> object:
    """zeta(s) for real s > 0, s != 1, to relative accuracy 1e-10 or better.

    s > 1 uses the direct series with an integral tail correction whose
    residual error is below s * N^(-s-1) / 12; 0 < s < 1 goes through the
    alternating series with binomial-weight acceleration, whose error decays
    like 5.83^-n. Values are cached per argument.
    """
    with mp.workprec(WORK_PREC):
        s = mpf(s)
        if s <= 0:
            raise ValueError(f"zeta_real needs s > 0, got {s}")
        if abs(s - 1) < mpf("1e-6"):
            raise PrecisionError("s is within 1e-6 of the pole at s = 1")
        v = _zeta_cache.get(s)
        if v is None:
            v = _zeta_series(s) if s > 1 else _zeta_alternating(s)
            _zeta_cache[s] = v
        return v


def _zeta_series(s):
    sf = float(s)
    target = 1e-13 * max(1.0, 1.0 / (sf - 1.0))
    n_terms = int((sf / (12.0 * target)) ** (1.0 / (sf + 1.0))) + 1
    if n_terms > _MAX_ZETA_TERMS:
        raise PrecisionError(f"zeta({sf}) would need {n_terms} terms")
    one = mpf(1)
    total = mpf(0)
    si = int(s) if s == int(s) else None
    if si is not None:
        for n in range(n_terms, 0, -1):
            total += one / n**si
    else:
        for n in range(n_terms, 0, -1):
            total += mpf(n) ** (-s)
    big_n = mpf(n_terms)
    return total + big_n ** (1 - s) / (s - 1) - big_n ** (-s) / 2


def _zeta_alternating(s, n: int = 60):
    # binomial weights d_k; exact integers via the standard factorial form
    d = [0] * (n + 1)
    acc = Fraction(0)
    for i in range(n + 1):
        acc += Fraction(
            n * math.factorial(n + i - 1) * 4**i,
            math.factorial(n - i) * math.factorial(2 * i),
        )
        assert acc.denominator == 1
        d[i] = int(acc)
    one = mpf(1)
    total = mpf(0)
    for k in range(n - 1, -1, -1):
        term = (d[k] - d[n]) * mpf(k + 1) ** (-s)
        total += -term if k & 1 else term
    return -total / (d[n] * (one - mpf(2) ** (one - s)))


def zeta_deriv(s, h=mpf("1e-5")) -> object:
    """zeta'(s) by central differences with Richardson extrapolation.

    Consistency between the h and h/2 extrapolations is required to 1e-6,
    otherwise a PrecisionError is raised.
    """
    with mp.workprec(WORK_PREC):
        s = mpf(s)
        h = mpf(h)

        def central(hh):
            return (zeta_real(s + hh) - zeta_real(s - hh)) / (2 * hh)

        def richardson(hh):
            return (4 * central(hh / 2) - central(hh)) / 3

        r1 = richardson(h)
        r2 = richardson(h / 2)
        if abs(r1 - r2) > mpf("1e-6"):
            raise PrecisionError(
                f"zeta' extrapolations at h and h/2 differ by {abs(r1 - r2)}"
            )
        return r2


def k3_secondary_constants(ell: int) -> tuple:
    """The two k = 3 secondary-term constants for the divisor count of shape
    (1, ell, ell): (zeta(1/ell)/ell, (2*gamma - 1)*zeta(1/ell) + zeta'(1/ell)/ell).

    For k = 2 the single secondary constant is zeta(1/ell) itself.
    """
    if ell < 2:
        raise ValueError(f"k3_secondary_constants needs ell >= 2, got {ell}")
    with mp.workprec(WORK_PREC):
        s = mpf(1) / ell
        z = zeta_real(s)
        zp = zeta_deriv(s)
        k2 = z / ell
        k3 = (2 * mpf(mp.euler) - 1) * z + zp / ell
        return k2, k3


# ---------------------------------------------------------------------------
# Dirichlet-series factorization check


@dataclass(frozen=True)
class FactorizationReport:
    """Comparison of the two sides of F(s) = zeta(s) * zeta(ell*s)^(k-1) * V(s)
    at a real point, both truncated, with the combined truncation bound."""

    s: float
    n_terms: int
    lhs: float
    rhs: float
    gap: float
    tail_bound: float
    passed: bool


def _v_majorant(vc: float, vm: float, ell: int, sigma: float) -> float:
    """Float upper bound on prod_p (1 + sum_{a >= ell+2} vc * a^vm * p^(-a*sigma)).

    This majorizes |V| at real part sigma for any v with |v(p^a)| <= vc * a^vm
    supported on exponents >= ell+2. Requires (ell+2)*sigma > 1.
    """
    a0 = ell + 2
    if a0 * sigma <= 1.0:
        raise ValueError("majorant diverges: (ell+2)*sigma must exceed 1")
    a_hi = 400
    prod = 1.0
    for p in primes_upto(1000):
        ps = float(p) ** sigma
        inner = 0.0
        pw = ps ** (-a0)
        for a in range(a0, a_hi + 1):
            inner += vc * float(a) ** vm * pw
            pw /= ps
        inner += _inner_tail(vc, vm, a_hi, ps)
        prod *= 1.0 + inner
    # primes beyond 1000 in one integral stroke
    q = (1.0 + 1.0 / a0) ** vm
    c3 = vc * float(a0) ** vm / (1 - q / 1000.0**sigma)
    log_tail = c3 * 1000.0 ** (1 - a0 * sigma) / (a0 * sigma - 1)
    return prod * math.exp(log_tail) * 1.01


def verify_factorization(f: ExponentFn, profile: TheoremProfile, s, n_terms: int,
                         v: ExponentFn | None = None) -> FactorizationReport:
    """Check sum_{n <= N} f(n)/n^s against zeta(s) * zeta(ell*s)^(k-1) times the
    truncated series of the derived factor v (supported on (ell+2)-full n).

    Both sides are truncations of the same analytic object; the report passes
    when their gap is below the combined truncation bound.
    """
    if n_terms < 1000:
        raise ValueError(f"need at least 1000 terms, got {n_terms}")
    with mp.workprec(WORK_PREC):
        s_mp = mpf(s)
        if s_mp <= 1:
            raise ValueError(f"factorization check needs s > 1, got {s}")
        ell, k = profile.ell, profile.k
        if v is None:
            v = derive_v(f, profile)

        vals = pointwise_values(f, n_terms)
        si = int(s_mp) if s_mp == int(s_mp) else None
        if si is not None:
            # fixed-point exact summation: each floor loses < 2^-140
            shift = 140
            acc = 0
            for n in range(1, n_terms + 1):
                acc += (int(vals[n]) << shift) // n**si
            lhs = mpf(acc) / mpf(1 << shift)
        else:
            lhs = mpf(0)
            for n in range(1, n_terms + 1):
                fv = int(vals[n])
                if fv:
                    lhs += fv * mpf(n) ** (-s_mp)

        vsum = mpf(0)
        for b, fact in enumerate_full(ell + 2, n_terms).entries:
            vb = evaluate(v, fact)
            if vb:
                vsum += vb * mpf(b) ** (-s_mp)
        zz = zeta_real(s_mp) * zeta_real(ell * s_mp) ** (k - 1)
        rhs = zz * vsum
        gap = float(abs(lhs - rhs))

        vc, vm = v.growth if v.growth is not None else (1.0, 1.0)
        sf = float(s_mp)
        sigma0 = (1.0 + sf) / 2.0
        fbar = (
            float(zeta_real(sigma0))
            * float(zeta_real(ell * sigma0)) ** (k - 1)
            * _v_majorant(vc, vm, ell, sigma0)
        )
        lhs_tail = fbar * float(n_terms) ** (sigma0 - sf)
        sigma1 = max(0.5, 1.0 / (ell + 2) + 0.25)
        rhs_tail = (
            float(zz)
            * _v_majorant(vc, vm, ell, sigma1)
            * float(n_terms) ** (sigma1 - sf)
        )
        tail = lhs_tail + rhs_tail + 1e-9
        return FactorizationReport(
            s=sf, n_terms=n_terms, lhs=float(lhs), rhs=float(rhs),
            gap=gap, tail_bound=tail, passed=gap <= tail,
        )


# ---------------------------------------------------------------------------
# residual analysis


@dataclass(frozen=True)
class ResidualRow:
    x: int
    total: int           # exact S_f(x)
    residual: object     # mpf: S_f(x) - C_f * x
    normalized: object   # mpf: residual / x^(1/ell)


@dataclass(frozen=True)
class ResidualTable:
    ell: int
    constant: object     # mpf main-term constant used
    rows: list


def residual_table(f: ExponentFn, c_f: EulerProductResult, ell: int, grid,
                   block_size: int = DEFAULT_BLOCK, workers=None,
                   progress=None) -> ResidualTable:
    """Exact sums over the grid, minus the main term, normalized by x^(1/ell).

    The grid must be strictly increasing. Sums come from a single sieve pass
    to max(grid); residuals are formed at WORK_PREC bits.
    """
    grid = [int(x) for x in grid]
    if not grid:
        raise ValueError("empty grid")
    if any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] < 1:
        raise ValueError("grid must be strictly increasing and positive")
    sums = summatory_sieve_at(f, grid, block_size=block_size, workers=workers,
                              progress=progress)
    with mp.workprec(WORK_PREC):
        inv_ell = mpf(1) / ell
        rows = []
        for x in grid:
            s_exact = sums[x]
            r = mpf(s_exact) - c_f.value * x
            rows.append(ResidualRow(x=x, total=s_exact, residual=r,
                                    normalized=r / mpf(x) ** inv_ell))
    return ResidualTable(ell=ell, constant=c_f.value, rows=rows)


@dataclass(frozen=True)
class FitResult:
    degree: int
    coefficients: list
    rms: float


def fit_log_poly(table: ResidualTable, degree: int) -> FitResult:
    """Least-squares fit of the normalized residual against powers of log x."""
    if degree < 0:
        raise ValueError(f"degree must be >= 0, got {degree}")
    rows = table.rows
    if len(rows) < degree + 3:
        raise DegenerateDataError(
            f"need at least {degree + 3} rows for a degree-{degree} fit"
        )
    logs = np.array([math.log(r.x) for r in rows], dtype=float)
    y = np.array([float(r.normalized) for r in rows], dtype=float)
    design = np.vander(logs, degree + 1, increasing=True)
    coeffs, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < degree + 1:
        raise DegenerateDataError("grid too clustered for the requested degree")
    rms = float(np.sqrt(np.mean((y - design @ coeffs) ** 2)))
    return FitResult(degree=degree, coefficients=[float(c) for c in coeffs],
                     rms=rms)


def empirical_exponent(xs, residuals) -> float:
    """Least-squares slope of log|residual| against log x.

    A scanning diagnostic only: the slope is reported next to the relevant
    reference exponent, never asserted as a proof of it.
    """
    xs = [float(x) for x in xs]
    rs = [float(r) for r in residuals]
    if len(xs) < 5 or len(xs) != len(rs):
        raise DegenerateDataError("need at least 5 matching points")
    if any(r == 0 for r in rs):
        raise DegenerateDataError("residuals must be nonzero")
    lx = np.log(np.array(xs))
    ly = np.log(np.abs(np.array(rs)))
    slope = np.polyfit(lx, ly, 1)[0]
    return float(slope)


# ---------------------------------------------------------------------------
# reference error exponents (stored for context, compared against empirical
# slopes, never asserted)


def error_exponent_tau_pow(r: int) -> Fraction:
    """(2^(r+1) - 1) / (2^(r+2) + 1): remainder exponent for the r-th power
    of the exponential divisor count."""
    if r < 1:
        raise ValueError("r must be >= 1")
    return Fraction(2 ** (r + 1) - 1, 2 ** (r + 2) + 1)


def error_exponent_divisor_pow(r: int) -> Fraction:
    """(2^r - 1) / (2^r + 2): remainder exponent for powers of the ordinary
    divisor count (context only)."""
    if r < 1:
        raise ValueError("r must be >= 1")
    return Fraction(2**r - 1, 2**r + 2)


def error_exponent_tau_k(k: int) -> Fraction:
    """(2k - 1) / (4k + 1): remainder exponent for the k-dimensional
    exponential divisor count."""
    if k < 2:
        raise ValueError("k must be >= 2")
    return Fraction(2 * k - 1, 4 * k + 1)


def error_exponent_phi_pow(r: int) -> Fraction:
    """(2^(r+1) - 1) / (3 * 2^(r+1)): remainder exponent for powers of the
    exponential totient."""
    if r < 1:
        raise ValueError("r must be >= 1")
    return Fraction(2 ** (r + 1) - 1, 3 * 2 ** (r + 1))


def error_exponent_general(k: int, ell: int) -> Fraction:
    """(2k - 1) / (3 + (2k - 1) * ell): remainder exponent of the general
    summatory statement; always exceeds 1/(ell + 2)."""
    if k < 2 or ell < 2:
        raise ValueError("need k >= 2 and ell >= 2")
    return Fraction(2 * k - 1, 3 + (2 * k - 1) * ell)
