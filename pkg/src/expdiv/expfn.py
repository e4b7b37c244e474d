"""Exponent-indexed multiplicative functions and their convolution algebra.

Every multiplicative function used in this package takes the same value at
p^a for every prime p, so it is fully described by the integer sequence
a -> value_at(a) with value_at(0) = 1. Dirichlet convolution of two such
functions is again of this shape and reduces, at prime powers, to the Cauchy
convolution of the two sequences; that one-dimensional algebra is what this
module implements. Everything is exact integer arithmetic.

The central construction is derive_v: given f with value 1 at exponents
1..ell-1 and value k at exponents ell and ell+1, it produces the
complementary factor v with f = d * v, where d is the exponent function of
the k-dimensional divisor count of shape (1, ell, ..., ell). v vanishes at
exponents 1..ell+1, so as a multiplicative function it is supported on
(ell+2)-full integers, which is what makes the convolution route to
summatory values cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from .arith import euler_phi, tau_k
from .errors import BoundViolationError, HypothesisError

MEMO_LIMIT = 512


class ExponentFn:
    """A multiplicative function with prime-independent prime-power values.

    value_at(a) is the value at p^a for any prime p; value_at(0) must be 1
    (the multiplicative normalization f(1) = 1).

    growth, when present, is a pair (C, m) asserting |value_at(a)| <= C * a^m
    for a >= 1; it is what Euler-product tail bounds and the derived-factor
    growth certificate are computed from. constant_from marks sequences known
    to satisfy value_at(a) = value_at(constant_from) for all a >= constant_from,
    which lets truncation tails be taken as exactly zero.

    Values are memoized up to MEMO_LIMIT and computed on demand beyond; the
    memo is append-only and idempotent, so concurrent readers are safe.
    """

    __slots__ = ("name", "growth", "constant_from", "_fn", "_memo")

    def __init__(
        self,
        name: str,
        fn: Callable[[int], int],
        growth: Optional[tuple[float, float]] = None,
        constant_from: Optional[int] = None,
    ):
        v0 = fn(0)
        if v0 != 1:
            raise ValueError(f"{name}: value_at(0) must be 1, got {v0}")
        self.name = name
        self._fn = fn
        self.growth = growth
        self.constant_from = constant_from
        self._memo = {0: 1}

    def value_at(self, a: int) -> int:
        if a < 0:
            raise ValueError("exponent must be nonnegative")
        cf = self.constant_from
        if cf is not None and a > cf:
            a = cf
        memo = self._memo
        try:
            return memo[a]
        except KeyError:
            pass
        v = self._fn(a)
        if a <= MEMO_LIMIT:
            memo[a] = v
        return v

    def values(self, a_max: int) -> list[int]:
        """[value_at(0), ..., value_at(a_max)]."""
        return [self.value_at(a) for a in range(a_max + 1)]

    def __repr__(self):
        return f"ExponentFn({self.name!r})"


@dataclass(frozen=True)
class TheoremProfile:
    """The pair (ell, k) certifying the shape of an exponent function.

    A function fits the profile when value_at(1) = ... = value_at(ell-1) = 1
    and value_at(ell) = value_at(ell+1) = k. k = 1 is the degenerate case
    (value 1 through exponent ell+1) where the divisor-count factor is trivial.
    """

    ell: int
    k: int

    def __post_init__(self):
        if self.ell < 2:
            raise ValueError(f"profile needs ell >= 2, got {self.ell}")
        if self.k < 1:
            raise ValueError(f"profile needs k >= 1, got {self.k}")


def check_hypothesis(f: ExponentFn, profile: TheoremProfile) -> None:
    """Raise HypothesisError (naming the exponent) unless f fits the profile."""
    ell, k = profile.ell, profile.k
    for a in range(1, ell):
        got = f.value_at(a)
        if got != 1:
            raise HypothesisError(
                f"{f.name}: value_at({a}) = {got}, need 1 for profile "
                f"(ell={ell}, k={k})",
                exponent=a,
            )
    for a in (ell, ell + 1):
        got = f.value_at(a)
        if got != k:
            raise HypothesisError(
                f"{f.name}: value_at({a}) = {got}, need k={k} for profile "
                f"(ell={ell}, k={k})",
                exponent=a,
            )


# ---------------------------------------------------------------------------
# the named functions of the algebra


def unit_fn() -> ExponentFn:
    """The constant function 1 (f(n) = 1 for every n)."""
    return ExponentFn("unit", lambda a: 1, growth=(1.0, 1.0), constant_from=0)


def mobius_fn() -> ExponentFn:
    """Moebius function as an exponent function: 1, -1, 0, 0, ..."""
    return ExponentFn(
        "mu", lambda a: 1 if a == 0 else (-1 if a == 1 else 0),
        growth=(1.0, 1.0), constant_from=2,
    )


def mu_ell(ell: int, a: int) -> int:
    """Generalized Moebius value at exponent a: -1 at a = ell, 1 at a = 0, else 0."""
    if ell < 1 or a < 0:
        raise ValueError("mu_ell needs ell >= 1 and a >= 0")
    if a == 0:
        return 1
    return -1 if a == ell else 0


def mu_ell_h(h: int, ell: int, a: int) -> int:
    """Closed form of the h-fold self-convolution of mu_ell at exponent a.

    Nonzero only at a = j*ell with 0 <= j <= h, where it equals
    (-1)^j * C(h, j). Equality with the literal h-fold convolution is an
    exact identity exercised by the verification suite.
    """
    if h < 1 or ell < 1 or a < 0:
        raise ValueError("mu_ell_h needs h >= 1, ell >= 1, a >= 0")
    j, r = divmod(a, ell)
    if r or j > h:
        return 0
    return (-1 if j & 1 else 1) * math.comb(h, j)


def mu_ell_fn(ell: int) -> ExponentFn:
    return ExponentFn(
        f"mu_{ell}", lambda a: mu_ell(ell, a),
        growth=(1.0, 1.0), constant_from=ell + 1,
    )


def mu_ell_h_fn(h: int, ell: int) -> ExponentFn:
    return ExponentFn(
        f"mu_{ell}^({h})", lambda a: mu_ell_h(h, ell, a),
        growth=(float(math.comb(h, h // 2)), 1.0), constant_from=h * ell + 1,
    )


def tau_e_fn(r: int = 1) -> ExponentFn:
    """Exponent function of the r-th power of the exponential divisor count.

    value_at(a) = tau(a)^r, since the count of exponential divisors of p^a is
    the number of divisors of a.
    """
    if r < 1:
        raise ValueError(f"power must be >= 1, got {r}")
    name = "tau_e" if r == 1 else f"tau_e^{r}"
    return ExponentFn(name, lambda a: 1 if a == 0 else tau_k(a, 2) ** r,
                      growth=(1.0, float(r)))


def tau_k_e_fn(k: int, r: int = 1) -> ExponentFn:
    """Exponent function of (the r-th power of) the k-dimensional analogue.

    value_at(a) = tau_k(a)^r, counting ordered k-factorizations of the
    exponent. k = 2 reproduces tau_e_fn.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if r < 1:
        raise ValueError(f"power must be >= 1, got {r}")
    name = f"tau_{k}_e" if r == 1 else f"tau_{k}_e^{r}"
    return ExponentFn(name, lambda a: 1 if a == 0 else tau_k(a, k) ** r,
                      growth=(1.0, float(r * (k - 1))))


def phi_e_fn(r: int = 1) -> ExponentFn:
    """Exponent function of the r-th power of the exponential totient.

    value_at(a) = phi(a)^r; the underlying multiplicative function takes the
    value phi(a) at every prime power p^a.
    """
    if r < 1:
        raise ValueError(f"power must be >= 1, got {r}")
    name = "phi_e" if r == 1 else f"phi_e^{r}"
    return ExponentFn(name, lambda a: 1 if a == 0 else euler_phi(a) ** r,
                      growth=(1.0, float(r)))


def d_fn(k: int, ell: int) -> ExponentFn:
    """Exponent function of the divisor count of shape (1, ell, ..., ell).

    value_at(a) counts representations a = c + ell*(j_1 + ... + j_{k-1}) with
    c >= 0 and j_i >= 0, i.e. the prime-power value of the k-dimensional
    count of n = a * b_1^ell * ... * b_{k-1}^ell.
    """
    if k < 1 or ell < 2:
        raise ValueError("d_fn needs k >= 1 and ell >= 2")

    def value(a: int) -> int:
        return sum(math.comb(t + k - 2, k - 2) for t in range(a // ell + 1))

    if k == 1:
        return ExponentFn("d[k=1]", lambda a: 1, growth=(1.0, 1.0), constant_from=0)
    return ExponentFn(f"d[k={k},ell={ell}]", value, growth=(1.0, float(k - 1)))


def profile_for(f_kind: str, r: int = 1, k: int = 2) -> TheoremProfile:
    """Standard profile of the named family: tau_e -> (2, 2^r),
    tau_k_e -> (2, k^r), phi_e -> (3, 2^r), unit -> (2, 1)."""
    if f_kind == "tau_e":
        return TheoremProfile(2, 2**r)
    if f_kind == "tau_k_e":
        return TheoremProfile(2, k**r)
    if f_kind == "phi_e":
        return TheoremProfile(3, 2**r)
    if f_kind == "unit":
        return TheoremProfile(2, 1)
    raise ValueError(f"unknown function kind {f_kind!r}")


# ---------------------------------------------------------------------------
# convolution


def convolve_at_exponent(f: ExponentFn, g: ExponentFn, a: int):
    """(f * g) at exponent a: sum of f(i) * g(a - i) over 0 <= i <= a.

    This is the prime-power value of the Dirichlet convolution, valid for any
    prime because both operands are exponent-indexed.
    """
    if a < 0:
        raise ValueError("exponent must be nonnegative")
    return sum(f.value_at(i) * g.value_at(a - i) for i in range(a + 1))


def convolve(f: ExponentFn, g: ExponentFn, name: Optional[str] = None,
             growth=None, constant_from=None) -> ExponentFn:
    """The Dirichlet convolution f * g as a new ExponentFn."""
    return ExponentFn(
        name or f"({f.name})*({g.name})",
        lambda a: convolve_at_exponent(f, g, a),
        growth=growth,
        constant_from=constant_from,
    )


def evaluate(f: ExponentFn, fact: list[tuple[int, int]]):
    """Value of the multiplicative extension of f at the factorized integer.

    Only the exponents matter; the primes in the factorization are ignored.
    The empty factorization gives 1.
    """
    out = 1
    for _, a in fact:
        out *= f.value_at(a)
    return out


def max_middle_binomial(k: int) -> int:
    """max over 0 <= j <= k-1 of C(k-1, j)."""
    return math.comb(k - 1, (k - 1) // 2)


def derive_v(f: ExponentFn, profile: TheoremProfile) -> ExponentFn:
    """Complementary factor v with f = d(1, ell, ..., ell) * v as exponent fns.

    v is f convolved with mu and with the (k-1)-fold self-convolution of
    mu_ell. The profile hypothesis is validated eagerly (the factorization
    identity is false without it, and downstream sums would silently
    corrupt). The returned function vanishes at exponents 1..ell+1 and
    carries the derived growth certificate (2k * M_k * C, m), where M_k is
    the largest binomial C(k-1, j) and (C, m) is f's growth pair.
    """
    check_hypothesis(f, profile)
    if f.growth is None:
        raise ValueError(f"{f.name}: growth metadata required to derive v")
    ell, k = profile.ell, profile.k
    c_growth, m_growth = f.growth

    # f * mu has prime-power values f(a) - f(a-1); convolving that with the
    # closed-form mu_ell_h finishes the job in O(a) per exponent.
    diff = ExponentFn(
        f"({f.name})*mu",
        lambda a: 1 if a == 0 else f.value_at(a) - f.value_at(a - 1),
    )
    if k == 1:
        base = diff
    else:
        mk = mu_ell_h_fn(k - 1, ell)
        base = convolve(diff, mk)

    constant_from = None
    if f.constant_from is not None:
        constant_from = f.constant_from + (k - 1) * ell + 1

    v = ExponentFn(
        f"v[{f.name};ell={ell},k={k}]",
        base.value_at,
        growth=(2 * k * max_middle_binomial(k) * c_growth, m_growth),
        constant_from=constant_from,
    )
    for a in range(1, ell + 2):
        got = v.value_at(a)
        if got != 0:
            raise HypothesisError(
                f"derived v of {f.name} is {got} at exponent {a}; "
                "expected 0 through ell+1",
                exponent=a,
            )
    return v


@dataclass(frozen=True)
class GrowthReport:
    """Outcome of a growth-bound scan: the worst ratio |v(a)| / bound(a)."""

    a_min: int
    a_max: int
    max_ratio: float
    witness: int


def check_growth_bound(v: ExponentFn, k: int, c: float, m: float,
                       a_max: int, a_min: int = 1) -> GrowthReport:
    """Assert |v(a)| <= 2k * M_k * c * a^m for a_min <= a <= a_max.

    Returns the maximal ratio against the bound; raises BoundViolationError
    with the witness exponent on the first failure.
    """
    if a_max < a_min:
        raise ValueError("a_max must be >= a_min")
    mk = max_middle_binomial(k)
    worst = 0.0
    witness = a_min
    for a in range(a_min, a_max + 1):
        bound = 2 * k * mk * c * float(a) ** m
        got = abs(v.value_at(a))
        if got > bound:
            raise BoundViolationError(
                f"{v.name}: |v({a})| = {got} exceeds bound {bound}", witness=a
            )
        ratio = got / bound
        if ratio > worst:
            worst = ratio
            witness = a
    return GrowthReport(a_min=a_min, a_max=a_max, max_ratio=worst, witness=witness)
