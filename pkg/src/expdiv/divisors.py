"""Exponential-divisor machinery.

d is an exponential divisor of n when both share the same primes and each
exponent of d divides the matching exponent of n (1 is its own exponential
divisor by convention). exp_divisors enumerates them outright, which is the
definitional oracle; tau_e, phi_e and tau_k_e are the fast multiplicative
evaluators the rest of the package uses.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .arith import PrimeTable, build_prime_table, euler_phi, factorize, tau_k

DEFAULT_TABLE_LIMIT = 1_000_000

_shared_table: PrimeTable | None = None


def _default_table() -> PrimeTable:
    global _shared_table
    if _shared_table is None:
        _shared_table = build_prime_table(DEFAULT_TABLE_LIMIT)
    return _shared_table


def _factorize_flex(n: int, table: PrimeTable | None) -> list[tuple[int, int]]:
    """Factorize n, trial-dividing by sieved primes when n exceeds the table.

    The fallback covers table.limit < n <= table.limit**2, which is the
    documented enumeration-oracle range (about 1e12 for the default table).
    """
    if table is None:
        table = _default_table()
    if n <= table.limit:
        return factorize(n, table)
    if n > table.limit**2:
        raise ValueError(f"n={n} beyond factorization range {table.limit**2}")
    out = []
    m = n
    for p in table.primes:
        p = int(p)
        if p * p > m:
            break
        if m % p == 0:
            a = 0
            while m % p == 0:
                m //= p
                a += 1
            out.append((p, a))
    if m > 1:
        out.append((m, 1))
    return out


@dataclass(frozen=True)
class ExpDivisorList:
    """All exponential divisors of n, sorted ascending."""

    n: int
    divisors: list[int]

    def __len__(self) -> int:
        return len(self.divisors)


@lru_cache(maxsize=256)
def _divisors_of(a: int) -> tuple[int, ...]:
    return tuple(b for b in range(1, a + 1) if a % b == 0)


def is_exp_divisor(d: int, n: int, table: PrimeTable | None = None) -> bool:
    """True when d and n share prime support and each exponent of d divides
    the matching exponent of n. (1, 1) is True by convention."""
    if d < 1 or n < 1:
        raise ValueError("is_exp_divisor needs positive integers")
    fn = _factorize_flex(n, table)
    fd = dict(_factorize_flex(d, table))
    if len(fd) != len(fn):
        return False
    for p, a in fn:
        b = fd.get(p)
        if b is None or a % b:
            return False
    return True


def exp_divisors(n: int, table: PrimeTable | None = None) -> ExpDivisorList:
    """Enumerate the exponential divisors of n (sorted).

    The list has length prod tau(a_i) over the exponents of n; for n > 1
    every entry has the full prime support of n, so the minimal one is the
    squarefree kernel. Practical up to about 1e9 (oracle use).
    """
    fact = _factorize_flex(n, table)
    divs = [1]
    for p, a in fact:
        choices = [p**b for b in _divisors_of(a)]
        divs = [d * c for d in divs for c in choices]
    divs.sort()
    return ExpDivisorList(n, divs)


def tau_e(fact: list[tuple[int, int]]) -> int:
    """Count of exponential divisors from a factorization: prod tau(a_i)."""
    out = 1
    for _, a in fact:
        out *= tau_k(a, 2)
    return out


def phi_e(fact: list[tuple[int, int]]) -> int:
    """Exponential totient from a factorization: prod phi(a_i)."""
    out = 1
    for _, a in fact:
        out *= euler_phi(a)
    return out


def tau_k_e(fact: list[tuple[int, int]], k: int) -> int:
    """k-dimensional exponential divisor count: prod tau_k(a_i).

    Agrees with tau_e for k = 2.
    """
    if k < 2:
        raise ValueError(f"tau_k_e needs k >= 2, got {k}")
    out = 1
    for _, a in fact:
        out *= tau_k(a, k)
    return out


def pow_r(value: int, r: int) -> int:
    """Exact r-th power of a pointwise value, r >= 1."""
    if r < 1:
        raise ValueError(f"pow_r needs r >= 1, got {r}")
    return value**r
