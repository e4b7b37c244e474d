"""Prime sieving, factorization, and small classical arithmetic functions.

The smallest-prime-factor table built here backs every factorization in the
package; tau_k, euler_phi and mobius are evaluated by trial division because
their arguments are prime-power exponents and stay tiny.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import CapacityError

# spf tables cost 4 bytes per entry; cap before numpy tries to allocate.
MAX_TABLE_ENTRIES = 500_000_000


@dataclass(frozen=True)
class PrimeTable:
    """Smallest-prime-factor table covering 2..limit.

    spf[n] is the least prime dividing n, so spf[p] = p exactly when p is
    prime. Immutable after construction and safe for concurrent reads.
    """

    limit: int
    spf: np.ndarray

    @cached_property
    def primes(self) -> np.ndarray:
        ns = np.arange(self.limit + 1, dtype=np.int64)
        return ns[2:][self.spf[2:] == ns[2:]]

    def smallest_factor(self, n: int) -> int:
        if not 2 <= n <= self.limit:
            raise ValueError(f"n={n} outside table range 2..{self.limit}")
        return int(self.spf[n])

    def is_prime(self, n: int) -> bool:
        return self.smallest_factor(n) == n


def build_prime_table(limit: int) -> PrimeTable:
    """Sieve the smallest prime factor of every integer in 2..limit."""
    if limit < 2:
        raise CapacityError(f"prime table needs limit >= 2, got {limit}")
    if limit > MAX_TABLE_ENTRIES:
        raise CapacityError(
            f"limit {limit} exceeds table budget of {MAX_TABLE_ENTRIES} entries"
        )
    spf = np.zeros(limit + 1, dtype=np.int32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            seg = spf[p * p :: p]
            seg[seg == 0] = p
    # untouched entries are prime (or below 4): their own least factor
    rest = np.flatnonzero(spf[2:] == 0) + 2
    spf[rest] = rest
    return PrimeTable(limit, spf)


def primes_upto(n: int) -> np.ndarray:
    """Ascending primes <= n as an int64 array (empty for n < 2)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def factorize(n: int, table: PrimeTable) -> list[tuple[int, int]]:
    """Canonical decomposition of n as [(p1, a1), (p2, a2), ...], p1 < p2 < ...

    factorize(1) is the empty list. Requires 1 <= n <= table.limit.
    """
    if n < 1:
        raise ValueError(f"cannot factorize n={n}")
    if n > table.limit:
        raise ValueError(f"n={n} exceeds table limit {table.limit}")
    spf = table.spf
    out = []
    while n > 1:
        p = int(spf[n])
        n //= p
        a = 1
        while n % p == 0:
            n //= p
            a += 1
        out.append((p, a))
    return out


def product_of(fact: list[tuple[int, int]]) -> int:
    """Reconstruct the integer a factorization describes (1 for the empty list)."""
    n = 1
    for p, a in fact:
        n *= p**a
    return n


def trial_factorize(n: int) -> list[tuple[int, int]]:
    """Factorize by trial division; meant for small arguments such as exponents."""
    if n < 1:
        raise ValueError(f"cannot factorize n={n}")
    out = []
    for p in (2, 3):
        if n % p == 0:
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            out.append((p, a))
    d = 5
    while d * d <= n:
        for p in (d, d + 2):
            if n % p == 0:
                a = 0
                while n % p == 0:
                    n //= p
                    a += 1
                out.append((p, a))
        d += 6
    if n > 1:
        out.append((n, 1))
    return out


@lru_cache(maxsize=1 << 16)
def tau_k(a: int, k: int) -> int:
    """Number of ordered k-tuples of positive integers whose product is a.

    Multiplicative in a, with tau_k(p^b) = C(b+k-1, k-1) at prime powers;
    tau_k(a, 1) = 1 and tau_k(a, 2) is the ordinary divisor count.
    """
    if a < 1:
        raise ValueError(f"tau_k needs a >= 1, got {a}")
    if k < 1:
        raise ValueError(f"tau_k needs k >= 1, got {k}")
    out = 1
    for _, b in trial_factorize(a):
        out *= math.comb(b + k - 1, k - 1)
    return out


@lru_cache(maxsize=1 << 16)
def euler_phi(a: int) -> int:
    """Count of 1 <= b <= a coprime to a; euler_phi(1) = 1."""
    if a < 1:
        raise ValueError(f"euler_phi needs a >= 1, got {a}")
    out = 1
    for p, b in trial_factorize(a):
        out *= p ** (b - 1) * (p - 1)
    return out


@lru_cache(maxsize=1 << 16)
def mobius(a: int) -> int:
    """Moebius function: 0 unless a is squarefree, else (-1)^(number of primes)."""
    if a < 1:
        raise ValueError(f"mobius needs a >= 1, got {a}")
    out = 1
    for _, b in trial_factorize(a):
        if b > 1:
            return 0
        out = -out
    return out


def binomial(n: int, j: int) -> int:
    """Exact binomial coefficient; 0 when j > n."""
    if n < 0 or j < 0:
        raise ValueError("binomial needs nonnegative arguments")
    return math.comb(n, j)


def iroot(x: int, k: int) -> int:
    """Largest r >= 0 with r**k <= x."""
    if x < 0 or k < 1:
        raise ValueError("iroot needs x >= 0 and k >= 1")
    if k == 1 or x == 0:
        return x
    r = int(round(x ** (1.0 / k)))
    while r > 0 and r**k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r
