"""Exact summatory functions by two independent routes.

summatory_sieve accumulates sum_{n <= x} f(n) by a vectorized blockwise
sieve: within each block, exponents of every prime up to sqrt(x) are counted
through strided slices and the per-exponent values are multiplied in from a
lookup table. O(x) time, O(sqrt(x) + block) memory, exact int64 arithmetic
with an overflow certificate computed up front; x = 1e8 takes a few seconds.

summatory_convolution instead expands f = d(1, ell, ..., ell) * v and sums
v(b) * D(k, ell; x/b) over the sparse (ell+2)-full support of v. The two
methods must agree exactly; the verification suite leans on that identity.

Everything here is deterministic regardless of block size or worker count:
blocks partition 1..x identically and partial sums are combined in block
order as exact integers.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import isqrt

import numpy as np

from .arith import iroot, primes_upto
from .errors import CapacityError
from .expfn import ExponentFn, TheoremProfile, derive_v, evaluate

DEFAULT_BLOCK = 1 << 22
MAX_POINTWISE = 200_000_000  # pointwise_values allocates 8 bytes per n
_FULL_BUDGET = 10_000_000

# primes used by the pointwise-bound search; their product exceeds any
# sieveable x, so the search never runs out of them
_BOUND_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


@dataclass(frozen=True)
class SummatoryResult:
    x: int
    value: int
    method: str
    elapsed: float


@dataclass(frozen=True)
class FullNumberList:
    """All n <= x whose prime exponents are all >= j, with factorizations."""

    j: int
    x: int
    entries: list  # [(n, [(p, a), ...])], sorted by n, starting with (1, [])


# ---------------------------------------------------------------------------
# blockwise sieve


def _value_table(f: ExponentFn, a_max: int) -> np.ndarray:
    vals = f.values(a_max)
    for a, v in enumerate(vals):
        if abs(v) >= 1 << 62:
            raise OverflowError(
                f"{f.name}: value_at({a}) = {v} exceeds the 64-bit value range"
            )
    return np.array(vals, dtype=np.int64)


def _pointwise_bound(g_abs: list[int], x: int) -> int:
    """Exact max of prod |g(a_i)| over prime-exponent patterns with n <= x.

    Exponent patterns may be placed on the smallest primes without loss:
    moving an exponent to a smaller prime only shrinks n. Partial products
    seen mid-sieve correspond to sub-patterns, so this bounds those too.
    """

    def best(i: int, budget: int) -> int:
        if i >= len(_BOUND_PRIMES):
            return 1
        p = _BOUND_PRIMES[i]
        if p > budget:
            return 1
        out = 1
        pa = p
        a = 1
        while pa <= budget:
            sub = g_abs[a] * best(i + 1, budget // pa)
            if sub > out:
                out = sub
            a += 1
            pa *= p
        return out

    return best(0, x)


def _block_values(lo: int, hi: int, g_table: np.ndarray, primes: list[int],
                  need_rem: bool) -> np.ndarray:
    """f(n) for n in [lo, hi) as int64, given primes up to sqrt(hi-1)."""
    n = hi - lo
    nmax = hi - 1
    val = np.ones(n, dtype=np.int64)
    rem = np.arange(lo, hi, dtype=np.int64) if need_rem else None
    g1 = int(g_table[1]) if len(g_table) > 1 else 1
    for p in primes:
        if p * p > nmax:
            break
        start = (-lo) % p
        if start >= n:
            continue
        cnt = (n - start - 1) // p + 1
        exps = np.ones(cnt, dtype=np.int16)
        if need_rem:
            rem[start::p] //= p
        pj = p * p
        stride = p
        while pj <= nmax:
            sj = (-lo) % pj
            if sj >= n:
                break
            if need_rem:
                rem[sj::pj] //= p
            exps[(sj - start) // p :: stride] += 1
            stride *= p
            pj *= p
        val[start::p] *= g_table[exps]
    if need_rem and g1 != 1:
        # whatever survives stripping is a single prime > sqrt(nmax), exponent 1
        val[rem > 1] *= g1
    return val


def _resolve_workers(workers) -> int:
    if workers is None:
        return 1
    w = int(workers)
    if w < 1:
        raise ValueError(f"workers must be >= 1, got {w}")
    return w


def _sieve_run(f, x, block_size, workers, cuts, progress=None):
    """One pass over 1..x; returns (total, {cut: prefix sum at cut})."""
    if x < 1:
        raise ValueError(f"summatory bound must be >= 1, got {x}")
    if block_size < 1 << 10:
        block_size = 1 << 10
    primes = [int(p) for p in primes_upto(isqrt(x))]
    a_max = max(x.bit_length(), 2)
    g_table = _value_table(f, a_max)
    g_abs = [abs(int(v)) for v in g_table]
    bound = _pointwise_bound(g_abs, x)
    if bound * min(block_size, x) >= 1 << 62:
        raise OverflowError(
            f"{f.name}: block accumulator could exceed the 64-bit range "
            f"(pointwise bound {bound})"
        )
    need_rem = len(g_table) > 1 and int(g_table[1]) != 1

    blocks = [(lo, min(lo + block_size, x + 1)) for lo in range(1, x + 1, block_size)]
    cuts = sorted(set(cuts or []))
    for c in cuts:
        if not 1 <= c <= x:
            raise ValueError(f"cut point {c} outside 1..{x}")

    def job(block):
        lo, hi = block
        val = _block_values(lo, hi, g_table, primes, need_rem)
        local_cuts = [c for c in cuts if lo <= c < hi]
        if local_cuts:
            cs = np.cumsum(val)
            caps = [(c, int(cs[c - lo])) for c in local_cuts]
            bsum = int(cs[-1])
        else:
            caps = []
            bsum = int(val.sum(dtype=np.int64))
        return bsum, caps

    nworkers = _resolve_workers(workers)
    if nworkers == 1 or len(blocks) == 1:
        results = map(job, blocks)
    else:
        pool = ThreadPoolExecutor(max_workers=nworkers)
        results = pool.map(job, blocks)

    total = 0
    at_cut: dict[int, int] = {}
    for i, (bsum, caps) in enumerate(results):
        for c, inblock in caps:
            at_cut[c] = total + inblock
        total += bsum
        if progress is not None:
            progress(i + 1, len(blocks))
    return total, at_cut


def summatory_sieve(f: ExponentFn, x: int, block_size: int = DEFAULT_BLOCK,
                    workers=None, progress=None) -> SummatoryResult:
    """Exact sum of f(n) for n <= x via the blockwise sieve."""
    t0 = time.perf_counter()
    total, _ = _sieve_run(f, x, block_size, workers, None, progress)
    return SummatoryResult(x, total, "sieve", time.perf_counter() - t0)


def summatory_sieve_at(f: ExponentFn, xs, block_size: int = DEFAULT_BLOCK,
                       workers=None, progress=None) -> dict[int, int]:
    """Exact partial sums at every x in xs, from a single pass to max(xs)."""
    xs = sorted(set(int(x) for x in xs))
    if not xs:
        return {}
    _, at_cut = _sieve_run(f, xs[-1], block_size, workers, xs, progress)
    return at_cut


def pointwise_values(f: ExponentFn, x: int,
                     block_size: int = DEFAULT_BLOCK) -> np.ndarray:
    """f(1), ..., f(x) as an int64 array indexed by n (index 0 is 0)."""
    if x < 1:
        raise ValueError(f"range bound must be >= 1, got {x}")
    if x > MAX_POINTWISE:
        raise CapacityError(f"pointwise table of {x} entries exceeds the budget")
    primes = [int(p) for p in primes_upto(isqrt(x))]
    g_table = _value_table(f, max(x.bit_length(), 2))
    g_abs = [abs(int(v)) for v in g_table]
    if _pointwise_bound(g_abs, x) >= 1 << 62:
        raise OverflowError(f"{f.name}: pointwise values exceed the 64-bit range")
    need_rem = len(g_table) > 1 and int(g_table[1]) != 1
    out = np.zeros(x + 1, dtype=np.int64)
    for lo in range(1, x + 1, block_size):
        hi = min(lo + block_size, x + 1)
        out[lo:hi] = _block_values(lo, hi, g_table, primes, need_rem)
    return out


# ---------------------------------------------------------------------------
# generalized divisor counts D(1, ell, ..., ell; x)


def d_count(k: int, ell: int, x: int) -> int:
    """Exact count of (a, b_1, ..., b_{k-1}) with a * b_1^ell * ... <= x.

    Recursion D(k; x) = sum over b <= x^(1/ell) of D(k-1; x // b^ell), with
    D(1; x) = x. Memoized over the floor-quotient lattice, so a single call
    costs about sqrt(x) * polylog for ell = 2.
    """
    if k < 1 or ell < 2:
        raise ValueError("d_count needs k >= 1 and ell >= 2")
    if x < 1:
        raise ValueError(f"d_count needs x >= 1, got {x}")
    return _d_count(k, ell, x, {})


def _d_count(k: int, ell: int, x: int, memo: dict) -> int:
    if x <= 0:
        return 0
    if k == 1:
        return x
    key = (k, x)
    cached = memo.get(key)
    if cached is not None:
        return cached
    if k == 2:
        total = 0
        for b in range(1, iroot(x, ell) + 1):
            total += x // b**ell
    else:
        total = 0
        for b in range(1, iroot(x, ell) + 1):
            total += _d_count(k - 1, ell, x // b**ell, memo)
    memo[key] = total
    return total


def d_pointwise(k: int, ell: int, n: int, table=None) -> int:
    """Number of representations n = a * b_1^ell * ... * b_{k-1}^ell."""
    from .divisors import _factorize_flex  # local import avoids a cycle
    from .expfn import d_fn

    if k < 1 or ell < 2:
        raise ValueError("d_pointwise needs k >= 1 and ell >= 2")
    return evaluate(d_fn(k, ell), _factorize_flex(n, table))


def d_pointwise_table(k: int, ell: int, x: int) -> np.ndarray:
    """d(1, ell, ..., ell; n) for all n <= x, as int64 indexed by n."""
    if k < 1 or ell < 2 or x < 1:
        raise ValueError("d_pointwise_table needs k >= 1, ell >= 2, x >= 1")
    if x > MAX_POINTWISE:
        raise CapacityError(f"table of {x} entries exceeds the budget")
    if x << (k - 1) >= 1 << 62:
        raise OverflowError("cumulative divisor counts exceed the 64-bit range")
    dp = np.ones(x + 1, dtype=np.int64)
    dp[0] = 0
    for _ in range(k - 1):
        nxt = np.zeros(x + 1, dtype=np.int64)
        for b in range(1, iroot(x, ell) + 1):
            q = b**ell
            nxt[q::q] += dp[1 : x // q + 1]
        dp = nxt
    return dp


def d_count_table(k: int, ell: int, x: int) -> np.ndarray:
    """D(1, ell, ..., ell; t) for all t <= x (cumulative sums of d_pointwise)."""
    return np.cumsum(d_pointwise_table(k, ell, x))


# ---------------------------------------------------------------------------
# j-full numbers and the convolution route


def enumerate_full(j: int, x: int, budget: int = _FULL_BUDGET) -> FullNumberList:
    """All n <= x whose prime exponents are all >= j, sorted, with n = 1 first.

    Generated by depth-first search over primes p with p^j <= x, so the cost
    is proportional to the output (about x^(1/j) entries), never to x.
    """
    if j < 2:
        raise ValueError(f"enumerate_full needs j >= 2, got {j}")
    if x < 1:
        raise ValueError(f"enumerate_full needs x >= 1, got {x}")
    ps = [int(p) for p in primes_upto(iroot(x, j))]
    entries: list[tuple[int, list[tuple[int, int]]]] = [(1, [])]

    def extend(i: int, n: int, fact: list[tuple[int, int]]) -> None:
        for idx in range(i, len(ps)):
            p = ps[idx]
            pe = p**j
            if n * pe > x:
                break
            m = n * pe
            a = j
            while m <= x:
                sub = fact + [(p, a)]
                entries.append((m, sub))
                if len(entries) > budget:
                    raise CapacityError(
                        f"more than {budget} {j}-full numbers below {x}"
                    )
                extend(idx + 1, m, sub)
                m *= p
                a += 1

    extend(0, 1, [])
    entries.sort()
    return FullNumberList(j=j, x=x, entries=entries)


def summatory_convolution(f: ExponentFn, profile: TheoremProfile, x: int,
                          v: ExponentFn | None = None) -> SummatoryResult:
    """Exact sum of f(n) for n <= x via the convolution identity.

    Sums v(b) * D(k, ell; x // b) over the (ell+2)-full b <= x, where v is
    the derived complementary factor. Must equal summatory_sieve exactly.
    """
    t0 = time.perf_counter()
    if x < 1:
        raise ValueError(f"summatory bound must be >= 1, got {x}")
    if v is None:
        v = derive_v(f, profile)
    full = enumerate_full(profile.ell + 2, x)
    memo: dict = {}
    total = 0
    for b, fact in full.entries:
        vb = evaluate(v, fact)
        if vb:
            total += vb * _d_count(profile.k, profile.ell, x // b, memo)
    return SummatoryResult(x, total, "convolution", time.perf_counter() - t0)


def summatory_convolution_table(f: ExponentFn, profile: TheoremProfile, x: int,
                                v: ExponentFn | None = None) -> np.ndarray:
    """Convolution-route partial sums for every t <= x as an int64 array.

    Batch variant of summatory_convolution built on the cumulative divisor
    count table; used by the verification suite to compare whole ranges.
    """
    if v is None:
        v = derive_v(f, profile)
    dtab = d_count_table(profile.k, profile.ell, x)
    out = np.zeros(x + 1, dtype=np.int64)
    idx = np.arange(x + 1, dtype=np.int64)
    for b, fact in enumerate_full(profile.ell + 2, x).entries:
        vb = evaluate(v, fact)
        if vb:
            out[b:] += vb * dtab[idx[b:] // b]
    return out
