"""Arithmetic functions by sieving: Moebius, von Mangoldt, k-fold divisor counts."""

import math
from functools import lru_cache

import numpy as np

from ._kernels import smallest_prime_factor
from .errors import CapacityError, InputDomainError

SIEVE_LIMIT = 100_000_000


def _check_size(N, limit=SIEVE_LIMIT):
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise InputDomainError(f"sieve length must be a positive integer, got {N!r}")
    if N > limit:
        raise CapacityError("sieve length", limit, N)


def primes_upto(n):
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p::2 * p] = False
    return np.flatnonzero(flags)


def mobius(N):
    """mu(0..N) as a read-only int8 array (index 0 is 0).

    Only primes up to sqrt(N) are sieved; the running product of those primes
    reveals whether one large prime factor remains.
    """
    return _mobius_cached(int(N))


@lru_cache(maxsize=8)
def _mobius_cached(N):
    _check_size(N)
    mu = np.ones(N + 1, dtype=np.int8)
    prod = np.ones(N + 1, dtype=np.int64)
    for p in primes_upto(math.isqrt(N)).tolist():
        mu[p::p] *= -1
        prod[p::p] *= p
        mu[p * p::p * p] = 0
    n = np.arange(N + 1)
    big = (prod != n) & (mu != 0)
    mu[big] *= -1
    mu[0] = 0
    mu.setflags(write=False)
    return mu


def mangoldt(N):
    """Lambda(0..N) as a read-only float64 array (index 0 is 0)."""
    return _mangoldt_cached(int(N))


@lru_cache(maxsize=8)
def _mangoldt_cached(N):
    _check_size(N)
    lam = np.zeros(N + 1)
    primes = primes_upto(N)
    lam[primes] = np.log(primes)
    for p in primes[primes <= math.isqrt(N)].tolist():
        lp = math.log(p)
        q = p
        while q <= N:
            lam[q] = lp
            q *= p
    lam.setflags(write=False)
    return lam


def divisor_k(k, N):
    """d_k(n) for 0 <= n <= N, the number of ordered factorizations into k parts.

    d_k is multiplicative with d_k(p^a) = C(a + k - 1, k - 1), which is what
    iterating the convolution d_k = d_{k-1} * 1 produces.
    """
    if k < 1:
        raise InputDomainError("k must be >= 1")
    _check_size(N)
    spf = smallest_prime_factor(N)
    out = np.ones(N + 1, dtype=np.int64)
    out[0] = 0
    if k == 1 or N < 2:
        return out
    rem = np.arange(N + 1, dtype=np.int64)
    rem[0] = 1
    active = np.flatnonzero(rem > 1)
    while active.size:
        p = spf[rem[active]].astype(np.int64)
        a = np.zeros(active.size, dtype=np.int64)
        r = rem[active]
        while True:
            div = (r % p) == 0
            if not div.any():
                break
            r = np.where(div, r // p, r)
            a += div
        rem[active] = r
        binom = np.array([math.comb(j + k - 1, k - 1) for j in range(int(a.max()) + 1)],
                         dtype=np.int64)
        out[active] *= binom[a]
        active = active[r > 1]
    return out
