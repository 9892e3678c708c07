"""Sieved multiplicative-function tables and counting functions.

Provides, in one linear pass up to N:
    - smallest prime factor spf(n)
    - Mobius function mu(n)
    - von Mangoldt function Lambda(n) = log p at prime powers, else 0
    - Euler totient phi(n)

Key identities used throughout (and tested):
    sum_{d|n} Lambda(d) = log n          (so Lambda = log * mu)
    d_k = d_{k-1} * 1                    (Dirichlet convolution)
    phi* = mu * phi  (multiplicative),   phi*(q) = # primitive characters mod q
    sum_{d|q} phi*(d) = phi(q)

Lambda is stored as float log p: the only consumer is the numerically
normalized second mollifier piece, so exactness buys nothing.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import CapacityError, UnsupportedParameterError


def _sieve_cap() -> int:
    return int(os.environ.get("NONVANISH_MAX_SIEVE", 20_000_000))


@dataclass(frozen=True)
class ArithTables:
    """Immutable arrays indexed 1..N (index 0 unused).

    Attributes:
        limit: N
        mobius: int8, mu(n)
        vonmangoldt: float64, Lambda(n) in natural log units
        totient: int64, phi(n)
        smallest_prime_factor: int64, spf(n) (spf(1) = 1)
    """

    limit: int
    mobius: np.ndarray
    vonmangoldt: np.ndarray
    totient: np.ndarray
    smallest_prime_factor: np.ndarray


@lru_cache(maxsize=4)
def build_tables(N: int) -> ArithTables:
    """Linear sieve producing all tables in one pass."""
    if N < 1:
        raise CapacityError(f"sieve length must be >= 1, got {N}")
    if N > _sieve_cap():
        raise CapacityError(
            f"sieve length {N} exceeds cap {_sieve_cap()} "
            "(override with NONVANISH_MAX_SIEVE)"
        )
    spf = np.zeros(N + 1, dtype=np.int64)
    mu = np.zeros(N + 1, dtype=np.int8)
    phi = np.zeros(N + 1, dtype=np.int64)
    lam = np.zeros(N + 1, dtype=np.float64)
    primes: list[int] = []
    mu[1] = 1
    phi[1] = 1
    spf[1] = 1
    for n in range(2, N + 1):
        if spf[n] == 0:
            spf[n] = n
            primes.append(n)
            mu[n] = -1
            phi[n] = n - 1
        for p in primes:
            if p > spf[n] or n * p > N:
                break
            m = n * p
            spf[m] = p
            if n % p == 0:
                mu[m] = 0
                phi[m] = phi[n] * p
                break
            mu[m] = -mu[n]
            phi[m] = phi[n] * (p - 1)
    # Lambda(p^k) = log p; prime powers found by walking each prime
    for p in primes:
        logp = math.log(p)
        pk = p
        while pk <= N:
            lam[pk] = logp
            pk *= p
    return ArithTables(N, mu, lam, phi, spf)


def divisor_dk(N: int, k: int) -> np.ndarray:
    """Table of d_k(n) = # ordered k-tuples with product n, for n <= N.

    Built by k-1 divisor convolutions with the constant-1 function.
    """
    if not 1 <= k <= 4:
        raise UnsupportedParameterError(f"divisor order k={k} not in 1..4")
    if N < 1:
        raise CapacityError(f"table length must be >= 1, got {N}")
    if N > _sieve_cap():
        raise CapacityError(f"table length {N} exceeds cap {_sieve_cap()}")
    d = np.ones(N + 1, dtype=np.int64)
    d[0] = 0
    for _ in range(k - 1):
        nxt = np.zeros(N + 1, dtype=np.int64)
        for m in range(1, N + 1):
            nxt[m::m] += d[1 : N // m + 1]
        d = nxt
    return d


def _factorize(q: int) -> list[tuple[int, int]]:
    """Trial-division factorization, fine for q up to ~1e12."""
    out = []
    n = q
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(q: int) -> int:
    phi = 1
    for p, e in _factorize(q):
        phi *= (p - 1) * p ** (e - 1)
    return phi


def phi_star(q: int) -> int:
    """Number of primitive characters mod q: (mu * phi)(q).

    Multiplicative with phi*(p) = p - 2 and
    phi*(p^e) = phi(p^e) - phi(p^{e-1}) for e >= 2.
    """
    if q < 1:
        raise CapacityError(f"modulus must be >= 1, got {q}")
    out = 1
    for p, e in _factorize(q):
        if e == 1:
            out *= p - 2
        else:
            out *= (p - 1) * p ** (e - 1) - (p - 1) * p ** (e - 2)
    return out


def phi_plus(q: int) -> Fraction:
    """Half the primitive-character count (size of the even-primitive class
    up to O(1)); exact rational, may be half-integral."""
    return Fraction(phi_star(q), 2)
