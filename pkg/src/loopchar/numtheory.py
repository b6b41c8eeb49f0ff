"""Divisor-level arithmetic functions feeding the character formulas.

Every modulus passed in here is a lattice period or a divisor of one, so all
functions factor their argument by plain trial division; no sieve or cache.
"""

from math import gcd


def divisors(n: int) -> list[int]:
    """All positive divisors of n in increasing order."""
    if n < 1:
        raise ValueError(f"divisors: expected a positive integer, got {n}")
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i != n // i:
                large.append(n // i)
        i += 1
    large.reverse()
    return small + large


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of n as (prime, exponent) pairs, primes increasing."""
    if n < 1:
        raise ValueError(f"factorize: expected a positive integer, got {n}")
    out = []
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


def mobius(n: int) -> int:
    """Moebius function: 0 unless n is squarefree, else (-1)^(number of prime factors)."""
    fac = factorize(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def euler_phi(n: int) -> int:
    """Number of units modulo n."""
    out = 1
    for p, e in factorize(n):
        out *= (p - 1) * p ** (e - 1)
    return out


def ramanujan_sum(q: int, k: int) -> int:
    """Sum of the k-th powers of the primitive q-th roots of unity.

    Evaluated through the divisor formula sum_{t | gcd(q,k)} t * mobius(q/t).
    gcd(q, 0) is q, so ramanujan_sum(q, 0) == euler_phi(q).
    """
    if q < 1:
        raise ValueError(f"ramanujan_sum: modulus must be positive, got {q}")
    g = gcd(q, k)
    return sum(t * mobius(q // t) for t in divisors(g))
