"""Small integer helpers."""

from __future__ import annotations


def factorize(n: int) -> dict:
    """Prime factorization as {prime: exponent}, by trial division."""
    assert n >= 1
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(n: int):
    """(p, k) with n = p**k, or None if n is not a prime power."""
    f = factorize(n)
    if len(f) != 1:
        return None
    [(p, k)] = f.items()
    return p, k
