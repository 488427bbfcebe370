"""Exact elementary number theory on machine-sized integers.

Everything here works on Python ints but refuses values outside the signed
64-bit range, so results can be handed to the int64 kernels unchanged.
"""

from __future__ import annotations

from functools import lru_cache
from math import gcd, prod

INT64_MAX = 2**63 - 1


class OverflowRejected(OverflowError):
    """A quantity left the signed 64-bit range."""


def check64(x: int) -> int:
    if not -INT64_MAX - 1 <= x <= INT64_MAX:
        raise OverflowRejected(f"{x} does not fit in a signed 64-bit integer")
    return x


def _positive(n: int, what: str = "n") -> int:
    if not isinstance(n, int) or isinstance(n, bool):
        raise TypeError(f"{what} must be an int, got {type(n).__name__}")
    if n < 1:
        raise ValueError(f"{what} must be >= 1, got {n}")
    return check64(n)


@lru_cache(maxsize=4096)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Trial-division factorization as ascending ``(p, e)`` pairs; ``1 -> ()``."""
    n = _positive(n)
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
    return tuple(out)


def primes_dividing(n: int) -> list[int]:
    return [p for p, _ in factorize(n)]


def prime_power_parts(n: int) -> list[int]:
    return [p**e for p, e in factorize(n)]


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == ((n, 1),)


def euler_phi(n: int) -> int:
    return prod(p ** (e - 1) * (p - 1) for p, e in factorize(n))


def omega(n: int) -> int:
    """Number of distinct primes dividing ``n``."""
    return len(factorize(n))


def valuation(n: int, p: int) -> int:
    """Exponent of the prime ``p`` in ``n``."""
    _positive(n)
    if not is_prime(p):
        raise ValueError(f"valuation needs a prime, got {p}")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def legendre_minus_one(p: int) -> int:
    """(-1/p) for an odd prime p."""
    if p == 2 or not is_prime(p):
        raise ValueError(f"(-1/p) needs an odd prime, got {p}")
    return 1 if p % 4 == 1 else -1


def legendre_minus_three(p: int) -> int:
    """(-3/p) for a prime p != 3, with (-3/2) = -1."""
    if p == 3 or not is_prime(p):
        raise ValueError(f"(-3/p) needs a prime other than 3, got {p}")
    return 1 if p % 3 == 1 else -1


def inverse_mod(a: int, n: int) -> int:
    if gcd(a, n) != 1:
        raise ValueError(f"{a} is not invertible mod {n}")
    return pow(a, -1, n) if n > 1 else 0


def crt_lift(residues: list[tuple[int, int]]) -> tuple[int, int]:
    """Combine ``(value, modulus)`` pairs with pairwise coprime moduli.

    Returns ``(value, product_of_moduli)`` with ``0 <= value < product``.
    """
    x, m = 0, 1
    for r, q in residues:
        _positive(q, "modulus")
        if gcd(m, q) != 1:
            raise ValueError(f"moduli {m} and {q} are not coprime")
        # x + m*t = r (mod q)
        t = ((r - x) * inverse_mod(m % q, q)) % q if q > 1 else 0
        x, m = x + m * t, check64(m * q)
    return x % m, m


def units(n: int) -> list[int]:
    return [a for a in range(n) if gcd(a, n) == 1] if n > 1 else [0]


def multiplicative_order(a: int, n: int) -> int:
    if n == 1:
        return 1
    k, x = 1, a % n
    while x != 1:
        x = x * a % n
        k += 1
    return k


@lru_cache(maxsize=1024)
def unit_generators(n: int) -> tuple[int, ...]:
    """A small generating set of (Z/nZ)^x, picked greedily in ascending order."""
    _positive(n)
    if n <= 2:
        return ()
    span = {1}
    gens = []
    for a in units(n):
        if a in span:
            continue
        gens.append(a)
        frontier = list(span)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = x * g % n
                    if y not in span:
                        span.add(y)
                        nxt.append(y)
            frontier = nxt
        if len(span) == euler_phi(n):
            break
    return tuple(gens)
