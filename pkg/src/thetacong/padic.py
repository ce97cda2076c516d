"""3-adic valuation of exact integers."""

from __future__ import annotations

import functools

import gmpy2


class _Infinity:
    """Valuation of zero; compares above every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("thetacong.INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def nu(n: int, p: int = 3):
    """Exponent of the largest power of ``p`` dividing ``n``; ``INF`` for zero.

    >>> nu(54), nu(-2), nu(0)
    (3, 0, INF)
    """
    if n == 0:
        return INF
    if -(1 << 62) < n < (1 << 62):
        k = 0
        while n % p == 0:
            n //= p
            k += 1
        return k
    # mpz_remove divides out p by repeated squaring; exact either way
    _, k = gmpy2.remove(gmpy2.mpz(n), p)
    return int(k)


@functools.lru_cache(maxsize=256)
def pow3(k: int):
    return gmpy2.mpz(3) ** k


def divisible_by_3pow(n: int, k: int) -> bool:
    """``nu(n) >= k`` without computing the full valuation."""
    if k <= 0 or n == 0:
        return True
    return gmpy2.is_divisible(gmpy2.mpz(n), pow3(k))


def valuation_json(v) -> int | str:
    return "inf" if v is INF else int(v)
