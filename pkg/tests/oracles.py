"""Independent brute-force oracles.  None of these import the package."""

from __future__ import annotations

from fractions import Fraction


def naive_product(factors, n):
    """Multiply out a list of {exponent: coeff} polynomials, truncated at q^n."""
    acc = [0] * n
    acc[0] = 1
    for f in factors:
        out = [0] * n
        for i, a in enumerate(acc):
            if a:
                for e, c in f.items():
                    if i + e < n:
                        out[i + e] += a * c
        acc = out
    return acc


def euler_naive(n, delta=1):
    """(q^delta; q^delta)_inf below q^n by expanding each factor."""
    return naive_product([{0: 1, delta * k: -1} for k in range(1, n // delta + 1)], n)


def back_substitution_inverse(a, n):
    """Inverse of a power series with a[0] = +-1 by solving term by term."""
    inv = [Fraction(0)] * n
    inv[0] = Fraction(1, a[0])
    for k in range(1, n):
        s = sum(a[j] * inv[k - j] for j in range(1, min(k, len(a) - 1) + 1))
        inv[k] = -s / a[0]
    assert all(x.denominator == 1 for x in inv)
    return [int(x) for x in inv]


def partitions(n, max_part=None):
    """All partitions of n as nonincreasing tuples."""
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def overpartitions_3regular(n):
    """Count overpartitions of n with no part divisible by 3.

    Each distinct part size may have its first occurrence overlined.
    """
    total = 0
    for p in partitions(n):
        if any(x % 3 == 0 for x in p):
            continue
        total += 2 ** len(set(p))
    return total


def pod3_enumerated(n):
    """Partitions of n into non-multiples of 3 whose odd parts are distinct."""
    count = 0
    for p in partitions(n):
        if any(x % 3 == 0 for x in p):
            continue
        odd = [x for x in p if x % 2]
        if len(odd) != len(set(odd)):
            continue
        count += 1
    return count


def poly_mul_naive(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    while out and out[-1] == 0:
        out.pop()
    return out


def nu_naive(n):
    if n == 0:
        return None
    k = 0
    while n % 3 == 0:
        n //= 3
        k += 1
    return k
