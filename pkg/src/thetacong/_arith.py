"""Integer convolution kernels.

Everything above this module works with plain Python ints.  Products are
delegated to FLINT once the operands are large enough for the conversion to
pay off; results are bit-identical to the schoolbook loop.
"""

from __future__ import annotations

from typing import Sequence

import flint

# below this many coefficient pairs the Python loop wins over conversion
_FLINT_CUTOFF = 400


def schoolbook(a: Sequence[int], b: Sequence[int], n: int | None = None) -> list[int]:
    """Reference product of two coefficient lists, optionally truncated to ``n`` terms."""
    if not a or not b:
        return []
    full = len(a) + len(b) - 1
    n = full if n is None else min(n, full)
    out = [0] * n
    for i, x in enumerate(a[:n]):
        if not x:
            continue
        for j, y in enumerate(b[: n - i]):
            out[i + j] += x * y
    return out


def to_flint(coeffs: Sequence[int]) -> flint.fmpz_poly:
    return flint.fmpz_poly(list(coeffs))


def from_flint(p: flint.fmpz_poly, length: int | None = None) -> list[int]:
    out = [int(c) for c in p.coeffs()]
    if length is not None:
        if len(out) < length:
            out.extend([0] * (length - len(out)))
        else:
            del out[length:]
    return out


def convolve(a: Sequence[int], b: Sequence[int], n: int | None = None) -> list[int]:
    """Product of coefficient lists; the first ``n`` terms if ``n`` is given.

    The result always has exactly ``min(n, len(a)+len(b)-1)`` entries.
    """
    if not a or not b:
        return []
    full = len(a) + len(b) - 1
    n = full if n is None else min(n, full)
    if n <= 0:
        return []
    a = a[:n]
    b = b[:n]
    if len(a) * len(b) <= _FLINT_CUTOFF * 8 or min(len(a), len(b)) < 8:
        return schoolbook(a, b, n)
    fa, fb = to_flint(a), to_flint(b)
    prod = fa.mul_low(fb, n) if n < full else fa * fb
    return from_flint(prod, n)
