"""Closed-form evaluation of the U action on Z[x], bypassing the row table.

Rows generated by the cubic recurrence with ``A = x - 3x^2 + 3x^3`` satisfy

    X_l = sum_j tau(l, 3j) (A-1)^j A^(l-j),   tau(l, k) = [v^k] (1+v+v^2)^l,

so ``sum a_l X_l`` is ``R(A)`` for a single polynomial ``R`` of degree
``deg p``.  ``R`` is obtained by two Taylor shifts and one trisection of a
product with ``(1+v+v^2)^D``; the final substitution ``R(A)`` is a
divide-and-conquer composition.  Storing the table itself would take
``O(D^2)`` big integers, which is hopeless at the sizes the hat check needs.

Everything here runs on FLINT polynomials; callers pass and receive
:class:`IntPoly`.
"""

from __future__ import annotations

import flint

from ._arith import from_flint
from .errors import StructuralError
from .polyring import IntPoly

_P = flint.fmpz_poly
_LEAF = 32


def _compose(c: list, A: flint.fmpz_poly) -> flint.fmpz_poly:
    """``sum c[k] A^k``, splitting the coefficient list in halves.

    FLINT's own composition builds every power at once and runs out of
    memory when ``len(c)`` is in the tens of thousands.
    """
    n = 1
    while n < len(c):
        n *= 2
    small = [_P([1])]
    for _ in range(_LEAF):
        small.append(small[-1] * A)
    big = {_LEAF: small[_LEAF]}
    k = _LEAF
    while k < n:
        big[2 * k] = big[k] * big[k]
        k *= 2

    def rec(lo: int, m: int) -> flint.fmpz_poly:
        if lo >= len(c):
            return _P([])
        if m <= _LEAF:
            acc = _P([])
            for j in range(m):
                if lo + j < len(c) and c[lo + j]:
                    acc += c[lo + j] * small[j]
            return acc
        h = m // 2
        left = rec(lo, h)
        right = rec(lo + h, h)
        if right.is_zero():
            return left
        return left + big[h] * right

    return rec(0, n)


def u_closed(p: IntPoly, A: IntPoly) -> IntPoly:
    """``sum p_l X_l`` for the rows generated from ``A``."""
    D = p.degree
    if D <= 0:
        return p
    reversed_p = _P(list(reversed(p.coeffs)))
    shifted = reversed_p(_P([1, -1]))
    H = _P([1, 1, 1]) ** D * shifted
    del shifted
    hc = H.coeffs()
    del H
    tri = _P(hc[0::3])
    del hc
    back = tri(_P([1, -1]))
    c = back.coeffs()
    c.extend([0] * (D + 1 - len(c)))
    c.reverse()
    return IntPoly(from_flint(_compose(c, _P(list(A.coeffs)))))


def u_gamma_closed(p: IntPoly, A: IntPoly) -> IntPoly:
    """``sum p_l x^-1 X_(l+1)``."""
    if p.is_zero():
        return p
    full = u_closed(p.shift_up(1), A)
    if full[0]:
        raise StructuralError("closed-form U(x p) has a nonzero constant term")
    return full.shift_down(1)
