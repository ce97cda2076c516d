"""Dense integer polynomials, used as elements of Z[xi] and Z[zeta]."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ._arith import convolve
from .errors import StructuralError, UsageError
from .series import LaurentSeries


def _normalize(coeffs: Iterable[int]) -> tuple:
    c = [int(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True, slots=True)
class IntPoly:
    """``sum(coeffs[k] x^k)``; the zero polynomial has ``coeffs == ()``."""

    coeffs: tuple

    def __init__(self, coeffs: Iterable[int] = ()):
        object.__setattr__(self, "coeffs", _normalize(coeffs))

    @classmethod
    def monomial(cls, c: int, k: int) -> "IntPoly":
        return cls([0] * k + [c])

    # -- inspection -------------------------------------------------------

    @property
    def degree(self) -> int:
        """-1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k: int) -> int:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return 0

    def __len__(self):
        return len(self.coeffs)

    def min_degree(self) -> int:
        """Lowest index with a nonzero coefficient."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        raise UsageError("min_degree of the zero polynomial is undefined")

    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __repr__(self):
        if len(self.coeffs) > 8:
            return f"IntPoly(degree={self.degree}, [{', '.join(map(str, self.coeffs[:4]))}, ...])"
        return f"IntPoly({list(self.coeffs)})"

    # -- ring operations --------------------------------------------------

    def __add__(self, other) -> "IntPoly":
        if isinstance(other, int):
            other = IntPoly([other])
        if not isinstance(other, IntPoly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, c in enumerate(b):
            out[k] += c
        return IntPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "IntPoly":
        return IntPoly(-c for c in self.coeffs)

    def __sub__(self, other) -> "IntPoly":
        if isinstance(other, int):
            other = IntPoly([other])
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "IntPoly":
        return (-self) + other

    def __mul__(self, other) -> "IntPoly":
        if isinstance(other, int):
            return scalar_mul(self, other)
        if not isinstance(other, IntPoly):
            return NotImplemented
        return IntPoly(convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "IntPoly":
        result = IntPoly([1])
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def shift_down(self, k: int = 1) -> "IntPoly":
        """Divide by ``x^k``; the low coefficients must vanish."""
        if any(self.coeffs[:k]):
            raise StructuralError(f"dividing by x^{k} would create a negative degree")
        return IntPoly(self.coeffs[k:])

    def shift_up(self, k: int = 1) -> "IntPoly":
        if self.is_zero():
            return self
        return IntPoly((0,) * k + self.coeffs)

    # -- evaluation -------------------------------------------------------

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_series(self, x: LaurentSeries) -> LaurentSeries:
        """Horner evaluation at a series of nonnegative valuation.

        The result is reported on the horizon of ``x``.
        """
        if not x.is_zero() and x.valuation < 0:
            raise UsageError("eval_series needs a series of nonnegative valuation")
        prec = x.precision
        acc = LaurentSeries.zero(prec)
        for c in reversed(self.coeffs):
            acc = (acc * x).truncate(prec) + LaurentSeries.monomial(c, 0, prec)
        return acc

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {"coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "IntPoly":
        return cls(int(c) for c in data["coeffs"])


def poly_add(a: IntPoly, b: IntPoly) -> IntPoly:
    return a + b


def poly_sub(a: IntPoly, b: IntPoly) -> IntPoly:
    return a - b


def poly_mul(a: IntPoly, b: IntPoly) -> IntPoly:
    return a * b


def scalar_mul(a: IntPoly, c: int) -> IntPoly:
    return IntPoly(c * x for x in a.coeffs)


def eval_series(p: IntPoly, x: LaurentSeries) -> LaurentSeries:
    return p.eval_series(x)


def min_degree(p: IntPoly) -> int:
    return p.min_degree()
