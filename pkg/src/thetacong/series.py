"""Truncated Laurent series over the integers.

A :class:`LaurentSeries` stores its coefficients densely from the valuation
up to an explicit horizon ``precision`` (exclusive).  Coefficients at or
beyond the horizon are unknown, and every operation reports the horizon its
result is actually guaranteed to.

The theta-type constructors at the bottom build the series the congruence
machinery is written in: phi(-q), psi(q), their ratios F and G, and the
auxiliary xi, zeta, gamma, delta.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ._arith import convolve
from .errors import IntegralityError, PrecisionError, UsageError

DEFAULT_MAX_HORIZON = 200_000
# largest horizon the theta constructors will expand to
MAX_SERIES_HORIZON = 1_000_000


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True, slots=True)
class LaurentSeries:
    """``sum(coeffs[k] q^(valuation+k)) + O(q^precision)``.

    Build instances with :meth:`from_coeffs`; the raw constructor expects
    canonical data (nonzero leading coefficient, ``len(coeffs) ==
    precision - valuation``, or the zero form ``valuation=0, coeffs=()``).
    """

    valuation: int
    coeffs: tuple
    precision: int

    def __post_init__(self):
        if self.coeffs:
            if self.coeffs[0] == 0:
                raise ValueError("non-canonical series: zero leading coefficient")
            if len(self.coeffs) != self.precision - self.valuation:
                raise ValueError("coefficient count does not match horizon")
        elif self.valuation != 0:
            raise ValueError("zero series must have valuation 0")

    # -- construction -----------------------------------------------------

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[int], start: int = 0, precision: int | None = None) -> "LaurentSeries":
        """Series whose coefficient at ``q^(start+k)`` is ``coeffs[k]``.

        ``precision`` defaults to just past the last given coefficient; a
        shorter list is padded with zeros up to the horizon.
        """
        c = [int(x) for x in coeffs]
        if precision is None:
            precision = start + len(c)
        n = precision - start
        if n < len(c):
            del c[max(n, 0):]
        lead = 0
        while lead < len(c) and c[lead] == 0:
            lead += 1
        if lead == len(c):
            return cls(0, (), precision)
        c = c[lead:]
        c.extend([0] * (n - lead - len(c)))
        return cls(start + lead, tuple(c), precision)

    @classmethod
    def zero(cls, precision: int) -> "LaurentSeries":
        return cls(0, (), precision)

    @classmethod
    def monomial(cls, c: int, e: int, precision: int) -> "LaurentSeries":
        if c == 0 or e >= precision:
            return cls.zero(precision)
        return cls.from_coeffs([c], e, precision)

    @classmethod
    def one(cls, precision: int) -> "LaurentSeries":
        return cls.monomial(1, 0, precision)

    @classmethod
    def from_terms(cls, terms: dict, precision: int) -> "LaurentSeries":
        """Sparse constructor: ``{exponent: coefficient}``."""
        terms = {e: c for e, c in terms.items() if c and e < precision}
        if not terms:
            return cls.zero(precision)
        lo = min(terms)
        c = [0] * (precision - lo)
        for e, v in terms.items():
            c[e - lo] += v
        return cls.from_coeffs(c, lo, precision)

    # -- inspection -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, n: int) -> int:
        if n >= self.precision:
            raise PrecisionError(f"coefficient of q^{n} is beyond the horizon {self.precision}")
        if not self.coeffs or n < self.valuation:
            return 0
        return self.coeffs[n - self.valuation]

    def __getitem__(self, n: int) -> int:
        return self.coeff(n)

    def coefficient_list(self, start: int, stop: int) -> list[int]:
        """Coefficients of ``q^start .. q^(stop-1)``."""
        if stop > self.precision:
            raise PrecisionError(f"requested up to q^{stop - 1}, horizon is {self.precision}")
        v = self.valuation
        c = self.coeffs
        out = [0] * max(stop - start, 0)
        for n in range(max(start, v), stop):
            out[n - start] = c[n - v]
        return out

    def _eff_val(self) -> int:
        # a zero series O(q^p) behaves like valuation p under multiplication
        return self.valuation if self.coeffs else self.precision

    def __repr__(self):
        if not self.coeffs:
            return f"O(q^{self.precision})"
        shown = []
        for k, c in enumerate(self.coeffs[:8]):
            if c:
                shown.append(f"{c}*q^{self.valuation + k}")
        tail = " + ..." if len(self.coeffs) > 8 else ""
        return " + ".join(shown) + tail + f" + O(q^{self.precision})"

    # -- ring operations --------------------------------------------------

    def __neg__(self) -> "LaurentSeries":
        return LaurentSeries(self.valuation, tuple(-x for x in self.coeffs), self.precision)

    def __add__(self, other) -> "LaurentSeries":
        if isinstance(other, int):
            other = LaurentSeries.monomial(other, 0, self.precision)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        prec = min(self.precision, other.precision)
        if self.is_zero():
            return other.truncate(prec)
        if other.is_zero():
            return self.truncate(prec)
        lo = min(self.valuation, other.valuation)
        if lo >= prec:
            return LaurentSeries.zero(prec)
        out = [0] * (prec - lo)
        for s in (self, other):
            off = s.valuation - lo
            for k in range(min(len(s.coeffs), prec - s.valuation)):
                out[off + k] += s.coeffs[k]
        return LaurentSeries.from_coeffs(out, lo, prec)

    __radd__ = __add__

    def __sub__(self, other) -> "LaurentSeries":
        if isinstance(other, int):
            other = LaurentSeries.monomial(other, 0, self.precision)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "LaurentSeries":
        return (-self) + other

    def __mul__(self, other) -> "LaurentSeries":
        if isinstance(other, int):
            if other == 0:
                return LaurentSeries.zero(self.precision)
            return LaurentSeries(self.valuation, tuple(other * x for x in self.coeffs), self.precision)
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        prec = min(self.precision + other._eff_val(), other.precision + self._eff_val())
        if self.is_zero() or other.is_zero():
            return LaurentSeries.zero(prec)
        v = self.valuation + other.valuation
        n = prec - v
        if n <= 0:
            return LaurentSeries.zero(prec)
        return LaurentSeries.from_coeffs(convolve(self.coeffs, other.coeffs, n), v, prec)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentSeries":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.invert() ** (-k)
        result = None
        base = self
        while True:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if not k:
                break
            base = base * base
        if result is None:
            prec = self.precision - self._eff_val()
            return LaurentSeries.one(prec)
        return result

    def invert(self) -> "LaurentSeries":
        """Multiplicative inverse; the leading coefficient must be a unit."""
        if self.is_zero():
            raise IntegralityError("cannot invert a series with no known nonzero coefficient")
        lead = self.coeffs[0]
        if lead not in (1, -1):
            raise IntegralityError(f"leading coefficient {lead} is not a unit in Z")
        v = self.valuation
        n = self.precision - v
        u = list(self.coeffs)
        # Newton: g <- g + g*(1 - u*g), doubling the correct length each pass
        g = [lead]
        k = 1
        while k < n:
            k2 = min(2 * k, n)
            ug = convolve(u[:k2], g, k2)
            e = [-x for x in ug]
            e[0] += 1
            corr = convolve(g, e[k:], k2 - k)
            g = g + [0] * (k2 - k)
            for i, c in enumerate(corr):
                g[k + i] += c
            k = k2
        return LaurentSeries.from_coeffs(g, -v, self.precision - 2 * v)

    def __truediv__(self, other) -> "LaurentSeries":
        if isinstance(other, LaurentSeries):
            return self * other.invert()
        if isinstance(other, int):
            return self.divexact(other)
        return NotImplemented

    def divexact(self, d: int) -> "LaurentSeries":
        out = []
        for c in self.coeffs:
            q, r = divmod(c, d)
            if r:
                raise IntegralityError(f"coefficient {c} is not divisible by {d}")
            out.append(q)
        return LaurentSeries.from_coeffs(out, self.valuation, self.precision)

    # -- structural maps --------------------------------------------------

    def truncate(self, precision: int) -> "LaurentSeries":
        if precision >= self.precision:
            return self
        if self.is_zero() or precision <= self.valuation:
            return LaurentSeries.zero(precision)
        return LaurentSeries.from_coeffs(self.coeffs[: precision - self.valuation], self.valuation, precision)

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by ``q^k``."""
        if self.is_zero():
            return LaurentSeries.zero(self.precision + k)
        return LaurentSeries(self.valuation + k, self.coeffs, self.precision + k)

    def dilate(self, t: int, precision: int | None = None, max_horizon: int = DEFAULT_MAX_HORIZON) -> "LaurentSeries":
        """Substitute ``q -> q^t``.

        The natural horizon is ``t*(precision-1)+1``; pass ``precision`` to cut
        it shorter.  A result wider than ``max_horizon`` exponents raises
        :class:`PrecisionError` instead of being silently clipped.
        """
        if t < 1:
            raise UsageError("dilation factor must be >= 1")
        prec = t * (self.precision - 1) + 1
        if precision is not None:
            prec = min(prec, precision)
        if t == 1:
            return self.truncate(prec)
        if self.is_zero():
            return LaurentSeries.zero(prec)
        v = t * self.valuation
        width = prec - v
        if width > max_horizon:
            raise PrecisionError(f"dilated series would span {width} exponents (cap {max_horizon})")
        if width <= 0:
            return LaurentSeries.zero(prec)
        out = [0] * width
        for k, c in enumerate(self.coeffs):
            e = t * k
            if e >= width:
                break
            out[e] = c
        return LaurentSeries.from_coeffs(out, v, prec)

    def u3(self) -> "LaurentSeries":
        """Keep the coefficients at exponents divisible by 3: ``sum a(3n) q^n``."""
        prec = _ceil_div(self.precision, 3)
        if self.is_zero():
            return LaurentSeries.zero(prec)
        lo = _ceil_div(self.valuation, 3)
        v = self.valuation
        out = [self.coeffs[3 * n - v] for n in range(lo, prec)]
        return LaurentSeries.from_coeffs(out, lo, prec)

    # -- comparison -------------------------------------------------------

    def first_difference(self, other: "LaurentSeries") -> int | None:
        """Lowest exponent below the shared horizon where the two differ."""
        prec = min(self.precision, other.precision)
        lo = min(self._eff_val(), other._eff_val(), prec)
        for n in range(lo, prec):
            if self.coeff(n) != other.coeff(n):
                return n
        return None

    def agrees_with(self, other: "LaurentSeries") -> bool:
        return self.first_difference(other) is None

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "valuation": self.valuation,
            "precision": self.precision,
            "coeffs": [str(c) for c in self.coeffs],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LaurentSeries":
        coeffs = [int(c) for c in data["coeffs"]]
        return cls.from_coeffs(coeffs, int(data["valuation"]), int(data["precision"]))


# module-level spellings of the arithmetic


def add(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    return a + b


def sub(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    return a - b


def neg(a: LaurentSeries) -> LaurentSeries:
    return -a


def mul(a: LaurentSeries, b: LaurentSeries) -> LaurentSeries:
    return a * b


def invert(a: LaurentSeries) -> LaurentSeries:
    return a.invert()


def dilate(a: LaurentSeries, t: int, precision: int | None = None) -> LaurentSeries:
    return a.dilate(t, precision)


def u3(a: LaurentSeries) -> LaurentSeries:
    return a.u3()


# ---------------------------------------------------------------------------
# Series with coefficients in Z[omega], omega^2 = -1 - omega
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class CycloSeries:
    """``re + om*omega`` with both parts integer series on a common horizon."""

    re: LaurentSeries
    om: LaurentSeries

    def __post_init__(self):
        if self.re.precision != self.om.precision:
            raise ValueError("parts must share a horizon")

    @classmethod
    def of(cls, re: LaurentSeries, om: LaurentSeries) -> "CycloSeries":
        p = min(re.precision, om.precision)
        return cls(re.truncate(p), om.truncate(p))

    @classmethod
    def embed(cls, s: LaurentSeries) -> "CycloSeries":
        return cls(s, LaurentSeries.zero(s.precision))

    @property
    def precision(self) -> int:
        return self.re.precision

    @property
    def valuation(self) -> int:
        vals = [s.valuation for s in (self.re, self.om) if not s.is_zero()]
        return min(vals) if vals else 0

    def coeff(self, n: int) -> tuple[int, int]:
        return (self.re.coeff(n), self.om.coeff(n))

    def is_rational(self) -> bool:
        """True when every omega-component below the horizon vanishes."""
        return self.om.is_zero()

    def to_series(self) -> LaurentSeries:
        if not self.is_rational():
            raise IntegralityError("series has a nonzero omega-component")
        return self.re

    def __add__(self, other: "CycloSeries") -> "CycloSeries":
        return CycloSeries.of(self.re + other.re, self.om + other.om)

    def __sub__(self, other: "CycloSeries") -> "CycloSeries":
        return CycloSeries.of(self.re - other.re, self.om - other.om)

    def __neg__(self) -> "CycloSeries":
        return CycloSeries(-self.re, -self.om)

    def __mul__(self, other) -> "CycloSeries":
        if isinstance(other, int):
            return CycloSeries(self.re * other, self.om * other)
        if isinstance(other, LaurentSeries):
            other = CycloSeries.embed(other)
        a, b, c, d = self.re, self.om, other.re, other.om
        bd = b * d
        # (a + b w)(c + d w) = ac - bd + (ad + bc - bd) w
        return CycloSeries.of(a * c - bd, a * d + b * c - bd)

    __rmul__ = __mul__

    def divexact(self, d: int) -> "CycloSeries":
        return CycloSeries(self.re.divexact(d), self.om.divexact(d))

    def first_difference(self, other: "CycloSeries") -> int | None:
        cands = [x for x in (self.re.first_difference(other.re), self.om.first_difference(other.om)) if x is not None]
        return min(cands) if cands else None


def twist(a: LaurentSeries, k: int) -> CycloSeries:
    """The series ``a(omega^k q)``: coefficient ``a_n`` becomes ``a_n * omega^(kn)``."""
    if k not in (0, 1, 2):
        raise UsageError("twist index must be 0, 1 or 2")
    if a.is_zero() or k == 0:
        return CycloSeries.embed(a)
    v = a.valuation
    re, om = [], []
    for i, c in enumerate(a.coeffs):
        r = (k * (v + i)) % 3
        if r == 0:
            re.append(c)
            om.append(0)
        elif r == 1:
            re.append(0)
            om.append(c)
        else:
            re.append(-c)
            om.append(-c)
    p = a.precision
    return CycloSeries(LaurentSeries.from_coeffs(re, v, p), LaurentSeries.from_coeffs(om, v, p))


# ---------------------------------------------------------------------------
# Theta-type constructors
# ---------------------------------------------------------------------------


def _check_prec(prec: int) -> None:
    if not isinstance(prec, int) or prec < 1:
        raise UsageError(f"precision must be a positive integer, got {prec!r}")
    if prec > MAX_SERIES_HORIZON:
        raise PrecisionError(f"horizon {prec} exceeds the cap of {MAX_SERIES_HORIZON} terms")


def euler_product(delta: int, prec: int) -> LaurentSeries:
    """``(q^delta; q^delta)_inf`` via Euler's pentagonal-number expansion."""
    terms: dict[int, int] = {}
    k = 0
    while True:
        hit = False
        for kk in ((k, -k) if k else (0,)):
            e = delta * kk * (3 * kk - 1) // 2
            if e < prec:
                terms[e] = terms.get(e, 0) + (-1 if kk % 2 else 1)
                hit = True
        if not hit and k > 0:
            break
        k += 1
    return LaurentSeries.from_terms(terms, prec)


def pochhammer_power(delta: int, r: int, prec: int) -> LaurentSeries:
    """``(q^delta; q^delta)_inf ** r`` truncated at ``q^prec``."""
    if not isinstance(delta, int) or delta < 1:
        raise UsageError("delta must be a positive integer")
    _check_prec(prec)
    if r == 0:
        return LaurentSeries.one(prec)
    base = euler_product(delta, prec)
    p = base ** abs(r)
    return p.invert() if r < 0 else p


def theta_f(s: int, t: int, prec: int, sign_a: int = 1, sign_b: int = 1) -> LaurentSeries:
    """Ramanujan's ``f(a, b)`` at ``a = sign_a*q^s``, ``b = sign_b*q^t``.

    Term ``k`` is ``sign_a^(k(k+1)/2) sign_b^(k(k-1)/2) q^(s k(k+1)/2 + t k(k-1)/2)``.
    """
    if s < 0 or t < 0 or s + t < 1:
        raise UsageError("theta_f needs s, t >= 0 with s + t >= 1")
    if sign_a not in (1, -1) or sign_b not in (1, -1):
        raise UsageError("signs must be +1 or -1")
    _check_prec(prec)
    terms: dict[int, int] = {}
    # both halves k >= 0 and k < 0 have nondecreasing exponents
    for direction in (1, -1):
        k = 0 if direction == 1 else -1
        while True:
            ta = k * (k + 1) // 2
            tb = k * (k - 1) // 2
            e = s * ta + t * tb
            if e >= prec:
                break
            sign = (sign_a if ta % 2 else 1) * (sign_b if tb % 2 else 1)
            terms[e] = terms.get(e, 0) + sign
            k += direction
    return LaurentSeries.from_terms(terms, prec)


def phi_neg(prec: int, dilation: int = 1) -> LaurentSeries:
    """``phi(-q^d) = f(-q^d, -q^d)``."""
    return theta_f(dilation, dilation, prec, -1, -1)


def psi(prec: int, dilation: int = 1) -> LaurentSeries:
    """``psi(q^d) = f(q^d, q^(3d))``."""
    return theta_f(dilation, 3 * dilation, prec)


def _F(prec: int) -> LaurentSeries:
    return (phi_neg(prec, 3) * phi_neg(prec).invert()).truncate(prec)


def _G(prec: int) -> LaurentSeries:
    return (psi(prec, 3) * psi(prec).invert()).truncate(prec)


def _dilated(builder, t: int, prec: int) -> LaurentSeries:
    small = builder(_ceil_div(prec - 1, t) + 1)
    return small.dilate(t, prec)


def _named(name: str, prec: int) -> LaurentSeries:
    if name == "phi_neg":
        return phi_neg(prec)
    if name == "psi":
        return psi(prec)
    if name == "F":
        return _F(prec)
    if name == "G":
        return _G(prec)
    if name == "xi":
        return (phi_neg(prec, 9) * phi_neg(prec).invert()).truncate(prec)
    if name == "zeta":
        p = prec - 1
        ratio = psi(max(p, 1), 9) * psi(max(p, 1)).invert()
        return ratio.truncate(p).shift(1)
    if name == "gamma":
        return (_F(prec) * _dilated(_F, 9, prec).invert()).truncate(prec)
    if name == "delta":
        p = prec + 2
        return (_G(p) * _dilated(_G, 9, p).invert()).truncate(p).shift(-2)
    raise UsageError(f"unknown series name {name!r}; expected one of {', '.join(SERIES_NAMES)}")


SERIES_NAMES = ("phi_neg", "psi", "F", "G", "xi", "zeta", "gamma", "delta")


def named_series(name: str, prec: int) -> LaurentSeries:
    """One of the named series, exact below ``q^prec``.

    ``F = phi(-q^3)/phi(-q)`` and ``G = psi(q^3)/psi(q)`` generate ph3 and
    ps3; ``xi = phi(-q^9)/phi(-q)``, ``gamma = F(q)/F(q^9)``,
    ``zeta = q psi(q^9)/psi(q)``, ``delta = q^-2 G(q)/G(q^9)``.
    """
    if name not in SERIES_NAMES:
        raise UsageError(f"unknown series name {name!r}; expected one of {', '.join(SERIES_NAMES)}")
    _check_prec(prec)
    return _named(name, prec)
