"""The Phi/Psi iteration, hat bounds, and direct congruence scans.

Polynomials here live in Z[x] with ``x`` standing for xi (ph side, ``"phi"``)
or zeta (ps side, ``"psi"``).  Three interchangeable routes apply the U map
to a polynomial:

* ``table``: sum of stored rows, the literal definition;
* ``stream``: the same sum with rows regenerated on the fly by the
  recurrence and discarded, so memory stays linear;
* ``closed``: the closed form in :mod:`thetacong.fastu`, validated against
  the table before first use.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import flint

from . import fastu
from ._arith import from_flint
from .certificate import SERIES_HORIZON_NOTE, Certificate, Timer, certify, series_witness
from .errors import HorizonError, PreconditionError, StructuralError, UsageError
from .modeq import ModEqTable, ValuationReport, build_table
from .padic import INF, divisible_by_3pow, nu, valuation_json
from .polyring import IntPoly
from .series import LaurentSeries, named_series

PHI_SIDES = ("phi", "psi")
FAMILIES = ("ph3", "ps3")
METHODS = ("auto", "table", "stream", "closed")

PHI_1 = IntPoly([1, -3, 3])

_TABLE_SIDE = {"phi": "xi", "psi": "zeta"}
_BASE_NAME = {"phi": "xi", "psi": "zeta"}
_GEN_NAME = {"phi": "F", "psi": "G"}


def _check_phi_side(side: str) -> None:
    if side not in PHI_SIDES:
        raise UsageError(f"side must be one of {PHI_SIDES}, got {side!r}")


def ps_offset(k: int) -> int:
    """(3^k - 1)/4 for even k: the shift carried by the ps progression."""
    return (3**k - 1) // 4


# ---------------------------------------------------------------------------
# U on Z[x]
# ---------------------------------------------------------------------------


def u_poly(p: IntPoly, table: ModEqTable) -> IntPoly:
    """``sum p_l X_l`` over stored rows."""
    if p.degree > table.max_i:
        raise PreconditionError(f"table reaches row {table.max_i}, polynomial has degree {p.degree}")
    acc = [0] * (3 * max(p.degree, 0) + 1)
    for l, c in enumerate(p.coeffs):
        if c:
            for j, x in enumerate(table.rows[l].coeffs):
                acc[j] += c * x
    return IntPoly(acc)


def u_gamma_poly(p: IntPoly, table: ModEqTable) -> IntPoly:
    """``sum p_l x^-1 X_(l+1)``."""
    if p.degree + 1 > table.max_i:
        raise PreconditionError(f"table reaches row {table.max_i}, needs row {p.degree + 1}")
    acc = [0] * (3 * max(p.degree, 0) + 3)
    for l, c in enumerate(p.coeffs):
        if not c:
            continue
        row = table.rows[l + 1]
        if row[0]:
            raise StructuralError(f"row {l + 1} has a constant term; shift-down impossible")
        for j, x in enumerate(row.coeffs[1:]):
            acc[j] += c * x
    return IntPoly(acc)


def _stream(p: IntPoly, table: ModEqTable, offset: int) -> flint.fmpz_poly:
    P = flint.fmpz_poly
    A = P(list(table.rows[1].coeffs))
    rows = [P([1]), A, P(list(table.rows[2].coeffs)), P(list(table.rows[3].coeffs))]
    acc = P([])
    for l, c in enumerate(p.coeffs):
        i = l + offset
        while len(rows) <= i:
            rows.append(A * (3 * rows[-1] - 3 * rows[-2] + rows[-3]))
            if len(rows) > 4:
                # only the last three rows feed the recurrence
                rows[len(rows) - 4] = None
        if c:
            acc += c * rows[i]
    return acc


def u_poly_stream(p: IntPoly, table: ModEqTable) -> IntPoly:
    """Table route without storing the table: rows come from the recurrence."""
    if p.degree <= 0:
        return p
    return IntPoly(from_flint(_stream(p, table, 0)))


def u_gamma_poly_stream(p: IntPoly, table: ModEqTable) -> IntPoly:
    if p.is_zero():
        return p
    full = IntPoly(from_flint(_stream(p, table, 1)))
    return full.shift_down(1)


_VALIDATED: dict = {}


def closed_form_multiplier(table: ModEqTable, check_rows: int = 12) -> IntPoly:
    """Row 1 of ``table``, after checking the closed form reproduces its rows.

    The closed form assumes rows generated from ``A = row 1`` by the cubic
    recurrence, so rows 0..check_rows are recomputed and compared.
    """
    A = table.rows[1]
    top = min(check_rows, table.max_i)
    key = (A, tuple(table.rows[: top + 1]))
    if key in _VALIDATED:
        return A
    for l in range(top + 1):
        if fastu.u_closed(IntPoly.monomial(1, l), A) != table.rows[l]:
            raise StructuralError(f"closed-form U disagrees with table row {l}")
    _VALIDATED[key] = True
    return A


def apply_u(p: IntPoly, table: ModEqTable, method: str = "auto") -> IntPoly:
    if method == "table" or (method == "auto" and p.degree <= table.max_i):
        return u_poly(p, table)
    if method == "stream":
        return u_poly_stream(p, table)
    if method in ("closed", "auto"):
        return fastu.u_closed(p, closed_form_multiplier(table))
    raise UsageError(f"unknown method {method!r}")


def apply_u_gamma(p: IntPoly, table: ModEqTable, method: str = "auto") -> IntPoly:
    if method == "table" or (method == "auto" and p.degree + 1 <= table.max_i):
        return u_gamma_poly(p, table)
    if method == "stream":
        return u_gamma_poly_stream(p, table)
    if method in ("closed", "auto"):
        return fastu.u_gamma_closed(p, closed_form_multiplier(table))
    raise UsageError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Phi sequence
# ---------------------------------------------------------------------------


@dataclass
class PhiSequence:
    side: str
    polys: dict  # M -> IntPoly
    method: str = "auto"

    @property
    def M_max(self) -> int:
        return max(self.polys)

    def __getitem__(self, M: int) -> IntPoly:
        return self.polys[M]

    def coefficient_table(self) -> dict:
        return {M: p.coeffs for M, p in sorted(self.polys.items())}


def _min_positive_degree(p: IntPoly):
    for k in range(1, len(p.coeffs)):
        if p.coeffs[k]:
            return k
    return None


def build_phi(side: str, M_max: int, table: ModEqTable | None = None, method: str = "auto") -> PhiSequence:
    """Phi_1 = 1 - 3x + 3x^2, Phi_2m = U(Phi_2m-1), Phi_2m+1 = U(gamma Phi_2m)."""
    _check_phi_side(side)
    if M_max < 1:
        raise UsageError("M_max must be at least 1")
    if method not in METHODS:
        raise UsageError(f"method must be one of {METHODS}")
    if table is None:
        table = build_table(_TABLE_SIDE[side], 60)
    elif table.side != _TABLE_SIDE[side]:
        raise UsageError(f"side {side} needs a {_TABLE_SIDE[side]} table, got {table.side}")
    polys = {1: PHI_1}
    for M in range(2, M_max + 1):
        prev = polys[M - 1]
        L = _min_positive_degree(prev)
        if M % 2 == 0:
            new = apply_u(prev, table, method)
            bound = None if L is None else -(-L // 3)
        else:
            new = apply_u_gamma(prev, table, method)
            bound = None if L is None else -(-(L - 2) // 3)
        got = _min_positive_degree(new)
        if bound is not None and got is not None and got < max(bound, 1):
            raise StructuralError(f"Phi_{M} has minimal positive degree {got} < {bound}")
        polys[M] = new
    return PhiSequence(side, polys, method)


def _generating(side: str, prec: int) -> LaurentSeries:
    return named_series(_GEN_NAME[side], prec)


def iterate_u(side: str, M: int, prec: int) -> LaurentSeries:
    """``u3^M`` of F on the ph side; on the ps side ``u3(q^-2 .)`` at odd steps.

    Only the iterate itself is used: the ps offsets (3^k-1)/4 are never
    spelled out here.
    """
    _check_phi_side(side)
    # walk backwards to find how far the generating function must reach
    need = prec
    for step in range(M, 0, -1):
        need = 3 * need
        if side == "psi" and step % 2 == 1:
            need += 2
    s = _generating(side, need)
    for step in range(1, M + 1):
        if side == "psi" and step % 2 == 1:
            s = s.shift(-2)
        s = s.u3()
    return s.truncate(prec)


def verify_phi_series(seq: PhiSequence, M: int, prec: int | None = None) -> Certificate:
    """``Phi_M(base) * F(q^3)`` (odd M) or ``* F(q)`` (even M) equals ``u3^M(F)``."""
    timer = Timer()
    side = seq.side
    poly = seq[M]
    horizon = prec if prec is not None else max(3 * poly.degree, 60)
    gen = _generating(side, horizon)
    factor = gen.dilate(3, horizon) if M % 2 else gen
    base = named_series(_BASE_NAME[side], horizon)
    lhs = (poly.eval_series(base) * factor).truncate(horizon)
    rhs = iterate_u(side, M, horizon)
    n = lhs.first_difference(rhs)
    witness = None if n is None else series_witness(f"Phi_{M} identity", n, lhs.coeff(n), rhs.coeff(n))
    return certify(
        f"phi-series-{side}",
        {"side": side, "M": M, "prec": horizon},
        witness,
        timer,
        SERIES_HORIZON_NOTE.format(horizon=horizon),
    )


def phi1_readings(prec: int = 200) -> dict:
    """Which progression does Phi_1 describe: ph3(3n) or ph3(3n+2)?"""
    F = named_series("F", 3 * prec + 3)
    lhs = (PHI_1.eval_series(named_series("xi", prec)) * F.dilate(3, prec)).truncate(prec)
    at_3n = LaurentSeries.from_coeffs([F.coeff(3 * n) for n in range(prec)], 0, prec)
    at_3n2 = LaurentSeries.from_coeffs([F.coeff(3 * n + 2) for n in range(prec)], 0, prec)
    return {"3n": lhs.agrees_with(at_3n), "3n+2": lhs.agrees_with(at_3n2)}


def compare_sequences(a: PhiSequence, b: PhiSequence) -> int | None:
    """First M where the coefficient tables differ, else None."""
    for M in sorted(set(a.polys) | set(b.polys)):
        if a.polys.get(M) != b.polys.get(M):
            return M
    return None


# ---------------------------------------------------------------------------
# Hats
# ---------------------------------------------------------------------------


@dataclass
class HatSequence:
    side: str
    hats: dict  # m -> IntPoly, coefficients C_m(k)
    utilde: dict  # m -> IntPoly, coefficients of U(hat_m)

    @property
    def m_max(self) -> int:
        return max(self.hats)


def build_hats(seq: PhiSequence, m_max: int, table: ModEqTable | None = None, method: str = "auto", cross_check: bool = True) -> HatSequence:
    """hat_m = Phi_2m+1 - Phi_2m-1, its U image, and the two-path cross-check."""
    if m_max < 1:
        raise UsageError("m_max must be at least 1")
    if seq.M_max < 2 * m_max + 1:
        raise PreconditionError(f"need Phi up to M={2 * m_max + 1}, have {seq.M_max}")
    if table is None:
        table = build_table(_TABLE_SIDE[seq.side], 60)
    hats, utilde = {}, {}
    for m in range(1, m_max + 1):
        hats[m] = seq[2 * m + 1] - seq[2 * m - 1]
        utilde[m] = apply_u(hats[m], table, method)
    if cross_check:
        for m in range(1, m_max):
            other = apply_u_gamma(utilde[m], table, method)
            if other != hats[m + 1]:
                raise StructuralError(f"U(gamma U(hat_{m})) differs from hat_{m + 1}")
    return HatSequence(seq.side, hats, utilde)


def two_path_hat(seq: PhiSequence, m: int, table: ModEqTable, method: str = "stream") -> bool:
    """Phi_2m+3 - Phi_2m+1 against U(gamma U(Phi_2m+1 - Phi_2m-1))."""
    hat = seq[2 * m + 1] - seq[2 * m - 1]
    nxt = seq[2 * m + 3] - seq[2 * m + 1]
    if method == "stream":
        other = u_gamma_poly_stream(u_poly_stream(hat, table), table)
    else:
        other = apply_u_gamma(apply_u(hat, table, method), table, method)
    return other == nxt


def _bound_scan(report, m, label, coeffs, required):
    for k, c in enumerate(coeffs):
        need = required(k)
        if not divisible_by_3pow(c, need):
            report.failures.append((m, label, k, nu(c), need))


@dataclass
class HatReport(ValuationReport):
    notes: dict = field(default_factory=dict)


def hat_bound_check(hats: HatSequence, m_max: int | None = None) -> HatReport:
    """Checks (a)-(e) on every level up to ``m_max``.

    (a) nu(C_m(k)) >= m+2+floor(k/2); (b) the same for U(hat_m);
    (c) nu(Ct(0) - 2 Ct(1)) >= m+3; (d) nu(3 Ct(0) - 24 Ct(1)) >= m+4;
    (e) hat_m evaluated at the base series has zero constant term.  On the
    zeta side (e) is not expected (zeta(0) = 0 leaves C_m(0)) and the
    observed constant term is recorded in ``notes`` instead.
    """
    m_max = hats.m_max if m_max is None else m_max
    report = HatReport((1, m_max), kind="hat-bounds")
    base = named_series(_BASE_NAME[hats.side], 2)
    for m in range(1, m_max + 1):
        C = hats.hats[m]
        Ct = hats.utilde[m]
        _bound_scan(report, m, "C", C.coeffs, lambda k: m + 2 + k // 2)
        _bound_scan(report, m, "Ctilde", Ct.coeffs, lambda k: m + 2 + k // 2)
        c0 = Ct[0] - 2 * Ct[1]
        if not divisible_by_3pow(c0, m + 3):
            report.failures.append((m, "Ct0-2Ct1", 0, nu(c0), m + 3))
        c2 = 3 * Ct[0] - 24 * Ct[1]
        if not divisible_by_3pow(c2, m + 4):
            report.failures.append((m, "3Ct0-24Ct1", 0, nu(c2), m + 4))
        const = C.eval_series(base).coeff(0)
        if hats.side == "phi":
            if const != 0:
                report.failures.append((m, "anchor", 0, nu(const), INF))
        else:
            report.notes[f"constant_term_{m}"] = const
    return report


def hat_certificate(report: HatReport, side: str, timer: Timer | None = None) -> Certificate:
    timer = timer or Timer()
    witness = None
    if report.failures:
        f = report.failures[0]
        witness = {"m": f[0], "check": f[1], "index": f[2], "observed_nu": valuation_json(f[3]), "required": valuation_json(f[4]), "count": len(report.failures)}
    return certify(f"hat-bounds-{side}", {"side": side, "m_max": report.i_range[1]}, witness, timer, data=dict(report.notes))


# ---------------------------------------------------------------------------
# Direct congruence scans
# ---------------------------------------------------------------------------


@dataclass
class CongruenceScan:
    family: str
    m: int
    n_max: int
    modulus_exponent: int
    violations: list = field(default_factory=list)
    values: dict = field(default_factory=dict)  # n -> (high, low) for violations
    max_uniform_extra_power: object = INF
    holds_at_next_power: bool = False
    progressions: tuple = ()

    @property
    def modulus(self) -> int:
        return 3**self.modulus_exponent

    @property
    def passed(self) -> bool:
        return not self.violations

    def certificate(self, elapsed: Timer | None = None) -> Certificate:
        timer = elapsed or Timer()
        witness = None
        if self.violations:
            n = self.violations[0]
            hi, lo = self.values[n]
            witness = {"n": n, "high": str(hi), "low": str(lo), "nu_difference": valuation_json(nu(hi - lo)), "required": self.modulus_exponent}
        return certify(
            f"congruence-{self.family}",
            {"family": self.family, "m": self.m, "n_max": self.n_max, "modulus_exponent": self.modulus_exponent},
            witness,
            timer,
            f"checked 0 <= n <= {self.n_max} only",
            {
                "progressions": list(self.progressions),
                "max_uniform_extra_power": valuation_json(self.max_uniform_extra_power),
                "holds_at_next_power": self.holds_at_next_power,
                "violation_count": len(self.violations),
            },
        )


def scan_horizon(family: str, m: int, n_max: int) -> int:
    offset = ps_offset(2 * m + 2) if family == "ps3" else 0
    return 3 ** (2 * m + 1) * n_max + offset + 1


def family_series(family: str, prec: int) -> LaurentSeries:
    if family not in FAMILIES:
        raise UsageError(f"family must be one of {FAMILIES}, got {family!r}")
    return named_series("F" if family == "ph3" else "G", prec)


def scan_congruence(family: str, m: int, n_max: int, modulus_extra: int = 0, series: LaurentSeries | None = None) -> CongruenceScan:
    """Check c(3^(2m+1) n + b') = c(3^(2m-1) n + b) mod 3^(m+2+extra) for n <= n_max."""
    if family not in FAMILIES:
        raise UsageError(f"family must be one of {FAMILIES}, got {family!r}")
    if not isinstance(m, int) or m < 1:
        raise UsageError("the congruences are stated for m >= 1")
    if n_max < 0 or modulus_extra < 0:
        raise UsageError("n_max and modulus_extra must be nonnegative")
    need = scan_horizon(family, m, n_max)
    if series is None:
        series = family_series(family, need)
    elif series.precision < need:
        raise HorizonError(f"series reaches q^{series.precision - 1}, scan needs q^{need - 1}")
    side = "phi" if family == "ph3" else "psi"

    # progressions read off the iterate, then checked against closed-form indexing
    hi_iter = _iterate_from(series, side, 2 * m + 1, n_max + 1)
    lo_iter = _iterate_from(series, side, 2 * m - 1, n_max + 1)
    off_hi = ps_offset(2 * m + 2) if side == "psi" else 0
    off_lo = ps_offset(2 * m) if side == "psi" else 0
    a_hi, a_lo = 3 ** (2 * m + 1), 3 ** (2 * m - 1)
    for n in range(n_max + 1):
        if hi_iter.coeff(n) != series.coeff(a_hi * n + off_hi) or lo_iter.coeff(n) != series.coeff(a_lo * n + off_lo):
            raise StructuralError(f"iterate and closed-form offsets disagree at n={n}")

    k = m + 2 + modulus_extra
    scan = CongruenceScan(family, m, n_max, k, progressions=(f"{a_hi}n+{off_hi}", f"{a_lo}n+{off_lo}"))
    min_v = INF
    for n in range(n_max + 1):
        hi, lo = hi_iter.coeff(n), lo_iter.coeff(n)
        v = nu(hi - lo)
        if v < min_v:
            min_v = v
        if v < k:
            scan.violations.append(n)
            scan.values[n] = (hi, lo)
    base_k = m + 2
    scan.max_uniform_extra_power = INF if min_v is INF else min_v - base_k
    scan.holds_at_next_power = min_v >= k + 1
    return scan


def _iterate_from(series: LaurentSeries, side: str, M: int, prec: int) -> LaurentSeries:
    s = series
    for step in range(1, M + 1):
        if side == "psi" and step % 2 == 1:
            s = s.shift(-2)
        s = s.u3()
    if s.precision < prec:
        raise HorizonError("iterate fell short of the requested horizon")
    return s.truncate(prec)


def scan_internal(family: str, a_hi: int, b_hi: int, a_lo: int, b_lo: int, exponent: int, n_max: int, series: LaurentSeries | None = None) -> list:
    """n <= n_max with c(a_hi n + b_hi) != c(a_lo n + b_lo) mod 3^exponent."""
    need = max(a_hi * n_max + b_hi, a_lo * n_max + b_lo) + 1
    if series is None:
        series = family_series(family, need)
    elif series.precision < need:
        raise HorizonError(f"series reaches q^{series.precision - 1}, needs q^{need - 1}")
    return [n for n in range(n_max + 1) if not divisible_by_3pow(series.coeff(a_hi * n + b_hi) - series.coeff(a_lo * n + b_lo), exponent)]


# the two congruences quoted for pod3, stated with ph3 in one source
QUOTED_POD_CONGRUENCES = (
    (27, 20, 3, 2, 3),
    (243, 182, 27, 20, 4),
)


def quoted_reading_check(n_max: int = 200) -> dict:
    """Test the quoted 27n+20 / 243n+182 congruences under both readings."""
    out = {}
    for family in FAMILIES:
        series = family_series(family, 243 * n_max + 183)
        out[family] = [len(scan_internal(family, *c[:4], c[4], n_max, series)) == 0 for c in QUOTED_POD_CONGRUENCES]
    return out


# ---------------------------------------------------------------------------
# Independent checks
# ---------------------------------------------------------------------------


def pod3(n_max: int) -> list[int]:
    """pod3(0..n_max) from the product over parts not divisible by 3."""
    a = [0] * (n_max + 1)
    a[0] = 1
    for j in range(1, n_max + 1):
        if j % 3 == 0:
            continue
        if j % 2:
            # (1 + q^j): each odd part at most once
            for k in range(n_max, j - 1, -1):
                a[k] += a[k - j]
        else:
            # 1/(1 - q^j): even parts freely
            for k in range(j, n_max + 1):
                a[k] += a[k - j]
    return a


def pod_cross_check(n_max: int) -> Certificate:
    """ps3(n) = (-1)^n pod3(n) for n <= n_max."""
    timer = Timer()
    if n_max < 1:
        raise UsageError("n_max must be at least 1")
    G = named_series("G", n_max + 1)
    pods = pod3(n_max)
    witness = None
    for n in range(n_max + 1):
        want = -pods[n] if n % 2 else pods[n]
        if G.coeff(n) != want:
            witness = series_witness("ps3 vs (-1)^n pod3", n, G.coeff(n), want)
            break
    return certify("pod-relation", {"n_max": n_max}, witness, timer, f"checked 0 <= n <= {n_max} only")


def probe_open_problem(m_max: int, series: LaurentSeries | None = None) -> Certificate:
    """Empirical look at ps3((3^2m - 1)/4) = ps3((3^(2m+2) - 1)/4) mod 3^(m+2)."""
    timer = Timer()
    if m_max < 1:
        raise UsageError("m_max must be at least 1")
    need = ps_offset(2 * m_max + 2) + 1
    if series is None:
        series = named_series("G", need)
    elif series.precision < need:
        raise HorizonError(f"series reaches q^{series.precision - 1}, needs q^{need - 1}")
    rows = []
    witness = None
    for m in range(1, m_max + 1):
        lo, hi = ps_offset(2 * m), ps_offset(2 * m + 2)
        diff = series.coeff(hi) - series.coeff(lo)
        v = nu(diff)
        rows.append({"m": m, "low_index": lo, "high_index": hi, "difference": str(diff), "nu": valuation_json(v), "required": m + 2})
        if v < m + 2 and witness is None:
            witness = {"m": m, "difference": str(diff), "nu": valuation_json(v), "required": m + 2}
    return certify(
        "ps3-offset-probe",
        {"m_max": m_max},
        witness,
        timer,
        "empirical probe at n = 0 for each m; not a proof",
        {"levels": rows},
    )
