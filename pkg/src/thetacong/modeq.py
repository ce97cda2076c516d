"""Modular-equation tables for U(xi^i) and U(zeta^i).

Row ``i`` of a table is the polynomial ``X_i`` with ``U(base^i) = X_i(base)``,
where ``base`` is xi (side ``"xi"``) or zeta (side ``"zeta"``).  Rows are
generated from three transcribed base rows by the cubic recurrence and then
certified independently against series expansions.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .certificate import SERIES_HORIZON_NOTE, Certificate, Timer, certify, series_witness
from .errors import CertificationError, IntegralityError, PrecisionError, StructuralError, UsageError
from .padic import INF, nu, valuation_json
from .polyring import IntPoly
from .series import LaurentSeries, named_series, twist

SIDES = ("xi", "zeta")

# U(xi), U(xi^2), U(xi^3) in Z[xi]
XI_BASE = (
    (0, 1, -3, 3),
    (0, -2, 9, -24, 45, -54, 27),
    (0, 1, -12, 66, -216, 486, -810, 972, -729, 243),
)

# U(zeta), U(zeta^2), U(zeta^3) in Z[zeta]
ZETA_BASE = (
    (0, 1, -3, 3),
    (0, -2, 9, -24, 45, -54, 27),
    (0, 1, -12, 66, -216, 486, -810, 972, -729, 243),
)

# the multiplier A = x - 3x^2 + 3x^3 of the recurrence
CUBIC = IntPoly([0, 1, -3, 3])

# stated elementary symmetric functions of the three conjugates
SIGMA = (
    IntPoly([0, 3, -9, 9]),
    IntPoly([0, 3, -9, 9]),
    IntPoly([0, 1, -3, 3]),
)


def _check_side(side: str) -> None:
    if side not in SIDES:
        raise UsageError(f"side must be one of {SIDES}, got {side!r}")


def base_series(side: str, prec: int) -> LaurentSeries:
    _check_side(side)
    return named_series(side, prec)


def _ratio_series(side: str, prec: int) -> LaurentSeries:
    """gamma on the xi side, delta on the zeta side."""
    return named_series("gamma" if side == "xi" else "delta", prec)


def d_min(i: int) -> int:
    return -(-i // 3)


# ---------------------------------------------------------------------------
# Base rows
# ---------------------------------------------------------------------------


def _u3_powers(base: LaurentSeries, i_max: int):
    """Yield ``(i, u3(base^i))`` for ``i = 0..i_max``."""
    prec = base.precision
    power = LaurentSeries.one(prec)
    for i in range(i_max + 1):
        if i:
            power = (power * base).truncate(prec)
        yield i, power.u3()


def base_rows(side: str, prec: int = 120) -> tuple[IntPoly, IntPoly, IntPoly]:
    """The transcribed rows 1..3, each certified against ``u3(base^i)``."""
    _check_side(side)
    if prec < 40:
        raise UsageError("base_rows needs prec >= 40")
    rows = tuple(IntPoly(r) for r in (XI_BASE if side == "xi" else ZETA_BASE))
    base = base_series(side, prec)
    small = base.truncate(-(-prec // 3))
    for i, target in _u3_powers(base, 3):
        if i == 0:
            continue
        got = rows[i - 1].eval_series(small)
        n = got.first_difference(target)
        if n is not None:
            raise CertificationError(
                f"{side} base row {i} disagrees with its series at q^{n}",
                series_witness(f"row {i}", n, got.coeff(n), target.coeff(n)),
            )
    return rows


def series_fit(target: LaurentSeries, base: LaurentSeries, degree: int, shift: int) -> IntPoly:
    """Find ``P`` in Z[x] of degree <= ``degree`` with ``P(base) = target``.

    Works in the basis ``(base - shift)^j``, whose ``j``-th element has
    q-valuation ``j``, peeling one coefficient per exponent; the remaining
    horizon then confirms the fit.  Non-integral steps raise
    :class:`IntegralityError`.
    """
    prec = min(target.precision, base.precision)
    if prec <= degree + 1:
        raise PrecisionError(f"fitting degree {degree} needs more than {degree + 1} terms")
    b = (base - shift).truncate(prec)
    if b.is_zero() or b.valuation != 1:
        raise StructuralError("shifted base must have valuation exactly 1")
    lead = b.coeffs[0]
    residual = target.truncate(prec)
    power = LaurentSeries.one(prec)
    shifted = []
    for j in range(degree + 1):
        c_num = residual.coeff(j)
        lj = lead**j
        if c_num % lj:
            raise IntegralityError(f"coefficient {j} of the fit is not integral")
        c = c_num // lj
        shifted.append(c)
        if c:
            residual = residual - power * c
        power = (power * b).truncate(prec)
    if not residual.is_zero():
        raise CertificationError(
            f"no polynomial of degree <= {degree} fits (residual at q^{residual.valuation})",
            {"exponent": residual.valuation, "residual": str(residual.coeffs[0])},
        )
    # Taylor shift back: sum c_j (x - shift)^j
    out = IntPoly()
    xs = IntPoly([-shift, 1])
    p = IntPoly([1])
    for c in shifted:
        out = out + p * c
        p = p * xs
    return out


def fit_base_rows(side: str, prec: int = 150) -> tuple[IntPoly, IntPoly, IntPoly]:
    """Rediscover rows 1..3 from series alone, without the transcriptions."""
    _check_side(side)
    base = base_series(side, prec)
    small = base.truncate(-(-prec // 3))
    shift = 1 if side == "xi" else 0
    rows = []
    for i, target in _u3_powers(base, 3):
        if i:
            rows.append(series_fit(target, small, 3 * i, shift))
    return tuple(rows)


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModEqTable:
    side: str
    rows: tuple  # rows[i] is X_i
    provenance: str = "recurrence"

    @property
    def max_i(self) -> int:
        return len(self.rows) - 1

    def row(self, i: int) -> IntPoly:
        if not 0 <= i <= self.max_i:
            raise UsageError(f"row {i} outside table 0..{self.max_i}")
        return self.rows[i]

    def coefficient_rows(self) -> list:
        return [list(r.coeffs) for r in self.rows]

    def to_json(self) -> dict:
        return {
            "side": self.side,
            "max_i": self.max_i,
            "rows": [{"i": i, "coeffs": [str(c) for c in r.coeffs]} for i, r in enumerate(self.rows)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "ModEqTable":
        side = data["side"]
        _check_side(side)
        rows = sorted(data["rows"], key=lambda r: int(r["i"]))
        if [int(r["i"]) for r in rows] != list(range(len(rows))):
            raise ValueError("table rows are not contiguous from 0")
        if len(rows) - 1 != int(data["max_i"]):
            raise ValueError("max_i does not match the stored rows")
        return cls(side, tuple(IntPoly(int(c) for c in r["coeffs"]) for r in rows), "cache")


def _recurrence_step(r1: IntPoly, r2: IntPoly, r3: IntPoly) -> IntPoly:
    return CUBIC * (r1 * 3 - r2 * 3 + r3)


def extend_table(table: ModEqTable, i_max: int) -> ModEqTable:
    """Append rows up to ``i_max`` by the cubic recurrence."""
    if table.max_i < 3:
        raise UsageError("the recurrence needs rows 1..3")
    if i_max < 3:
        raise UsageError("i_max must be at least 3")
    rows = list(table.rows)
    for i in range(len(rows), i_max + 1):
        new = _recurrence_step(rows[i - 1], rows[i - 2], rows[i - 3])
        if new.is_zero() or new.min_degree() != d_min(i):
            got = None if new.is_zero() else new.min_degree()
            raise StructuralError(f"row {i} has minimal degree {got}, expected {d_min(i)}")
        rows.append(new)
    return ModEqTable(table.side, tuple(rows[: i_max + 1]), table.provenance)


def build_table(side: str, i_max: int, certify_base: bool = True) -> ModEqTable:
    _check_side(side)
    if i_max < 3:
        raise UsageError("i_max must be at least 3 (the recurrence needs three base rows)")
    if certify_base:
        rows = base_rows(side)
    else:
        rows = tuple(IntPoly(r) for r in (XI_BASE if side == "xi" else ZETA_BASE))
    return extend_table(ModEqTable(side, (IntPoly([1]),) + rows), i_max)


def check_table(table: ModEqTable) -> None:
    """Raise unless ``table`` is exactly what the recurrence produces."""
    base = XI_BASE if table.side == "xi" else ZETA_BASE
    rows = table.rows
    if table.max_i < 3 or rows[0] != IntPoly([1]):
        raise StructuralError("row 0 must be 1 and rows 1..3 must be present")
    for i in (1, 2, 3):
        if rows[i] != IntPoly(base[i - 1]):
            raise StructuralError(f"row {i} differs from the base row")
    for i in range(4, len(rows)):
        if rows[i] != _recurrence_step(rows[i - 1], rows[i - 2], rows[i - 3]):
            raise StructuralError(f"row {i} does not satisfy the recurrence")


# cache -----------------------------------------------------------------------


def cache_path(cache_dir, side: str, max_i: int) -> Path:
    return Path(cache_dir) / f"modeq-{side}-{max_i}.json"


def save_table(table: ModEqTable, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(table.to_json()))
    os.replace(tmp, path)
    return path


def load_table(path, side: str | None = None, max_i: int | None = None) -> ModEqTable | None:
    """Read a cached table; anything malformed or inconsistent gives None."""
    try:
        table = ModEqTable.from_json(json.loads(Path(path).read_text()))
        if side is not None and table.side != side:
            return None
        if max_i is not None and table.max_i != max_i:
            return None
        check_table(table)
    except (OSError, ValueError, KeyError, TypeError, StructuralError):
        return None
    return table


def cached_table(side: str, max_i: int, cache_dir=None) -> ModEqTable:
    """Table from the cache if valid, otherwise rebuilt (and re-cached)."""
    if cache_dir is None:
        return build_table(side, max_i)
    path = cache_path(cache_dir, side, max_i)
    table = load_table(path, side, max_i) if path.exists() else None
    if table is None:
        table = build_table(side, max_i)
        save_table(table, path)
    return table


# ---------------------------------------------------------------------------
# Series certification
# ---------------------------------------------------------------------------


def default_horizon(table: ModEqTable, i: int) -> int:
    return max(3 * table.row(i).degree + 50, 200)


def verify_rows(table: ModEqTable, i_check: int, prec: int | None = None) -> Certificate:
    """Compare ``row_i(base)`` with ``u3(base^i)`` for every ``i <= i_check``.

    ``prec`` is the comparison horizon in q; the base series is expanded to
    three times that.
    """
    timer = Timer()
    if i_check > table.max_i or i_check < 0:
        raise UsageError(f"i_check={i_check} outside the table")
    horizon = prec if prec is not None else default_horizon(table, i_check)
    base = base_series(table.side, 3 * horizon)
    small = base.truncate(horizon)
    witness = None
    for i, target in _u3_powers(base, i_check):
        got = table.row(i).eval_series(small)
        n = got.first_difference(target)
        if n is not None:
            witness = series_witness(f"row {i}", n, got.coeff(n), target.coeff(n))
            witness["i"] = i
            break
    return certify(
        f"modeq-rows-{table.side}",
        {"side": table.side, "i_check": i_check, "prec": horizon},
        witness,
        timer,
        SERIES_HORIZON_NOTE.format(horizon=horizon),
    )


def u_gamma_row(table: ModEqTable, i: int, prec: int = 300) -> Certificate:
    """Check ``gamma*xi(q^3) = xi`` and ``U(gamma xi^i) = xi^-1 X_(i+1)``.

    On the zeta side gamma is replaced by delta.  The second identity is
    compared after multiplying through by the base series.
    """
    timer = Timer()
    side = table.side
    if i + 1 > table.max_i:
        raise UsageError(f"row {i + 1} is not in the table")
    big = 3 * prec + 6
    base = base_series(side, big)
    ratio = _ratio_series(side, big)
    witness = None

    # ratio identity: gamma(q) * xi(q^3) = xi(q)
    left = (ratio * base.dilate(3, big)).truncate(prec)
    n = left.first_difference(base)
    if n is not None:
        witness = series_witness("ratio identity", n, left.coeff(n), base.coeff(n))

    if witness is None:
        power = base**i if i else LaurentSeries.one(big)
        lhs = ((ratio * power).u3() * base).truncate(prec)
        rhs = table.row(i + 1).eval_series(base.truncate(prec))
        n = lhs.first_difference(rhs)
        if n is not None:
            witness = series_witness(f"U(ratio*base^{i})*base vs row {i + 1}", n, lhs.coeff(n), rhs.coeff(n))
    return certify(
        f"u-gamma-row-{side}",
        {"side": side, "i": i, "prec": prec},
        witness,
        timer,
        SERIES_HORIZON_NOTE.format(horizon=prec),
    )


def sigma_from_rows(table: ModEqTable) -> tuple[IntPoly, IntPoly, IntPoly]:
    """Elementary symmetric functions from power sums ``p_j = 3 X_j`` (Newton)."""
    p1, p2, p3 = (table.row(j) * 3 for j in (1, 2, 3))
    e1 = p1
    e2 = e1 * p1 - p2
    e3 = e2 * p1 - e1 * p2 * 2 + p3 * 2
    # e2 and e3 carry factors 2 and 6 from the Newton recursion
    return e1, _divexact(e2, 2), _divexact(e3, 6)


def _divexact(p: IntPoly, d: int) -> IntPoly:
    if any(c % d for c in p.coeffs):
        raise IntegralityError(f"polynomial not divisible by {d}")
    return IntPoly(c // d for c in p.coeffs)


def newton_check(side: str = "xi", prec: int = 300, table: ModEqTable | None = None) -> Certificate:
    """Newton-identity scaffolding via the three twisted conjugates.

    Checks (a) ``e_1, e_2, e_3`` of ``base(omega^k q)`` have no omega part,
    (b) ``e_m(q) = sigma_m(base(q^3))`` and (c) the cubic
    ``base^3 - sigma_1 base^2 + sigma_2 base - sigma_3 = 0`` with the sigmas
    evaluated at ``base(q^3)``.  The sigmas are also rederived from rows 1..3.
    """
    timer = Timer()
    _check_side(side)
    if prec < 180:
        raise UsageError("newton_check needs prec >= 180 (q^3-horizon >= 60)")
    table = table if table is not None else build_table(side, 3)
    base = base_series(side, prec)
    x0, x1, x2 = (twist(base, k) for k in range(3))
    e = (
        x0 + x1 + x2,
        x0 * x1 + x1 * x2 + x2 * x0,
        x0 * x1 * x2,
    )
    witness = None
    data = {}
    for m, em in enumerate(e, start=1):
        if not em.is_rational():
            n = em.om.valuation
            witness = {"what": f"omega part of e_{m}", "exponent": n, "value": str(em.om.coeff(n))}
            break
    if witness is None:
        cube_base = base.dilate(3, prec)
        for m, em in enumerate(e, start=1):
            want = SIGMA[m - 1].eval_series(cube_base)
            got = em.to_series()
            n = got.first_difference(want)
            if n is not None:
                witness = series_witness(f"e_{m} vs sigma_{m}(base(q^3))", n, got.coeff(n), want.coeff(n))
                break
    if witness is None:
        s1, s2, s3 = (s.eval_series(base.dilate(3, prec)) for s in SIGMA)
        b2 = base * base
        char = (b2 * base - s1 * b2 + s2 * base - s3).truncate(prec)
        if not char.is_zero():
            n = char.valuation
            witness = series_witness("characteristic cubic", n, char.coeff(n), 0)
    if witness is None:
        derived = sigma_from_rows(table)
        data["sigma_from_rows_matches"] = derived == SIGMA
        if derived != SIGMA:
            witness = {"what": "sigma from Newton on rows 1..3", "derived": [list(d.coeffs) for d in derived]}
    if witness is None:
        # standard filtering normalization: p_1 = 3 X_1(base(q^3)); the reading
        # X_1 = 3 p_1 would need u3(p_1) = X_1(base) / 9
        p1 = e[0].to_series()
        x1_at = table.row(1).eval_series(base.truncate(-(-prec // 3)))
        data["power_sum_is_3_X"] = p1.u3().agrees_with(x1_at * 3)
        data["power_sum_is_X_over_3"] = (p1.u3() * 9).agrees_with(x1_at)
    return certify(
        f"newton-{side}",
        {"side": side, "prec": prec},
        witness,
        timer,
        SERIES_HORIZON_NOTE.format(horizon=prec),
        data,
    )


# ---------------------------------------------------------------------------
# 3-adic structure
# ---------------------------------------------------------------------------


def _cell(x):
    if x is INF or isinstance(x, int):
        return valuation_json(x)
    return str(x)


@dataclass
class ValuationReport:
    i_range: tuple
    failures: list = field(default_factory=list)  # (i, j, observed nu, required)
    kind: str = "valuation"

    @property
    def status(self) -> str:
        return "pass" if not self.failures else "fail"

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "i_range": list(self.i_range),
            "status": self.status,
            "failures": [[_cell(x) for x in f] for f in self.failures],
        }


def valuation_check(table: ModEqTable, i_max: int) -> ValuationReport:
    """``nu(X_i(d_i)) = 0`` and ``nu(X_i(d_i + j)) >= floor((j+1)/2)``."""
    if i_max > table.max_i:
        raise UsageError(f"table only reaches i={table.max_i}")
    report = ValuationReport((1, i_max))
    for i in range(1, i_max + 1):
        row = table.row(i)
        d = d_min(i)
        v0 = nu(row[d])
        if v0 != 0:
            report.failures.append((i, d, v0, 0))
        for j in range(1, row.degree - d + 1):
            need = (j + 1) // 2
            v = nu(row[d + j])
            if v < need:
                report.failures.append((i, d + j, v, need))
    return report


def min_degree_check(table: ModEqTable, i_max: int) -> ValuationReport:
    """Minimal degree of row i is exactly ceil(i/3), and its degree is 3i."""
    if i_max > table.max_i:
        raise UsageError(f"table only reaches i={table.max_i}")
    report = ValuationReport((1, i_max), kind="min-degree")
    for i in range(1, i_max + 1):
        row = table.row(i)
        md = row.min_degree() if not row.is_zero() else None
        if md != d_min(i):
            report.failures.append((i, "min_degree", md, d_min(i)))
        if row.degree != 3 * i:
            report.failures.append((i, "degree", row.degree, 3 * i))
    return report


def valuation_certificate(table: ModEqTable, i_max: int) -> Certificate:
    timer = Timer()
    reports = [valuation_check(table, i_max), min_degree_check(table, i_max)]
    failures = [(r.kind,) + tuple(f) for r in reports for f in r.failures]
    witness = None
    if failures:
        witness = {"first_failure": [str(x) for x in failures[0]], "count": len(failures)}
    return certify(f"valuations-{table.side}", {"side": table.side, "i_max": i_max}, witness, timer)
