"""Command-line front end: expand, table, verify, certify.

Exit codes: 0 every claim passed, 1 some claim failed, 2 bad usage,
3 a precision or horizon limit was hit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from . import engine, modeq
from .certificate import Timer, certify
from .errors import CertificationError, PrecisionError, QSeriesError, StructuralError, UsageError
from .series import SERIES_NAMES, named_series

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_PRECISION = 0, 1, 2, 3

CACHE_ENV = "THETACONG_CACHE_DIR"

SUITES = ("modeq", "newton", "valuations", "phi", "hats", "congruence", "pod", "problem")

EXPAND_NAMES = ("ph3", "ps3") + SERIES_NAMES


@dataclass(frozen=True)
class Profile:
    table_i: int
    certify_i: int
    hats_m: int
    scan_ms: tuple
    n_max: int
    probe_m: int
    phi_series_M: int


PROFILES = {
    "quick": Profile(table_i=30, certify_i=8, hats_m=3, scan_ms=(1,), n_max=100, probe_m=2, phi_series_M=3),
    "full": Profile(table_i=60, certify_i=12, hats_m=4, scan_ms=(1, 2), n_max=200, probe_m=3, phi_series_M=4),
}


@dataclass(frozen=True)
class RunConfig:
    profile: str = "quick"
    prec: int | None = None
    max_i: int | None = None
    max_m: int | None = None
    n_max: int | None = None
    family: str | None = None
    side: str | None = None
    m: int | None = None
    modulus_extra: int = 0
    cache_dir: str | None = None
    jobs: int = 1
    table_file: str | None = None

    @property
    def p(self) -> Profile:
        return PROFILES[self.profile]

    def table_i(self) -> int:
        return self.max_i if self.max_i is not None else self.p.table_i

    def sides(self) -> tuple:
        if self.table_file:
            return (_load_supplied(self.table_file).side,)
        if self.side is None:
            return modeq.SIDES
        return (self.side,)


def elide(x, keep: int = 12) -> str:
    """Huge integers become ``head...tail (N digits)``."""
    s = str(x)
    digits = len(s.lstrip("-"))
    if digits <= 2 * keep + 10:
        return s
    sign = "-" if s.startswith("-") else ""
    body = s.lstrip("-")
    return f"{sign}{body[:keep]}...{body[-keep:]} ({digits} digits)"


def _load_supplied(path) -> modeq.ModEqTable:
    # a supplied table is the object under test: parsed, never repaired
    try:
        return modeq.ModEqTable.from_json(json.loads(Path(path).read_text()))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read table {path}: {exc}") from exc


def _table(cfg: RunConfig, side: str, max_i: int | None = None):
    if cfg.table_file:
        return _load_supplied(cfg.table_file)
    return modeq.cached_table(side, max_i if max_i is not None else cfg.table_i(), cfg.cache_dir)


# ---------------------------------------------------------------------------
# Suites: each returns a list of certificates and has no other side effects
# ---------------------------------------------------------------------------


def suite_modeq(cfg: RunConfig) -> list:
    out = []
    tables = {}
    for side in cfg.sides():
        t = _table(cfg, side)
        tables[side] = t
        i_check = min(cfg.p.certify_i, t.max_i)
        out.append(modeq.verify_rows(t, i_check, cfg.prec))
        for i in range(4):
            out.append(modeq.u_gamma_row(t, i, cfg.prec or 300))
    if len(tables) == 2:
        timer = Timer()
        a, b = tables["xi"].coefficient_rows(), tables["zeta"].coefficient_rows()
        first = next((i for i, (x, y) in enumerate(zip(a, b)) if x != y), None)
        witness = None if first is None else {"i": first, "xi": [str(c) for c in a[first]], "zeta": [str(c) for c in b[first]]}
        out.append(certify("modeq-cross-side", {"max_i": cfg.table_i()}, witness, timer))
    return out


def suite_newton(cfg: RunConfig) -> list:
    return [modeq.newton_check(side, cfg.prec or 300) for side in cfg.sides()]


def suite_valuations(cfg: RunConfig) -> list:
    out = []
    for side in cfg.sides():
        t = _table(cfg, side)
        out.append(modeq.valuation_certificate(t, t.max_i))
    return out


GOLDEN_PHI = {
    1: (1, -3, 3),
    2: (1, -9, 36, -81, 135, -162, 81),
    3: (55, -2163, 34509, -330318, 2227338, -11501919, 47744397, -164234952, 477601434,
        -1189266543, 2554873083, -4751141589, 7644778785, -10594276335, 12526595811,
        -12440502369, 10115979435, -6457008150, 3013270470, -903981141, 129140163),
}


def _phi_side(side):
    return {"xi": "phi", "zeta": "psi"}[side]


def suite_phi(cfg: RunConfig) -> list:
    out = []
    M_max = 2 * (cfg.max_m or cfg.p.hats_m) + 1
    seqs = {}
    for side in cfg.sides():
        ps = _phi_side(side)
        seq = engine.build_phi(ps, M_max, _table(cfg, side))
        seqs[ps] = seq
        timer = Timer()
        bad = next((M for M, c in GOLDEN_PHI.items() if seq[M].coeffs != c), None)
        witness = None if bad is None else {"M": bad, "got": [str(c) for c in seq[bad].coeffs]}
        out.append(certify(f"phi-golden-{ps}", {"side": ps}, witness, timer))
        for M in range(1, min(cfg.p.phi_series_M, M_max) + 1):
            out.append(engine.verify_phi_series(seq, M, cfg.prec))
    if len(seqs) == 2:
        timer = Timer()
        M = engine.compare_sequences(seqs["phi"], seqs["psi"])
        witness = None if M is None else {"M": M}
        out.append(certify("phi-psi-mirror", {"M_max": M_max}, witness, timer))
    timer = Timer()
    readings = engine.phi1_readings()
    witness = None if readings["3n"] else {"what": "Phi_1 does not describe ph3(3n)"}
    out.append(certify("phi1-progression", {"prec": 200}, witness, timer, data={"readings": readings}))
    return out


def suite_hats(cfg: RunConfig) -> list:
    m_max = cfg.max_m or cfg.p.hats_m
    side = cfg.sides()[0] if cfg.table_file else (cfg.side or "xi")
    ps = _phi_side(side)
    table = _table(cfg, side)
    seq = engine.build_phi(ps, 2 * m_max + 1, table)
    out = []
    timer = Timer()
    try:
        hats = engine.build_hats(seq, m_max, table)
        report = engine.hat_bound_check(hats)
        out.append(engine.hat_certificate(report, ps, timer))
    except StructuralError as exc:
        out.append(certify(f"hat-bounds-{ps}", {"m_max": m_max}, {"error": str(exc)}, timer))
    timer = Timer()
    bad = next((m for m in range(1, min(m_max, 3)) if not engine.two_path_hat(seq, m, table)), None)
    out.append(certify(f"hat-two-path-{ps}", {"m_max": min(m_max, 3)}, None if bad is None else {"m": bad}, timer))
    return out


def suite_congruence(cfg: RunConfig) -> list:
    families = (cfg.family,) if cfg.family else engine.FAMILIES
    ms = (cfg.m,) if cfg.m is not None else cfg.p.scan_ms
    n_max = cfg.n_max if cfg.n_max is not None else cfg.p.n_max
    out = []
    for family in families:
        series = engine.family_series(family, max(engine.scan_horizon(family, m, n_max) for m in ms))
        for m in ms:
            timer = Timer()
            scan = engine.scan_congruence(family, m, n_max, cfg.modulus_extra, series)
            out.append(scan.certificate(timer))
    if cfg.family is None and cfg.m is None and cfg.modulus_extra == 0:
        timer = Timer()
        readings = engine.quoted_reading_check(min(n_max, 200))
        witness = None if all(readings["ps3"]) else {"what": "ps3 reading of the quoted congruences fails"}
        out.append(certify("quoted-pod-congruences", {"n_max": min(n_max, 200)}, witness, timer, data={"holds": readings}))
    return out


def suite_pod(cfg: RunConfig) -> list:
    return [engine.pod_cross_check(cfg.n_max if cfg.n_max is not None else 500)]


def suite_problem(cfg: RunConfig) -> list:
    return [engine.probe_open_problem(cfg.max_m or cfg.p.probe_m)]


SUITE_FUNCS = {
    "modeq": suite_modeq,
    "newton": suite_newton,
    "valuations": suite_valuations,
    "phi": suite_phi,
    "hats": suite_hats,
    "congruence": suite_congruence,
    "pod": suite_pod,
    "problem": suite_problem,
}


def run_suite(name: str, cfg: RunConfig) -> list:
    return SUITE_FUNCS[name](cfg)


def run_suites(names, cfg: RunConfig) -> list:
    jobs = cfg.jobs if cfg.jobs > 0 else (os.cpu_count() or 1)
    if jobs == 1 or len(names) == 1:
        return [c for name in names for c in run_suite(name, cfg)]
    with ProcessPoolExecutor(max_workers=min(jobs, len(names))) as pool:
        futures = [pool.submit(run_suite, name, cfg) for name in names]
        # collect in suite order regardless of completion order
        return [c for f in futures for c in f.result()]


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def _print_certificates(certs, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps([c.to_json() for c in certs], indent=2, sort_keys=True))
        return
    for c in certs:
        params = " ".join(f"{k}={v}" for k, v in c.params.items())
        print(f"{c.status.upper():5} {c.claim_id} {params} ({c.elapsed_ms} ms)")
        if c.witness:
            print("      witness: " + ", ".join(f"{k}={elide(v)}" for k, v in c.witness.items()))
        interesting = {k: v for k, v in c.data.items() if k != "levels"}
        if interesting:
            print("      " + ", ".join(f"{k}={v}" for k, v in interesting.items()))
    n_pass = sum(c.passed for c in certs)
    print(f"{n_pass}/{len(certs)} claims passed")


def write_certificates(certs, out_dir) -> None:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for k, c in enumerate(certs):
            (out / f"{k:02d}-{c.claim_id}.json").write_text(json.dumps(c.to_json(), indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise UsageError(f"cannot write certificates to {out}: {exc}") from exc


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_expand(args) -> int:
    name = args.func
    if name not in EXPAND_NAMES:
        raise UsageError(f"unknown function {name!r}; choose from {', '.join(EXPAND_NAMES)}")
    if args.terms < 1:
        raise UsageError("--terms must be at least 1")
    real = {"ph3": "F", "ps3": "G"}.get(name, name)
    # delta starts at q^-2: report the first `terms` known coefficients
    s = named_series(real, args.terms + 2)
    start = min(s.valuation, 0)
    pairs = [(n, s.coeff(n)) for n in range(start, start + args.terms)]
    if args.format == "json":
        print(json.dumps({"func": name, "terms": [[n, str(c)] for n, c in pairs]}))
    else:
        for n, c in pairs:
            print(f"{n} {elide(c)}")
    return EXIT_PASS


def _cache_dir(args):
    return args.cache_dir or os.environ.get(CACHE_ENV)


def cmd_table(args) -> int:
    side = args.side_pos or args.side or "xi"
    if side not in modeq.SIDES:
        raise UsageError(f"side must be one of {modeq.SIDES}")
    if args.max_i is None or args.max_i < 3:
        raise UsageError("--max-i must be at least 3 (the recurrence needs three base rows)")
    table = modeq.build_table(side, args.max_i)
    if args.out:
        path = Path(args.out)
    else:
        cache = _cache_dir(args) or Path.home() / ".cache" / "thetacong"
        path = modeq.cache_path(cache, side, args.max_i)
    try:
        modeq.save_table(table, path)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc
    digits = max(len(str(abs(c))) for r in table.rows for c in r.coeffs)
    if args.format == "json":
        print(json.dumps({"side": side, "rows": table.max_i, "max_digits": digits, "path": str(path)}))
    else:
        print(f"{side}: rows 1..{table.max_i} written to {path}; largest coefficient has {digits} digits")
    return EXIT_PASS


def _config(args) -> RunConfig:
    if args.side and args.side not in modeq.SIDES:
        raise UsageError(f"--side must be one of {modeq.SIDES}")
    if args.family and args.family not in engine.FAMILIES:
        raise UsageError(f"--family must be one of {engine.FAMILIES}")
    if args.m is not None and args.m < 1:
        raise UsageError("--m must be at least 1")
    if args.max_i is not None and args.max_i < 3:
        raise UsageError("--max-i must be at least 3")
    if args.max_m is not None and args.max_m < 1:
        raise UsageError("--max-m must be at least 1")
    if args.modulus_extra < 0 or args.jobs < 0:
        raise UsageError("--modulus-extra and --jobs must be nonnegative")
    return RunConfig(
        profile=args.profile,
        prec=args.prec,
        max_i=args.max_i,
        max_m=args.max_m,
        n_max=args.n_max,
        family=args.family,
        side=args.side,
        m=args.m,
        modulus_extra=args.modulus_extra,
        cache_dir=_cache_dir(args),
        jobs=args.jobs,
        table_file=args.table,
    )


def cmd_verify(args) -> int:
    cfg = _config(args)
    names = SUITES if args.suite == "all" else (args.suite,)
    certs = run_suites(names, cfg)
    if args.out:
        write_certificates(certs, args.out)
    _print_certificates(certs, args.format)
    return EXIT_PASS if all(c.passed for c in certs) else EXIT_FAIL


def cmd_certify(args) -> int:
    if not args.out:
        raise UsageError("certify needs --out")
    return cmd_verify(args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thetacong", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("human", "json"), default="human")
        p.add_argument("--cache-dir", default=None, help=f"table cache directory (env {CACHE_ENV})")

    p = sub.add_parser("expand", help="print coefficients of a named series")
    p.add_argument("--func", required=True)
    p.add_argument("--terms", type=int, default=10)
    common(p)
    p.set_defaults(handler=cmd_expand)

    p = sub.add_parser("table", help="build and cache a modular-equation table")
    p.add_argument("side_pos", nargs="?", metavar="side")
    p.add_argument("--side", default=None)
    p.add_argument("--max-i", type=int, default=None)
    p.add_argument("--out", default=None, help="output file (default: the cache)")
    common(p)
    p.set_defaults(handler=cmd_table)

    for name, handler in (("verify", cmd_verify), ("certify", cmd_certify)):
        p = sub.add_parser(name, help="run verification suites" if name == "verify" else "verify and write certificates")
        p.add_argument("suite", choices=SUITES + ("all",))
        p.add_argument("--profile", choices=tuple(PROFILES), default="quick")
        p.add_argument("--prec", type=int, default=None, help="comparison horizon for series checks")
        p.add_argument("--max-i", type=int, default=None)
        p.add_argument("--max-m", type=int, default=None)
        p.add_argument("--n-max", type=int, default=None)
        p.add_argument("--family", default=None)
        p.add_argument("--side", default=None)
        p.add_argument("--m", type=int, default=None)
        p.add_argument("--modulus-extra", type=int, default=0)
        p.add_argument("--out", default=None, help="directory for certificate JSON files")
        p.add_argument("--table", default=None, help="certify this table file instead of building one")
        p.add_argument("--jobs", type=int, default=1, help="worker processes (0 = one per CPU)")
        common(p)
        p.set_defaults(handler=handler)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PrecisionError as exc:
        print(f"precision error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except CertificationError as exc:
        print(f"FAIL {exc}; witness: {exc.witness}", file=sys.stderr)
        return EXIT_FAIL
    except QSeriesError as exc:
        print(f"FAIL {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
