"""Machine-readable verdicts for single finite-order claims."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import time
from dataclasses import dataclass, field

from . import __version__
from .errors import CertificationError

STATUSES = ("pass", "fail", "error")

SERIES_HORIZON_NOTE = (
    "finite-order check: coefficients compared below q^{horizon} only; "
    "agreement to a finite order is evidence, not a proof"
)


def _jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        # integers become decimal strings so no consumer overflows
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return str(x)


@dataclass
class Certificate:
    claim_id: str
    params: dict
    status: str
    witness: dict | None = None
    horizon_note: str = ""
    data: dict = field(default_factory=dict)
    tool_version: str = __version__
    timestamp: str = ""
    elapsed_ms: int = 0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"bad status {self.status!r}")
        if self.status == "fail" and not self.witness:
            raise ValueError("a failing certificate needs a witness")
        if not self.timestamp:
            self.timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def raise_for_status(self) -> "Certificate":
        if self.status != "pass":
            raise CertificationError(f"{self.claim_id}: {self.status}", self.witness)
        return self

    def to_json(self, canonical: bool = False) -> dict:
        out = {
            "claim_id": self.claim_id,
            "params": _jsonable(self.params),
            "status": self.status,
            "witness": _jsonable(self.witness),
            "horizon_note": self.horizon_note,
            "data": _jsonable(self.data),
            "tool_version": self.tool_version,
        }
        if not canonical:
            out["timestamp"] = self.timestamp
            out["elapsed_ms"] = self.elapsed_ms
        return out

    def canonical_bytes(self) -> bytes:
        return json.dumps(self.to_json(canonical=True), sort_keys=True, separators=(",", ":")).encode()

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_bytes()).hexdigest()

    @classmethod
    def from_json(cls, d: dict) -> "Certificate":
        return cls(
            claim_id=d["claim_id"],
            params=d.get("params", {}),
            status=d["status"],
            witness=d.get("witness"),
            horizon_note=d.get("horizon_note", ""),
            data=d.get("data", {}),
            tool_version=d.get("tool_version", __version__),
            timestamp=d.get("timestamp", ""),
            elapsed_ms=int(d.get("elapsed_ms", 0)),
        )


class Timer:
    def __init__(self):
        self.t0 = time.perf_counter()

    def ms(self) -> int:
        return int((time.perf_counter() - self.t0) * 1000)


def certify(claim_id, params, witness, timer, horizon_note="", data=None) -> Certificate:
    """Pass when ``witness`` is None, fail otherwise."""
    return Certificate(
        claim_id=claim_id,
        params=params,
        status="pass" if witness is None else "fail",
        witness=witness,
        horizon_note=horizon_note,
        data=data or {},
        elapsed_ms=timer.ms(),
    )


def series_witness(label, n, left, right) -> dict:
    return {"what": label, "exponent": n, "left": str(left), "right": str(right)}
