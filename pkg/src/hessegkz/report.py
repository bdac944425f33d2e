"""Verification reports shared by the module checks and the command line."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from typing import Callable

STATUSES = ("pass", "fail", "flagged")


@dataclass(frozen=True)
class VerificationReport:
    check: str
    status: str
    residual: float
    tolerance: float
    note: str = ""
    runtime: float = 0.0

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}")
        if self.status != "flagged" and (self.status == "pass") != _within(self.residual, self.tolerance):
            raise ValueError(f"{self.check}: status {self.status} contradicts residual {self.residual} vs {self.tolerance}")

    @property
    def ok(self) -> bool:
        return self.status != "fail"

    def as_dict(self, timings: bool = False) -> dict:
        d = asdict(self)
        d["residual"] = _json_float(self.residual)
        d["tolerance"] = _json_float(self.tolerance)
        if not timings:
            d.pop("runtime")
        return d


def _within(residual: float, tolerance: float) -> bool:
    return not math.isnan(residual) and residual <= tolerance


def _json_float(x: float):
    if math.isnan(x) or math.isinf(x):
        return str(x)
    return float(f"{x:.6e}")


def judge(check: str, residual: float, tolerance: float, note: str = "", runtime: float = 0.0) -> VerificationReport:
    """pass or fail from the residual alone."""
    residual = float(residual)
    status = "pass" if _within(residual, tolerance) else "fail"
    return VerificationReport(check, status, residual, tolerance, note, runtime)


def flagged(check: str, residual: float, tolerance: float, note: str, runtime: float = 0.0) -> VerificationReport:
    return VerificationReport(check, "flagged", float(residual), tolerance, note, runtime)


def timed(fn: Callable[[], VerificationReport]) -> VerificationReport:
    """Run ``fn`` and stamp the wall time on its report."""
    t0 = time.perf_counter()
    r = fn()
    return VerificationReport(r.check, r.status, r.residual, r.tolerance, r.note, time.perf_counter() - t0)
