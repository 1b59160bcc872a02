"""Suite results and their JSON / CSV renderings."""

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Union

import pandas as pd
from loguru import logger

from hyperhs import __version__
from hyperhs.domain.report import IdentityReport

SCHEMA = "hyperhs.report/1"
CSV_COLUMNS = ["identity_id", "ratio_re", "ratio_im", "stderr", "pass", "runtime_ms"]


@dataclass
class SuiteResult:
    reports: List[IdentityReport] = field(default_factory=list)
    config_digest: str = ""
    tool_version: str = __version__

    @property
    def summary(self) -> Dict[str, int]:
        errored = sum(1 for r in self.reports if r.error is not None)
        passed = sum(1 for r in self.reports if r.passed and r.error is None)
        return {"total": len(self.reports), "passed": passed, "failed": len(self.reports) - passed - errored,
                "errored": errored}

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema": SCHEMA,
            "tool_version": self.tool_version,
            "config_digest": self.config_digest,
            "summary": self.summary,
            "reports": [r.to_dict() for r in self.reports],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SuiteResult":
        return cls(
            reports=[IdentityReport.from_dict(r) for r in data.get("reports", [])],
            config_digest=data.get("config_digest", ""),
            tool_version=data.get("tool_version", __version__),
        )

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {
                "identity_id": r.identity_id,
                "ratio_re": r.ratio.real,
                "ratio_im": r.ratio.imag,
                "stderr": r.stderr,
                "pass": r.passed,
                "runtime_ms": r.runtime_ms,
            }
            for r in self.reports
        ]
        return pd.DataFrame(rows, columns=CSV_COLUMNS)


def emit_report(result: SuiteResult, fmt: str = "json", path: Union[str, Path, None] = None,
                deterministic: bool = False) -> bytes:
    """
    Render a suite result as JSON (complex numbers as [re, im]) or flat CSV.

    runtime_ms is wall-clock, so only deterministic=True (runtime_ms written as 0)
    makes two runs of the same config byte-identical.

    Args:
        result: Suite result to render
        fmt: "json" or "csv"
        path: Optional file to write the rendering to
        deterministic: Zero every runtime_ms before rendering

    Returns:
        The rendered bytes
    """
    if deterministic:
        result = replace(result, reports=[replace(r, runtime_ms=0) for r in result.reports])
    if fmt == "json":
        payload = json.dumps(result.to_dict(), indent=2, sort_keys=False).encode("utf-8")
    elif fmt == "csv":
        payload = result.to_frame().to_csv(index=False).encode("utf-8")
    else:
        logger.warning(f"Unknown report format: {fmt}, using json")
        return emit_report(result, "json", path, deterministic)

    if path is not None:
        out = Path(path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_bytes(payload)
        logger.info(f"Wrote {fmt} report with {len(result.reports)} entries to {out}")
    return payload


def read_report(path: Union[str, Path]) -> SuiteResult:
    with open(path, "r") as f:
        return SuiteResult.from_dict(json.load(f))
