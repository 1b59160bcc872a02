"""Identity reports, per-run settings and the constant-fit-then-ratio helpers."""

import hashlib
import json
import time
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Optional, Tuple

import numpy as np

from hyperhs.domain.quadrature import DampingSchedule, McConfig

DEFAULT_SEED = 20240101


@dataclass
class RunSettings:
    """Knobs shared by every check; None keeps the check's own default."""

    seed: int = DEFAULT_SEED
    samples: Optional[int] = None
    tolerance: Optional[float] = None
    eps: Optional[float] = None
    deltas: Optional[Tuple[float, ...]] = None
    chunk: int = 10_000
    workers: int = 1
    progress: bool = False

    def mc_config(self, default_samples: int, seed_offset: int = 0) -> McConfig:
        return McConfig(
            samples=self.samples or default_samples,
            seed=self.seed + seed_offset,
            chunk=self.chunk,
            workers=self.workers,
            progress=self.progress,
        )

    def schedule(self, default: Tuple[float, ...] = DampingSchedule().deltas) -> DampingSchedule:
        return DampingSchedule(tuple(self.deltas) if self.deltas else tuple(default))

    def tol(self, default: float) -> float:
        return self.tolerance if self.tolerance is not None else default

    def with_overrides(self, **changes) -> "RunSettings":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


@dataclass
class IdentityReport:
    identity_id: str
    params_digest: str
    lhs: complex
    rhs: complex
    const_fit: complex
    ratio: complex
    stderr: float
    tolerance: float
    passed: bool
    seed: int
    runtime_ms: int
    anchor: Dict[str, Any] = field(default_factory=dict)
    details: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "identity_id": self.identity_id,
            "params_digest": self.params_digest,
            "lhs": to_jsonable(self.lhs),
            "rhs": to_jsonable(self.rhs),
            "const_fit": to_jsonable(self.const_fit),
            "ratio": to_jsonable(self.ratio),
            "stderr": float(self.stderr),
            "tolerance": float(self.tolerance),
            "pass": bool(self.passed),
            "seed": int(self.seed),
            "runtime_ms": int(self.runtime_ms),
            "anchor": to_jsonable(self.anchor),
            "details": to_jsonable(self.details),
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "IdentityReport":
        def c(v):
            if isinstance(v, (list, tuple)):
                re, im = (np.nan if x is None else x for x in v)
                return complex(re, im)
            return complex(np.nan if v is None else v)

        return cls(
            identity_id=data["identity_id"],
            params_digest=data["params_digest"],
            lhs=c(data["lhs"]),
            rhs=c(data["rhs"]),
            const_fit=c(data["const_fit"]),
            ratio=c(data["ratio"]),
            stderr=float(data["stderr"]),
            tolerance=float(data["tolerance"]),
            passed=bool(data["pass"]),
            seed=int(data["seed"]),
            runtime_ms=int(data["runtime_ms"]),
            anchor=data.get("anchor", {}),
            details=data.get("details", {}),
            error=data.get("error"),
        )


def _finite_or_none(x) -> Optional[float]:
    x = float(x)
    return x if np.isfinite(x) else None


def to_jsonable(value: Any) -> Any:
    """Complex numbers become [re, im]; numpy containers become lists."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [_finite_or_none(value.real), _finite_or_none(value.imag)]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _finite_or_none(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    return value


def params_digest(params: Dict[str, Any]) -> str:
    canonical = json.dumps(to_jsonable(params), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def composite_pass(ratio: complex, tolerance: float, stderr: float, const_fit: complex, rhs: complex) -> bool:
    """|ratio - 1| < tolerance + 3 stderr / |const_fit rhs|."""
    scale = abs(const_fit * rhs)
    band = 3.0 * stderr / scale if scale > 0 else 0.0
    return bool(np.isfinite(abs(ratio)) and abs(ratio - 1.0) < tolerance + band)


def ratio_stderr(lhs: complex, lhs_err: float, anchor_lhs: complex, anchor_err: float,
                 const_fit: complex, rhs: complex) -> float:
    """Propagate the errors of a value and of its anchor into stderr on the const_fit * rhs scale."""
    rel = np.hypot(lhs_err / abs(lhs) if lhs else 0.0, anchor_err / abs(anchor_lhs) if anchor_lhs else 0.0)
    return float(rel * abs(lhs))


class Stopwatch:
    def __init__(self):
        self.started = time.perf_counter()

    @property
    def elapsed_ms(self) -> int:
        return int(round(1000.0 * (time.perf_counter() - self.started)))


def build_report(identity_id: str, params: Dict[str, Any], lhs: complex, rhs: complex, const_fit: complex,
                 tolerance: float, settings: RunSettings, stopwatch: Stopwatch, stderr: float = 0.0,
                 anchor: Optional[Dict[str, Any]] = None, details: Optional[Dict[str, Any]] = None,
                 passed: Optional[bool] = None, ratio: Optional[complex] = None) -> IdentityReport:
    """Assemble a report; ratio = lhs / (const_fit rhs) and the composite pass rule unless given."""
    if ratio is None:
        denom = const_fit * rhs
        ratio = complex(lhs / denom) if denom != 0 else complex(np.nan, np.nan)
    if passed is None:
        passed = composite_pass(ratio, tolerance, stderr, const_fit, rhs)
    return IdentityReport(
        identity_id=identity_id,
        params_digest=params_digest(params),
        lhs=complex(lhs),
        rhs=complex(rhs),
        const_fit=complex(const_fit),
        ratio=complex(ratio),
        stderr=float(stderr),
        tolerance=float(tolerance),
        passed=bool(passed),
        seed=int(settings.seed),
        runtime_ms=stopwatch.elapsed_ms,
        anchor=anchor or {},
        details=details or {},
    )


def errored_report(identity_id: str, params: Dict[str, Any], settings: RunSettings, message: str,
                   runtime_ms: int = 0) -> IdentityReport:
    nan = complex(np.nan, np.nan)
    return IdentityReport(
        identity_id=identity_id,
        params_digest=params_digest(params),
        lhs=nan, rhs=nan, const_fit=nan, ratio=nan,
        stderr=0.0, tolerance=0.0, passed=False,
        seed=int(settings.seed), runtime_ms=runtime_ms, error=message,
    )
