"""
Suite configuration: YAML files under config/, environment overrides from .env.

A suite file holds run-wide settings and a list of checks:

    seed: 20240101
    workers: 2
    output_path: reports/suite.json
    identities:
      - id: izmoment
        params: {lambda: [1.0, 0.4, -0.7]}
        tolerance: 1.0e-10
"""

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from dotenv import load_dotenv
from loguru import logger

from hyperhs.domain.identities import REGISTRY
from hyperhs.domain.report import DEFAULT_SEED, RunSettings, to_jsonable
from hyperhs.exceptions import ConfigError

SEED_ENV = "HYPERHS_SEED"
DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "config" / "default_suite.yaml"

_TOP_LEVEL_KEYS = {"seed", "samples", "tolerance", "eps", "deltas", "chunk", "workers", "progress",
                   "output_path", "format", "identities"}
_CHECK_KEYS = {"id", "params", "tolerance", "samples", "eps", "deltas", "seed"}


@dataclass
class CheckSpec:
    identity_id: str
    params: Dict[str, Any] = field(default_factory=dict)
    tolerance: Optional[float] = None
    samples: Optional[int] = None
    eps: Optional[float] = None
    deltas: Optional[tuple] = None
    seed: Optional[int] = None

    def settings(self, base: RunSettings) -> RunSettings:
        return base.with_overrides(tolerance=self.tolerance, samples=self.samples, eps=self.eps,
                                   deltas=self.deltas, seed=self.seed)


@dataclass
class SuiteConfig:
    checks: List[CheckSpec] = field(default_factory=list)
    settings: RunSettings = field(default_factory=RunSettings)
    output_path: Optional[str] = None
    format: str = "json"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "settings": to_jsonable(vars(self.settings)),
            "checks": [to_jsonable(vars(spec)) for spec in self.checks],
            "format": self.format,
        }

    @property
    def digest(self) -> str:
        """SHA-256 of the canonical JSON of the validated configuration (output path excluded)."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def env_seed(default: int = DEFAULT_SEED) -> int:
    """Seed from HYPERHS_SEED after load_dotenv(), else the default."""
    load_dotenv()
    raw = os.getenv(SEED_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV} must be an integer, got '{raw}'", field=SEED_ENV)


def _node_lines(node: yaml.Node, path: str = "", lines: Optional[Dict[str, int]] = None) -> Dict[str, int]:
    """Map dotted field paths (identities[2].tolerance) to 1-based source lines."""
    lines = {} if lines is None else lines
    if path:
        lines[path] = node.start_mark.line + 1
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            child = f"{path}.{key_node.value}" if path else str(key_node.value)
            _node_lines(value_node, child, lines)
    elif isinstance(node, yaml.SequenceNode):
        for index, item in enumerate(node.value):
            _node_lines(item, f"{path}[{index}]", lines)
    return lines


class _Validator:
    def __init__(self, lines: Dict[str, int]):
        self.lines = lines

    def fail(self, message: str, path: str):
        raise ConfigError(message, field=path, line=self.lines.get(path))

    def number(self, value: Any, path: str, kind=float, positive: bool = True):
        if value is None:
            return None
        if isinstance(value, bool):
            self.fail(f"expected a number, got {value!r}", path)
        try:
            number = kind(value)
        except (TypeError, ValueError):
            self.fail(f"expected a number, got {value!r}", path)
        if kind is int and float(value) != number:
            self.fail(f"expected an integer, got {value!r}", path)
        if positive and number <= 0:
            self.fail(f"must be positive, got {value!r}", path)
        return number

    def deltas(self, value: Any, path: str):
        if value is None:
            return None
        if not isinstance(value, (list, tuple)) or not value:
            self.fail("expected a non-empty list of damping parameters", path)
        return tuple(self.number(v, f"{path}[{i}]") for i, v in enumerate(value))

    def check(self, entry: Any, path: str) -> CheckSpec:
        if not isinstance(entry, dict):
            self.fail("each identity entry must be a mapping with an 'id'", path)
        unknown = set(entry) - _CHECK_KEYS
        if unknown:
            self.fail(f"unknown keys {sorted(unknown)}", path)
        identity_id = entry.get("id")
        if identity_id not in REGISTRY:
            self.fail(f"unknown identity '{identity_id}'", f"{path}.id")
        params = entry.get("params") or {}
        if not isinstance(params, dict):
            self.fail("params must be a mapping", f"{path}.params")
        return CheckSpec(
            identity_id=identity_id,
            params=params,
            tolerance=self.number(entry.get("tolerance"), f"{path}.tolerance"),
            samples=self.number(entry.get("samples"), f"{path}.samples", int),
            eps=self.number(entry.get("eps"), f"{path}.eps"),
            deltas=self.deltas(entry.get("deltas"), f"{path}.deltas"),
            seed=self.number(entry.get("seed"), f"{path}.seed", int, positive=False),
        )


def parse_config(text: str, source: str = "<string>") -> SuiteConfig:
    """Validate a YAML suite document; ConfigError names the field and line."""
    try:
        raw = yaml.safe_load(text)
        root = yaml.compose(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ConfigError(f"{source}: invalid YAML: {e}", line=mark.line + 1 if mark else None)
    raw = raw or {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{source}: top level must be a mapping")
    v = _Validator(_node_lines(root) if root is not None else {})

    unknown = set(raw) - _TOP_LEVEL_KEYS
    if unknown:
        key = sorted(unknown)[0]
        v.fail(f"unknown key '{key}'", key)

    seed = v.number(raw.get("seed"), "seed", int, positive=False)
    settings = RunSettings(
        seed=env_seed(seed if seed is not None else DEFAULT_SEED),
        samples=v.number(raw.get("samples"), "samples", int),
        tolerance=v.number(raw.get("tolerance"), "tolerance"),
        eps=v.number(raw.get("eps"), "eps"),
        deltas=v.deltas(raw.get("deltas"), "deltas"),
        chunk=v.number(raw.get("chunk", 10_000), "chunk", int),
        workers=v.number(raw.get("workers", 1), "workers", int),
        progress=bool(raw.get("progress", False)),
    )
    fmt = raw.get("format", "json")
    if fmt not in ("json", "csv"):
        v.fail(f"format must be json or csv, got '{fmt}'", "format")

    entries = raw.get("identities") or []
    if not isinstance(entries, list):
        v.fail("identities must be a list", "identities")
    checks = [v.check(entry, f"identities[{i}]") for i, entry in enumerate(entries)]
    return SuiteConfig(checks=checks, settings=settings, output_path=raw.get("output_path"), format=fmt)


def load_config(path: Union[str, Path, None] = None) -> SuiteConfig:
    """Load and validate a suite file (config/default_suite.yaml when no path is given)."""
    config_path = Path(path) if path else DEFAULT_CONFIG_PATH
    if not config_path.exists():
        raise ConfigError(f"Config file not found: {config_path}")
    with open(config_path, "r") as f:
        text = f.read()
    config = parse_config(text, str(config_path))
    logger.info(f"Loaded {len(config.checks)} checks from {config_path} (digest {config.digest[:12]})")
    return config
