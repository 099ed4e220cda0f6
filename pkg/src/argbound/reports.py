"""Run configuration, report envelopes and their JSON/CSV serialisation."""
from __future__ import annotations

import configparser
import csv
import dataclasses
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .zeta_engine import PRECISION_ENV, ZetaEvalConfig

TOOL = "argbound"


@dataclass(frozen=True)
class RunConfig:
    """Flat settings read from a ``key = value`` file; CLI flags override them."""

    digits: int = 30
    target_tolerance: float = 1e-10
    max_height: float = 10_000.0
    truncation_terms: int = 40_000
    correction_terms: int = 4
    grid: int = 64
    refine: int = 6
    refine_shrink: float = 0.35
    eta_min: float = 0.01
    eta_max: float = 0.5
    r_min: float = 1.0
    r_max: float = 4.0
    step_init: float = 0.05
    workers: int = 1

    def engine(self) -> ZetaEvalConfig:
        return ZetaEvalConfig(
            truncation_terms=self.truncation_terms,
            correction_terms=self.correction_terms,
            target_tolerance=self.target_tolerance,
            max_height=self.max_height,
            digits=self.digits,
        )

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def load_config(path=None, env=None, **overrides) -> RunConfig:
    """Defaults, then the config file, then ``ARGBOUND_PRECISION``, then explicit overrides."""
    env = os.environ if env is None else env
    values: dict = {}
    types = {f.name: f.type for f in dataclasses.fields(RunConfig)}
    if path is not None:
        parser = configparser.ConfigParser()
        with open(path, encoding="utf-8") as fh:
            parser.read_string("[run]\n" + fh.read())
        for key, raw in parser["run"].items():
            if key not in types:
                raise ValueError(f"unknown config key {key!r} in {path}")
            values[key] = _coerce(types[key], raw)
    if PRECISION_ENV in env:
        values["digits"] = int(env[PRECISION_ENV])
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)


def _coerce(type_name, raw: str):
    name = type_name if isinstance(type_name, str) else type_name.__name__
    return int(raw) if name == "int" else float(raw)


def plain(obj):
    """Convert numpy scalars, dataclasses and tuples into JSON-ready builtins."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [plain(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return repr(x)
        return x
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):  # enums
        return obj.value
    return obj


def config_hash(params: dict) -> str:
    blob = json.dumps(plain(params), sort_keys=True).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class ReportEnvelope:
    command: str
    params_echo: dict
    results: dict
    provenance: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        if not self.provenance:
            self.provenance = {"tool": TOOL, "version": __version__,
                               "config_hash": config_hash(self.params_echo)}

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "params_echo": plain(self.params_echo),
            "results": plain(self.results),
            "provenance": plain(self.provenance),
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportEnvelope":
        d = json.loads(text)
        return cls(d["command"], d["params_echo"], d["results"], d["provenance"], d["warnings"])


def _csv_cell(v) -> str:
    v = plain(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv_parse(cell: str):
    if cell in ("true", "false"):
        return cell == "true"
    for conv in (int, float):
        try:
            return conv(cell)
        except ValueError:
            pass
    return cell


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0])
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(row[k]) for k in header])
    return buf.getvalue()


def csv_to_rows(text: str) -> list[dict]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        return []
    return [{k: _csv_parse(v) for k, v in zip(header, line)} for line in reader]
